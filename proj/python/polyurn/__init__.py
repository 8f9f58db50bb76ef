"""Multi-drawing Polya urns: drift analysis, CLT parameters, reproducible ensembles."""

from ._core import (  # noqa: F401
    CltReport,
    ColourTenability,
    ConfigError,
    EnsembleResult,
    FlowTrajectory,
    LimitEstimate,
    LyapunovCertificate,
    LyapunovVerdict,
    NonBalancedReport,
    Regime,
    ReplacementRule,
    SamplingMode,
    SimplexPoint,
    Stability,
    TenabilityReport,
    TenabilityViolationError,
    TwoColourCltReport,
    UrnState,
    ZeroReport,
    ZeroSearchResult,
    catalogue_config_text,
    catalogue_description,
    catalogue_names,
    catalogue_rule,
    check_balance,
    check_diagonal,
    check_tenability,
    classify_regime,
    draw_probabilities,
    draw_probability,
    drift_g,
    drift_gtilde,
    drift_h,
    enumerate_compositions,
    estimate_limits,
    find_zeros,
    flow_integrate,
    gamma_matrix,
    jacobian_h,
    lyapunov_test,
    make_state,
    non_balanced_params,
    run_ensemble,
    sigma_matrix,
    two_colour_clt,
)

__version__ = "0.1.0"
