#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polyurn/asymptotics.hpp"
#include "polyurn/rule.hpp"
#include "polyurn/simplex.hpp"
#include "polyurn/urn.hpp"

namespace polyurn {

struct EnsembleConfig {
    ReplacementRule rule;
    UrnState initial;
    SamplingMode mode = SamplingMode::WithReplacement;
    std::int64_t n_steps = 0;
    int n_reps = 0;
    std::uint64_t seed = 0;
    /// Strictly increasing step indices in [1, n_steps]; the final entry must
    /// be n_steps itself (terminal snapshot).
    std::vector<std::int64_t> checkpoints;
};

/// Geometric grid {floor(n/2^k)} down to n/512, plus n itself, ascending.
std::vector<std::int64_t> default_checkpoints(std::int64_t n_steps);

enum class RepOutcome : std::uint8_t {
    Ok,
    TenabilityViolation, // a sampled addition drove a count negative
    Stuck,               // the urn could no longer supply an m-ball draw
    Overflow,            // 64-bit count overflow
};

struct CheckpointSummary {
    std::int64_t n = 0;
    Eigen::VectorXd mean_composition;
    Eigen::MatrixXd composition_covariance;
    double mean_total_over_n = 0.0;
    double var_total_over_n = 0.0;
};

/// Snapshot store for one ensemble: per-replication compositions and totals
/// at every checkpoint (streaming simulation, nothing else retained), plus
/// deterministic cross-replication summaries.
class EnsembleResult {
public:
    EnsembleResult(EnsembleConfig config, int d);

    const EnsembleConfig& config() const noexcept { return config_; }
    const std::vector<std::int64_t>& checkpoints() const noexcept { return config_.checkpoints; }
    int n_reps() const noexcept { return config_.n_reps; }
    int n_ok() const noexcept { return n_ok_; }
    int dim() const noexcept { return d_; }

    RepOutcome outcome(int rep) const { return outcomes_[static_cast<std::size_t>(rep)]; }

    /// Composition at checkpoint slot `cp` (NaN-filled past a failure).
    const double* composition_raw(int rep, std::size_t cp) const;
    SimplexPoint composition(int rep, std::size_t cp) const;
    double total_over_n(int rep, std::size_t cp) const;

    SimplexPoint terminal(int rep) const { return composition(rep, checkpoints().size() - 1); }

    const std::vector<CheckpointSummary>& summaries() const noexcept { return summaries_; }

    // Filled by run_ensemble.
    std::vector<RepOutcome> outcomes_;
    std::vector<double> compositions_;  // [rep][checkpoint][colour]
    std::vector<double> totals_over_n_; // [rep][checkpoint]

    void finalize_summaries();

private:
    EnsembleConfig config_;
    int d_;
    int n_ok_ = 0;
    std::vector<CheckpointSummary> summaries_;
};

/// Runs n_reps independent trajectories on a worker pool. Replication r
/// always uses RngStream(seed, r), and results are reduced in replication
/// order, so output is bit-identical for any thread count. n_threads == 0
/// uses the hardware concurrency.
EnsembleResult run_ensemble(const EnsembleConfig& config, int n_threads = 0);

struct LimitEstimate {
    std::vector<SimplexPoint> candidates;
    std::vector<int> assigned_counts;
    std::vector<double> frequencies;
    double unassigned_fraction = 0.0;
    int n_ok = 0;
};

/// Assigns each terminal composition to the nearest candidate within
/// `radius`. Candidates must be pairwise separated by more than 2*radius.
LimitEstimate estimate_limits(const EnsembleResult& result, const std::vector<SimplexPoint>& candidates,
                              double radius = 0.05);

enum class CltScaling { SqrtN, SqrtNOverLogN };

struct CltComparison {
    Eigen::MatrixXd empirical;
    Eigen::MatrixXd predicted;
    double max_abs_deviation = 0.0;
    /// max over entries of |emp - pred| / max(floor, |pred|).
    double max_rel_deviation = 0.0;
    CltScaling scaling = CltScaling::SqrtN;
    int n_assigned = 0;
};

/// Empirical covariance of c_n (Z_n - theta) over replications whose
/// terminal composition lies within assignment_radius of theta, against the
/// predicted matrix. Throws if fewer than 100 replications qualify.
CltComparison clt_check(const EnsembleResult& result, const SimplexPoint& theta,
                        const Eigen::MatrixXd& predicted, CltScaling scaling,
                        double assignment_radius = 0.05, double rel_floor = 0.005);

/// Convenience overload: sqrt(n) regime compares against report.sigma; the
/// log regime has a matrix prediction only for two colours (Gamma itself).
CltComparison clt_check(const EnsembleResult& result, const SimplexPoint& theta, const CltReport& report,
                        double assignment_radius = 0.05, double rel_floor = 0.005);

struct RateDiagnostic {
    double median_last_range = 0.0; // median diameter of the last three scaled deviations
    double median_magnitude = 0.0;  // median norm of the final scaled deviation
    double ratio = 0.0;
    double threshold = 0.2;
    bool stabilized = false;
};

/// Almost-sure-rate stabilization diagnostic: v_k = n_k^exponent (Z_{n_k} -
/// theta) at geometric checkpoints; small per-replication range of the last
/// three v_k (relative to their size) indicates stabilization.
RateDiagnostic as_rate_check(const EnsembleResult& result, const SimplexPoint& theta, double exponent,
                             double threshold = 0.2);

struct GrowthCheck {
    double empirical_mean = 0.0; // mean of T_n/n at the final checkpoint
    double omega = 0.0;
    double abs_deviation = 0.0;
};

GrowthCheck total_growth_check(const EnsembleResult& result, double omega);

/// Median over replications of the trajectory diameter across checkpoints in
/// the last decade [n/10, n]; large values flag non-convergence.
double nonconvergence_range_median(const EnsembleResult& result);

/// Median over replications of ||Z at last checkpoint - Z at previous
/// checkpoint||; small values support the diagonal-case a.s. convergence.
double final_difference_median(const EnsembleResult& result);

/// Least-squares slope of log median ||Z - theta|| against log n over the
/// checkpoints; exploratory output for degenerate zeros.
double empirical_decay_exponent(const EnsembleResult& result, const SimplexPoint& theta);

} // namespace polyurn
