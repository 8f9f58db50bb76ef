#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polyurn/asymptotics.hpp"
#include "polyurn/catalog.hpp"
#include "polyurn/config.hpp"
#include "polyurn/drift.hpp"
#include "polyurn/errors.hpp"
#include "polyurn/montecarlo.hpp"
#include "polyurn/report.hpp"
#include "polyurn/tenability.hpp"

namespace py = pybind11;
using namespace polyurn;

namespace {

UrnState state_from_counts(const std::vector<std::int64_t>& counts) { return make_state(counts); }

EnsembleResult run_ensemble_py(const ReplacementRule& rule, const std::vector<std::int64_t>& initial,
                               SamplingMode mode, std::int64_t n_steps, int n_reps, std::uint64_t seed,
                               std::vector<std::int64_t> checkpoints, int threads) {
    EnsembleConfig config{rule, make_state(initial), mode, n_steps, n_reps, seed, std::move(checkpoints)};
    return run_ensemble(config, threads);
}

py::array_t<double> terminals_py(const EnsembleResult& result) {
    const int d = result.dim();
    py::array_t<double> out({result.n_reps(), d});
    auto view = out.mutable_unchecked<2>();
    const std::size_t last = result.checkpoints().size() - 1;
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        const double* raw = result.composition_raw(rep, last);
        for (int i = 0; i < d; ++i) view(rep, i) = raw[i];
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-drawing Polya urns: drift analysis, CLT parameters, and reproducible ensembles";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<TenabilityViolation>(m, "TenabilityViolationError", PyExc_RuntimeError);

    py::enum_<SamplingMode>(m, "SamplingMode")
        .value("WITH_REPLACEMENT", SamplingMode::WithReplacement)
        .value("WITHOUT_REPLACEMENT", SamplingMode::WithoutReplacement);

    py::enum_<Stability>(m, "Stability")
        .value("STABLE", Stability::Stable)
        .value("UNSTABLE", Stability::Unstable)
        .value("DEGENERATE", Stability::Degenerate);

    py::enum_<Regime>(m, "Regime")
        .value("GAUSSIAN_SQRT_N", Regime::GaussianSqrtN)
        .value("GAUSSIAN_SQRT_N_OVER_LOG_N", Regime::GaussianSqrtNOverLogN)
        .value("ALMOST_SURE_POWER", Regime::AlmostSurePower)
        .value("DEGENERATE", Regime::Degenerate);

    py::enum_<LyapunovVerdict>(m, "LyapunovVerdict")
        .value("CONVERGENCE_CERTIFIED", LyapunovVerdict::ConvergenceCertified)
        .value("INCONCLUSIVE", LyapunovVerdict::Inconclusive);

    py::class_<SimplexPoint>(m, "SimplexPoint")
        .def(py::init<std::vector<double>>())
        .def_property_readonly("coords", &SimplexPoint::coords)
        .def("__len__", &SimplexPoint::dim)
        .def("__getitem__", [](const SimplexPoint& p, int i) { return p[i]; })
        .def("__repr__", [](const SimplexPoint& p) {
            std::string s = "SimplexPoint([";
            for (int i = 0; i < p.dim(); ++i) s += (i ? ", " : "") + std::to_string(p[i]);
            return s + "])";
        });
    py::implicitly_convertible<py::list, SimplexPoint>();
    py::implicitly_convertible<py::tuple, SimplexPoint>();

    py::class_<UrnState>(m, "UrnState")
        .def_readonly("counts", &UrnState::counts)
        .def_readonly("total", &UrnState::total)
        .def_readonly("step", &UrnState::step);
    m.def("make_state", &state_from_counts, py::arg("counts"));

    py::class_<ReplacementRule>(m, "ReplacementRule")
        .def(py::init<int, int, std::vector<std::vector<std::int64_t>>>(), py::arg("colours"), py::arg("draws"),
             py::arg("rows"), "rows follow the canonical (lexicographic descending) composition order")
        .def_property_readonly("colours", &ReplacementRule::colours)
        .def_property_readonly("draws", &ReplacementRule::draws)
        .def_property_readonly("compositions", [](const ReplacementRule& r) { return r.compositions(); })
        .def_property_readonly("additions", [](const ReplacementRule& r) {
            std::vector<std::vector<std::int64_t>> rows;
            for (std::size_t i = 0; i < r.size(); ++i) rows.push_back(r.addition(i));
            return rows;
        });

    m.def("enumerate_compositions", &enumerate_compositions, py::arg("d"), py::arg("m"));
    m.def("check_balance", [](const ReplacementRule& r) { return check_balance(r); });
    m.def("check_diagonal", [](const ReplacementRule& r) { return check_diagonal(r); });

    py::class_<ColourTenability>(m, "ColourTenability")
        .def_readonly("colour", &ColourTenability::colour)
        .def_readonly("nu", &ColourTenability::nu)
        .def_readonly("ok", &ColourTenability::ok)
        .def_readonly("violation", &ColourTenability::violation);
    py::class_<TenabilityReport>(m, "TenabilityReport")
        .def_readonly("tenable", &TenabilityReport::tenable)
        .def_readonly("colours", &TenabilityReport::colours)
        .def("first_violation", &TenabilityReport::first_violation);
    m.def(
        "check_tenability",
        [](const ReplacementRule& rule, const std::vector<std::int64_t>& counts, SamplingMode mode) {
            return check_tenability(rule, make_state(counts), mode);
        },
        py::arg("rule"), py::arg("initial_counts"), py::arg("mode"));

    m.def(
        "draw_probability",
        [](const std::vector<std::int64_t>& counts, const DrawVector& v, SamplingMode mode) {
            return draw_probability(make_state(counts), v, mode);
        },
        py::arg("counts"), py::arg("draw"), py::arg("mode"));
    m.def(
        "draw_probabilities",
        [](const ReplacementRule& rule, const std::vector<std::int64_t>& counts, SamplingMode mode) {
            std::vector<double> probs(rule.size());
            draw_distribution(make_state(counts), rule, mode, probs);
            return probs;
        },
        py::arg("rule"), py::arg("counts"), py::arg("mode"));

    m.def("drift_h", &drift_h, py::arg("rule"), py::arg("x"));
    m.def("drift_g", &drift_g, py::arg("rule"), py::arg("x"));
    m.def("drift_gtilde", &drift_gtilde, py::arg("rule"), py::arg("x"));
    m.def("jacobian_h", &jacobian_h, py::arg("rule"), py::arg("x"));

    py::class_<ZeroReport>(m, "ZeroReport")
        .def_readonly("location", &ZeroReport::location)
        .def_readonly("tangent_eigenvalues", &ZeroReport::tangent_eigenvalues)
        .def_readonly("stability", &ZeroReport::stability)
        .def_readonly("residual", &ZeroReport::residual);
    py::class_<ZeroSearchResult>(m, "ZeroSearchResult")
        .def_readonly("zeros", &ZeroSearchResult::zeros)
        .def_readonly("search_warning", &ZeroSearchResult::search_warning);
    m.def("find_zeros", &find_zeros, py::arg("rule"), py::arg("grid_resolution") = 20);

    py::class_<LyapunovCertificate>(m, "LyapunovCertificate")
        .def_readonly("verdict", &LyapunovCertificate::verdict)
        .def_readonly("nonnegative_points", &LyapunovCertificate::nonnegative_points);
    m.def("lyapunov_test", &lyapunov_test, py::arg("rule"), py::arg("theta"), py::arg("grid_resolution") = 40);

    py::class_<FlowTrajectory>(m, "FlowTrajectory")
        .def_readonly("times", &FlowTrajectory::times)
        .def_readonly("points", &FlowTrajectory::points)
        .def_property_readonly("terminal", [](const FlowTrajectory& t) { return t.terminal(); });
    m.def("flow_integrate", &flow_integrate, py::arg("rule"), py::arg("x0"), py::arg("horizon"),
          py::arg("step_size") = 1e-2);

    py::class_<CltReport>(m, "CltReport")
        .def_readonly("theta", &CltReport::theta)
        .def_readonly("S", &CltReport::balance)
        .def_readonly("Lambda", &CltReport::lambda)
        .def_readonly("regime", &CltReport::regime)
        .def_readonly("Gamma", &CltReport::gamma)
        .def_readonly("Sigma", &CltReport::sigma)
        .def_readonly("power_exponent", &CltReport::power_exponent);
    py::class_<TwoColourCltReport>(m, "TwoColourCltReport")
        .def_readonly("theta", &TwoColourCltReport::theta)
        .def_readonly("Lambda", &TwoColourCltReport::lambda)
        .def_readonly("Gamma", &TwoColourCltReport::gamma)
        .def_readonly("regime", &TwoColourCltReport::regime)
        .def_readonly("limit_variance", &TwoColourCltReport::limit_variance)
        .def_readonly("power_exponent", &TwoColourCltReport::power_exponent);
    py::class_<NonBalancedReport>(m, "NonBalancedReport")
        .def_readonly("theta", &NonBalancedReport::theta)
        .def_readonly("omega", &NonBalancedReport::omega)
        .def_readonly("lambda_", &NonBalancedReport::lambda)
        .def_readonly("sigma2", &NonBalancedReport::sigma2)
        .def_readonly("clt_variance", &NonBalancedReport::clt_variance);

    m.def("gamma_matrix", &gamma_matrix, py::arg("rule"), py::arg("theta"));
    m.def("sigma_matrix", &sigma_matrix, py::arg("rule"), py::arg("theta"));
    m.def("classify_regime", &classify_regime, py::arg("rule"), py::arg("theta"));
    m.def("two_colour_clt", &two_colour_clt, py::arg("rule"));
    m.def("non_balanced_params", &non_balanced_params, py::arg("rule"), py::arg("theta"));

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_property_readonly("checkpoints", &EnsembleResult::checkpoints)
        .def_property_readonly("n_reps", &EnsembleResult::n_reps)
        .def_property_readonly("n_ok", &EnsembleResult::n_ok)
        .def("terminal", &EnsembleResult::terminal, py::arg("rep"))
        .def("terminals", &terminals_py, "terminal compositions as an (n_reps, d) array; NaN rows failed")
        .def("composition", &EnsembleResult::composition, py::arg("rep"), py::arg("checkpoint_index"))
        .def("total_over_n", &EnsembleResult::total_over_n, py::arg("rep"), py::arg("checkpoint_index"))
        .def("mean_composition",
             [](const EnsembleResult& r) { return r.summaries().back().mean_composition; })
        .def("composition_covariance",
             [](const EnsembleResult& r) { return r.summaries().back().composition_covariance; })
        .def("mean_total_over_n", [](const EnsembleResult& r) { return r.summaries().back().mean_total_over_n; });
    m.def("run_ensemble", &run_ensemble_py, py::arg("rule"), py::arg("initial_counts"), py::arg("mode"),
          py::arg("n_steps"), py::arg("n_reps"), py::arg("seed"),
          py::arg("checkpoints") = std::vector<std::int64_t>{}, py::arg("threads") = 0);

    py::class_<LimitEstimate>(m, "LimitEstimate")
        .def_readonly("frequencies", &LimitEstimate::frequencies)
        .def_readonly("assigned_counts", &LimitEstimate::assigned_counts)
        .def_readonly("unassigned_fraction", &LimitEstimate::unassigned_fraction)
        .def_readonly("n_ok", &LimitEstimate::n_ok);
    m.def("estimate_limits", &estimate_limits, py::arg("result"), py::arg("candidates"), py::arg("radius") = 0.05);

    m.def("catalogue_names", [] {
        std::vector<std::string> names;
        for (const auto& e : catalogue_entries()) names.push_back(e.name);
        return names;
    });
    m.def("catalogue_description", [](const std::string& name) {
        for (const auto& e : catalogue_entries())
            if (e.name == name) return e.description;
        throw ConfigError("unknown catalogue example '" + name + "'");
    });
    m.def(
        "catalogue_rule",
        [](const std::string& name) {
            const auto config = catalogue_config(name);
            return py::make_tuple(config.rule(), config.initial_counts);
        },
        "returns (rule, initial_counts) for a catalogue example");
    m.def("catalogue_config_text", [](const std::string& name) { return serialize_config(catalogue_config(name)); });
}
