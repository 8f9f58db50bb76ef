#include "polyurn/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "polyurn/csv.hpp"
#include "polyurn/errors.hpp"

namespace polyurn {

namespace {

std::string format_point(const SimplexPoint& p) {
    std::string out;
    for (int i = 0; i < p.dim(); ++i) {
        if (i) out += ",";
        out += format_double(p[i]);
    }
    return out;
}

std::string format_complex(const std::complex<double>& z) {
    std::string out = format_double(z.real());
    if (z.imag() != 0.0) {
        out += (z.imag() > 0 ? "+" : "") + format_double(z.imag()) + "i";
    }
    return out;
}

std::string format_matrix_row_major(const Eigen::MatrixXd& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i || j) out += ",";
            out += format_double(m(i, j));
        }
    }
    return out;
}

/// Documented CLT tolerance: 15% relative at the reference 10^4
/// replications, widened by the Monte Carlo standard error for smaller runs.
double clt_rel_tolerance(int n_reps) {
    if (n_reps >= 5000) return 0.15;
    return 0.15 + 4.0 * std::sqrt(2.0 / static_cast<double>(n_reps));
}

/// In the critical regime the scaled variance approaches its limit only at
/// rate 1/log n (the running integral divides by log n), so the empirical
/// value carries an O(1/log n) excess at any feasible horizon. The check
/// keeps enough power to catch a wrong scaling exponent (off by ~log n) or
/// a wrong limit value while allowing for that excess.
double log_regime_rel_tolerance(int n_reps, std::int64_t n_steps) {
    return clt_rel_tolerance(n_reps) + 12.0 / std::log(static_cast<double>(n_steps));
}

void add_row(VerifyReport& report, VerifyRow row) {
    if (row.verdict == Verdict::Fail) report.all_passed = false;
    report.rows.push_back(std::move(row));
}

/// Candidate limits for the Monte Carlo comparison: stable zeros, plus
/// degenerate zeros whose critical eigenvalues are real (a zero with purely
/// imaginary eigenvalues is a linear centre and trajectories cycle instead
/// of settling there).
bool plausible_attractor(const ZeroReport& zero) {
    if (zero.stability == Stability::Stable) return true;
    if (zero.stability != Stability::Degenerate) return false;
    for (const auto& ev : zero.tangent_eigenvalues) {
        if (ev.real() > 1e-9) return false;
        if (std::abs(ev.real()) <= 1e-9 && std::abs(ev.imag()) > 1e-9) return false;
    }
    return true;
}

} // namespace

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skip: return "skip";
    case Verdict::Info: return "info";
    }
    return "?";
}

AnalysisReport analyze(const ExperimentConfig& config) {
    const ReplacementRule rule = config.rule();
    const UrnState initial = config.initial_state();

    AnalysisReport report;
    report.tenability = check_tenability(rule, initial, config.mode);
    report.balance = check_balance(rule);
    report.diagonal = check_diagonal(rule);
    if (report.diagonal) return report; // h vanishes identically; no isolated zeros

    auto search = find_zeros(rule, config.grid_resolution);
    report.zero_search_warning = search.search_warning;

    std::vector<TwoColourCltReport> scalar_reports;
    if (rule.colours() == 2 && report.balance) scalar_reports = two_colour_clt(rule);

    for (auto& zero : search.zeros) {
        ZeroAnalysis za(zero);
        if (zero.stability == Stability::Stable) {
            za.lyapunov = lyapunov_test(rule, zero.location, 2 * config.grid_resolution);
        }
        if (zero.stability != Stability::Unstable) {
            if (report.balance) {
                za.clt = classify_regime(rule, zero.location);
                for (const auto& scalar : scalar_reports) {
                    if (std::abs(scalar.theta - zero.location[0]) <= 1e-8) za.two_colour = scalar;
                }
            } else if (rule.colours() == 2) {
                try {
                    za.non_balanced = non_balanced_params(rule, zero.location[0]);
                } catch (const std::invalid_argument&) {
                    // growth assumption unverified; reported as absent
                }
            }
        }
        report.zeros.push_back(std::move(za));
    }
    return report;
}

std::string render_analysis(const AnalysisReport& report, const ExperimentConfig& config) {
    std::ostringstream os;
    os << "[tenability]\n";
    os << "tenable = " << (report.tenability.tenable ? "true" : "false") << "\n";
    for (const auto& colour : report.tenability.colours) {
        os << "nu." << colour.colour + 1 << " = " << colour.nu << "\n";
        if (!colour.ok) os << "violation." << colour.colour + 1 << " = " << colour.violation << "\n";
    }

    os << "\n[structure]\n";
    os << "colours = " << config.colours << "\n";
    os << "draws = " << config.draws << "\n";
    os << "balanced = " << (report.balance ? "true" : "false") << "\n";
    if (report.balance) os << "S = " << *report.balance << "\n";
    os << "diagonal = " << (report.diagonal ? "true" : "false") << "\n";
    if (report.diagonal) {
        os << "sigma = " << *report.diagonal << "\n";
        os << "note = h == 0 identically; the composition converges almost surely to a random limit"
              " (diagonal case)\n";
        return os.str();
    }

    os << "\n[zeros]\n";
    os << "count = " << report.zeros.size() << "\n";
    if (report.zero_search_warning) os << "warning = no Newton start converged\n";

    for (std::size_t i = 0; i < report.zeros.size(); ++i) {
        const ZeroAnalysis& za = report.zeros[i];
        os << "\n[zero." << i + 1 << "]\n";
        os << "location = " << format_point(za.zero.location) << "\n";
        os << "stability = " << to_string(za.zero.stability) << "\n";
        os << "residual = " << format_double(za.zero.residual) << "\n";
        os << "eigenvalues = ";
        for (std::size_t e = 0; e < za.zero.tangent_eigenvalues.size(); ++e) {
            os << (e ? ";" : "") << format_complex(za.zero.tangent_eigenvalues[e]);
        }
        os << "\n";
        if (za.lyapunov) {
            os << "lyapunov = "
               << (za.lyapunov->verdict == LyapunovVerdict::ConvergenceCertified ? "convergence_certified"
                                                                                 : "inconclusive")
               << "\n";
            os << "lyapunov.nonnegative_grid_points = " << za.lyapunov->nonnegative_points.size() << "\n";
        }
        if (za.clt) {
            os << "\n[zero." << i + 1 << ".clt]\n";
            os << "S = " << za.clt->balance << "\n";
            os << "Lambda = " << format_complex(za.clt->lambda) << "\n";
            os << "regime = " << to_string(za.clt->regime) << "\n";
            os << "Gamma = " << format_matrix_row_major(za.clt->gamma) << "\n";
            if (za.clt->sigma) os << "Sigma = " << format_matrix_row_major(*za.clt->sigma) << "\n";
            if (za.clt->power_exponent) os << "power_exponent = " << format_double(*za.clt->power_exponent) << "\n";
        }
        if (za.two_colour) {
            os << "\n[zero." << i + 1 << ".two_colour]\n";
            os << "theta = " << format_double(za.two_colour->theta) << "\n";
            os << "Lambda = " << format_double(za.two_colour->lambda) << "\n";
            os << "Gamma = " << format_double(za.two_colour->gamma) << "\n";
            os << "regime = " << to_string(za.two_colour->regime) << "\n";
            if (za.two_colour->limit_variance)
                os << "limit_variance = " << format_double(*za.two_colour->limit_variance) << "\n";
            if (za.two_colour->power_exponent)
                os << "power_exponent = " << format_double(*za.two_colour->power_exponent) << "\n";
        }
        if (za.non_balanced) {
            os << "\n[zero." << i + 1 << ".non_balanced]\n";
            os << "theta = " << format_double(za.non_balanced->theta) << "\n";
            os << "omega = " << format_double(za.non_balanced->omega) << "\n";
            os << "lambda = " << format_double(za.non_balanced->lambda) << "\n";
            os << "sigma2 = " << format_double(za.non_balanced->sigma2) << "\n";
            if (za.non_balanced->clt_variance)
                os << "clt_variance = " << format_double(*za.non_balanced->clt_variance) << "\n";
        }
    }
    return os.str();
}

void write_analysis_csv(const AnalysisReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    if (report.diagonal) return;

    int d = 0;
    for (const auto& za : report.zeros) d = za.zero.location.dim();
    if (d == 0) return;

    std::ofstream clt(dir / "clt.csv");
    clt << "zero,stability";
    for (int i = 1; i <= d; ++i) clt << ",theta_" << i;
    clt << ",lambda_re,lambda_im,regime";
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) clt << ",gamma_" << i << j;
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) clt << ",sigma_" << i << j;
    clt << ",power_exponent\n";
    for (std::size_t z = 0; z < report.zeros.size(); ++z) {
        const ZeroAnalysis& za = report.zeros[z];
        clt << z + 1 << "," << to_string(za.zero.stability);
        for (int i = 0; i < d; ++i) clt << "," << format_double(za.zero.location[i]);
        if (za.clt) {
            clt << "," << format_double(za.clt->lambda.real()) << "," << format_double(za.clt->lambda.imag())
                << "," << to_string(za.clt->regime);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) clt << "," << format_double(za.clt->gamma(i, j));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) clt << "," << (za.clt->sigma ? format_double((*za.clt->sigma)(i, j)) : "");
            clt << "," << (za.clt->power_exponent ? format_double(*za.clt->power_exponent) : "");
        } else {
            for (int i = 0; i < 3 + 2 * d * d + 1; ++i) clt << ",";
        }
        clt << "\n";
    }

    bool any_non_balanced = false;
    for (const auto& za : report.zeros) any_non_balanced = any_non_balanced || za.non_balanced.has_value();
    if (any_non_balanced) {
        std::ofstream nb(dir / "non_balanced.csv");
        nb << "zero,theta,omega,lambda,sigma2,clt_variance\n";
        for (std::size_t z = 0; z < report.zeros.size(); ++z) {
            const auto& za = report.zeros[z];
            if (!za.non_balanced) continue;
            nb << z + 1 << "," << format_double(za.non_balanced->theta) << ","
               << format_double(za.non_balanced->omega) << "," << format_double(za.non_balanced->lambda) << ","
               << format_double(za.non_balanced->sigma2) << ","
               << (za.non_balanced->clt_variance ? format_double(*za.non_balanced->clt_variance) : "") << "\n";
        }
    }
}

void write_trajectory_csv(const FlowTrajectory& trajectory, const std::filesystem::path& file) {
    std::ofstream out(file);
    const int d = trajectory.points.front().dim();
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x_" << i;
    out << "\n";
    for (std::size_t k = 0; k < trajectory.points.size(); ++k) {
        out << format_double(trajectory.times[k]);
        for (int i = 0; i < d; ++i) out << "," << format_double(trajectory.points[k][i]);
        out << "\n";
    }
}

SimulationFiles simulate_to_files(const ExperimentConfig& config, const std::filesystem::path& dir,
                                  int n_threads) {
    std::filesystem::create_directories(dir);
    const EnsembleResult result = run_ensemble(config.ensemble_config(), n_threads);
    const int d = result.dim();

    SimulationFiles files;
    files.terminal_csv = dir / "terminal.csv";
    files.checkpoint_csv = dir / "checkpoints.csv";
    files.metadata = dir / "run.meta";

    {
        std::ofstream out(files.terminal_csv);
        out << "rep";
        for (int i = 1; i <= d; ++i) out << ",Z_" << i;
        out << ",T\n";
        const std::size_t last = result.checkpoints().size() - 1;
        const double n = static_cast<double>(result.checkpoints().back());
        for (int rep = 0; rep < result.n_reps(); ++rep) {
            if (result.outcome(rep) != RepOutcome::Ok) continue;
            out << rep;
            const double* raw = result.composition_raw(rep, last);
            for (int i = 0; i < d; ++i) out << "," << format_double(raw[i]);
            out << "," << format_int(std::llround(result.total_over_n(rep, last) * n)) << "\n";
        }
    }
    {
        std::ofstream out(files.checkpoint_csv);
        out << "n";
        for (int i = 1; i <= d; ++i) out << ",mean_" << i;
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) out << ",cov_" << i << j;
        out << ",mean_T_over_n\n";
        for (const auto& summary : result.summaries()) {
            out << summary.n;
            for (int i = 0; i < d; ++i) out << "," << format_double(summary.mean_composition[i]);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out << "," << format_double(summary.composition_covariance(i, j));
            out << "," << format_double(summary.mean_total_over_n) << "\n";
        }
    }
    {
        std::ofstream out(files.metadata);
        ExperimentConfig echoed = config;
        echoed.checkpoints = result.checkpoints();
        out << serialize_config(echoed);
        out << "\n[run]\n";
        int violations = 0, stuck = 0, overflow = 0;
        for (int rep = 0; rep < result.n_reps(); ++rep) {
            switch (result.outcome(rep)) {
            case RepOutcome::TenabilityViolation: ++violations; break;
            case RepOutcome::Stuck: ++stuck; break;
            case RepOutcome::Overflow: ++overflow; break;
            case RepOutcome::Ok: break;
            }
        }
        out << "replications_ok = " << result.n_ok() << "\n";
        out << "replications_tenability_violation = " << violations << "\n";
        out << "replications_stuck = " << stuck << "\n";
        out << "replications_overflow = " << overflow << "\n";
    }
    return files;
}

VerifyReport verify(const ExperimentConfig& config, int n_threads) {
    VerifyReport report;
    report.analysis = analyze(config);

    const ReplacementRule rule = config.rule();
    const EnsembleResult ensemble = run_ensemble(config.ensemble_config(), n_threads);

    add_row(report, {"replications_ok", std::to_string(config.n_reps), std::to_string(ensemble.n_ok()), "",
                     ensemble.n_ok() == config.n_reps ? Verdict::Info : Verdict::Fail,
                     ensemble.n_ok() == config.n_reps ? "" : "some replications failed"});

    if (report.analysis.diagonal) {
        add_row(report, {"diagonal_case", "", "", "", Verdict::Info,
                         "h == 0 identically; almost-sure convergence to a random limit (diagonal case)"});
        const double final_diff = final_difference_median(ensemble);
        add_row(report, {"diagonal_convergence_median_step", "<= 0.01", format_double(final_diff), "0.01",
                         final_diff <= 0.01 ? Verdict::Pass : Verdict::Fail, ""});
        return report;
    }

    std::vector<const ZeroAnalysis*> attracting;
    for (const auto& za : report.analysis.zeros) {
        if (plausible_attractor(za.zero)) attracting.push_back(&za);
    }

    if (attracting.empty()) {
        const double range = nonconvergence_range_median(ensemble);
        add_row(report, {"non_convergence_median_range", ">= 0.1", format_double(range), "0.1",
                         range >= 0.1 ? Verdict::Pass : Verdict::Fail, "no stable zero; trajectories should not settle"});
        return report;
    }

    std::vector<SimplexPoint> candidates;
    bool any_stable = false;
    for (const auto* za : attracting) {
        candidates.push_back(za->zero.location);
        any_stable = any_stable || za->zero.stability == Stability::Stable;
    }
    std::optional<LimitEstimate> limits;
    try {
        limits = estimate_limits(ensemble, candidates);
    } catch (const std::invalid_argument& e) {
        add_row(report, {"limit_assignment", "", "", "", Verdict::Skip, e.what()});
    }
    if (limits) {
        const double assigned = 1.0 - limits->unassigned_fraction;
        if (any_stable) {
            add_row(report, {"limit_assignment_fraction", ">= 0.95", format_double(assigned), "0.05",
                             assigned >= 0.95 ? Verdict::Pass : Verdict::Fail, "assignment radius 0.05"});
        } else {
            // Degenerate zeros attract with no guaranteed rate; the fraction
            // at a finite horizon carries no pass/fail meaning.
            add_row(report, {"limit_assignment_fraction", "", format_double(assigned), "", Verdict::Info,
                             "only degenerate zeros: convergence has no rate guarantee"});
        }
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            add_row(report, {"limit_frequency(" + format_point(candidates[c]) + ")", "",
                             format_double(limits->frequencies[c]), "", Verdict::Info, ""});
        }
    }

    for (const auto* za : attracting) {
        const SimplexPoint& theta = za->zero.location;
        const std::string at = "(" + format_point(theta) + ")";

        if (za->clt) { // balanced
            const CltReport& clt = *za->clt;
            switch (clt.regime) {
            case Regime::GaussianSqrtN:
            case Regime::GaussianSqrtNOverLogN: {
                if (clt.regime == Regime::GaussianSqrtNOverLogN && rule.colours() != 2) {
                    add_row(report, {"clt_covariance" + at, "", "", "", Verdict::Skip,
                                     "log-regime covariance out of scope for d > 2"});
                    break;
                }
                try {
                    const CltComparison cmp = clt_check(ensemble, theta, clt);
                    const bool log_regime = clt.regime == Regime::GaussianSqrtNOverLogN;
                    // Noise scales with the replications actually assigned to
                    // this zero, not the configured count.
                    const double tol = log_regime ? log_regime_rel_tolerance(cmp.n_assigned, config.n_steps)
                                                  : clt_rel_tolerance(cmp.n_assigned);
                    std::string note = log_regime ? "scaling sqrt(n/log n), critical-regime 1/log n allowance"
                                                  : "scaling sqrt(n)";
                    note += ", max relative deviation " + format_double(cmp.max_rel_deviation);
                    add_row(report, {"clt_covariance" + at, format_matrix_row_major(cmp.predicted),
                                     format_matrix_row_major(cmp.empirical), format_double(tol),
                                     cmp.max_rel_deviation <= tol ? Verdict::Pass : Verdict::Fail, note});
                } catch (const std::runtime_error& e) {
                    add_row(report, {"clt_covariance" + at, "", "", "", Verdict::Skip, e.what()});
                }
                break;
            }
            case Regime::AlmostSurePower: {
                try {
                    const RateDiagnostic diag = as_rate_check(ensemble, theta, *clt.power_exponent);
                    add_row(report, {"as_rate_stabilization" + at,
                                     "range/magnitude <= " + format_double(diag.threshold), format_double(diag.ratio),
                                     format_double(diag.threshold), diag.stabilized ? Verdict::Pass : Verdict::Fail,
                                     "exponent " + format_double(*clt.power_exponent)});
                } catch (const std::exception& e) {
                    add_row(report, {"as_rate_stabilization" + at, "", "", "", Verdict::Skip, e.what()});
                }
                break;
            }
            case Regime::Degenerate: {
                add_row(report, {"rate" + at, "", "", "", Verdict::Skip,
                                 "degenerate zero (eigenvalue with zero real part): no rate claim"});
                add_row(report, {"empirical_decay_exponent" + at, "",
                                 format_double(empirical_decay_exponent(ensemble, theta)), "", Verdict::Info,
                                 "exploratory; no pass/fail"});
                break;
            }
            }
        } else if (za->non_balanced) { // non-balanced two-colour
            const NonBalancedReport& nb = *za->non_balanced;
            const GrowthCheck growth = total_growth_check(ensemble, nb.omega);
            add_row(report, {"total_growth_T_over_n" + at, format_double(nb.omega),
                             format_double(growth.empirical_mean), "0.02",
                             growth.abs_deviation <= 0.02 ? Verdict::Pass : Verdict::Fail, ""});
            if (nb.sigma2 <= 0.0) {
                add_row(report, {"clt_variance" + at, "", "", "", Verdict::Skip,
                                 "sigma^2 = 0: outside the CLT framework, check skipped"});
            } else if (!nb.clt_variance) {
                add_row(report, {"clt_variance" + at, "", "", "", Verdict::Skip,
                                 "lambda <= 1/2: almost-sure rate not proved for non-balanced schemes"});
            } else {
                const double v = *nb.clt_variance;
                Eigen::MatrixXd predicted(2, 2);
                predicted << v, -v, -v, v;
                try {
                    const CltComparison cmp = clt_check(ensemble, theta, predicted, CltScaling::SqrtN);
                    const double tol = clt_rel_tolerance(cmp.n_assigned);
                    add_row(report, {"clt_variance" + at, format_double(v), format_double(cmp.empirical(0, 0)),
                                     format_double(tol), cmp.max_rel_deviation <= tol ? Verdict::Pass : Verdict::Fail,
                                     "scaling sqrt(n), max relative deviation " + format_double(cmp.max_rel_deviation)});
                } catch (const std::runtime_error& e) {
                    add_row(report, {"clt_variance" + at, "", "", "", Verdict::Skip, e.what()});
                }
            }
        } else {
            add_row(report, {"fluctuations" + at, "", "", "", Verdict::Skip,
                             "no covariance prediction available for this configuration"});
        }
    }
    return report;
}

std::string render_verify(const VerifyReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(44) << "check" << std::setw(26) << "predicted" << std::setw(26) << "empirical"
       << std::setw(12) << "tolerance" << std::setw(8) << "verdict" << "note\n";
    for (const auto& row : report.rows) {
        const auto clip = [](std::string s, std::size_t width) {
            if (s.size() > width - 2) s = s.substr(0, width - 4) + "..";
            return s;
        };
        os << std::left << std::setw(44) << clip(row.check, 44) << std::setw(26) << clip(row.predicted, 26)
           << std::setw(26) << clip(row.empirical, 26) << std::setw(12) << clip(row.tolerance, 12) << std::setw(8)
           << to_string(row.verdict) << row.note << "\n";
    }
    os << (report.all_passed ? "VERIFY: all checks passed\n" : "VERIFY: some checks FAILED\n");
    return os.str();
}

void write_verify_csv(const VerifyReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "verify.csv");
    out << "check,predicted,empirical,tolerance,verdict,note\n";
    for (const auto& row : report.rows) {
        const auto quote = [](const std::string& s) {
            std::string q = "\"";
            for (char c : s) {
                if (c == '"') q += "\"\"";
                else q += c;
            }
            return q + "\"";
        };
        out << quote(row.check) << "," << quote(row.predicted) << "," << quote(row.empirical) << ","
            << quote(row.tolerance) << "," << to_string(row.verdict) << "," << quote(row.note) << "\n";
    }
}

} // namespace polyurn
