#include "polyurn/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "polyurn/errors.hpp"
#include "polyurn/rng.hpp"

namespace polyurn {

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

std::size_t pick_index(const std::vector<double>& probs, double unit) {
    double sum = 0.0;
    for (double p : probs) sum += p;
    const double target = unit * sum;
    double acc = 0.0;
    std::size_t last_positive = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last_positive = i;
        if (acc > target) return i;
    }
    if (last_positive == probs.size()) throw std::invalid_argument("no composition has positive probability");
    return last_positive;
}

void run_replication(const EnsembleConfig& config, int rep, EnsembleResult& result) {
    const int d = config.rule.colours();
    const std::size_t n_cp = config.checkpoints.size();
    double* comp_out = &result.compositions_[static_cast<std::size_t>(rep) * n_cp * static_cast<std::size_t>(d)];
    double* total_out = &result.totals_over_n_[static_cast<std::size_t>(rep) * n_cp];

    UrnState state = config.initial;
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    std::vector<double> probs(config.rule.size());

    RepOutcome outcome = RepOutcome::Ok;
    std::size_t cp = 0;
    for (std::int64_t n = 1; n <= config.n_steps; ++n) {
        try {
            draw_distribution(state, config.rule, config.mode, probs);
            apply_addition(state, config.rule, pick_index(probs, rng.next_unit()));
        } catch (const TenabilityViolation&) {
            outcome = RepOutcome::TenabilityViolation;
            break;
        } catch (const std::overflow_error&) {
            outcome = RepOutcome::Overflow;
            break;
        } catch (const std::invalid_argument&) {
            outcome = RepOutcome::Stuck;
            break;
        }
        if (cp < n_cp && n == config.checkpoints[cp]) {
            const double inv_total = 1.0 / static_cast<double>(state.total);
            for (int i = 0; i < d; ++i) comp_out[cp * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] =
                static_cast<double>(state.counts[static_cast<std::size_t>(i)]) * inv_total;
            total_out[cp] = static_cast<double>(state.total) / static_cast<double>(n);
            ++cp;
        }
    }
    for (; cp < n_cp; ++cp) {
        for (int i = 0; i < d; ++i)
            comp_out[cp * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] =
                std::numeric_limits<double>::quiet_NaN();
        total_out[cp] = std::numeric_limits<double>::quiet_NaN();
    }
    result.outcomes_[static_cast<std::size_t>(rep)] = outcome;
}

} // namespace

std::vector<std::int64_t> default_checkpoints(std::int64_t n_steps) {
    std::vector<std::int64_t> cps;
    for (std::int64_t n = n_steps; n >= 1 && n * 512 >= n_steps; n /= 2) cps.push_back(n);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

EnsembleResult::EnsembleResult(EnsembleConfig config, int d) : config_(std::move(config)), d_(d) {
    const std::size_t reps = static_cast<std::size_t>(config_.n_reps);
    const std::size_t n_cp = config_.checkpoints.size();
    outcomes_.assign(reps, RepOutcome::Ok);
    compositions_.assign(reps * n_cp * static_cast<std::size_t>(d_), 0.0);
    totals_over_n_.assign(reps * n_cp, 0.0);
}

const double* EnsembleResult::composition_raw(int rep, std::size_t cp) const {
    return &compositions_[(static_cast<std::size_t>(rep) * checkpoints().size() + cp) * static_cast<std::size_t>(d_)];
}

SimplexPoint EnsembleResult::composition(int rep, std::size_t cp) const {
    const double* raw = composition_raw(rep, cp);
    return SimplexPoint(std::vector<double>(raw, raw + d_));
}

double EnsembleResult::total_over_n(int rep, std::size_t cp) const {
    return totals_over_n_[static_cast<std::size_t>(rep) * checkpoints().size() + cp];
}

void EnsembleResult::finalize_summaries() {
    const std::size_t n_cp = config_.checkpoints.size();
    n_ok_ = 0;
    for (auto o : outcomes_)
        if (o == RepOutcome::Ok) ++n_ok_;

    summaries_.clear();
    summaries_.reserve(n_cp);
    for (std::size_t cp = 0; cp < n_cp; ++cp) {
        CheckpointSummary s;
        s.n = config_.checkpoints[cp];
        s.mean_composition = Eigen::VectorXd::Zero(d_);
        s.composition_covariance = Eigen::MatrixXd::Zero(d_, d_);
        if (n_ok_ > 0) {
            double t_mean = 0.0;
            for (int rep = 0; rep < config_.n_reps; ++rep) {
                if (outcomes_[static_cast<std::size_t>(rep)] != RepOutcome::Ok) continue;
                const double* raw = composition_raw(rep, cp);
                for (int i = 0; i < d_; ++i) s.mean_composition[i] += raw[i];
                t_mean += total_over_n(rep, cp);
            }
            s.mean_composition /= static_cast<double>(n_ok_);
            s.mean_total_over_n = t_mean / static_cast<double>(n_ok_);

            if (n_ok_ > 1) {
                double t_var = 0.0;
                Eigen::VectorXd centered(d_);
                for (int rep = 0; rep < config_.n_reps; ++rep) {
                    if (outcomes_[static_cast<std::size_t>(rep)] != RepOutcome::Ok) continue;
                    const double* raw = composition_raw(rep, cp);
                    for (int i = 0; i < d_; ++i) centered[i] = raw[i] - s.mean_composition[i];
                    s.composition_covariance += centered * centered.transpose();
                    const double dt = total_over_n(rep, cp) - s.mean_total_over_n;
                    t_var += dt * dt;
                }
                s.composition_covariance /= static_cast<double>(n_ok_ - 1);
                s.var_total_over_n = t_var / static_cast<double>(n_ok_ - 1);
            }
        }
        summaries_.push_back(std::move(s));
    }
}

EnsembleResult run_ensemble(const EnsembleConfig& config, int n_threads) {
    if (config.n_reps < 1) throw std::invalid_argument("run_ensemble: n_reps must be at least 1");
    if (config.n_steps < 1) throw std::invalid_argument("run_ensemble: n_steps must be at least 1");
    if (config.initial.counts.size() != static_cast<std::size_t>(config.rule.colours()))
        throw std::invalid_argument("run_ensemble: rule and initial state dimensions disagree");

    EnsembleConfig normalized = config;
    if (normalized.checkpoints.empty()) normalized.checkpoints = default_checkpoints(config.n_steps);
    auto& cps = normalized.checkpoints;
    if (!std::is_sorted(cps.begin(), cps.end()) || std::adjacent_find(cps.begin(), cps.end()) != cps.end())
        throw std::invalid_argument("run_ensemble: checkpoints must be strictly increasing");
    if (cps.front() < 1 || cps.back() > config.n_steps)
        throw std::invalid_argument("run_ensemble: checkpoints must lie in [1, n_steps]");
    if (cps.back() != config.n_steps) cps.push_back(config.n_steps);

    EnsembleResult result(std::move(normalized), config.rule.colours());
    const EnsembleConfig& cfg = result.config();

    int workers = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, cfg.n_reps));

    if (workers == 1) {
        for (int rep = 0; rep < cfg.n_reps; ++rep) run_replication(cfg, rep, result);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int rep = next.fetch_add(1); rep < cfg.n_reps; rep = next.fetch_add(1)) {
                run_replication(cfg, rep, result);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.finalize_summaries();
    return result;
}

LimitEstimate estimate_limits(const EnsembleResult& result, const std::vector<SimplexPoint>& candidates,
                              double radius) {
    if (candidates.empty()) throw std::invalid_argument("estimate_limits: no candidates");
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (distance(candidates[i], candidates[j]) <= 2.0 * radius) {
                throw std::invalid_argument("estimate_limits: candidates closer than twice the assignment radius");
            }
        }
    }

    LimitEstimate estimate;
    estimate.candidates = candidates;
    estimate.assigned_counts.assign(candidates.size(), 0);
    int unassigned = 0;
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        if (result.outcome(rep) != RepOutcome::Ok) continue;
        ++estimate.n_ok;
        const SimplexPoint terminal = result.terminal(rep);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double dist = distance(terminal, candidates[c]);
            if (dist < best) {
                best = dist;
                best_idx = c;
            }
        }
        if (best <= radius) {
            ++estimate.assigned_counts[best_idx];
        } else {
            ++unassigned;
        }
    }
    estimate.frequencies.assign(candidates.size(), 0.0);
    if (estimate.n_ok > 0) {
        for (std::size_t c = 0; c < candidates.size(); ++c)
            estimate.frequencies[c] = static_cast<double>(estimate.assigned_counts[c]) / estimate.n_ok;
        estimate.unassigned_fraction = static_cast<double>(unassigned) / estimate.n_ok;
    }
    return estimate;
}

CltComparison clt_check(const EnsembleResult& result, const SimplexPoint& theta,
                        const Eigen::MatrixXd& predicted, CltScaling scaling, double assignment_radius,
                        double rel_floor) {
    const int d = result.dim();
    if (theta.dim() != d) throw std::invalid_argument("clt_check: dimension mismatch");
    const double n = static_cast<double>(result.checkpoints().back());
    const double c_n = scaling == CltScaling::SqrtN ? std::sqrt(n) : std::sqrt(n / std::log(n));

    std::vector<Eigen::VectorXd> scaled;
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        if (result.outcome(rep) != RepOutcome::Ok) continue;
        const double* raw = result.composition_raw(rep, result.checkpoints().size() - 1);
        double dist_sq = 0.0;
        Eigen::VectorXd deviation(d);
        for (int i = 0; i < d; ++i) {
            deviation[i] = raw[i] - theta[i];
            dist_sq += deviation[i] * deviation[i];
        }
        if (std::sqrt(dist_sq) > assignment_radius) continue;
        scaled.push_back(c_n * deviation);
    }
    if (scaled.size() < 100) {
        throw std::runtime_error("clt_check: fewer than 100 replications assigned to theta");
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& s : scaled) mean += s;
    mean /= static_cast<double>(scaled.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& s : scaled) {
        const Eigen::VectorXd centered = s - mean;
        cov += centered * centered.transpose();
    }
    cov /= static_cast<double>(scaled.size() - 1);

    CltComparison comparison;
    comparison.empirical = cov;
    comparison.predicted = predicted;
    comparison.scaling = scaling;
    comparison.n_assigned = static_cast<int>(scaled.size());
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double abs_dev = std::abs(cov(i, j) - predicted(i, j));
            comparison.max_abs_deviation = std::max(comparison.max_abs_deviation, abs_dev);
            comparison.max_rel_deviation =
                std::max(comparison.max_rel_deviation, abs_dev / std::max(rel_floor, std::abs(predicted(i, j))));
        }
    }
    return comparison;
}

CltComparison clt_check(const EnsembleResult& result, const SimplexPoint& theta, const CltReport& report,
                        double assignment_radius, double rel_floor) {
    if (report.regime == Regime::GaussianSqrtN) {
        return clt_check(result, theta, *report.sigma, CltScaling::SqrtN, assignment_radius, rel_floor);
    }
    if (report.regime == Regime::GaussianSqrtNOverLogN) {
        if (result.dim() != 2) {
            throw std::invalid_argument("clt_check: log-regime covariance prediction is only available for d = 2");
        }
        return clt_check(result, theta, report.gamma, CltScaling::SqrtNOverLogN, assignment_radius, rel_floor);
    }
    throw std::invalid_argument("clt_check: report regime is not Gaussian");
}

RateDiagnostic as_rate_check(const EnsembleResult& result, const SimplexPoint& theta, double exponent,
                             double threshold) {
    const auto& cps = result.checkpoints();
    if (cps.size() < 3) throw std::invalid_argument("as_rate_check: need at least three checkpoints");
    const double ratio0 = static_cast<double>(cps[1]) / static_cast<double>(cps[0]);
    if (ratio0 < 1.25) throw std::invalid_argument("as_rate_check: checkpoints are not geometric");
    for (std::size_t k = 1; k + 1 < cps.size(); ++k) {
        const double ratio = static_cast<double>(cps[k + 1]) / static_cast<double>(cps[k]);
        if (std::abs(ratio - ratio0) > 0.15 * ratio0)
            throw std::invalid_argument("as_rate_check: checkpoints are not geometric");
    }

    const int d = result.dim();
    const std::size_t last = cps.size() - 1;
    std::vector<double> ranges;
    std::vector<double> magnitudes;
    Eigen::VectorXd v[3];
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        if (result.outcome(rep) != RepOutcome::Ok) continue;
        for (int k = 0; k < 3; ++k) {
            const std::size_t cp = last - 2 + static_cast<std::size_t>(k);
            const double scale = std::pow(static_cast<double>(cps[cp]), exponent);
            const double* raw = result.composition_raw(rep, cp);
            v[k].resize(d);
            for (int i = 0; i < d; ++i) v[k][i] = scale * (raw[i] - theta[i]);
        }
        double range = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) range = std::max(range, (v[a] - v[b]).norm());
        ranges.push_back(range);
        magnitudes.push_back(v[2].norm());
    }
    if (ranges.empty()) throw std::runtime_error("as_rate_check: no successful replications");

    RateDiagnostic diagnostic;
    diagnostic.median_last_range = median(std::move(ranges));
    diagnostic.median_magnitude = median(std::move(magnitudes));
    diagnostic.threshold = threshold;
    diagnostic.ratio = diagnostic.median_magnitude > 0.0
                           ? diagnostic.median_last_range / diagnostic.median_magnitude
                           : 0.0;
    diagnostic.stabilized = diagnostic.ratio <= threshold;
    return diagnostic;
}

GrowthCheck total_growth_check(const EnsembleResult& result, double omega) {
    GrowthCheck check;
    check.omega = omega;
    check.empirical_mean = result.summaries().back().mean_total_over_n;
    check.abs_deviation = std::abs(check.empirical_mean - omega);
    return check;
}

double nonconvergence_range_median(const EnsembleResult& result) {
    const auto& cps = result.checkpoints();
    const std::int64_t n = cps.back();
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < cps.size(); ++k)
        if (10 * cps[k] >= n) window.push_back(k);
    if (window.size() < 2) throw std::invalid_argument("nonconvergence_range_median: need two checkpoints in [n/10, n]");

    const int d = result.dim();
    std::vector<double> diameters;
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        if (result.outcome(rep) != RepOutcome::Ok) continue;
        double diameter = 0.0;
        for (std::size_t a = 0; a < window.size(); ++a) {
            const double* pa = result.composition_raw(rep, window[a]);
            for (std::size_t b = a + 1; b < window.size(); ++b) {
                const double* pb = result.composition_raw(rep, window[b]);
                double sq = 0.0;
                for (int i = 0; i < d; ++i) sq += (pa[i] - pb[i]) * (pa[i] - pb[i]);
                diameter = std::max(diameter, std::sqrt(sq));
            }
        }
        diameters.push_back(diameter);
    }
    return median(std::move(diameters));
}

double final_difference_median(const EnsembleResult& result) {
    const auto& cps = result.checkpoints();
    if (cps.size() < 2) throw std::invalid_argument("final_difference_median: need at least two checkpoints");
    const int d = result.dim();
    std::vector<double> diffs;
    for (int rep = 0; rep < result.n_reps(); ++rep) {
        if (result.outcome(rep) != RepOutcome::Ok) continue;
        const double* a = result.composition_raw(rep, cps.size() - 1);
        const double* b = result.composition_raw(rep, cps.size() - 2);
        double sq = 0.0;
        for (int i = 0; i < d; ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
        diffs.push_back(std::sqrt(sq));
    }
    return median(std::move(diffs));
}

double empirical_decay_exponent(const EnsembleResult& result, const SimplexPoint& theta) {
    const auto& cps = result.checkpoints();
    const int d = result.dim();
    std::vector<double> log_n;
    std::vector<double> log_dev;
    for (std::size_t cp = 0; cp < cps.size(); ++cp) {
        std::vector<double> deviations;
        for (int rep = 0; rep < result.n_reps(); ++rep) {
            if (result.outcome(rep) != RepOutcome::Ok) continue;
            const double* raw = result.composition_raw(rep, cp);
            double sq = 0.0;
            for (int i = 0; i < d; ++i) sq += (raw[i] - theta[i]) * (raw[i] - theta[i]);
            deviations.push_back(std::sqrt(sq));
        }
        const double med = median(std::move(deviations));
        if (med > 0.0 && std::isfinite(med)) {
            log_n.push_back(std::log(static_cast<double>(cps[cp])));
            log_dev.push_back(std::log(med));
        }
    }
    if (log_n.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(log_n.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_dev[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_dev[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace polyurn
