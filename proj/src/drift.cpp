#include "polyurn/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace polyurn {

namespace {

// Raw evaluators working on plain coordinate vectors; Newton iterates may
// wander off the simplex, where h is still a perfectly good polynomial.

Eigen::VectorXd drift_raw(const ReplacementRule& rule, const std::vector<double>& x) {
    const int d = rule.colours();
    Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
    for (std::size_t idx = 0; idx < rule.size(); ++idx) {
        const DrawVector& v = rule.composition(idx);
        double monomial = rule.weight(idx);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < v[static_cast<std::size_t>(i)]; ++j) monomial *= x[static_cast<std::size_t>(i)];
        }
        if (monomial == 0.0) continue;
        const double r = static_cast<double>(rule.row_sum(idx));
        for (int i = 0; i < d; ++i) {
            h[i] += monomial * (static_cast<double>(rule.addition(idx, i)) - r * x[static_cast<std::size_t>(i)]);
        }
    }
    return h;
}

Eigen::MatrixXd jacobian_raw(const ReplacementRule& rule, const std::vector<double>& x) {
    const int d = rule.colours();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d - 1, d - 1);
    std::vector<double> grad_monomial(static_cast<std::size_t>(d));
    for (std::size_t idx = 0; idx < rule.size(); ++idx) {
        const DrawVector& v = rule.composition(idx);
        const double w = rule.weight(idx);
        const double r = static_cast<double>(rule.row_sum(idx));

        double monomial = w;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < v[static_cast<std::size_t>(i)]; ++j) monomial *= x[static_cast<std::size_t>(i)];

        // d/dx_j of w * prod x_i^{v_i}
        for (int j = 0; j < d; ++j) {
            const int vj = v[static_cast<std::size_t>(j)];
            if (vj == 0) {
                grad_monomial[static_cast<std::size_t>(j)] = 0.0;
                continue;
            }
            double g = w * static_cast<double>(vj);
            for (int i = 0; i < d; ++i) {
                const int power = v[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
                for (int p = 0; p < power; ++p) g *= x[static_cast<std::size_t>(i)];
            }
            grad_monomial[static_cast<std::size_t>(j)] = g;
        }

        for (int k = 0; k < d - 1; ++k) {
            const double coeff = static_cast<double>(rule.addition(idx, k)) - r * x[static_cast<std::size_t>(k)];
            for (int j = 0; j < d - 1; ++j) {
                double entry = (grad_monomial[static_cast<std::size_t>(j)] -
                                grad_monomial[static_cast<std::size_t>(d - 1)]) *
                               coeff;
                if (j == k) entry -= monomial * r;
                jac(k, j) += entry;
            }
        }
    }
    return jac;
}

std::vector<double> lift(const Eigen::VectorXd& y) {
    std::vector<double> x(static_cast<std::size_t>(y.size()) + 1);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        x[static_cast<std::size_t>(i)] = y[i];
        sum += y[i];
    }
    x.back() = 1.0 - sum;
    return x;
}

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> eigs(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return eigs;
}

// Polynomial helpers over ascending coefficient vectors.

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

void poly_add_scaled(std::vector<double>& acc, const std::vector<double>& p, double scale) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += scale * p[i];
}

double poly_eval(const std::vector<double>& coeffs, double x) {
    double value = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) value = value * x + coeffs[i];
    return value;
}

std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    if (coeffs.size() <= 1) return {0.0};
    std::vector<double> out(coeffs.size() - 1);
    for (std::size_t i = 1; i < coeffs.size(); ++i) out[i - 1] = static_cast<double>(i) * coeffs[i];
    return out;
}

std::vector<double> one_minus_x_power(int p) {
    std::vector<double> acc{1.0};
    const std::vector<double> base{1.0, -1.0};
    for (int i = 0; i < p; ++i) acc = poly_mul(acc, base);
    return acc;
}

/// Real roots of the polynomial in [0,1], via companion-matrix eigenvalues
/// polished by Newton, deduplicated within 1e-8.
std::vector<double> roots_in_unit_interval(const std::vector<double>& coeffs) {
    double max_coeff = 0.0;
    for (double c : coeffs) max_coeff = std::max(max_coeff, std::abs(c));
    if (max_coeff == 0.0) throw std::invalid_argument("roots_in_unit_interval: zero polynomial");

    std::size_t degree = coeffs.size() - 1;
    while (degree > 0 && std::abs(coeffs[degree]) <= 1e-12 * max_coeff) --degree;
    if (degree == 0) return {};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                                                      static_cast<Eigen::Index>(degree));
    for (std::size_t i = 1; i < degree; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < degree; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(degree - 1)) = -coeffs[i] / coeffs[degree];

    const auto deriv = poly_derivative(coeffs);
    std::vector<double> roots;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        double x = solver.eigenvalues()[i].real();
        if (x < -0.05 || x > 1.05) continue;
        for (int it = 0; it < 100; ++it) {
            const double p = poly_eval(coeffs, x);
            const double dp = poly_eval(deriv, x);
            if (dp == 0.0) break;
            const double delta = p / dp;
            x -= delta;
            if (std::abs(delta) < 1e-16) break;
        }
        if (std::abs(poly_eval(coeffs, x)) > 1e-12) continue;
        if (x < -1e-9 || x > 1.0 + 1e-9) continue;
        x = std::clamp(x, 0.0, 1.0);
        bool duplicate = false;
        for (double seen : roots) duplicate = duplicate || std::abs(seen - x) <= 1e-8;
        if (!duplicate) roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

ZeroReport make_report(const ReplacementRule& rule, SimplexPoint location) {
    ZeroReport report{std::move(location), {}, Stability::Degenerate, 0.0};
    report.residual = drift_raw(rule, report.location.coords()).norm();
    report.tangent_eigenvalues = sorted_eigenvalues(jacobian_raw(rule, report.location.coords()));
    report.stability = classify_stability(report.tangent_eigenvalues);
    return report;
}

} // namespace

Eigen::VectorXd drift_h(const ReplacementRule& rule, const SimplexPoint& x) {
    if (x.dim() != rule.colours()) throw std::invalid_argument("drift_h: dimension mismatch");
    return drift_raw(rule, x.coords());
}

double drift_g(const ReplacementRule& rule, double x) {
    if (rule.colours() != 2) throw std::invalid_argument("drift_g: two-colour rules only");
    const auto balance = check_balance(rule);
    if (!balance) throw std::invalid_argument("drift_g: rule is not balanced (use drift_gtilde)");
    const int m = rule.draws();
    const double s = static_cast<double>(*balance);
    double g = 0.0;
    for (int k = 0; k <= m; ++k) {
        double weight = static_cast<double>(binomial(m, k));
        for (int j = 0; j < k; ++j) weight *= x;
        for (int j = 0; j < m - k; ++j) weight *= 1.0 - x;
        g += weight * (static_cast<double>(rule.a(m - k)) - s * x);
    }
    return g;
}

double drift_gtilde(const ReplacementRule& rule, double x) {
    if (rule.colours() != 2) throw std::invalid_argument("drift_gtilde: two-colour rules only");
    const int m = rule.draws();
    double g = 0.0;
    for (int k = 0; k <= m; ++k) {
        double weight = static_cast<double>(binomial(m, k));
        for (int j = 0; j < k; ++j) weight *= x;
        for (int j = 0; j < m - k; ++j) weight *= 1.0 - x;
        g += weight * ((1.0 - x) * static_cast<double>(rule.a(m - k)) - x * static_cast<double>(rule.b(m - k)));
    }
    return g;
}

Eigen::MatrixXd jacobian_h(const ReplacementRule& rule, const SimplexPoint& x) {
    if (x.dim() != rule.colours()) throw std::invalid_argument("jacobian_h: dimension mismatch");
    return jacobian_raw(rule, x.coords());
}

std::vector<double> reduced_drift_coefficients(const ReplacementRule& rule) {
    if (rule.colours() != 2) throw std::invalid_argument("reduced_drift_coefficients: two-colour rules only");
    const int m = rule.draws();
    // g~(x) = sum_j binom(m,j) x^{m-j} (1-x)^j ((1-x) a_j - x b_j); equals g
    // under balance.
    std::vector<double> acc{0.0};
    for (int j = 0; j <= m; ++j) {
        std::vector<double> x_power(static_cast<std::size_t>(m - j) + 1, 0.0);
        x_power.back() = 1.0;
        auto term = poly_mul(x_power, one_minus_x_power(j));
        const double aj = static_cast<double>(rule.a(j));
        const double bj = static_cast<double>(rule.b(j));
        // (1-x) a_j - x b_j = a_j - (a_j + b_j) x
        auto affine = std::vector<double>{aj, -(aj + bj)};
        poly_add_scaled(acc, poly_mul(term, affine), static_cast<double>(binomial(m, j)));
    }
    return acc;
}

const char* to_string(Stability s) {
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Degenerate: return "degenerate";
    }
    return "?";
}

Stability classify_stability(const std::vector<std::complex<double>>& eigenvalues) {
    constexpr double tol = 1e-9;
    bool all_negative = true;
    bool any_near_zero = false;
    for (const auto& ev : eigenvalues) {
        all_negative = all_negative && ev.real() < -tol;
        any_near_zero = any_near_zero || std::abs(ev.real()) <= tol;
    }
    if (all_negative) return Stability::Stable;
    if (any_near_zero) return Stability::Degenerate;
    return Stability::Unstable;
}

ZeroSearchResult find_zeros(const ReplacementRule& rule, int grid_resolution) {
    if (check_diagonal(rule)) {
        throw std::invalid_argument("find_zeros: diagonal rule, h vanishes on the whole simplex");
    }
    if (grid_resolution < 2) throw std::invalid_argument("find_zeros: grid_resolution must be at least 2");

    ZeroSearchResult result;
    const int d = rule.colours();

    if (d == 2) {
        for (double root : roots_in_unit_interval(reduced_drift_coefficients(rule))) {
            result.zeros.push_back(make_report(rule, SimplexPoint({root, 1.0 - root})));
        }
        return result;
    }

    bool any_converged = false;
    std::vector<SimplexPoint> found;
    for (const auto& start : simplex_grid(d, grid_resolution)) {
        Eigen::VectorXd y(d - 1);
        for (int i = 0; i < d - 1; ++i) y[i] = start[i];

        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const auto x = lift(y);
            Eigen::VectorXd full = drift_raw(rule, x);
            Eigen::VectorXd reduced = full.head(d - 1);
            Eigen::MatrixXd jac = jacobian_raw(rule, x);
            Eigen::VectorXd delta = jac.fullPivLu().solve(reduced);
            if (!delta.allFinite()) break;
            y -= delta;
            if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 10.0) break;
            if (delta.norm() < 1e-14) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;

        auto x = lift(y);
        bool inside = true;
        for (double c : x) inside = inside && c >= -1e-9;
        if (!inside) continue;
        if (drift_raw(rule, x).norm() > 1e-10) continue;
        any_converged = true;

        SimplexPoint candidate = project_to_simplex(std::move(x));
        if (drift_raw(rule, candidate.coords()).norm() > 1e-10) continue;
        bool duplicate = false;
        for (const auto& seen : found) duplicate = duplicate || distance(seen, candidate) <= 1e-8;
        if (duplicate) continue;
        found.push_back(candidate);
        result.zeros.push_back(make_report(rule, std::move(candidate)));
    }
    result.search_warning = !any_converged;
    std::sort(result.zeros.begin(), result.zeros.end(), [](const ZeroReport& a, const ZeroReport& b) {
        return a.location.coords() < b.location.coords();
    });
    return result;
}

LyapunovCertificate lyapunov_test(const ReplacementRule& rule, const SimplexPoint& theta, int grid_resolution) {
    if (theta.dim() != rule.colours()) throw std::invalid_argument("lyapunov_test: dimension mismatch");
    if (drift_raw(rule, theta.coords()).norm() > 1e-10) {
        throw std::invalid_argument("lyapunov_test: theta is not a zero of h");
    }
    const auto known = find_zeros(rule).zeros;

    LyapunovCertificate certificate;
    certificate.verdict = LyapunovVerdict::ConvergenceCertified;
    for (const auto& point : simplex_grid(rule.colours(), grid_resolution)) {
        const Eigen::VectorXd h = drift_raw(rule, point.coords());
        double inner = 0.0;
        for (int i = 0; i < point.dim(); ++i) inner += h[i] * (point[i] - theta[i]);
        if (inner >= 0.0) certificate.nonnegative_points.push_back(point);
        if (inner >= -1e-12) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& z : known) nearest = std::min(nearest, distance(z.location, point));
            if (nearest > 1e-6) certificate.verdict = LyapunovVerdict::Inconclusive;
        }
    }
    return certificate;
}

FlowTrajectory flow_integrate(const ReplacementRule& rule, const SimplexPoint& x0, double horizon,
                              double step_size) {
    if (x0.dim() != rule.colours()) throw std::invalid_argument("flow_integrate: dimension mismatch");
    if (horizon <= 0.0) throw std::invalid_argument("flow_integrate: horizon must be positive");
    if (step_size <= 0.0) throw std::invalid_argument("flow_integrate: step_size must be positive");

    const int d = rule.colours();
    const auto reduced_field = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return drift_raw(rule, lift(y)).head(d - 1);
    };

    FlowTrajectory trajectory;
    trajectory.times.push_back(0.0);
    trajectory.points.push_back(x0);

    Eigen::VectorXd y(d - 1);
    for (int i = 0; i < d - 1; ++i) y[i] = x0[i];

    double t = 0.0;
    while (t < horizon - 1e-12) {
        const double dt = std::min(step_size, horizon - t);
        const Eigen::VectorXd k1 = reduced_field(y);
        const Eigen::VectorXd k2 = reduced_field(y + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = reduced_field(y + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = reduced_field(y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;

        auto x = lift(y);
        SimplexPoint projected = [&] {
            try {
                return project_to_simplex(std::move(x), 1e-6);
            } catch (const std::invalid_argument&) {
                throw std::runtime_error("flow_integrate: trajectory left the simplex; reduce step_size");
            }
        }();
        for (int i = 0; i < d - 1; ++i) y[i] = projected[i];
        trajectory.times.push_back(t);
        trajectory.points.push_back(std::move(projected));
    }
    return trajectory;
}

} // namespace polyurn
