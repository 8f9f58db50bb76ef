#include "polyurn/asymptotics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace polyurn {

namespace {

constexpr double kRegimeTol = 1e-9;

void require_zero(const ReplacementRule& rule, const SimplexPoint& theta, const char* who) {
    const double residual = drift_h(rule, theta).norm();
    if (residual > 1e-10) {
        std::ostringstream os;
        os << who << ": theta is not a zero of h (residual " << residual << ")";
        throw std::invalid_argument(os.str());
    }
}

std::int64_t require_balanced(const ReplacementRule& rule, const char* who) {
    const auto balance = check_balance(rule);
    if (!balance) throw std::invalid_argument(std::string(who) + ": rule is not balanced");
    return *balance;
}

/// Eigenvalue of -J with the smallest real part (ties broken toward
/// non-negative imaginary part).
std::complex<double> smallest_real_part_of_negated(const Eigen::MatrixXd& jac) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
    std::complex<double> best;
    bool first = true;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> candidate = -solver.eigenvalues()[i];
        if (first || candidate.real() < best.real() - 1e-15 ||
            (std::abs(candidate.real() - best.real()) <= 1e-15 && candidate.imag() > best.imag())) {
            best = candidate;
            first = false;
        }
    }
    return best;
}

Regime regime_of(double lambda_real, double s) {
    if (lambda_real <= kRegimeTol) return Regime::Degenerate;
    if (std::abs(lambda_real - s / 2.0) <= kRegimeTol) return Regime::GaussianSqrtNOverLogN;
    if (lambda_real > s / 2.0) return Regime::GaussianSqrtN;
    return Regime::AlmostSurePower;
}

Eigen::MatrixXd lyapunov_by_quadrature(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    // Simpson quadrature of int_0^inf exp(A^t u) Q exp(A u) du, truncated
    // where the integrand norm falls below 1e-14, with step halving until
    // the result stabilizes.
    const auto integrand = [&](double u) -> Eigen::MatrixXd {
        const Eigen::MatrixXd e = (a * u).exp();
        return e.transpose() * q * e;
    };
    double upper = 1.0;
    while (integrand(upper).norm() > 1e-14 && upper < 1e4) upper *= 2.0;

    Eigen::MatrixXd previous;
    for (int n_intervals = 256;; n_intervals *= 2) {
        const double h = upper / n_intervals;
        Eigen::MatrixXd sum = integrand(0.0) + integrand(upper);
        for (int i = 1; i < n_intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(h * i);
        Eigen::MatrixXd estimate = (h / 3.0) * sum;
        if (previous.size() != 0 && (estimate - previous).norm() < 1e-12) return estimate;
        if (n_intervals >= 1 << 16) return estimate;
        previous = std::move(estimate);
    }
}

} // namespace

const char* to_string(Regime r) {
    switch (r) {
    case Regime::GaussianSqrtN: return "gaussian_sqrt_n";
    case Regime::GaussianSqrtNOverLogN: return "gaussian_sqrt_n_over_log_n";
    case Regime::AlmostSurePower: return "almost_sure_power";
    case Regime::Degenerate: return "degenerate";
    }
    return "?";
}

Eigen::MatrixXd gamma_matrix(const ReplacementRule& rule, const SimplexPoint& theta) {
    const std::int64_t s = require_balanced(rule, "gamma_matrix");
    require_zero(rule, theta, "gamma_matrix");

    const int d = rule.colours();
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd centered(d);
    for (std::size_t idx = 0; idx < rule.size(); ++idx) {
        const DrawVector& v = rule.composition(idx);
        double monomial = rule.weight(idx);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < v[static_cast<std::size_t>(i)]; ++j) monomial *= theta[i];
        if (monomial == 0.0) continue;
        for (int i = 0; i < d; ++i)
            centered[i] = static_cast<double>(rule.addition(idx, i)) - static_cast<double>(s) * theta[i];
        gamma += monomial * centered * centered.transpose();
    }
    return gamma / (static_cast<double>(s) * static_cast<double>(s));
}

Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
        throw std::invalid_argument("solve_continuous_lyapunov: shape mismatch");

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, true);
    const Eigen::MatrixXcd v = solver.eigenvectors();
    const Eigen::VectorXcd d = solver.eigenvalues();

    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i].real() >= 0.0) throw std::invalid_argument("solve_continuous_lyapunov: A is not stable");
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double condition = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!std::isfinite(condition) || condition > 1e8) {
        return lyapunov_by_quadrature(a, q);
    }

    // With A = V D V^{-1}: D Y + Y D = -V^t Q V where Y = V^t X V.
    const Eigen::MatrixXcd rhs = v.transpose() * q * v;
    Eigen::MatrixXcd y(rhs.rows(), rhs.cols());
    for (Eigen::Index i = 0; i < rhs.rows(); ++i)
        for (Eigen::Index j = 0; j < rhs.cols(); ++j) y(i, j) = -rhs(i, j) / (d[i] + d[j]);

    const Eigen::MatrixXcd vt_inv = v.transpose().inverse();
    Eigen::MatrixXd x = (vt_inv * y * v.inverse()).real();
    return 0.5 * (x + x.transpose());
}

Eigen::MatrixXd sigma_matrix(const ReplacementRule& rule, const SimplexPoint& theta) {
    const std::int64_t s = require_balanced(rule, "sigma_matrix");
    require_zero(rule, theta, "sigma_matrix");

    const int d = rule.colours();
    const Eigen::MatrixXd jac = jacobian_h(rule, theta);
    const std::complex<double> lambda = smallest_real_part_of_negated(jac);
    if (regime_of(lambda.real(), static_cast<double>(s)) != Regime::GaussianSqrtN) {
        std::ostringstream os;
        os << "sigma_matrix: defining integral diverges (Re(Lambda) = " << lambda.real() << " <= S/2 = "
           << static_cast<double>(s) / 2.0 << ")";
        throw std::invalid_argument(os.str());
    }

    const Eigen::MatrixXd a = jac / static_cast<double>(s) + 0.5 * Eigen::MatrixXd::Identity(d - 1, d - 1);
    const Eigen::MatrixXd gamma_red = gamma_matrix(rule, theta).topLeftCorner(d - 1, d - 1);
    // The covariance satisfies A X + X A^t = -Gamma_red (A is the chart
    // Jacobian of the drift plus Id/2, acting on the left of the fluctuation
    // process), which is the control-form equation for A^t.
    const Eigen::MatrixXd x_red = solve_continuous_lyapunov(a.transpose(), gamma_red);

    // Lift so rows and columns sum to zero.
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(d, d);
    full.topLeftCorner(d - 1, d - 1) = x_red;
    for (int i = 0; i < d - 1; ++i) {
        const double row = x_red.row(i).sum();
        full(i, d - 1) = -row;
        full(d - 1, i) = -row;
    }
    full(d - 1, d - 1) = x_red.sum();
    return full;
}

CltReport classify_regime(const ReplacementRule& rule, const SimplexPoint& theta) {
    const std::int64_t s = require_balanced(rule, "classify_regime");
    require_zero(rule, theta, "classify_regime");

    const Eigen::MatrixXd jac = jacobian_h(rule, theta);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
    std::vector<std::complex<double>> eigs(static_cast<std::size_t>(jac.rows()));
    for (Eigen::Index i = 0; i < jac.rows(); ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    if (classify_stability(eigs) == Stability::Unstable) {
        throw std::invalid_argument("classify_regime: theta is an unstable zero");
    }

    CltReport report{theta, s, smallest_real_part_of_negated(jac), Regime::Degenerate,
                     gamma_matrix(rule, theta), std::nullopt, std::nullopt};
    report.regime = regime_of(report.lambda.real(), static_cast<double>(s));
    if (report.regime == Regime::GaussianSqrtN) {
        report.sigma = sigma_matrix(rule, theta);
    } else if (report.regime == Regime::AlmostSurePower) {
        report.power_exponent = report.lambda.real() / static_cast<double>(s);
    }
    return report;
}

std::vector<TwoColourCltReport> two_colour_clt(const ReplacementRule& rule) {
    if (rule.colours() != 2) throw std::invalid_argument("two_colour_clt: two-colour rules only");
    const std::int64_t s = require_balanced(rule, "two_colour_clt");
    if (check_diagonal(rule)) throw std::invalid_argument("two_colour_clt: diagonal rule, g vanishes identically");

    const int m = rule.draws();
    std::vector<TwoColourCltReport> reports;
    for (const auto& zero : find_zeros(rule).zeros) {
        if (zero.stability == Stability::Unstable) continue;
        const double theta = zero.location[0];
        // d=2 chart Jacobian is the 1x1 matrix (g'(theta)).
        const double gprime = zero.tangent_eigenvalues.front().real();

        TwoColourCltReport report;
        report.theta = theta;
        report.lambda = -gprime / static_cast<double>(s);
        report.regime = regime_of(-gprime, static_cast<double>(s));
        double gamma = 0.0;
        for (int k = 0; k <= m; ++k) {
            double weight = static_cast<double>(binomial(m, k));
            for (int j = 0; j < k; ++j) weight *= theta;
            for (int j = 0; j < m - k; ++j) weight *= 1.0 - theta;
            const double centered = static_cast<double>(rule.a(m - k)) - static_cast<double>(s) * theta;
            gamma += weight * centered * centered;
        }
        report.gamma = gamma / (static_cast<double>(s) * static_cast<double>(s));
        if (report.regime == Regime::GaussianSqrtN) {
            report.limit_variance = report.gamma / (2.0 * report.lambda - 1.0);
        } else if (report.regime == Regime::GaussianSqrtNOverLogN) {
            report.limit_variance = report.gamma;
        } else if (report.regime == Regime::AlmostSurePower) {
            report.power_exponent = report.lambda;
        }
        reports.push_back(report);
    }
    return reports;
}

NonBalancedReport non_balanced_params(const ReplacementRule& rule, double theta) {
    if (rule.colours() != 2) throw std::invalid_argument("non_balanced_params: two-colour rules only");
    const int m = rule.draws();
    for (int k = 0; k <= m; ++k) {
        if (rule.c(k) < 1) {
            std::ostringstream os;
            os << "non_balanced_params: row " << k << " has a_k+b_k = " << rule.c(k)
               << " < 1; the linear-growth assumption liminf T_n/n > 0 is unverified";
            throw std::invalid_argument(os.str());
        }
    }
    if (std::abs(drift_gtilde(rule, theta)) > 1e-10)
        throw std::invalid_argument("non_balanced_params: theta is not a zero of g~");

    const auto coeffs = reduced_drift_coefficients(rule);
    double gtilde_prime = 0.0;
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
        double term = static_cast<double>(i) * coeffs[i];
        for (std::size_t j = 0; j + 1 < i; ++j) term *= theta;
        gtilde_prime += term;
    }
    if (gtilde_prime > 1e-9)
        throw std::invalid_argument("non_balanced_params: g~'(theta) > 0, theta is not an attainable limit");

    NonBalancedReport report;
    report.theta = theta;
    double omega = 0.0;
    double h_theta = 0.0;
    for (int k = 0; k <= m; ++k) {
        double weight = static_cast<double>(binomial(m, k));
        for (int j = 0; j < k; ++j) weight *= theta;
        for (int j = 0; j < m - k; ++j) weight *= 1.0 - theta;
        omega += weight * static_cast<double>(rule.c(m - k));
        const double centered = (1.0 - theta) * static_cast<double>(rule.a(m - k)) -
                                theta * static_cast<double>(rule.b(m - k));
        h_theta += weight * centered * centered;
    }
    if (omega <= 0.0) throw std::invalid_argument("non_balanced_params: omega is not positive");
    report.omega = omega;
    report.lambda = std::abs(gtilde_prime) / omega;
    report.sigma2 = h_theta / (omega * omega);
    if (report.lambda > 0.5 && report.sigma2 > 0.0) {
        report.clt_variance = report.sigma2 / (2.0 * report.lambda - 1.0);
    }
    return report;
}

} // namespace polyurn
