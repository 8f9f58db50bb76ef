#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polyurn/drift.hpp"
#include "polyurn/rule.hpp"
#include "polyurn/simplex.hpp"

namespace polyurn {

/// Fluctuation regime around a stable zero, set by Re(Lambda) against S/2.
enum class Regime { GaussianSqrtN, GaussianSqrtNOverLogN, AlmostSurePower, Degenerate };

const char* to_string(Regime r);

struct CltReport {
    SimplexPoint theta;
    std::int64_t balance = 0; // S
    /// Eigenvalue of -grad h(theta) (tangent chart) with the smallest real part.
    std::complex<double> lambda;
    Regime regime = Regime::Degenerate;
    Eigen::MatrixXd gamma;                // d x d, annihilates (1,...,1)^t
    std::optional<Eigen::MatrixXd> sigma; // present only in the sqrt(n) regime
    std::optional<double> power_exponent; // Re(Lambda)/S, almost-sure regime only
};

/// Scalar two-colour specialization, in the usual conventions
/// Lambda = -g'(theta)/S compared against 1/2.
struct TwoColourCltReport {
    double theta = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    Regime regime = Regime::Degenerate;
    /// Gamma/(2 Lambda - 1) in the sqrt(n) regime, Gamma in the log regime.
    std::optional<double> limit_variance;
    std::optional<double> power_exponent;
};

struct NonBalancedReport {
    double theta = 0.0;
    double omega = 0.0;  // a.s. limit of T_n/n
    double lambda = 0.0; // |g~'(theta)| / omega
    double sigma2 = 0.0; // H(theta) / omega^2
    /// sigma^2 / (2 lambda - 1); present iff lambda > 1/2 and sigma^2 > 0.
    std::optional<double> clt_variance;
};

/// One-step noise covariance at theta:
/// Gamma = S^-2 sum_v binom(m;v) (prod theta_i^{v_i}) (R(v)-S theta)(R(v)-S theta)^t.
/// Requires a balanced rule and a zero of h.
Eigen::MatrixXd gamma_matrix(const ReplacementRule& rule, const SimplexPoint& theta);

/// Solves A^t X + X A = -Q for symmetric Q via eigendecomposition of A
/// (quadrature fallback if A is defective beyond tolerance). A must be
/// stable.
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Limiting covariance of sqrt(n)(Z_n - theta): solves the Lyapunov equation
/// with A = grad_red h(theta)/S + Id/2 in the reduced chart and lifts back to
/// d x d coordinates with vanishing row and column sums. Rejects regimes
/// where the defining integral diverges (Re(Lambda) <= S/2).
Eigen::MatrixXd sigma_matrix(const ReplacementRule& rule, const SimplexPoint& theta);

/// Full per-zero report: Lambda from the chart Jacobian, regime against S/2
/// (tolerance 1e-9), Gamma always, Sigma in the sqrt(n) regime only.
/// Rejects unstable zeros.
CltReport classify_regime(const ReplacementRule& rule, const SimplexPoint& theta);

/// Scalar reports for every stable or degenerate zero of a balanced
/// two-colour rule. Rejects diagonal rules.
std::vector<TwoColourCltReport> two_colour_clt(const ReplacementRule& rule);

/// Non-balanced two-colour parameters at a zero theta of g~ with
/// g~'(theta) <= 0. Requires min_k (a_k + b_k) >= 1 (the linear-growth
/// assumption backing T_n/n -> omega).
NonBalancedReport non_balanced_params(const ReplacementRule& rule, double theta);

} // namespace polyurn
