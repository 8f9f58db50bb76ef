#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "polyurn/rule.hpp"
#include "polyurn/simplex.hpp"

namespace polyurn {

/// The drift field h(x) = sum_v binom(m;v) (prod x_i^{v_i}) (R(v) - r(v) x),
/// evaluated exactly as the multinomial sum.
Eigen::VectorXd drift_h(const ReplacementRule& rule, const SimplexPoint& x);

/// Two-colour drift g(x) = sum_k binom(m,k) x^k (1-x)^{m-k} (a_{m-k} - S x).
/// Requires a balanced two-colour rule.
double drift_g(const ReplacementRule& rule, double x);

/// Two-colour drift g~(x) = sum_k binom(m,k) x^k (1-x)^{m-k}
/// ((1-x) a_{m-k} - x b_{m-k}); balance not required, coincides with g when
/// the rule is balanced.
double drift_gtilde(const ReplacementRule& rule, double x);

/// Analytic Jacobian of the reduced drift in the chart that drops the last
/// coordinate (x_d = 1 - sum x_i), a (d-1)x(d-1) matrix. All eigenvalue and
/// stability statements in this library live in this chart.
Eigen::MatrixXd jacobian_h(const ReplacementRule& rule, const SimplexPoint& x);

/// Monomial coefficients (ascending powers) of the reduced first drift
/// component for a two-colour rule: this is g for balanced rules and g~
/// otherwise. Exact integer arithmetic carried in doubles.
std::vector<double> reduced_drift_coefficients(const ReplacementRule& rule);

enum class Stability { Stable, Unstable, Degenerate };

const char* to_string(Stability s);

/// Stable iff every real part < -1e-9; Degenerate if some real part lies
/// within 1e-9 of zero; Unstable otherwise.
Stability classify_stability(const std::vector<std::complex<double>>& eigenvalues);

struct ZeroReport {
    SimplexPoint location;
    std::vector<std::complex<double>> tangent_eigenvalues; // chart eigenvalues, sorted by (Re, Im)
    Stability stability = Stability::Degenerate;
    double residual = 0.0; // ||h(location)||_2
};

struct ZeroSearchResult {
    std::vector<ZeroReport> zeros; // sorted by location, lexicographically
    bool search_warning = false;   // no Newton start converged (d >= 3 only)
};

/// All zeros of h on the simplex. Two colours: exact expansion of the drift
/// polynomial, companion-matrix eigenvalues, Newton polish. d >= 3: Newton
/// multistarted from the deterministic simplex grid with the given
/// resolution. Rejects diagonal rules (their zero set is the whole simplex).
ZeroSearchResult find_zeros(const ReplacementRule& rule, int grid_resolution = 20);

enum class LyapunovVerdict { ConvergenceCertified, Inconclusive };

struct LyapunovCertificate {
    LyapunovVerdict verdict = LyapunovVerdict::Inconclusive;
    /// Grid points where <h(x), x - theta> >= 0 (the inequality can only
    /// fail at zeros of h when the certificate holds).
    std::vector<SimplexPoint> nonnegative_points;
};

/// Numerical certificate for Robbins-Monro convergence to theta: checks
/// <h(x), x - theta> < -1e-12 on the deterministic simplex grid, ignoring
/// points within 1e-6 of known zeros of h. theta must satisfy ||h|| <= 1e-10.
LyapunovCertificate lyapunov_test(const ReplacementRule& rule, const SimplexPoint& theta,
                                  int grid_resolution = 40);

struct FlowTrajectory {
    std::vector<double> times;
    std::vector<SimplexPoint> points;

    const SimplexPoint& terminal() const { return points.back(); }
};

/// Fixed-step RK4 trajectory of dx/dt = h(x) in reduced coordinates,
/// re-projected to the simplex after every step. A step leaving the simplex
/// by more than 1e-6 signals a too-large step size.
FlowTrajectory flow_integrate(const ReplacementRule& rule, const SimplexPoint& x0, double horizon,
                              double step_size = 1e-2);

} // namespace polyurn
