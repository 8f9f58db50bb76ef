#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "polyurn/drift.hpp"
#include "polyurn/report.hpp"

using namespace polyurn;

namespace {

SimplexPoint random_interior_point(int d, RngStream& rng) {
    std::vector<double> coords(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (auto& c : coords) {
        c = 0.05 + rng.next_unit();
        sum += c;
    }
    for (auto& c : coords) c /= sum;
    return SimplexPoint(std::move(coords));
}

} // namespace

TEST_CASE("drift vanishes at the barycentre of the symmetric three-colour example") {
    auto rule = test::example_rule("4.2.1");
    const Eigen::VectorXd h = drift_h(rule, SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK(h.norm() <= 1e-14);
}

TEST_CASE("drift at a vertex reduces to the pure-draw row") {
    RngStream rng(91, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 3);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        auto rule = test::random_rule(d, m, -2, 4, rng);
        for (int i = 0; i < d; ++i) {
            std::vector<double> coords(static_cast<std::size_t>(d), 0.0);
            coords[static_cast<std::size_t>(i)] = 1.0;
            const Eigen::VectorXd h = drift_h(rule, SimplexPoint(coords));
            DrawVector pure(static_cast<std::size_t>(d), 0);
            pure[static_cast<std::size_t>(i)] = m;
            const std::size_t idx = rule.index_of(pure);
            for (int k = 0; k < d; ++k) {
                const double expected = static_cast<double>(rule.addition(idx, k)) -
                                        static_cast<double>(rule.row_sum(idx)) * coords[static_cast<std::size_t>(k)];
                CHECK(h[k] == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("drift vanishes at the interior zero of 4.2.2") {
    auto rule = test::example_rule("4.2.2");
    CHECK(drift_h(rule, SimplexPoint({0.2, 0.4, 0.4})).norm() <= 1e-14);
}

TEST_CASE("balanced drift is tangent to the simplex") {
    RngStream rng(92, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto rule = test::random_balanced_rule(3, 2, 4, rng);
        for (int p = 0; p < 10; ++p) {
            const Eigen::VectorXd h = drift_h(rule, random_interior_point(3, rng));
            CHECK(std::abs(h.sum()) <= 1e-12);
        }
    }
}

TEST_CASE("two-colour g matches the factored forms from the catalogue") {
    auto r411 = test::example_rule("4.1.1");
    auto r415 = test::example_rule("4.1.5");
    for (int i = 0; i <= 100; ++i) {
        const double x = static_cast<double>(i) / 100.0;
        CHECK(drift_g(r411, x) == doctest::Approx((1 + x) * (1 - 2 * x)).epsilon(1e-12));
        const double g415 = -200.0 * (x - 0.1) * (x - 0.5) * (x - 0.9);
        CHECK(std::abs(drift_g(r415, x) - g415) <= 1e-9);
    }
}

TEST_CASE("g at the endpoints picks out single rows") {
    auto rule = test::example_rule("4.1.3");
    CHECK(drift_g(rule, 0.0) == doctest::Approx(static_cast<double>(rule.a(rule.draws()))));
}

TEST_CASE("g rejects non-balanced and multi-colour rules") {
    CHECK_THROWS_AS(drift_g(test::example_rule("5.1"), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(drift_g(test::example_rule("4.2.1"), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(drift_gtilde(test::example_rule("4.2.1"), 0.5), std::invalid_argument);
}

TEST_CASE("g~ matches the closed forms of the non-balanced examples") {
    auto r51 = test::example_rule("5.1");
    auto r52 = test::example_rule("5.2"); // a=1, b=4, m=2
    auto r53 = test::example_rule("5.3"); // a=1, b=2, m=2
    for (int i = 0; i <= 100; ++i) {
        const double x = static_cast<double>(i) / 100.0;
        CHECK(drift_gtilde(r51, x) ==
              doctest::Approx((1 - x) * (1 - x) * (1 - x) - x * x * x).epsilon(1e-12));
        CHECK(drift_gtilde(r52, x) ==
              doctest::Approx(2.0 * (1.0 * (1 - x) * (1 - x) - 4.0 * x * x)).epsilon(1e-12));
        CHECK(drift_gtilde(r53, x) == doctest::Approx(2.0 * (1.0 - 2.0) * x * (1 - x)).epsilon(1e-12));
    }
}

TEST_CASE("g~ equals g for balanced two-colour rules") {
    RngStream rng(93, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto rule = test::random_balanced_rule(2, 1 + static_cast<int>(rng.next_u64() % 3), 5, rng);
        for (int i = 0; i <= 100; ++i) {
            const double x = static_cast<double>(i) / 100.0;
            CHECK(drift_gtilde(rule, x) == doctest::Approx(drift_g(rule, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("chart Jacobian of 4.2.1 at the barycentre is -Id") {
    const Eigen::MatrixXd jac = jacobian_h(test::example_rule("4.2.1"), SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    CHECK((jac + Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("chart Jacobian of 4.2.2 has eigenvalues {-2, -18/5}") {
    const Eigen::MatrixXd jac = jacobian_h(test::example_rule("4.2.2"), SimplexPoint({0.2, 0.4, 0.4}));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac);
    std::vector<double> re{solver.eigenvalues()[0].real(), solver.eigenvalues()[1].real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-3.6).epsilon(1e-12));
    CHECK(re[1] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::abs(solver.eigenvalues()[0].imag()) <= 1e-12);
}

TEST_CASE("diagonal rules have a vanishing Jacobian") {
    auto rule = test::diagonal_rule(3, 2, 3);
    RngStream rng(94, 0);
    for (int p = 0; p < 5; ++p) {
        CHECK(jacobian_h(rule, random_interior_point(3, rng)).norm() <= 1e-12);
    }
}

TEST_CASE("chart Jacobian matches central finite differences") {
    RngStream rng(95, 0);
    const double eps = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 3);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        auto rule = test::random_rule(d, m, -2, 4, rng);
        for (int p = 0; p < 10; ++p) {
            const SimplexPoint x = random_interior_point(d, rng);
            const Eigen::MatrixXd jac = jacobian_h(rule, x);
            for (int j = 0; j < d - 1; ++j) {
                std::vector<double> up = x.coords();
                std::vector<double> down = x.coords();
                up[static_cast<std::size_t>(j)] += eps;
                up[static_cast<std::size_t>(d - 1)] -= eps;
                down[static_cast<std::size_t>(j)] -= eps;
                down[static_cast<std::size_t>(d - 1)] += eps;
                const Eigen::VectorXd fd =
                    (drift_h(rule, SimplexPoint(up)) - drift_h(rule, SimplexPoint(down))) / (2 * eps);
                for (int k = 0; k < d - 1; ++k) {
                    const double scale = std::max(1.0, std::abs(jac(k, j)));
                    CHECK(std::abs(fd[k] - jac(k, j)) / scale <= 1e-6);
                }
            }
        }
    }
}

TEST_CASE("4.1.3 has the single stable zero 1 - sqrt(2)/2") {
    const auto result = find_zeros(test::example_rule("4.1.3"));
    REQUIRE(result.zeros.size() == 1);
    CHECK(result.zeros[0].location[0] == doctest::Approx(1.0 - std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(result.zeros[0].stability == Stability::Stable);
}

TEST_CASE("4.1.5 zeros and stabilities, with g' = -64 at the stable pair") {
    const auto result = find_zeros(test::example_rule("4.1.5"));
    REQUIRE(result.zeros.size() == 3);
    CHECK(result.zeros[0].location[0] == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(result.zeros[1].location[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(result.zeros[2].location[0] == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(result.zeros[0].stability == Stability::Stable);
    CHECK(result.zeros[1].stability == Stability::Unstable);
    CHECK(result.zeros[2].stability == Stability::Stable);
    CHECK(result.zeros[0].tangent_eigenvalues[0].real() == doctest::Approx(-64.0).epsilon(1e-9));
    CHECK(result.zeros[2].tangent_eigenvalues[0].real() == doctest::Approx(-64.0).epsilon(1e-9));
}

TEST_CASE("the rock-paper-scissors scheme has four zeros, none stable") {
    const auto result = find_zeros(test::example_rule("4.2.5"));
    REQUIRE(result.zeros.size() == 4);
    for (const auto& zero : result.zeros) {
        CHECK(zero.stability != Stability::Stable);
        CHECK(zero.residual <= 1e-10);
    }
    CHECK(distance(result.zeros[2].location, SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3})) <= 1e-9);
}

TEST_CASE("4.2.1 vertex zeros carry eigenvalues {1, -3}") {
    const auto result = find_zeros(test::example_rule("4.2.1"));
    REQUIRE(result.zeros.size() == 4);
    for (const auto& zero : result.zeros) {
        if (zero.stability != Stability::Unstable) continue;
        CHECK(zero.tangent_eigenvalues[0].real() == doctest::Approx(-3.0).epsilon(1e-9));
        CHECK(zero.tangent_eigenvalues[1].real() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("every reported zero re-evaluates to a tiny residual") {
    for (const char* name : {"4.1.1", "4.1.2", "4.1.4", "4.2.2", "4.2.3", "4.2.4", "5.1", "5.2", "5.3"}) {
        for (const auto& zero : find_zeros(test::example_rule(name)).zeros) {
            CHECK(drift_h(test::example_rule(name), zero.location).norm() <= 1e-10);
        }
    }
}

TEST_CASE("two-colour root isolation misses no sign change on a dense grid") {
    RngStream rng(96, 0);
    std::vector<ReplacementRule> rules;
    for (const char* name : {"4.1.1", "4.1.2", "4.1.3", "4.1.4", "4.1.5", "5.1", "5.2", "5.3"})
        rules.push_back(test::example_rule(name));
    for (int trial = 0; trial < 10; ++trial) rules.push_back(test::random_balanced_rule(2, 2, 5, rng));

    for (const auto& rule : rules) {
        if (check_diagonal(rule)) continue;
        const auto coeffs = reduced_drift_coefficients(rule);
        const auto eval = [&](double x) {
            double value = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) value = value * x + coeffs[i];
            return value;
        };
        const auto zeros = find_zeros(rule).zeros;
        const int grid = 10000;
        double prev = eval(0.0);
        for (int i = 1; i <= grid; ++i) {
            const double x = static_cast<double>(i) / grid;
            const double curr = eval(x);
            if (prev * curr < 0.0) {
                bool found = false;
                for (const auto& z : zeros) {
                    found = found || (z.location[0] >= x - 1.5 / grid && z.location[0] <= x + 0.5 / grid);
                }
                CHECK(found);
            }
            prev = curr;
        }
    }
}

TEST_CASE("diagonal rules are rejected by the zero search") {
    CHECK_THROWS_AS(find_zeros(test::diagonal_rule(3, 2, 2)), std::invalid_argument);
}

TEST_CASE("single-draw stable zero equals the Perron direction") {
    // m = 1: compositions are the unit vectors, so the rule is the classical
    // replacement matrix with rows R(e_i); balanced, irreducible.
    ReplacementRule rule(3, 1, {{3, 1, 1}, {1, 3, 1}, {2, 2, 1}});
    REQUIRE(check_balance(rule).value() == 5);

    // Power-iteration oracle on x -> sum_i x_i R(e_i).
    Eigen::Vector3d v(1.0, 1.0, 1.0);
    Eigen::Matrix3d m;
    m << 3, 1, 1, 1, 3, 1, 2, 2, 1;
    for (int it = 0; it < 500; ++it) {
        v = m.transpose() * v;
        v /= v.sum();
    }

    const auto result = find_zeros(rule);
    const ZeroReport* stable = nullptr;
    for (const auto& zero : result.zeros) {
        if (zero.stability == Stability::Stable) {
            REQUIRE(stable == nullptr);
            stable = &zero;
        }
    }
    REQUIRE(stable != nullptr);
    for (int i = 0; i < 3; ++i) CHECK(stable->location[i] == doctest::Approx(v[i]).epsilon(1e-9));
}

TEST_CASE("Lyapunov certificate for 4.2.1: certified, vertices are the only non-negative points") {
    auto rule = test::example_rule("4.2.1");
    const auto cert = lyapunov_test(rule, SimplexPoint({1.0 / 3, 1.0 / 3, 1.0 / 3}), 40);
    CHECK(cert.verdict == LyapunovVerdict::ConvergenceCertified);
    REQUIRE(cert.nonnegative_points.size() == 3);
    for (const auto& p : cert.nonnegative_points) {
        double max_coord = 0.0;
        for (int i = 0; i < 3; ++i) max_coord = std::max(max_coord, p[i]);
        CHECK(max_coord == doctest::Approx(1.0));
    }
}

TEST_CASE("Lyapunov certificate for 4.2.4 targets the degenerate vertex") {
    auto rule = test::example_rule("4.2.4");
    const auto cert = lyapunov_test(rule, SimplexPoint({0.0, 0.0, 1.0}), 40);
    CHECK(cert.verdict == LyapunovVerdict::ConvergenceCertified);
}

TEST_CASE("Lyapunov test is inconclusive for 4.1.5 towards 1/10") {
    auto rule = test::example_rule("4.1.5");
    // Direct check that the inequality genuinely fails between 1/2 and 9/10.
    CHECK(drift_g(rule, 0.75) * (0.75 - 0.1) > 0.0);
    const auto cert = lyapunov_test(rule, SimplexPoint({0.1, 0.9}), 100);
    CHECK(cert.verdict == LyapunovVerdict::Inconclusive);
    bool upper_violation = false;
    for (const auto& p : cert.nonnegative_points) upper_violation = upper_violation || (p[0] > 0.5 && p[0] < 0.9);
    CHECK(upper_violation);
}

TEST_CASE("Lyapunov test rejects points that are not zeros") {
    CHECK_THROWS_AS(lyapunov_test(test::example_rule("4.2.1"), SimplexPoint({0.5, 0.25, 0.25}), 20),
                    std::invalid_argument);
}

TEST_CASE("flow of a diagonal rule is constant") {
    auto rule = test::diagonal_rule(3, 2, 2);
    const SimplexPoint x0({0.5, 0.3, 0.2});
    const auto trajectory = flow_integrate(rule, x0, 5.0, 0.01);
    CHECK(distance(trajectory.terminal(), x0) <= 1e-12);
}

TEST_CASE("flow of 4.2.2 converges to the stable zero") {
    auto rule = test::example_rule("4.2.2");
    const auto trajectory = flow_integrate(rule, SimplexPoint({10.0 / 16, 3.0 / 16, 3.0 / 16}), 50.0, 0.01);
    CHECK(distance(trajectory.terminal(), SimplexPoint({0.2, 0.4, 0.4})) <= 1e-6);
    CHECK(trajectory.points.size() == trajectory.times.size());
}

TEST_CASE("flow of the rock-paper-scissors scheme stays away from every zero") {
    auto rule = test::example_rule("4.2.5");
    const auto trajectory = flow_integrate(rule, SimplexPoint({0.5, 0.3, 0.2}), 100.0, 0.01);
    for (const auto& zero : find_zeros(rule).zeros) {
        CHECK(distance(trajectory.terminal(), zero.location) > 0.05);
    }
}

TEST_CASE("an oversized flow step that leaves the simplex is an error") {
    auto rule = test::example_rule("4.2.2");
    CHECK_THROWS_AS(flow_integrate(rule, SimplexPoint({0.98, 0.01, 0.01}), 10.0, 10.0), std::runtime_error);
}

TEST_CASE("trajectories export as t, x_1..x_d CSV") {
    auto rule = test::example_rule("4.2.2");
    const auto trajectory = flow_integrate(rule, SimplexPoint({0.5, 0.3, 0.2}), 0.05, 0.01);
    const auto path = std::filesystem::temp_directory_path() / "polyurn_flow_test.csv";
    write_trajectory_csv(trajectory, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,x_1,x_2,x_3");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 6); // t = 0 plus five steps
    std::filesystem::remove(path);
}
