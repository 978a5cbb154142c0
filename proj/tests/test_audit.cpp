#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvlab/audit.hpp"

using namespace curvlab;
using Catch::Approx;

namespace {
const Conductivity kC14{1.0, 4.0};

const RadialParabolicSolution& ball3_run() {
    static const RadialParabolicSolution sol = [] {
        ParabolicOptions opt;
        opt.snapshots = 14;
        return solve_radial_parabolic_with_estimate(Ball{3, 1.0}, kC14, opt);
    }();
    return sol;
}
}  // namespace

TEST_CASE("calibrate_K catalog values") {
    CHECK(calibrate_K(Shape(HalfSpace{3}), kC14) == 0.0);
    // Ball(3,1), equal conductivities, audit tube 1/2, no headroom:
    // K1 = (4 * 1/2) * max|lap delta| * f'(0) = 2 * 4 / (2 sqrt(pi)) = 4/sqrt(pi)
    const Conductivity eq{1.0, 1.0};
    CHECK(calibrate_K(Shape(Ball{3, 1.0}), eq, 0.5, 1.0) ==
          Approx(4.0 / kSqrtPi).epsilon(1e-14));
    // default headroom doubles it
    CHECK(calibrate_K(Shape(Ball{3, 1.0}), eq) == Approx(8.0 / kSqrtPi).epsilon(1e-14));
    // linear in max |Delta delta|: two audit tubes compared
    const double k_half = calibrate_K(Shape(Ball{3, 1.0}), kC14, 0.5, 1.0);
    const double k_quarter = calibrate_K(Shape(Ball{3, 1.0}), kC14, 0.25, 1.0);
    // max|lap| = 2/(1-a): ratio (2/0.5) / (2/0.75) = 1.5
    CHECK(k_half / k_quarter == Approx(1.5).epsilon(1e-12));
    // ellipse: max|lap delta| = kappa_max / (1 - a kappa_max)
    const double ka = calibrate_K(Shape(Ellipse2D{2.0, 1.0}), eq, 0.25, 1.0);
    CHECK(ka == Approx(2.0 * (2.0 / (1.0 - 0.5)) / (2.0 * kSqrtPi)).epsilon(1e-12));
}

TEST_CASE("half-space with equal phases: psi is the exact solution") {
    // u(x, t) = f(delta / sqrt(sigma t)) solves the Cauchy problem exactly and
    // coincides with psi, so the sandwich holds with K = 0
    const Shape hs(HalfSpace{2});
    const Conductivity eq{1.7, 1.7};
    for (double t : {1e-4, 1e-2, 0.5}) {
        for (double d : {-0.8, -0.1, 0.0, 0.2, 1.4}) {
            const std::vector<double> x{0.3, d};
            const double exact = f_profile(d / std::sqrt(1.7 * t));
            CHECK(psi(x, t, hs, eq) == Approx(exact).margin(1e-15));
        }
    }
    CHECK(calibrate_K(hs, eq) == 0.0);
}

TEST_CASE("parabolic barrier sandwich passes with K_cal and fails with K = 0") {
    const auto& sol = ball3_run();
    const Ball ball{3, 1.0};
    const double K = calibrate_K(Shape(ball), kC14);
    const double slack = 3.0 * sol.error_estimate;

    const auto pass = barrier_check_parabolic(sol, ball, kC14, K, slack);
    INFO(pass.describe());
    CHECK(pass.pass);

    const auto fail = barrier_check_parabolic(sol, ball, kC14, 0.0, slack);
    INFO(fail.describe());
    CHECK_FALSE(fail.pass);
    CHECK(fail.max_violation > 0.0);
    // the violation carries a witness and scales like sqrt(t) * curvature
    CHECK(fail.witness_time > 0.0);
    CHECK(std::abs(fail.witness_delta) <= 0.5);
}

TEST_CASE("elliptic barrier sandwich on the Bessel oracle") {
    const Ball ball{3, 1.0};
    const double K = calibrate_K(Shape(ball), kC14);
    for (double lambda : {1e2, 1e4}) {
        const auto s = solve_radial_bessel(ball, kC14, lambda);
        const auto pass = barrier_check_elliptic([&](double r) { return s(r); }, ball,
                                                 kC14, K, lambda, 0.0);
        INFO(pass.describe());
        CHECK(pass.pass);
        const auto fail = barrier_check_elliptic([&](double r) { return s(r); }, ball,
                                                 kC14, 0.0, lambda, 0.0);
        CHECK_FALSE(fail.pass);
        CHECK(fail.max_violation > 0.0);
    }
}

TEST_CASE("elliptic barrier sandwich on the radial FD solution") {
    const Ball ball{3, 1.0};
    const double lambda = 1e3;
    const auto grid = default_elliptic_grid(1.0, kC14, lambda);
    const auto f = solve_radial_fd(ball, kC14, lambda, grid);
    const double K = calibrate_K(Shape(ball), kC14);
    // discretization slack: 3x the FD-vs-oracle scale
    const auto rep = barrier_check_elliptic([&](double r) { return f.value_at(r); },
                                            ball, kC14, K, lambda, 3e-4);
    INFO(rep.describe());
    CHECK(rep.pass);
}

TEST_CASE("maximum principle check") {
    // a valid solve passes
    const auto f = solve_radial_fd(Ball{3, 1.0}, kC14, 1e3,
                                   default_elliptic_grid(1.0, kC14, 1e3));
    CHECK(maximum_principle_check(f).pass);

    // a synthetic violation fails and names the offending location
    std::vector<double> vals{0.2, 0.5, 1.001, 0.4};
    const auto rep = maximum_principle_check(
        vals, [](std::size_t i) { return "cell " + std::to_string(i); });
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_value == Approx(1.001));
    CHECK(rep.witness_max == "cell 2");

    // characteristic-function data sits exactly on the boundary of the range
    std::vector<double> chi{0.0, 1.0, 1.0, 0.0};
    CHECK(maximum_principle_check(chi).pass);

    // trace overload
    const auto& sol = ball3_run();
    CHECK(maximum_principle_check(sol.trace).pass);
}

TEST_CASE("barrier checks are pure and idempotent") {
    const auto& sol = ball3_run();
    const Ball ball{3, 1.0};
    const double K = calibrate_K(Shape(ball), kC14);
    const auto a = barrier_check_parabolic(sol, ball, kC14, K, 0.001);
    const auto b = barrier_check_parabolic(sol, ball, kC14, K, 0.001);
    CHECK(a.max_violation == b.max_violation);
    CHECK(a.witness_delta == b.witness_delta);
    CHECK(a.witness_time == b.witness_time);
}
