#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvlab/closedforms.hpp"
#include "oracles.hpp"

using namespace curvlab;
using Catch::Approx;

namespace {
const Conductivity kEqual{1.0, 1.0};
const Conductivity kC14{1.0, 4.0};
const Conductivity kC41{4.0, 1.0};
const Conductivity kC9{9.0, 0.25};
}  // namespace

TEST_CASE("conductivity invariants") {
    CHECK_THROWS_AS(Conductivity(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Conductivity(1.0, -2.0), std::domain_error);
    CHECK(kC14.min_sigma() == 1.0);
    CHECK(kC14.max_sigma() == 4.0);
}

TEST_CASE("interface constant") {
    CHECK(interface_constant(kEqual) == Approx(0.5));
    CHECK(interface_constant(kC14) == Approx(1.0 / 3.0));
    CHECK(interface_constant(kC41) == Approx(2.0 / 3.0));
    CHECK(interface_constant(kC41) == Approx(1.0 - interface_constant(kC14)));
}

TEST_CASE("formula constants and the Karamata ratio") {
    for (const auto& c : {kEqual, kC14, kC9}) {
        const auto fc = FormulaConstants::from(c);
        CHECK(fc.interface_constant > 0.0);
        CHECK(fc.interface_constant < 1.0);
        CHECK(fc.elliptic_coeff / fc.parabolic_coeff ==
              Approx(0.75 * kSqrtPi).epsilon(1e-15));
        CHECK(fc.elliptic_coeff / fc.parabolic_coeff ==
              Approx(specfun::gamma_fn(2.5)).epsilon(1e-12));
    }
    CHECK(FormulaConstants::from(kEqual).interface_constant == Approx(0.5));
}

TEST_CASE("profile f") {
    CHECK(f_profile(0.0) == Approx(0.5));
    CHECK(f_profile(2.0) == Approx(0.5 * (1.0 + specfun::erf(1.0))).epsilon(1e-14));
    CHECK(f_profile(2.0) == Approx(0.9213503964748575).epsilon(1e-10));
    CHECK(f_profile(40.0) == Approx(1.0).margin(1e-15));
    CHECK(f_profile(-40.0) == Approx(0.0).margin(1e-15));
    // f'' + (xi/2) f' = 0 with analytic derivatives
    for (int i = 0; i < 50; ++i) {
        const double xi = -5.0 + 10.0 * i / 49.0;
        CHECK(std::abs(f_second(xi) + 0.5 * xi * f_prime(xi)) < 1e-10);
    }
    // definition check by quadrature: f(xi) = 1/(2 sqrt(pi)) int_-inf^xi e^{-s^2/4}
    const double q = oracles::integrate(
        [](double s) { return std::exp(-0.25 * s * s); }, -30.0, 1.3, 1e-14);
    CHECK(f_profile(1.3) == Approx(q / (2.0 * kSqrtPi)).epsilon(1e-12));
}

TEST_CASE("profile F: closed form, C^1 matching, quadrature oracle") {
    CHECK(F_profile(0.0) == Approx(0.5));
    CHECK(F_profile(1.0) == Approx(1.0 - 0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(F_profile(1.0) == Approx(0.8160602794142788).epsilon(1e-10));
    CHECK(F_prime(1e-14) == Approx(0.5).margin(1e-10));
    CHECK(F_prime(-1e-14) == Approx(0.5).margin(1e-10));
    for (double eta : {0.7, -0.7}) {
        const double ref = oracles::integrate(
            [eta](double t) { return std::exp(-t) * f_profile(eta / std::sqrt(t)); },
            1e-12, 60.0, 1e-12);
        CHECK(F_profile(eta) == Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("two-phase profile Phi and its transmission conditions") {
    for (const auto& c : {kEqual, kC14, kC9}) {
        CHECK(phi_profile(0.0, c) == Approx(interface_constant(c)).epsilon(1e-15));
        const double flux_p = c.sigma_plus * phi_prime(0.0, c, Side::Plus);
        const double flux_m = c.sigma_minus * phi_prime(0.0, c, Side::Minus);
        CHECK(flux_p == Approx(flux_m).epsilon(1e-14));
        // residual of -sigma* Phi'' + Phi - chi* with analytic derivatives
        for (double eta : {0.5, 2.0, -0.5, -2.0}) {
            const double sigma = eta > 0 ? c.sigma_plus : c.sigma_minus;
            const double chi = eta > 0 ? 1.0 : 0.0;
            const double r = -sigma * phi_second(eta, c) + phi_profile(eta, c) - chi;
            CHECK(std::abs(r) < 1e-10);
        }
        // monotone, bounded, correct limits (window scaled by the decay lengths)
        const double lm = 20.0 * std::sqrt(c.sigma_minus), lp = 20.0 * std::sqrt(c.sigma_plus);
        double prev = phi_profile(-lm, c);
        for (int i = 1; i <= 80; ++i) {
            const double eta = -lm + (lm + lp) * i / 80.0;
            const double v = phi_profile(eta, c);
            CHECK(v > prev);
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            CHECK(phi_prime(eta, c) > 0.0);
            prev = v;
        }
        CHECK(phi_profile(-3.0 * lm, c) == Approx(0.0).margin(1e-12));
        CHECK(phi_profile(3.0 * lp, c) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("barrier psi: interface value, equal-phase collapse, transmission") {
    Shape ball(Ball{3, 1.0});
    const std::vector<double> on_iface{0.0, 1.0, 0.0};
    for (double t : {1e-4, 1e-2, 1.0})
        CHECK(psi(on_iface, t, ball, kC14) == Approx(interface_constant(kC14)).epsilon(1e-14));

    // equal conductivities: psi = f(delta / sqrt(sigma t)) on both sides
    const Conductivity eq{2.25, 2.25};
    for (double r : {0.7, 0.9, 1.1, 1.4}) {
        const std::vector<double> x{r, 0.0, 0.0};
        const double delta = 1.0 - r;
        const double expect = f_profile(delta / std::sqrt(2.25 * 0.01));
        CHECK(psi(x, 0.01, ball, eq) == Approx(expect).epsilon(1e-13));
    }

    // flux transmission via one-sided numerical normal derivatives
    Shape ell(Ellipse2D{2.0, 1.0});
    const double t = 0.0025;
    for (const auto& p : ell.interface_samples(7)) {
        const auto nv = ell.unit_normal(p);
        // h well above the foot-point solve's ~1e-11 absolute noise, well
        // below the profile scale sqrt(sigma t) = 0.05
        const double h = 3e-5;
        auto at = [&](double d) {  // d > 0 on the inside
            const std::vector<double> x{p[0] - d * nv[0], p[1] - d * nv[1]};
            return psi(x, t, ell, kC14);
        };
        const double v0 = psi(p, t, ell, kC14);
        // second-order one-sided differences toward each side
        const double din = (-3.0 * v0 + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h);
        const double dout = (3.0 * v0 - 4.0 * at(-h) + at(-2.0 * h)) / (2.0 * h);
        const double flux_in = kC14.sigma_plus * din;
        const double flux_out = kC14.sigma_minus * dout;
        CHECK(flux_in == Approx(flux_out).epsilon(5e-6));
    }

    CHECK_THROWS_AS(psi(std::vector<double>{3.0, 0.0, 0.0}, 0.1, ball, kC14),
                    std::domain_error);
    CHECK_THROWS_AS(psi(on_iface, 0.0, ball, kC14), std::domain_error);
}

TEST_CASE("psi residual identity under numerical space-time differentiation") {
    Shape ball(Ball{3, 1.0});
    const Conductivity c = kC14;
    const double t = 0.02;
    for (double r : {0.8, 0.93, 1.07, 1.25}) {
        const std::vector<double> x{0.0, 0.0, r};
        const double ht = 1e-6 * t;
        auto psit = [&](double tt) { return psi(x, tt, ball, c); };
        const double dpsi_dt = oracles::central_diff(psit, t, ht);
        // radial Laplacian: psi'' + (N-1)/r psi'
        auto psir = [&](double rr) {
            return psi(std::vector<double>{0.0, 0.0, rr}, t, ball, c);
        };
        const double hr = 2e-5;
        const double lap = oracles::central_diff2(psir, r, hr) +
                           2.0 / r * oracles::central_diff(psir, r, hr);
        const double sigma = r < 1.0 ? c.sigma_plus : c.sigma_minus;
        const double lhs = dpsi_dt - sigma * lap;
        const double delta = 1.0 - r;
        const double rhs = psi_heat_residual(delta, -2.0 / r, t, c);
        CHECK(lhs == Approx(rhs).epsilon(1e-6).margin(1e-9));
    }
}

TEST_CASE("elliptic barrier Psi_lambda") {
    Shape ball(Ball{2, 1.0});
    const std::vector<double> on_iface{1.0, 0.0};
    CHECK(psi_lambda(on_iface, 50.0, ball, kC14) ==
          Approx(interface_constant(kC14)).epsilon(1e-14));

    // quadrature oracle of the definition: Psi_lambda = lambda int e^{-lambda t} psi dt
    const double lambda = 500.0;
    for (double r : {0.9, 0.96, 1.08}) {
        const std::vector<double> x{r, 0.0};
        const double ref = lambda * oracles::integrate(
                                        [&](double t) {
                                            return std::exp(-lambda * t) *
                                                   psi(x, t, ball, kC14);
                                        },
                                        1e-9, 60.0 / lambda, 1e-12);
        CHECK(psi_lambda(x, lambda, ball, kC14) == Approx(ref).epsilon(1e-6));
    }

    // delta = 1/sqrt(lambda) substitution
    const double lam = 1.0e4;
    const double r = 1.0 - 1.0 / std::sqrt(lam);
    CHECK(psi_lambda(std::vector<double>{r, 0.0}, lam, ball, kC14) ==
          Approx(phi_profile(1.0, kC14)).epsilon(1e-12));
}

TEST_CASE("blow-up limit profile S_*") {
    // value at zero
    CHECK(s_star(0.0, kC14, 2.0) ==
          Approx(2.0 * std::sqrt(4.0) / (2.0 * 3.0)).epsilon(1e-14));  // 2/3
    CHECK(s_star(0.0, kEqual, 2.0) == Approx(0.5).epsilon(1e-14));
    // one-sided derivatives vanish at zero
    CHECK(s_star_prime(0.0, kC14, 2.0, Side::Plus) == Approx(0.0).margin(1e-15));
    CHECK(s_star_prime(0.0, kC14, 2.0, Side::Minus) == Approx(0.0).margin(1e-15));
    // residual of -sigma* S'' + S - curv sigma* Phi' = 0, analytic derivatives
    for (const auto& c : {kEqual, kC14, kC9}) {
        for (int i = 0; i < 50; ++i) {
            const double z = -6.0 + 12.2 * i / 49.0;
            if (std::abs(z) < 1e-9) continue;
            const double curv = 1.7;
            const double sigma = z > 0 ? c.sigma_plus : c.sigma_minus;
            const double r = -sigma * s_star_second(z, c, curv) + s_star(z, c, curv) -
                             curv * sigma * phi_prime(z, c);
            CHECK(std::abs(r) < 1e-10);
        }
    }
    // matches central differences away from the kink
    for (double z : {0.7, -1.3}) {
        auto f = [&](double zz) { return s_star(zz, kC14, 2.0); };
        CHECK(s_star_prime(z, kC14, 2.0) ==
              Approx(oracles::central_diff(f, z, 1e-6)).epsilon(1e-7));
        CHECK(s_star_second(z, kC14, 2.0) ==
              Approx(oracles::central_diff2(f, z, 1e-4)).epsilon(1e-6));
    }
}

TEST_CASE("helmholtz residual identity for Psi_lambda") {
    // -sigma Lap Psi + lambda Psi - lambda chi computed by differences equals
    // the closed form
    Shape ball(Ball{2, 1.0});
    const double lambda = 200.0;
    for (double r : {0.85, 1.2}) {
        auto f = [&](double rr) {
            return psi_lambda(std::vector<double>{rr, 0.0}, lambda, ball, kC14);
        };
        const double h = 1e-5;
        const double lap = oracles::central_diff2(f, r, h) + oracles::central_diff(f, r, h) / r;
        const double sigma = r < 1.0 ? kC14.sigma_plus : kC14.sigma_minus;
        const double chi = r < 1.0 ? 1.0 : 0.0;
        const double lhs = -sigma * lap + lambda * (f(r) - chi);
        CHECK(lhs == Approx(helmholtz_residual(1.0 - r, -1.0 / r, lambda, kC14))
                         .epsilon(1e-5).margin(1e-7));
    }
}
