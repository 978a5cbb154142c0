#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "curvlab/specfun.hpp"
#include "oracles.hpp"

using namespace curvlab;
using curvlab::specfun::BesselOrder;
namespace sf = curvlab::specfun;
using Catch::Approx;

TEST_CASE("erf matches the quadrature oracle and frozen values") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 2.9, 3.1, 4.0, 5.5}) {
        const double ref = oracles::erf_quadrature(x);
        CHECK(sf::erf(x) == Approx(ref).epsilon(1e-12));
    }
    CHECK(sf::erf(0.0) == 0.0);
    CHECK(sf::erf(1.0) == Approx(0.8427007929497149).epsilon(1e-12));
    CHECK(std::abs(sf::erf(6.0) - 1.0) < 1e-15);
}

TEST_CASE("erf is odd and strictly increasing") {
    double prev = sf::erf(-6.0);
    for (double x = -5.5; x <= 6.0; x += 0.5) {
        CHECK(sf::erf(-x) == Approx(-sf::erf(x)).margin(1e-16));
        CHECK(sf::erf(x) > prev);
        prev = sf::erf(x);
    }
    CHECK_THROWS_AS(sf::erf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(sf::erf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("gamma function values and recurrence") {
    CHECK(sf::gamma_fn(1.0) == Approx(1.0).epsilon(1e-13));
    CHECK(sf::gamma_fn(2.0) == Approx(1.0).epsilon(1e-13));
    CHECK(sf::gamma_fn(0.5) == Approx(kSqrtPi).epsilon(1e-12));
    CHECK(sf::gamma_fn(2.5) == Approx(0.75 * kSqrtPi).epsilon(1e-12));  // Gamma(5/2)
    for (int i = 0; i < 100; ++i) {
        const double x = 0.05 + 8.9 * i / 99.0;
        CHECK(sf::gamma_fn(x + 1.0) == Approx(x * sf::gamma_fn(x)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(sf::gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(sf::gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("BesselOrder admits only the catalog orders") {
    CHECK_NOTHROW(BesselOrder(0.0));
    CHECK_NOTHROW(BesselOrder(0.5));
    CHECK_NOTHROW(BesselOrder(1.0));
    CHECK_THROWS_AS(BesselOrder(0.3), std::domain_error);
    CHECK_THROWS_AS(BesselOrder(1.5), std::domain_error);
}

TEST_CASE("I0, I1 match quadrature and series oracles across the seam") {
    for (double x : {0.05, 0.3, 1.0, 5.0, 12.0, 17.5, 18.5, 25.0}) {
        CHECK(sf::bessel_i(BesselOrder::zero(), x) ==
              Approx(oracles::bessel_i_quadrature(0, x)).epsilon(1e-10));
        CHECK(sf::bessel_i(BesselOrder::one(), x) ==
              Approx(oracles::bessel_i_quadrature(1, x)).epsilon(1e-10));
    }
    CHECK(sf::bessel_i(BesselOrder::one(), 3.0) ==
          Approx(oracles::bessel_i_series(1.0, 3.0)).epsilon(1e-12));
}

TEST_CASE("K0, K1 match the quadrature oracle across the seam") {
    for (double x : {0.01, 0.1, 1.0, 5.0, 8.5, 9.5, 20.0, 100.0}) {
        CHECK(sf::bessel_k(BesselOrder::zero(), x) ==
              Approx(oracles::bessel_k_quadrature(0, x)).epsilon(2e-10));
        CHECK(sf::bessel_k(BesselOrder::one(), x) ==
              Approx(oracles::bessel_k_quadrature(1, x)).epsilon(2e-10));
    }
}

TEST_CASE("half-integer orders reduce to elementary identities") {
    CHECK(sf::bessel_i(BesselOrder::half(), 1.0) ==
          Approx(std::sqrt(2.0 / kPi) * std::sinh(1.0)).epsilon(1e-12));
    CHECK(sf::bessel_i(BesselOrder::half(), 1.0) == Approx(0.9376748882559983).epsilon(1e-10));
    CHECK(sf::bessel_k(BesselOrder::half(), 1.0) ==
          Approx(std::sqrt(0.5 * kPi) * std::exp(-1.0)).epsilon(1e-12));
    CHECK(sf::bessel_k(BesselOrder::half(), 1.0) == Approx(0.4610685044478946).epsilon(1e-10));
    // against the generic power series
    for (double x : {0.2, 1.0, 4.0, 11.0}) {
        CHECK(sf::bessel_i(BesselOrder::half(), x) ==
              Approx(oracles::bessel_i_series(0.5, x)).epsilon(1e-10));
    }
}

TEST_CASE("Wronskian identity I_nu K_nu' - I_nu' K_nu = -1/x") {
    // Equivalent product form: x (I_nu K_{nu+1} + I_{nu+1} K_nu) = 1, evaluated
    // with scaled functions so large x is exact in scale.
    for (BesselOrder nu : {BesselOrder::zero(), BesselOrder::half(), BesselOrder::one()}) {
        for (int i = 0; i <= 40; ++i) {
            const double x = std::pow(10.0, -2.0 + 4.0 * i / 40.0);
            const double prod = sf::bessel_i_scaled(nu, x) * sf::bessel_k_scaled(nu, x);
            const double w = x * prod * (sf::bessel_i_ratio_next(nu, x) + sf::bessel_k_ratio_next(nu, x));
            CHECK(w == Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("scaled and log variants stay usable at large arguments") {
    const double l1 = sf::bessel_i_log(BesselOrder::zero(), 10000.0);
    const double l2 = sf::bessel_i_log(BesselOrder::zero(), 9990.0);
    // I0(x) ~ e^x/sqrt(2 pi x): log-ratio = 10 + 0.5 log(9990/10000) + O(1e-5)
    CHECK(l1 - l2 == Approx(10.0 + 0.5 * std::log(9990.0 / 10000.0)).margin(1e-5));
    const double k1 = sf::bessel_k_log(BesselOrder::one(), 10000.0);
    const double k2 = sf::bessel_k_log(BesselOrder::one(), 9990.0);
    CHECK(k1 - k2 == Approx(-10.0 - 0.5 * std::log(10000.0 / 9990.0)).margin(1e-5));
    CHECK_THROWS_AS(sf::bessel_i(BesselOrder::zero(), 800.0), std::overflow_error);
    CHECK_THROWS_AS(sf::bessel_i(BesselOrder::zero(), -1.0), std::domain_error);
    CHECK_THROWS_AS(sf::bessel_k(BesselOrder::zero(), 0.0), std::domain_error);
}

TEST_CASE("lower incomplete gamma against quadrature") {
    for (double z : {0.01, 0.05, 0.1, 0.5}) {
        const double ref = oracles::integrate(
            [](double t) { return std::sqrt(t) * std::exp(-t); }, 0.0, z, 1e-16);
        CHECK(sf::lower_gamma(1.5, z) == Approx(ref).epsilon(1e-10));
    }
}
