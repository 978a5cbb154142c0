#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "curvlab/common.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/specfun.hpp"

namespace curvlab {

/// Piecewise-constant two-phase conductivity: sigma_plus inside Omega,
/// sigma_minus outside.
struct Conductivity {
    double sigma_plus;
    double sigma_minus;

    Conductivity(double sp, double sm) : sigma_plus(sp), sigma_minus(sm) {
        if (!(sp > 0.0) || !(sm > 0.0) || !std::isfinite(sp) || !std::isfinite(sm))
            throw std::domain_error("Conductivity: sigma_plus, sigma_minus must be > 0");
    }

    double min_sigma() const { return std::min(sigma_plus, sigma_minus); }
    double max_sigma() const { return std::max(sigma_plus, sigma_minus); }
    double sigma(Side s) const { return s == Side::Plus ? sigma_plus : sigma_minus; }
    double sqrt_plus() const { return std::sqrt(sigma_plus); }
    double sqrt_minus() const { return std::sqrt(sigma_minus); }
    double sqrt_sum() const { return sqrt_plus() + sqrt_minus(); }
};

/// Instantaneous interface temperature sqrt(sigma+)/(sqrt(sigma+)+sqrt(sigma-)).
inline double interface_constant(const Conductivity& c) {
    return c.sqrt_plus() / c.sqrt_sum();
}

/// The constants of the two curvature-extraction formulas.
struct FormulaConstants {
    double interface_constant;
    double parabolic_coeff;  // 2 sqrt(s+ s-) / (3 sqrt(pi) (sqrt(s+)+sqrt(s-)))
    double elliptic_coeff;   // sqrt(s+ s-) / (2 (sqrt(s+)+sqrt(s-)))

    static FormulaConstants from(const Conductivity& c) {
        const double g = c.sqrt_plus() * c.sqrt_minus();
        const double s = c.sqrt_sum();
        return {curvlab::interface_constant(c), 2.0 * g / (3.0 * kSqrtPi * s),
                g / (2.0 * s)};
    }
};

/// Self-similar profile f(xi) = (1/(2 sqrt(pi))) int_{-inf}^{xi} e^{-s^2/4} ds
/// = (1 + erf(xi/2))/2.
inline double f_profile(double xi) {
    require_finite(xi, "f_profile argument");
    return 0.5 * (1.0 + specfun::erf(0.5 * xi));
}

inline double f_prime(double xi) {
    return std::exp(-0.25 * xi * xi) / (2.0 * kSqrtPi);
}

inline double f_second(double xi) { return -0.5 * xi * f_prime(xi); }

/// F(eta) = int_0^inf e^{-t} f(t^{-1/2} eta) dt; C^1 with F(0) = 1/2.
inline double F_profile(double eta) {
    require_finite(eta, "F_profile argument");
    return eta > 0.0 ? 1.0 - 0.5 * std::exp(-eta) : 0.5 * std::exp(eta);
}

inline double F_prime(double eta) { return 0.5 * std::exp(-std::abs(eta)); }

inline double F_second(double eta) {
    return eta > 0.0 ? -0.5 * std::exp(-eta) : 0.5 * std::exp(eta);
}

namespace detail {
inline Side side_of(double v, Side at_zero) {
    if (v > 0.0) return Side::Plus;
    if (v < 0.0) return Side::Minus;
    return at_zero;
}
}  // namespace detail

/// One-dimensional two-phase profile Phi: the unique bounded solution of
/// -(sigma* Phi')' + Phi = chi* on R. Explicitly,
///   Phi(eta) = 1 - (sqrt(s-)/S) e^{-eta/sqrt(s+)}   for eta > 0,
///   Phi(eta) =     (sqrt(s+)/S) e^{ eta/sqrt(s-)}   for eta <= 0.
inline double phi_profile(double eta, const Conductivity& c) {
    require_finite(eta, "phi_profile argument");
    const double S = c.sqrt_sum();
    if (eta > 0.0) return 1.0 - (c.sqrt_minus() / S) * std::exp(-eta / c.sqrt_plus());
    return (c.sqrt_plus() / S) * std::exp(eta / c.sqrt_minus());
}

/// One-sided derivative of Phi; `side` selects the branch at eta = 0.
inline double phi_prime(double eta, const Conductivity& c, Side side = Side::Plus) {
    require_finite(eta, "phi_prime argument");
    const double S = c.sqrt_sum();
    if (detail::side_of(eta, side) == Side::Plus)
        return (c.sqrt_minus() / (c.sqrt_plus() * S)) * std::exp(-eta / c.sqrt_plus());
    return (c.sqrt_plus() / (c.sqrt_minus() * S)) * std::exp(eta / c.sqrt_minus());
}

inline double phi_second(double eta, const Conductivity& c, Side side = Side::Plus) {
    const double S = c.sqrt_sum();
    if (detail::side_of(eta, side) == Side::Plus)
        return -(c.sqrt_minus() / (c.sigma_plus * S)) * std::exp(-eta / c.sqrt_plus());
    return (c.sqrt_plus() / (c.sigma_minus * S)) * std::exp(eta / c.sqrt_minus());
}

/// Parabolic barrier profile psi(x, t), built on the shape's signed distance.
/// Requires t > 0 and x inside the C^2 tube.
inline double psi(std::span<const double> x, double t, const Shape& shape,
                  const Conductivity& c) {
    if (!(t > 0.0)) throw std::domain_error("psi: requires t > 0");
    const double delta = shape.signed_distance(x);
    if (!(std::abs(delta) < shape.tube_radius()))
        throw std::domain_error("psi: point outside the tube of radius " +
                                std::to_string(shape.tube_radius()));
    const double S = c.sqrt_sum();
    if (delta > 0.0) {
        const double xi = delta / (c.sqrt_plus() * std::sqrt(t));
        return (2.0 * c.sqrt_minus() / S) * f_profile(xi) +
               (c.sqrt_plus() - c.sqrt_minus()) / S;
    }
    const double xi = delta / (c.sqrt_minus() * std::sqrt(t));
    return (2.0 * c.sqrt_plus() / S) * f_profile(xi);
}

/// Elliptic barrier Psi_lambda(x) = Phi(sqrt(lambda) delta(x)).
inline double psi_lambda(std::span<const double> x, double lambda, const Shape& shape,
                         const Conductivity& c) {
    if (!(lambda > 0.0)) throw std::domain_error("psi_lambda: requires lambda > 0");
    const double delta = shape.signed_distance(x);
    if (!(std::abs(delta) < shape.tube_radius()))
        throw std::domain_error("psi_lambda: point outside the tube of radius " +
                                std::to_string(shape.tube_radius()));
    return phi_profile(std::sqrt(lambda) * delta, c);
}

/// Right-hand side of the heat residual identity for psi:
/// psi_t - sigma Delta psi = -(2 sqrt(s+ s-)/S) t^{-1/2} (Delta delta) f'(.).
inline double psi_heat_residual(double delta, double lap_delta, double t,
                                const Conductivity& c) {
    const double sigma = delta > 0.0 ? c.sigma_plus : c.sigma_minus;
    const double xi = delta / std::sqrt(sigma * t);
    return -(2.0 * c.sqrt_plus() * c.sqrt_minus() / c.sqrt_sum()) / std::sqrt(t) *
           lap_delta * f_prime(xi);
}

/// Right-hand side of the Helmholtz residual identity for Psi_lambda:
/// -sigma Delta Psi + lambda Psi - lambda chi_Omega
///   = -(sqrt(s+ s-)/S) sqrt(lambda) (Delta delta) exp(-sqrt(lambda/sigma)|delta|).
inline double helmholtz_residual(double delta, double lap_delta, double lambda,
                                 const Conductivity& c) {
    const double sigma = delta > 0.0 ? c.sigma_plus : c.sigma_minus;
    return -(c.sqrt_plus() * c.sqrt_minus() / c.sqrt_sum()) * std::sqrt(lambda) *
           lap_delta * std::exp(-std::sqrt(lambda / sigma) * std::abs(delta));
}

/// Blow-up limit profile S_*(z_N) with the curvature term (N-1)H(0) supplied
/// as a plain input; solves -sigma* S'' + S = curvature_term sigma* Phi'(z).
inline double s_star(double zN, const Conductivity& c, double curvature_term) {
    require_finite(zN, "s_star argument");
    const double S = c.sqrt_sum();
    if (zN > 0.0)
        return curvature_term * c.sqrt_minus() / (2.0 * S) * (zN + c.sqrt_plus()) *
               std::exp(-zN / c.sqrt_plus());
    return curvature_term * c.sqrt_plus() / (2.0 * S) * (-zN + c.sqrt_minus()) *
           std::exp(zN / c.sqrt_minus());
}

inline double s_star_prime(double zN, const Conductivity& c, double curvature_term,
                           Side side = Side::Plus) {
    const double S = c.sqrt_sum();
    if (detail::side_of(zN, side) == Side::Plus)
        return curvature_term * c.sqrt_minus() / (2.0 * S) *
               (-zN / c.sqrt_plus()) * std::exp(-zN / c.sqrt_plus());
    return curvature_term * c.sqrt_plus() / (2.0 * S) * (-zN / c.sqrt_minus()) *
           std::exp(zN / c.sqrt_minus());
}

inline double s_star_second(double zN, const Conductivity& c, double curvature_term,
                            Side side = Side::Plus) {
    const double S = c.sqrt_sum();
    if (detail::side_of(zN, side) == Side::Plus)
        return curvature_term * c.sqrt_minus() / (2.0 * S) *
               (zN / c.sigma_plus - 1.0 / c.sqrt_plus()) * std::exp(-zN / c.sqrt_plus());
    return curvature_term * c.sqrt_plus() / (2.0 * S) *
           (-zN / c.sigma_minus - 1.0 / c.sqrt_minus()) * std::exp(zN / c.sqrt_minus());
}

}  // namespace curvlab
