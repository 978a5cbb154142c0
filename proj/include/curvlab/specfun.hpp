#pragma once

#include <cmath>
#include <stdexcept>

#include "curvlab/common.hpp"

namespace curvlab::specfun {

/// Order of a modified Bessel function as used by the radial solvers.
/// Only nu in {0, 1/2, 1} occurs (the orders N/2-1 and N/2 for N = 2, 3,
/// with the half-integer cases reduced to elementary functions).
class BesselOrder {
public:
    explicit BesselOrder(double nu) : nu_(nu) {
        if (!(nu == 0.0 || nu == 0.5 || nu == 1.0))
            throw std::domain_error("BesselOrder: nu must be exactly 0, 1/2 or 1");
    }
    double nu() const { return nu_; }

    static BesselOrder zero() { return BesselOrder(0.0); }
    static BesselOrder half() { return BesselOrder(0.5); }
    static BesselOrder one() { return BesselOrder(1.0); }

    friend bool operator==(BesselOrder a, BesselOrder b) { return a.nu_ == b.nu_; }

private:
    double nu_;
};

namespace detail {

// Maclaurin series, used for |x| <= 3 where it is alternating but mild.
inline double erf_series(double x) {
    double t = x;  // (-1)^n x^(2n+1) / n!
    double s = x;  // sum of t/(2n+1)
    for (int n = 1; n < 200; ++n) {
        t *= -x * x / n;
        const double add = t / (2.0 * n + 1.0);
        s += add;
        if (std::abs(add) < 1e-18 * std::abs(s)) break;
    }
    return s * 2.0 / kSqrtPi;
}

// Laplace continued fraction for erfc, x >= 3 (modified Lentz).
// sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
inline double erfc_cf(double x) {
    constexpr double tiny = 1e-300;
    double f = x, C = x, D = 0.0;
    for (int n = 1; n <= 300; ++n) {
        const double a = 0.5 * n;
        D = x + a * D;
        if (D == 0.0) D = tiny;
        D = 1.0 / D;
        C = x + a / C;
        if (C == 0.0) C = tiny;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) / (kSqrtPi * f);
}

// Power series for I0, I1; adequate through x = 18 (no cancellation).
inline double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

inline double i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;  // q^k / (k! (k+1)!)
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return 0.5 * x * sum;
}

// Shared asymptotic tail for I (sgn = -1) and K (sgn = +1), mu = 4 nu^2:
//   sum_k sgn^k prod_{j<=k}(mu-(2j-1)^2) / (k! (8x)^k),
// truncated at the smallest term.
inline double ik_asymptotic_sum(double mu, double x, double sgn) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 60; ++k) {
        const double factor = sgn * (mu - sq(2.0 * k - 1.0)) / (8.0 * k * x);
        const double next = term * factor;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// K0, K1 for x < 2 via the classical log series. The I0*log(x/2) part
// cancels against the harmonic-sum series as x grows, so the sums are
// accumulated in long double; below x = 2 the cancellation costs < 2 digits.
inline double k0_small(double x) {
    const long double q = 0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L, isum = 1.0L, ssum = 0.0L, h = 0.0L;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        h += 1.0L / k;
        isum += term;
        ssum += term * h;
        if (term * (h + 1.0L) < 1e-21L * (ssum + isum)) break;
    }
    const long double lnx2 = std::log(static_cast<long double>(x) * 0.5L);
    return static_cast<double>(-(lnx2 + static_cast<long double>(kEulerGamma)) * isum + ssum);
}

inline double k1_small(double x) {
    const long double q = 0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L;  // q^k / (k! (k+1)!)
    long double hk = 0.0L, hk1 = 1.0L;
    long double s = (hk + hk1 - 2.0L * static_cast<long double>(kEulerGamma)) * term;
    long double i1sum = term;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<long double>(k) * (k + 1));
        hk += 1.0L / k;
        hk1 += 1.0L / (k + 1);
        s += (hk + hk1 - 2.0L * static_cast<long double>(kEulerGamma)) * term;
        i1sum += term;
        if (term * (hk + hk1 + 2.0L) < 1e-21L * (std::abs(s) + i1sum)) break;
    }
    const long double lnx2 = std::log(static_cast<long double>(x) * 0.5L);
    const long double i1 = 0.5L * x * i1sum;
    return static_cast<double>(1.0L / x + lnx2 * i1 - 0.25L * x * s);
}

// Steed/Thompson-Barnett continued fraction CF2 for e^x K_nu(x) and the
// ratio K_{nu+1}/K_nu, |nu| <= 1/2, x >= 2. Machine accuracy in a few dozen
// iterations over the whole range.
struct KPair {
    double k_scaled;       // e^x K_nu(x)
    double k_next_scaled;  // e^x K_{nu+1}(x)
};

inline KPair k_cf2_scaled(double nu, double x) {
    const double mu2 = nu * nu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 30000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17) break;
    }
    h = a1 * h;
    const double kmu = std::sqrt(kPi / (2.0 * x)) / s;
    const double knext = kmu * (nu + x + 0.5 - h) / x;
    return {kmu, knext};
}

constexpr double kISeriesCut = 18.0;
constexpr double kKSeriesCut = 2.0;
constexpr double kIOverflowX = 705.0;  // e^x overflows just above this

inline void check_positive(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel: argument must be > 0");
}

}  // namespace detail

/// Error function, (2/sqrt(pi)) int_0^x e^{-s^2} ds, >= 12 significant digits.
inline double erf(double x) {
    require_finite(x, "erf argument");
    const double ax = std::abs(x);
    double v;
    if (ax <= 3.0)
        v = detail::erf_series(ax);
    else
        v = 1.0 - detail::erfc_cf(ax);
    return x < 0 ? -v : v;
}

inline double erfc(double x) {
    require_finite(x, "erfc argument");
    if (x > 3.0) return detail::erfc_cf(x);
    return 1.0 - erf(x);
}

/// Gamma function on x > 0 (Lanczos approximation, ~13 digits on (0,10]).
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: requires x > 0");
    static const double c[9] = {0.99999999999980993,     676.5203681218851,
                                -1259.1392167224028,     771.32342877765313,
                                -176.61502916214059,     12.507343278686905,
                                -0.13857109526572012,    9.9843695780195716e-6,
                                1.5056327351493116e-7};
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

/// Lower incomplete gamma, gamma(a, z) = int_0^z t^{a-1} e^{-t} dt,
/// by the standard ascending series (intended for moderate z).
inline double lower_gamma(double a, double z) {
    if (!(a > 0.0)) throw std::domain_error("lower_gamma: requires a > 0");
    if (z <= 0.0) return 0.0;
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= z / (a + n);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::pow(z, a) * std::exp(-z) * sum;
}

/// e^{-x} I_nu(x) for x > 0.
inline double bessel_i_scaled(BesselOrder order, double x) {
    detail::check_positive(x);
    if (order == BesselOrder::half())
        return std::sqrt(2.0 / (kPi * x)) * 0.5 * (-std::expm1(-2.0 * x));
    if (x <= detail::kISeriesCut) {
        const double v = (order == BesselOrder::zero()) ? detail::i0_series(x)
                                                        : detail::i1_series(x);
        return v * std::exp(-x);
    }
    const double mu = 4.0 * sq(order.nu());
    return detail::ik_asymptotic_sum(mu, x, -1.0) / std::sqrt(2.0 * kPi * x);
}

/// e^{x} K_nu(x) for x > 0.
inline double bessel_k_scaled(BesselOrder order, double x) {
    detail::check_positive(x);
    if (order == BesselOrder::half()) return std::sqrt(kPi / (2.0 * x));
    if (x < detail::kKSeriesCut) {
        const double v = (order == BesselOrder::zero()) ? detail::k0_small(x)
                                                        : detail::k1_small(x);
        return v * std::exp(x);
    }
    const auto kp = detail::k_cf2_scaled(0.0, x);
    return (order == BesselOrder::zero()) ? kp.k_scaled : kp.k_next_scaled;
}

/// I_nu(x); overflow-checked (use bessel_i_log for large arguments).
inline double bessel_i(BesselOrder order, double x) {
    detail::check_positive(x);
    if (x > detail::kIOverflowX)
        throw std::overflow_error("bessel_i: e^x overflows, use bessel_i_log");
    return bessel_i_scaled(order, x) * std::exp(x);
}

/// K_nu(x).
inline double bessel_k(BesselOrder order, double x) {
    detail::check_positive(x);
    return bessel_k_scaled(order, x) * std::exp(-x);
}

/// log I_nu(x), usable up to x ~ 1e4 and beyond.
inline double bessel_i_log(BesselOrder order, double x) {
    return x + std::log(bessel_i_scaled(order, x));
}

/// log K_nu(x).
inline double bessel_k_log(BesselOrder order, double x) {
    return -x + std::log(bessel_k_scaled(order, x));
}

/// I_{nu+1}(x) / I_nu(x). The half-integer case is coth(x) - 1/x, with a
/// series branch near 0 where the two terms cancel.
inline double bessel_i_ratio_next(BesselOrder order, double x) {
    detail::check_positive(x);
    if (order == BesselOrder::half()) {
        if (x < 0.15) {  // coth(x) - 1/x cancels near 0
            const double x2 = x * x;
            return x / 3.0 - x * x2 / 45.0 + 2.0 * x2 * x2 * x / 945.0 -
                   x2 * x2 * x2 * x / 4725.0 + 2.0 * std::pow(x, 9) / 93555.0;
        }
        return 1.0 / std::tanh(x) - 1.0 / x;
    }
    if (order == BesselOrder::zero())
        return bessel_i_scaled(BesselOrder::one(), x) /
               bessel_i_scaled(BesselOrder::zero(), x);
    // I2/I1 via I2 = I0 - (2/x) I1
    return bessel_i_scaled(BesselOrder::zero(), x) /
               bessel_i_scaled(BesselOrder::one(), x) -
           2.0 / x;
}

/// K_{nu+1}(x) / K_nu(x).
inline double bessel_k_ratio_next(BesselOrder order, double x) {
    detail::check_positive(x);
    if (order == BesselOrder::half()) return 1.0 + 1.0 / x;
    if (order == BesselOrder::zero())
        return bessel_k_scaled(BesselOrder::one(), x) /
               bessel_k_scaled(BesselOrder::zero(), x);
    return bessel_k_scaled(BesselOrder::zero(), x) /
               bessel_k_scaled(BesselOrder::one(), x) +
           2.0 / x;
}

}  // namespace curvlab::specfun
