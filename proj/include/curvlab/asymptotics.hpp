#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/closedforms.hpp"
#include "curvlab/parabolic.hpp"
#include "curvlab/specfun.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Richardson extrapolation under the model value(h) = L + c h^p + O(h^{2p}).
// ---------------------------------------------------------------------------

struct ExtrapolationResult {
    double limit = 0.0;
    double error_estimate = 0.0;  // |difference of the last two extrapolants|
    std::vector<std::pair<double, double>> sequence;  // raw (h, value), kept verbatim
    double exponent = 0.0;
    bool model_consistent = true;
    std::vector<double> extrapolants;  // diagonal of the extrapolation table
};

inline ExtrapolationResult richardson_extrapolate(
    std::span<const std::pair<double, double>> seq, double exponent) {
    const std::size_t n = seq.size();
    if (n < 3) throw std::domain_error("richardson_extrapolate: need >= 3 pairs");
    for (std::size_t i = 1; i < n; ++i)
        if (!(seq[i].first < seq[i - 1].first) || !(seq[i].first > 0))
            throw std::domain_error("richardson_extrapolate: h must be positive and strictly decreasing");

    ExtrapolationResult res;
    res.sequence.assign(seq.begin(), seq.end());
    res.exponent = exponent;

    // a non-monotone tail of raw values violates the single-power model
    double prev_diff = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = seq[i].second - seq[i - 1].second;
        if (d != 0.0 && prev_diff != 0.0 && d * prev_diff < 0.0) res.model_consistent = false;
        if (d != 0.0) prev_diff = d;
    }

    // Neville table eliminating h^{p}, h^{2p}, ...
    std::vector<std::vector<double>> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i].resize(i + 1);
        t[i][0] = seq[i].second;
        for (std::size_t k = 1; k <= i; ++k) {
            const double r = std::pow(seq[i - k].first / seq[i].first,
                                      exponent * static_cast<double>(k));
            t[i][k] = t[i][k - 1] + (t[i][k - 1] - t[i - 1][k - 1]) / (r - 1.0);
        }
        res.extrapolants.push_back(t[i][i]);
    }
    res.limit = t[n - 1][n - 1];
    res.error_estimate = std::abs(t[n - 1][n - 1] - t[n - 1][n - 2]);
    return res;
}

// ---------------------------------------------------------------------------
// The two theorem functionals. Mean curvature is taken positive for convex
// Omega throughout this library, so both functionals measure the interface
// *deficit* c_inf - u: on a ball the temperature at the interface sits below
// the flat-interface constant, and the limits come out positive.
// ---------------------------------------------------------------------------

/// Elementwise sqrt(lambda) (c_inf - U_lambda(x)) over an increasing ladder.
inline std::vector<std::pair<double, double>> lambda_functional(
    std::span<const std::pair<double, double>> u_values, const Conductivity& c) {
    if (u_values.size() < 3)
        throw std::domain_error("lambda_functional: need >= 3 ladder entries");
    for (std::size_t i = 1; i < u_values.size(); ++i)
        if (!(u_values[i].first > u_values[i - 1].first))
            throw std::domain_error("lambda_functional: lambda ladder must increase");
    const double cinf = interface_constant(c);
    std::vector<std::pair<double, double>> out;
    out.reserve(u_values.size());
    for (const auto& [lam, u] : u_values)
        out.emplace_back(lam, std::sqrt(lam) * (cinf - u));
    return out;
}

struct TimeFunctionalResult {
    std::vector<std::pair<double, double>> values;  // (t, t^{-3/2} int_0^t (c_inf - u) ds)
    double head_coefficient = 0.0;   // C of the model c_inf - u ~ C sqrt(s) on (0, t0]
    double head_integral = 0.0;      // (2/3) C t0^{3/2}
    double head_uncertainty = 0.0;   // worst deviation of the per-point C estimates
};

/// t^{-3/2} int_0^t (c_inf - u(x,s)) ds at every trace time >= 10 t0. The
/// quadrature is trapezoidal in the variable s^{3/2} (exact for sqrt(s)
/// integrands); the unresolved head (0, t0] uses the sqrt(s) model fitted
/// over the first decade, with its spread reported as the head uncertainty.
inline TimeFunctionalResult time_functional(const TimeTrace& trace, const Conductivity& c,
                                            double min_decades = 1.5) {
    const double t0 = trace.t0();
    if (std::log10(trace.t_max() / t0) < min_decades)
        throw std::domain_error("time_functional: trace spans " +
                                std::to_string(std::log10(trace.t_max() / t0)) +
                                " decades, need >= " + std::to_string(min_decades));
    const double cinf = interface_constant(c);
    const std::size_t n = trace.times.size();

    TimeFunctionalResult res;
    // head model fit over [t0, 10 t0]
    double csum = 0.0;
    std::size_t ccount = 0;
    std::vector<double> cvals;
    for (std::size_t k = 0; k < n && trace.times[k] <= 10.0 * t0; ++k) {
        cvals.push_back((cinf - trace.values[k]) / std::sqrt(trace.times[k]));
        csum += cvals.back();
        ++ccount;
    }
    if (ccount < 2) throw std::domain_error("time_functional: too few head samples");
    res.head_coefficient = csum / ccount;
    double spread = 0.0;
    for (double v : cvals) spread = std::max(spread, std::abs(v - res.head_coefficient));
    res.head_integral = (2.0 / 3.0) * res.head_coefficient * std::pow(t0, 1.5);
    res.head_uncertainty = (2.0 / 3.0) * spread * std::pow(t0, 1.5);

    // cumulative trapezoid in w = s^{3/2} of (2/3)(c_inf - u)/sqrt(s)
    double integral = res.head_integral;
    double w_prev = std::pow(t0, 1.5);
    double g_prev = (2.0 / 3.0) * (cinf - trace.values[0]) / std::sqrt(t0);
    for (std::size_t k = 1; k < n; ++k) {
        const double w = std::pow(trace.times[k], 1.5);
        const double g = (2.0 / 3.0) * (cinf - trace.values[k]) / std::sqrt(trace.times[k]);
        integral += 0.5 * (g_prev + g) * (w - w_prev);
        w_prev = w;
        g_prev = g;
        if (trace.times[k] >= 10.0 * t0)
            res.values.emplace_back(trace.times[k], integral / w);
    }
    return res;
}

/// Extrapolate a (lambda, U_lambda) ladder to the deficit-functional limit:
/// Richardson in h = 1/lambda with correction exponent 1/2 (default).
inline ExtrapolationResult extrapolate_lambda_ladder(
    std::span<const std::pair<double, double>> u_values, const Conductivity& c,
    double exponent = 0.5) {
    const auto seq = lambda_functional(u_values, c);
    std::vector<std::pair<double, double>> hs;
    for (const auto& [lam, v] : seq) hs.emplace_back(1.0 / lam, v);
    return richardson_extrapolate(hs, exponent);
}

struct TimeLimitExtraction {
    TimeFunctionalResult functional;
    ExtrapolationResult extrapolation;
    double head_uncertainty_on_limit = 0.0;  // head spread mapped to the values
};

/// Time-side limit: evaluate the functional, pick a geometric analysis ladder
/// t_hi, t_hi/ratio, ... (rungs points), and extrapolate with the sqrt(t)
/// correction model. The ladder floor must stay above the space-resolution
/// horizon of the trace; four rungs over one decade is the robust default.
inline TimeLimitExtraction extract_time_limit(const TimeTrace& trace,
                                              const Conductivity& c, double t_hi,
                                              int rungs = 4, double ratio = 2.0,
                                              double exponent = 0.5) {
    TimeLimitExtraction out{time_functional(trace, c), {}, 0.0};
    const auto& vals = out.functional.values;
    std::vector<std::pair<double, double>> hs;
    double target = t_hi;
    for (int k = 0; k < rungs; ++k, target /= ratio) {
        const auto it = std::lower_bound(vals.begin(), vals.end(), target,
                                         [](const auto& a, double b) { return a.first < b; });
        if (it == vals.end()) continue;
        if (!hs.empty() && !(it->first < hs.back().first)) continue;
        hs.push_back(*it);
    }
    if (hs.size() < 3)
        throw std::domain_error("extract_time_limit: analysis ladder too short");
    out.extrapolation = richardson_extrapolate(hs, exponent);
    out.head_uncertainty_on_limit =
        out.functional.head_uncertainty / std::pow(hs.back().first, 1.5);
    return out;
}

// ---------------------------------------------------------------------------
// Laplace-Stieltjes transform of a trace.
// ---------------------------------------------------------------------------

struct LaplaceResult {
    double value = 0.0;
    double quadrature_error = 0.0;
};

/// U_lambda(x0) = lambda int_0^inf e^{-lambda t} u(x0, t) dt from a sampled
/// trace: exact exponential kernel against piecewise-linear u on the grid, a
/// fitted alpha + beta sqrt(t) model on the unresolved head, and a constant
/// extension beyond the last sample (requires lambda t_max >= 30).
inline LaplaceResult laplace_stieltjes(const TimeTrace& trace, double lambda) {
    const double t0 = trace.t0(), tmax = trace.t_max();
    if (!(lambda > 0)) throw std::domain_error("laplace_stieltjes: lambda must be > 0");
    if (lambda * t0 > 0.1)
        throw std::domain_error(
            "laplace_stieltjes: head unresolved (lambda t0 = " +
            std::to_string(lambda * t0) + " > 0.1), need a smaller t0");
    if (lambda * tmax < 30.0)
        throw std::domain_error("laplace_stieltjes: trace too short (lambda t_max = " +
                                std::to_string(lambda * tmax) + " < 30)");

    // head: fit u ~ alpha + beta sqrt(t) on the first decade by least squares
    double s0 = 0, s1 = 0, s2 = 0, r0 = 0, r1 = 0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < trace.times.size() && trace.times[k] <= 10.0 * t0; ++k) {
        const double x = std::sqrt(trace.times[k]), y = trace.values[k];
        s0 += 1.0;
        s1 += x;
        s2 += x * x;
        r0 += y;
        r1 += x * y;
        ++m;
    }
    if (m < 2) throw std::domain_error("laplace_stieltjes: too few head samples");
    const double det = s0 * s2 - s1 * s1;
    const double alpha = (s2 * r0 - s1 * r1) / det;
    const double beta = (s0 * r1 - s1 * r0) / det;
    double head_misfit = 0.0;
    for (std::size_t k = 0; k < trace.times.size() && trace.times[k] <= 10.0 * t0; ++k)
        head_misfit = std::max(head_misfit,
                               std::abs(trace.values[k] - alpha - beta * std::sqrt(trace.times[k])));

    const double z0 = lambda * t0;
    double value = alpha * (-std::expm1(-z0)) +
                   beta * specfun::lower_gamma(1.5, z0) / std::sqrt(lambda);

    // piecewise-linear segments with the exact kernel; also a plain
    // trapezoid of e^{-lambda t} u as a quadrature-error probe
    double plain = 0.0;
    for (std::size_t k = 0; k + 1 < trace.times.size(); ++k) {
        const double a = trace.times[k], b = trace.times[k + 1];
        const double ea = std::exp(-lambda * a);
        if (ea == 0.0) break;
        const double ua = trace.values[k], ub = trace.values[k + 1];
        const double d = b - a;
        const double slope = (ub - ua) / d;
        const double de = -std::expm1(-lambda * d);  // 1 - e^{-lambda d}
        // lambda * int_a^b e^{-lambda t} (ua + slope (t-a)) dt
        value += ea * (ua * de + slope * (de / lambda - d * (1.0 - de)));
        plain += 0.5 * lambda * d * (ea * ua + ea * (1.0 - de) * ub);
    }
    // constant extension of the tail
    value += trace.values.back() * std::exp(-lambda * tmax);

    LaplaceResult res;
    res.value = value;
    res.quadrature_error = std::abs(value - (plain + alpha * (-std::expm1(-z0)) +
                                             beta * specfun::lower_gamma(1.5, z0) /
                                                 std::sqrt(lambda) +
                                             trace.values.back() * std::exp(-lambda * tmax))) +
                           head_misfit * (-std::expm1(-z0));
    return res;
}

// ---------------------------------------------------------------------------
// Karamata Tauberian oracle.
// ---------------------------------------------------------------------------

/// Cumulative measure samples mu[0, t_k]; must be non-decreasing.
struct MeasureTrace {
    std::vector<double> times;
    std::vector<double> cumulative;
    std::string label;

    void validate() const {
        if (times.size() != cumulative.size() || times.size() < 8)
            throw std::domain_error("MeasureTrace: need >= 8 samples");
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i] > times[i - 1]))
                throw std::domain_error("MeasureTrace: times must increase");
            if (cumulative[i] < cumulative[i - 1] - 1e-300)
                throw std::domain_error("MeasureTrace: decreasing cumulative values, not a measure");
        }
    }
};

inline MeasureTrace make_sqrt_t_measure(double t0, double t_max, double ratio = 1.05) {
    MeasureTrace m;
    m.label = "sqrt_t";
    for (double t = t0; t < t_max * (1 + 1e-12); t *= ratio) {
        m.times.push_back(t);
        m.cumulative.push_back(2.0 / 3.0 * std::pow(t, 1.5));
    }
    return m;
}

inline MeasureTrace make_lebesgue_measure(double t0, double t_max, double ratio = 1.05) {
    MeasureTrace m;
    m.label = "lebesgue";
    for (double t = t0; t < t_max * (1 + 1e-12); t *= ratio) {
        m.times.push_back(t);
        m.cumulative.push_back(t);
    }
    return m;
}

/// The measure ell(t) = int_0^t (u - c_inf + K sqrt(s)) ds built from an
/// interface trace; K must dominate the deficit for this to be a measure.
/// Samples below t_start (where the trace itself is under-resolved) are
/// folded into the cumulative value but not exposed; the Karamata head model
/// then anchors at a trusted time.
inline MeasureTrace make_ell_measure(const TimeTrace& trace, const Conductivity& c,
                                     double K, double t_start = 0.0) {
    const double cinf = interface_constant(c);
    MeasureTrace m;
    m.label = "ell";
    double acc = 0.0;
    double prev_t = 0.0, prev_g = 0.0;  // integrand at t=0 is 0
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double t = trace.times[k];
        const double g = trace.values[k] - cinf + K * std::sqrt(t);
        acc += 0.5 * (prev_g + g) * (t - prev_t);
        if (t >= t_start) {
            m.times.push_back(t);
            m.cumulative.push_back(acc);
        }
        prev_t = t;
        prev_g = g;
    }
    return m;
}

struct KaramataReport {
    std::vector<std::pair<double, double>> transform_seq;  // (lambda, lambda^a L mu)
    std::vector<std::pair<double, double>> smalltime_seq;  // (t, t^-a mu[0,t])
    ExtrapolationResult transform_limit;
    ExtrapolationResult smalltime_limit;
    double ratio = 0.0;           // transform / small-time limits
    double expected_ratio = 0.0;  // Gamma(alpha + 1)
};

/// Verifies Karamata's theorem numerically: if lambda^a int e^{-lambda t} dmu
/// -> A then t^{-a} mu[0,t] -> A / Gamma(a+1), i.e. the two extrapolated
/// limits are in the ratio Gamma(a+1).
inline KaramataReport karamata_check(const MeasureTrace& mu, double alpha,
                                     std::span<const double> lambda_ladder = {}) {
    if (!(alpha > 0)) throw std::domain_error("karamata_check: alpha must be > 0");
    mu.validate();
    const double t0 = mu.times.front(), tmax = mu.times.back();

    std::vector<double> lams(lambda_ladder.begin(), lambda_ladder.end());
    if (lams.empty()) {
        double lam = 0.05 / t0;
        for (int k = 0; k < 5; ++k) {
            lams.insert(lams.begin(), lam);
            lam /= 4.0;
        }
    }
    for (double lam : lams) {
        if (lam * t0 > 0.1)
            throw std::domain_error("karamata_check: lambda t0 > 0.1, head unresolved");
        if (lam * tmax < 30.0)
            throw std::domain_error("karamata_check: lambda t_max < 30, tail unresolved");
    }
    std::sort(lams.begin(), lams.end());

    KaramataReport rep;
    rep.expected_ratio = specfun::gamma_fn(alpha + 1.0);

    // transform side: piecewise-constant density against the exact kernel,
    // power-model head mu[0,t] = mu(t0) (t/t0)^alpha
    for (double lam : lams) {
        double v = mu.cumulative.front() * alpha * specfun::lower_gamma(alpha, lam * t0) /
                   std::pow(t0, alpha) / std::pow(lam, alpha);
        for (std::size_t k = 0; k + 1 < mu.times.size(); ++k) {
            const double a = mu.times[k], b = mu.times[k + 1];
            const double ea = std::exp(-lam * a);
            if (ea == 0.0) break;
            const double dens = (mu.cumulative[k + 1] - mu.cumulative[k]) / (b - a);
            v += dens * ea * (-std::expm1(-lam * (b - a))) / lam;
        }
        rep.transform_seq.emplace_back(lam, std::pow(lam, alpha) * v);
    }

    // small-time side on a log ladder within the resolved range
    const double t_hi = std::min(tmax, 500.0 * t0);
    for (int k = 4; k >= 0; --k) {
        const double t = 5.0 * t0 * std::pow(t_hi / (5.0 * t0), k / 4.0);
        const auto it = std::lower_bound(mu.times.begin(), mu.times.end(), t);
        const std::size_t i = std::min<std::size_t>(it - mu.times.begin(), mu.times.size() - 1);
        const std::size_t j = i > 0 ? i - 1 : 0;
        double muv = mu.cumulative[i];
        if (i > j && mu.times[i] != mu.times[j]) {
            const double w = (t - mu.times[j]) / (mu.times[i] - mu.times[j]);
            muv = (1.0 - w) * mu.cumulative[j] + w * mu.cumulative[i];
        }
        rep.smalltime_seq.emplace_back(t, muv / std::pow(t, alpha));
    }

    // extrapolate: transform side in 1/lambda, small-time side in t; both
    // ladders are ordered with h strictly decreasing
    std::vector<std::pair<double, double>> tr;
    for (const auto& [lam, v] : rep.transform_seq) tr.emplace_back(1.0 / lam, v);
    rep.transform_limit = richardson_extrapolate(tr, 0.5);

    std::vector<std::pair<double, double>> st(rep.smalltime_seq.begin(),
                                              rep.smalltime_seq.end());
    std::sort(st.begin(), st.end(), [](auto& a, auto& b) { return a.first > b.first; });
    rep.smalltime_limit = richardson_extrapolate(st, 0.5);

    rep.ratio = rep.transform_limit.limit / rep.smalltime_limit.limit;
    return rep;
}

// ---------------------------------------------------------------------------
// Blow-up profile S_lambda along the interface normal.
// ---------------------------------------------------------------------------

struct BlowupProfile {
    std::vector<double> z;         // scaled normal coordinate z_N
    std::vector<double> s_lambda;  // sqrt(lambda) (Phi(z) - U(x(z)))
    std::vector<double> s_ref;     // S_* with curvature_term (N-1) H(q)

    double max_abs_error() const {
        double m = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            m = std::max(m, std::abs(s_lambda[i] - s_ref[i]));
        return m;
    }
};

/// Samples S_lambda(z) = sqrt(lambda) (Phi(z) - U(q - z lambda^{-1/2} nu(q)))
/// along the normal line through the interface point q (normal-line sampling
/// in place of a full boundary straightening), next to the explicit limit
/// profile S_* evaluated with curvature_term = (N-1) H(q).
inline BlowupProfile blowup_profile(
    const std::function<double(std::span<const double>)>& u_eval, const Shape& shape,
    std::span<const double> q, const Conductivity& c, double lambda, int n_samples = 101,
    double z_halfwidth = -1.0) {
    if (z_halfwidth <= 0.0) z_halfwidth = 8.0 * std::sqrt(c.max_sigma());
    const double reach = z_halfwidth / std::sqrt(lambda);
    if (!(reach < shape.tube_radius()))
        throw std::domain_error(
            "blowup_profile: sample window leaves the tube; increase lambda");
    const auto nv = shape.unit_normal(q);
    const double curv = (shape.dim() - 1) * shape.mean_curvature(q);

    BlowupProfile out;
    for (int i = 0; i < n_samples; ++i) {
        const double z = -z_halfwidth + 2.0 * z_halfwidth * i / (n_samples - 1);
        std::vector<double> x(q.begin(), q.end());
        for (std::size_t d = 0; d < x.size(); ++d)
            x[d] -= z / std::sqrt(lambda) * nv[d];
        out.z.push_back(z);
        out.s_lambda.push_back(std::sqrt(lambda) * (phi_profile(z, c) - u_eval(x)));
        out.s_ref.push_back(s_star(z, c, curv));
    }
    return out;
}

}  // namespace curvlab
