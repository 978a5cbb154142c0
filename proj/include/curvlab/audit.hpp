#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/asymptotics.hpp"
#include "curvlab/closedforms.hpp"
#include "curvlab/elliptic.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/parabolic.hpp"

namespace curvlab {

/// Computable part of the barrier constant K:
///   K1 = (4 sqrt(s+ s-)/S) * max_tube |Delta delta| * max f' ,  max f' = 1/(2 sqrt(pi)),
/// evaluated on the audit tube |delta| <= audit_tube_radius (default half the
/// geometric tube). Returns K_cal = headroom * K1; the headroom factor stands
/// in for the non-computable Gaussian-bound branch of the constant.
inline double calibrate_K(const Shape& shape, const Conductivity& c,
                          double audit_tube_radius = 0.0, double headroom = 2.0) {
    if (audit_tube_radius <= 0.0) audit_tube_radius = 0.5 * shape.tube_radius();
    double max_lap = 0.0;
    if (auto* b = shape.as_ball()) {
        if (!(audit_tube_radius < b->radius))
            throw std::domain_error("calibrate_K: audit tube must be inside the ball tube");
        max_lap = (b->dim - 1) / (b->radius - audit_tube_radius);
    } else if (auto* e = shape.as_ellipse()) {
        const double kap_max = ellipse_theta_curvature(e->a, e->b, 0.0);  // a/b^2
        if (!(audit_tube_radius * kap_max < 1.0))
            throw std::domain_error("calibrate_K: audit tube reaches the cut locus");
        max_lap = kap_max / (1.0 - audit_tube_radius * kap_max);
    } else {
        max_lap = 0.0;  // half-space: the flat barrier is exact
    }
    const double k1 = 4.0 * c.sqrt_plus() * c.sqrt_minus() / c.sqrt_sum() * max_lap /
                      (2.0 * kSqrtPi);
    return headroom * k1;
}

struct BarrierReport {
    double max_violation = 0.0;  // > 0 means the sandwich failed
    double bound = 0.0;          // the barrier width used at the witness
    double witness_delta = 0.0;
    double witness_time = 0.0;  // time (parabolic) or lambda (elliptic)
    double slack = 0.0;
    bool pass = false;
    std::string describe() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " max_violation=" << max_violation
           << " at delta=" << witness_delta << " t=" << witness_time
           << " (slack=" << slack << ")";
        return os.str();
    }
};

/// Lemma-style sandwich |u - psi| <= K sqrt(t) + slack over the audit tube
/// nodes of the snapshots of a radial parabolic run.
inline BarrierReport barrier_check_parabolic(const RadialParabolicSolution& sol,
                                             const Ball& ball, const Conductivity& c,
                                             double K, double slack,
                                             double audit_tube_radius = 0.0) {
    if (sol.snapshots.empty())
        throw std::domain_error("barrier_check_parabolic: run has no snapshots");
    if (audit_tube_radius <= 0.0) audit_tube_radius = 0.5 * ball.radius;
    const Shape shape(ball);
    BarrierReport rep;
    rep.slack = slack;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sol.snapshots.size(); ++s) {
        const double t = sol.snapshot_times[s];
        for (std::size_t i = 0; i < sol.grid.nodes.size(); ++i) {
            const double r = sol.grid.nodes[i];
            const double delta = ball.radius - r;
            if (std::abs(delta) > audit_tube_radius || r == 0.0) continue;
            std::vector<double> x(ball.dim, 0.0);
            x.back() = r;
            const double psi_v = psi(x, t, shape, c);
            const double viol =
                std::abs(sol.snapshots[s][i] - psi_v) - K * std::sqrt(t) - slack;
            if (viol > rep.max_violation) {
                rep.max_violation = viol;
                rep.bound = K * std::sqrt(t) + slack;
                rep.witness_delta = delta;
                rep.witness_time = t;
            }
        }
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

/// |U_lambda - Psi_lambda| <= sqrt(pi) K / (2 sqrt(lambda)) + slack over audit
/// tube radii, for any radial evaluator (Bessel oracle or interpolated field).
inline BarrierReport barrier_check_elliptic(const std::function<double(double)>& u_of_r,
                                            const Ball& ball, const Conductivity& c,
                                            double K, double lambda, double slack,
                                            double audit_tube_radius = 0.0) {
    if (audit_tube_radius <= 0.0) audit_tube_radius = 0.5 * ball.radius;
    const double bound = kSqrtPi * K / (2.0 * std::sqrt(lambda)) + slack;
    BarrierReport rep;
    rep.slack = slack;
    rep.bound = bound;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const int m = 400;
    for (int i = 0; i <= m; ++i) {
        const double delta = -audit_tube_radius + 2.0 * audit_tube_radius * i / m;
        const double r = ball.radius - delta;
        const double psi_v = phi_profile(std::sqrt(lambda) * delta, c);
        const double viol = std::abs(u_of_r(r) - psi_v) - bound;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.witness_delta = delta;
            rep.witness_time = lambda;
        }
    }
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

struct RangeReport {
    double min_value = 0.0;
    double max_value = 0.0;
    std::string witness_min, witness_max;
    bool pass = false;
    std::string describe() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " range=[" << min_value << ", " << max_value
           << "]";
        if (!pass) os << " min at " << witness_min << ", max at " << witness_max;
        return os.str();
    }
};

/// Discrete maximum principle: all samples within [0, 1] up to the solver
/// tolerance.
inline RangeReport maximum_principle_check(
    std::span<const double> values,
    const std::function<std::string(std::size_t)>& locate = nullptr,
    double tol = 1e-12) {
    RangeReport rep;
    if (values.empty()) throw std::domain_error("maximum_principle_check: no samples");
    std::size_t imin = 0, imax = 0;
    rep.min_value = rep.max_value = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < rep.min_value) {
            rep.min_value = values[i];
            imin = i;
        }
        if (values[i] > rep.max_value) {
            rep.max_value = values[i];
            imax = i;
        }
    }
    auto name = [&](std::size_t i) {
        return locate ? locate(i) : "sample " + std::to_string(i);
    };
    rep.witness_min = name(imin);
    rep.witness_max = name(imax);
    rep.pass = rep.min_value >= -tol && rep.max_value <= 1.0 + tol;
    return rep;
}

inline RangeReport maximum_principle_check(const RadialField& f, double tol = 1e-12) {
    return maximum_principle_check(
        f.values,
        [&](std::size_t i) { return "r=" + std::to_string(f.grid.nodes[i]); }, tol);
}

inline RangeReport maximum_principle_check(const CartesianField2D& f, double tol = 1e-12) {
    const auto u = f.u_cells();
    return maximum_principle_check(
        u,
        [&](std::size_t i) {
            const int j = static_cast<int>(i) / f.grid.nx;
            const int ii = static_cast<int>(i) % f.grid.nx;
            return "(" + std::to_string(f.grid.cx(ii)) + ", " +
                   std::to_string(f.grid.cy(j)) + ")";
        },
        tol);
}

inline RangeReport maximum_principle_check(const TimeTrace& tr, double tol = 1e-12) {
    return maximum_principle_check(
        tr.values, [&](std::size_t i) { return "t=" + std::to_string(tr.times[i]); },
        tol);
}

}  // namespace curvlab
