#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/closedforms.hpp"
#include "curvlab/elliptic.hpp"
#include "curvlab/grid.hpp"
#include "curvlab/linalg.hpp"

namespace curvlab {

/// Sampled values u(x0, t_k) at a fixed spatial point.
struct TimeTrace {
    std::vector<double> point;
    std::vector<double> times;   // strictly increasing, > 0
    std::vector<double> values;  // u(x0, t_k)
    Conductivity cond{1.0, 1.0};
    std::string shape_desc;
    std::string mesh_desc;

    double t0() const { return times.front(); }
    double t_max() const { return times.back(); }
};

struct ParabolicOptions {
    double t0_factor = 1e-4;     // t0 = t0_factor * R^2 / max sigma
    double tmax_factor = 1.0;    // t_max = tmax_factor * R^2 / max sigma
    double time_ratio = 1.15;
    int startup_steps = 4;       // fully implicit substeps covering (0, t0]
    double h0_factor = 0.1;      // finest spacing = h0_factor * sqrt(min sigma * t0)
    double stretch = 1.05;
    double margin_factor = 8.0;  // outer extent = R + margin * sqrt(max sigma * t_max)
    int snapshots = 0;           // full-field snapshots, log-spaced in time
};

struct RadialParabolicSolution {
    RadialGrid grid;
    TimeTrace trace;  // at r = R, sampled at every computed step
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots;
    std::vector<double> monitor_times;
    std::vector<double> heat_content;  // int u r^{N-1} dr, non-increasing monitor
    double error_estimate = 0.0;       // filled by the _with_estimate front end
};

namespace detail {

// One theta-step of  V du/dt + A u = 0  with a Dirichlet zero at the last
// node; A is the radial FV stiffness given by face transmissibilities.
inline void radial_theta_step(const RadialOperator& op, std::vector<double>& u,
                              double dt, double theta) {
    const std::size_t n = u.size();
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    auto a_row = [&](std::size_t i, const std::vector<double>& v) {
        double r = 0.0;
        if (i > 0) r += op.face[i - 1] * (v[i] - v[i - 1]);
        if (i + 1 < n) r += op.face[i] * (v[i] - v[i + 1]);
        return r;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double m = op.volume[i] / dt;
        if (i > 0) lower[i] = -theta * op.face[i - 1];
        diag[i] = m + theta * (op.face[i] + (i > 0 ? op.face[i - 1] : 0.0));
        upper[i] = -theta * op.face[i];
        rhs[i] = m * u[i] - (1.0 - theta) * a_row(i, u);
    }
    diag[n - 1] = 1.0;  // truncation boundary u = 0
    u = solve_tridiagonal(lower, diag, upper, rhs);
}

inline std::vector<double> startup_subtimes(double t0, int steps) {
    // geometric substeps within (0, t0], ratio 4, smallest first
    const double g = 4.0;
    std::vector<double> ts(steps);
    double w = 0.0, f = 1.0;
    for (int j = 0; j < steps; ++j) {
        w += f;
        f *= g;
    }
    double acc = 0.0;
    f = 1.0;
    for (int j = 0; j < steps; ++j) {
        acc += f / w;
        ts[j] = t0 * acc;
        f *= g;
    }
    ts.back() = t0;
    return ts;
}

}  // namespace detail

/// Implicit solve of u_t = div(sigma grad u), u(.,0) = chi_{r<R}, on an
/// interface-fitted radial grid: trapezoidal stepping over the geometric time
/// grid after fully implicit startup substeps that damp the rough initial
/// datum. Produces the interface trace u(R, t) and optional field snapshots.
inline RadialParabolicSolution solve_radial_parabolic(const Ball& ball,
                                                      const Conductivity& c,
                                                      const RadialGrid& grid,
                                                      const TimeGrid& tg,
                                                      int snapshots = 0) {
    if (grid.nodes[grid.interface_index] != ball.radius)
        throw std::domain_error("solve_radial_parabolic: grid not interface-fitted");
    const auto op = assemble_radial_operator(ball, c, grid);
    const std::size_t n = grid.nodes.size();

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = op.volume[i] > 0 ? op.volume_inside[i] / op.volume[i] : 0.0;
    u[n - 1] = 0.0;

    RadialParabolicSolution sol;
    sol.grid = grid;
    sol.trace.point = std::vector<double>(ball.dim, 0.0);
    sol.trace.point.back() = ball.radius;
    sol.trace.cond = c;
    sol.trace.shape_desc = Shape(ball).describe();
    sol.trace.mesh_desc = "radial n=" + std::to_string(n) +
                          " h0=" + std::to_string(grid.nodes[grid.interface_index] -
                                                  grid.nodes[grid.interface_index - 1]);

    // pick snapshot times log-spaced over the geometric grid
    std::vector<std::size_t> snap_at;
    if (snapshots > 0) {
        for (int k = 0; k < snapshots; ++k) {
            const double f = static_cast<double>(k) / std::max(1, snapshots - 1);
            snap_at.push_back(static_cast<std::size_t>(f * (tg.times.size() - 1)));
        }
        std::sort(snap_at.begin(), snap_at.end());
        snap_at.erase(std::unique(snap_at.begin(), snap_at.end()), snap_at.end());
    }

    auto record = [&](double t) {
        sol.trace.times.push_back(t);
        sol.trace.values.push_back(u[grid.interface_index]);
    };
    auto heat = [&]() {
        double h = 0.0;
        for (std::size_t i = 0; i < n; ++i) h += u[i] * op.volume[i];
        return h;
    };

    double t = 0.0;
    for (double s : detail::startup_subtimes(tg.times.front(), tg.startup_steps)) {
        detail::radial_theta_step(op, u, s - t, 1.0);
        t = s;
        record(t);
    }
    sol.monitor_times.push_back(t);
    sol.heat_content.push_back(heat());
    for (std::size_t k = 1; k < tg.times.size(); ++k) {
        detail::radial_theta_step(op, u, tg.times[k] - tg.times[k - 1], 0.5);
        t = tg.times[k];
        record(t);
        if (!snap_at.empty() &&
            std::find(snap_at.begin(), snap_at.end(), k) != snap_at.end()) {
            sol.snapshot_times.push_back(t);
            sol.snapshots.push_back(u);
        }
        sol.monitor_times.push_back(t);
        sol.heat_content.push_back(heat());
    }
    return sol;
}

/// Default parabolic setup on a ball, per the option factors.
inline RadialParabolicSolution solve_radial_parabolic(const Ball& ball,
                                                      const Conductivity& c,
                                                      const ParabolicOptions& opt = {}) {
    const double scale = ball.radius * ball.radius / c.max_sigma();
    const double t0 = opt.t0_factor * scale;
    const double tmax = opt.tmax_factor * scale;
    const double h0 = opt.h0_factor * std::sqrt(c.min_sigma() * t0);
    const double rmax =
        ball.radius + opt.margin_factor * std::sqrt(c.max_sigma() * tmax);
    const auto grid = make_radial_grid(ball.radius, rmax, h0, opt.stretch);
    const auto tg = make_time_grid(t0, tmax, opt.time_ratio, opt.startup_steps);
    return solve_radial_parabolic(ball, c, grid, tg, opt.snapshots);
}

/// Same solve plus a discretization-error estimate from space-time refinement
/// (halved spacing, halved log-time steps), reported as the sup difference of
/// the interface traces over the analysis window t >= 10 t0.
inline RadialParabolicSolution solve_radial_parabolic_with_estimate(
    const Ball& ball, const Conductivity& c, const ParabolicOptions& opt = {}) {
    RadialParabolicSolution coarse = solve_radial_parabolic(ball, c, opt);
    ParabolicOptions fine = opt;
    fine.h0_factor = 0.5 * opt.h0_factor;
    fine.time_ratio = 1.0 + 0.5 * (opt.time_ratio - 1.0);
    fine.startup_steps = opt.startup_steps + 2;
    fine.snapshots = 0;
    const RadialParabolicSolution ref = solve_radial_parabolic(ball, c, fine);

    auto interp = [&](double t) {
        const auto& ts = ref.trace.times;
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        if (it == ts.begin()) return ref.trace.values.front();
        if (it == ts.end()) return ref.trace.values.back();
        const std::size_t i = it - ts.begin();
        const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
        return (1.0 - w) * ref.trace.values[i - 1] + w * ref.trace.values[i];
    };
    double est = 0.0;
    const double t_lo = 10.0 * coarse.trace.t0();
    for (std::size_t k = 0; k < coarse.trace.times.size(); ++k) {
        if (coarse.trace.times[k] < t_lo) continue;
        est = std::max(est, std::abs(coarse.trace.values[k] - interp(coarse.trace.times[k])));
    }
    coarse.error_estimate = est;
    return coarse;
}

// ---------------------------------------------------------------------------
// 2D Cartesian variant.
// ---------------------------------------------------------------------------

/// Box for a parabolic run: bounding box of Omega plus margin_factor times
/// the final diffusion length sqrt(max sigma * t_max).
inline CartesianGrid2D make_parabolic_grid_2d(const Shape& shape, const Conductivity& c,
                                              double t_max, int nx, int ny,
                                              double margin_factor = 5.0) {
    double ax, by;
    if (auto* b = shape.as_ball()) {
        ax = by = b->radius;
    } else if (auto* e = shape.as_ellipse()) {
        ax = e->a;
        by = e->b;
    } else {
        throw std::domain_error("make_parabolic_grid_2d: unsupported shape " +
                                shape.describe());
    }
    const double m = margin_factor * std::sqrt(c.max_sigma() * t_max);
    CartesianGrid2D g;
    g.x0 = -(ax + m);
    g.y0 = -(by + m);
    g.nx = nx;
    g.ny = ny;
    g.hx = 2.0 * (ax + m) / nx;
    g.hy = 2.0 * (by + m) / ny;
    return g;
}

struct Parabolic2DOptions {
    double cg_tol = 1e-10;
    int cg_max_iter = 100000;
    int startup_steps = 4;
};

struct CartesianParabolicSolution {
    CartesianGrid2D grid;
    std::vector<TimeTrace> traces;  // at interface sample points
    std::vector<std::vector<double>> trace_points;
    double min_value = 0.0, max_value = 1.0;  // over all steps and cells
};

/// CN time stepping of the 2D FV heat operator with Rannacher-type implicit
/// startup; traces taken at interface sample points by bilinear interpolation.
inline CartesianParabolicSolution solve_cartesian_parabolic_2d(
    const Shape& shape, const Conductivity& c, const CartesianGrid2D& grid,
    const TimeGrid& tg, int n_trace_points = 8, const Parabolic2DOptions& opt = {}) {
    const auto op = assemble_cartesian_operator(shape, c, grid);
    const FlatProfileAnsatz prof(shape, c, 1.0);
    const std::size_t n = grid.cells();
    const double area = grid.hx * grid.hy;

    std::vector<double> u(n);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            u[grid.idx(i, j)] = prof.inside(grid.cx(i), grid.cy(j)) ? 1.0 : 0.0;

    CartesianParabolicSolution sol;
    sol.grid = grid;
    sol.trace_points = shape.interface_samples(n_trace_points);
    for (const auto& p : sol.trace_points) {
        TimeTrace tr{p, {}, {}, c, shape.describe(),
                     "cartesian " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny)};
        sol.traces.push_back(std::move(tr));
    }
    sol.min_value = 0.0;
    sol.max_value = 1.0;

    CartesianField2D view{grid, u, false, 0.0, c, shape, {}};
    auto record = [&](double t) {
        view.values = u;
        for (std::size_t q = 0; q < sol.traces.size(); ++q) {
            sol.traces[q].times.push_back(t);
            sol.traces[q].values.push_back(
                view.interp(sol.trace_points[q][0], sol.trace_points[q][1]));
        }
        const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
        sol.min_value = std::min(sol.min_value, *mn);
        sol.max_value = std::max(sol.max_value, *mx);
    };

    std::vector<double> rhs(n), diag(n), au(n);
    auto step = [&](double dt, double theta) {
        op.apply(u, au);
        const double m = area / dt;
        for (std::size_t id = 0; id < n; ++id) {
            rhs[id] = m * u[id] - (1.0 - theta) * au[id];
            diag[id] = m + theta * op.diag[id];
        }
        auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
            op.apply(v, out);
            for (std::size_t id = 0; id < n; ++id)
                out[id] = m * v[id] + theta * out[id];
        };
        conjugate_gradient(apply, diag, rhs, u, opt.cg_tol, opt.cg_max_iter);
    };

    double t = 0.0;
    for (double s : detail::startup_subtimes(tg.times.front(), opt.startup_steps)) {
        step(s - t, 1.0);
        t = s;
        record(t);
    }
    for (std::size_t k = 1; k < tg.times.size(); ++k) {
        step(tg.times[k] - tg.times[k - 1], 0.5);
        record(tg.times[k]);
    }
    return sol;
}

}  // namespace curvlab
