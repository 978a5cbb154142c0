#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "curvlab/closedforms.hpp"
#include "curvlab/geometry.hpp"

namespace curvlab {

/// Interface-fitted radial grid on [0, r_max] with one node exactly at the
/// interface radius and geometric grading away from it.
struct RadialGrid {
    std::vector<double> nodes;    // strictly increasing, nodes.front() == 0
    std::size_t interface_index = 0;  // nodes[interface_index] == R exactly
    double stretch = 1.0;

    double interface_radius() const { return nodes[interface_index]; }
    std::size_t size() const { return nodes.size(); }
};

namespace detail {
// Geometric offsets 0 < d_1 < ... <= span with first step h0, ratio `stretch`,
// rescaled so the last offset lands exactly on `span`.
inline std::vector<double> graded_offsets(double span, double h0, double stretch) {
    std::vector<double> d;
    double step = h0, acc = 0.0;
    while (acc < span) {
        acc += step;
        d.push_back(acc);
        step *= stretch;
        if (d.size() > 2000000) throw std::runtime_error("graded_offsets: grid too fine");
    }
    if (d.size() < 2) {  // spans smaller than h0
        d = {0.5 * span, span};
        return d;
    }
    const double f = span / d.back();
    for (auto& v : d) v *= f;
    d.back() = span;
    return d;
}
}  // namespace detail

inline RadialGrid make_radial_grid(double R, double r_max, double h0, double stretch) {
    if (!(R > 0 && r_max > R && h0 > 0 && stretch >= 1.0))
        throw std::domain_error("make_radial_grid: invalid parameters");
    const auto in = detail::graded_offsets(R, h0, stretch);
    const auto out = detail::graded_offsets(r_max - R, h0, stretch);
    RadialGrid g;
    g.stretch = stretch;
    g.nodes.reserve(in.size() + out.size() + 1);
    for (auto it = in.rbegin(); it != in.rend(); ++it) g.nodes.push_back(R - *it);
    g.nodes.push_back(R);
    g.interface_index = g.nodes.size() - 1;
    for (double v : out) g.nodes.push_back(R + v);
    g.nodes.front() = 0.0;
    return g;
}

/// Default elliptic grid: finest spacing h0_factor / sqrt(lambda/min sigma)
/// at the interface, exterior extent margin_factor / sqrt(lambda/sigma_minus).
inline RadialGrid default_elliptic_grid(double R, const Conductivity& c, double lambda,
                                        double h0_factor = 0.02, double stretch = 1.05,
                                        double margin_factor = 12.0) {
    const double h0 = h0_factor / std::sqrt(lambda / c.min_sigma());
    const double r_max = R + margin_factor / std::sqrt(lambda / c.sigma_minus);
    return make_radial_grid(R, r_max, h0, stretch);
}

/// Cell-centered Cartesian grid over a box enclosing the shape.
struct CartesianGrid2D {
    double x0, y0;  // lower-left corner of the box
    int nx, ny;
    double hx, hy;

    double cx(int i) const { return x0 + (i + 0.5) * hx; }
    double cy(int j) const { return y0 + (j + 0.5) * hy; }
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j) * nx + i;
    }
    std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
};

/// Box = bounding box of Omega plus a margin resolving the exterior decay
/// length, margin = margin_factor / sqrt(lambda/sigma_minus).
inline CartesianGrid2D make_cartesian_grid(const Shape& shape, const Conductivity& c,
                                           double lambda, int nx, int ny,
                                           double margin_factor = 12.0) {
    if (nx < 4 || ny < 4) throw std::domain_error("make_cartesian_grid: grid too coarse");
    double ax, by;
    if (auto* b = shape.as_ball()) {
        if (b->dim != 2)
            throw std::domain_error("make_cartesian_grid: ball must be 2-dimensional");
        ax = by = b->radius;
    } else if (auto* e = shape.as_ellipse()) {
        ax = e->a;
        by = e->b;
    } else {
        throw std::domain_error("make_cartesian_grid: unsupported shape " + shape.describe());
    }
    const double m = margin_factor / std::sqrt(lambda / c.sigma_minus);
    CartesianGrid2D g;
    g.x0 = -(ax + m);
    g.y0 = -(by + m);
    g.nx = nx;
    g.ny = ny;
    g.hx = 2.0 * (ax + m) / nx;
    g.hy = 2.0 * (by + m) / ny;
    return g;
}

/// Geometric time grid t_k = t0 * ratio^k up to t_max.
struct TimeGrid {
    std::vector<double> times;  // strictly increasing, times.front() == t0
    double ratio;
    int startup_steps;  // fully implicit substeps used on (0, t0]
};

inline TimeGrid make_time_grid(double t0, double t_max, double ratio = 1.15,
                               int startup_steps = 4) {
    if (!(t0 > 0 && t_max > t0 && ratio > 1.0 && startup_steps >= 1))
        throw std::domain_error("make_time_grid: invalid parameters");
    TimeGrid g;
    g.ratio = ratio;
    g.startup_steps = startup_steps;
    double t = t0;
    while (t < t_max * (1.0 - 1e-12)) {
        g.times.push_back(t);
        t *= ratio;
    }
    g.times.push_back(t_max);
    return g;
}

}  // namespace curvlab
