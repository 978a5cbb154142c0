#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/closedforms.hpp"
#include "curvlab/common.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/grid.hpp"
#include "curvlab/linalg.hpp"
#include "curvlab/specfun.hpp"

namespace curvlab {

// ---------------------------------------------------------------------------
// Closed-form radial solution of -div(sigma grad U) + lambda U = lambda chi
// on a ball: U = 1 + A g+(r)/g+(R) inside, U = B g-(r)/g-(R) outside, where
// g+ = r^{1-N/2} I_{N/2-1}(k+ r), g- = r^{1-N/2} K_{N/2-1}(k- r). All Bessel
// evaluations go through scaled ratios, so lambda up to 1e8 is fine.
// ---------------------------------------------------------------------------

struct RadialBesselSolution {
    int dim;
    double radius;
    Conductivity cond;
    double lambda;
    double boundary_value;  // U(R)
    double inside_coeff;    // A = U(R) - 1

    double operator()(double r) const {
        if (r < 0) throw std::domain_error("RadialBesselSolution: r must be >= 0");
        if (r <= radius) return 1.0 + inside_coeff * inside_ratio(r);
        return boundary_value * outside_ratio(r);
    }

    double derivative(double r) const {
        const double kp = k_plus(), km = k_minus();
        if (r <= radius) {
            if (r == 0.0) return 0.0;
            return inside_coeff * kp *
                   specfun::bessel_i_ratio_next(base_order(), kp * r) * inside_ratio(r);
        }
        return -boundary_value * km *
               specfun::bessel_k_ratio_next(base_order(), km * r) * outside_ratio(r);
    }

    double second_derivative(double r) const {
        const double n1 = dim - 1;
        if (r <= radius) {
            const double kp = k_plus();
            const double ratio = specfun::bessel_i_ratio_next(base_order(), kp * r);
            return inside_coeff * inside_ratio(r) * (kp * kp - n1 * kp / r * ratio);
        }
        const double km = k_minus();
        const double ratio = specfun::bessel_k_ratio_next(base_order(), km * r);
        return boundary_value * outside_ratio(r) * (km * km + n1 * km / r * ratio);
    }

    /// -(sigma)(U'' + (N-1)/r U') + lambda U - lambda chi; zero analytically.
    double residual(double r) const {
        const double sigma = r <= radius ? cond.sigma_plus : cond.sigma_minus;
        const double chi = r <= radius ? 1.0 : 0.0;
        return -sigma * (second_derivative(r) + (dim - 1) / r * derivative(r)) +
               lambda * ((*this)(r)-chi);
    }

    /// g+(r)/g+(R), stable for all 0 <= r <= R.
    double inside_ratio(double r) const {
        const double kp = k_plus(), R = radius;
        if (dim == 3) {
            if (r == 0.0) return 2.0 * kp * R / (-std::expm1(-2.0 * kp * R)) * std::exp(-kp * R);
            return (R / r) * (-std::expm1(-2.0 * kp * r)) / (-std::expm1(-2.0 * kp * R)) *
                   std::exp(kp * (r - R));
        }
        if (r == 0.0)
            return std::exp(-kp * R) / specfun::bessel_i_scaled(base_order(), kp * R);
        return specfun::bessel_i_scaled(base_order(), kp * r) /
               specfun::bessel_i_scaled(base_order(), kp * R) * std::exp(kp * (r - R));
    }

    /// g-(r)/g-(R), stable and decaying for r >= R.
    double outside_ratio(double r) const {
        const double km = k_minus(), R = radius;
        if (dim == 3) return (R / r) * std::exp(-km * (r - R));
        return specfun::bessel_k_scaled(base_order(), km * r) /
               specfun::bessel_k_scaled(base_order(), km * R) * std::exp(km * (R - r));
    }

    double k_plus() const { return std::sqrt(lambda / cond.sigma_plus); }
    double k_minus() const { return std::sqrt(lambda / cond.sigma_minus); }
    specfun::BesselOrder base_order() const {
        return dim == 2 ? specfun::BesselOrder::zero() : specfun::BesselOrder::half();
    }
};

inline RadialBesselSolution solve_radial_bessel(const Ball& ball, const Conductivity& c,
                                                double lambda) {
    if (!(lambda > 0)) throw std::domain_error("solve_radial_bessel: lambda must be > 0");
    if (ball.dim != 2 && ball.dim != 3)
        throw std::domain_error("solve_radial_bessel: dim must be 2 or 3");
    RadialBesselSolution s{ball.dim, ball.radius, c, lambda, 0.0, 0.0};
    const double kp = s.k_plus(), km = s.k_minus();
    const double Lp = kp * specfun::bessel_i_ratio_next(s.base_order(), kp * ball.radius);
    const double Lm = -km * specfun::bessel_k_ratio_next(s.base_order(), km * ball.radius);
    const double denom = c.sigma_plus * Lp - c.sigma_minus * Lm;
    // Lp > 0 and Lm < 0, so denom > 0 for every lambda > 0.
    s.inside_coeff = c.sigma_minus * Lm / denom;
    s.boundary_value = 1.0 + s.inside_coeff;
    return s;
}

// ---------------------------------------------------------------------------
// Radial finite-volume discretization, shared by the elliptic and parabolic
// solvers: -(1/r^{N-1}) (r^{N-1} sigma U')' with harmonic-mean face
// conductivities and exact partial volumes for the chi right-hand side.
// ---------------------------------------------------------------------------

struct RadialOperator {
    std::vector<double> face;           // face transmissibilities, size n-1
    std::vector<double> volume;         // control volumes, size n
    std::vector<double> volume_inside;  // volume within {r < R}
};

inline RadialOperator assemble_radial_operator(const Ball& ball, const Conductivity& c,
                                               const RadialGrid& grid) {
    const auto& r = grid.nodes;
    const std::size_t n = r.size();
    const double R = ball.radius;
    const int N = ball.dim;
    auto vol = [&](double lo, double hi) {
        return (std::pow(hi, N) - std::pow(lo, N)) / N;
    };
    auto sigma_at = [&](double rr) { return rr < R ? c.sigma_plus : c.sigma_minus; };

    RadialOperator op;
    op.face.resize(n - 1);
    op.volume.resize(n);
    op.volume_inside.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double rf = 0.5 * (r[i] + r[i + 1]);
        const double s1 = sigma_at(0.5 * (r[i] + rf));
        const double s2 = sigma_at(0.5 * (rf + r[i + 1]));
        const double sf = 2.0 * s1 * s2 / (s1 + s2);
        op.face[i] = sf * std::pow(rf, N - 1) / (r[i + 1] - r[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i == 0) ? 0.0 : 0.5 * (r[i - 1] + r[i]);
        const double hi = (i + 1 == n) ? r[i] : 0.5 * (r[i] + r[i + 1]);
        op.volume[i] = vol(lo, hi);
        op.volume_inside[i] = vol(std::min(lo, R), std::min(hi, R));
    }
    return op;
}

struct RadialField {
    RadialGrid grid;
    std::vector<double> values;
    double lambda;
    Conductivity cond;
    std::string shape_desc;

    double interface_value() const { return values[grid.interface_index]; }

    double value_at(double r) const {
        const auto& x = grid.nodes;
        if (r <= x.front()) return values.front();
        if (r >= x.back()) return values.back();
        const auto it = std::upper_bound(x.begin(), x.end(), r);
        const std::size_t i = it - x.begin() - 1;
        const double w = (r - x[i]) / (x[i + 1] - x[i]);
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
};

/// Interface-fitted finite-volume solve of the two-phase modified Helmholtz
/// problem on a ball, with Dirichlet truncation U = 0 at the outer radius.
inline RadialField solve_radial_fd(const Ball& ball, const Conductivity& c,
                                   double lambda, const RadialGrid& grid) {
    if (!(lambda > 0)) throw std::domain_error("solve_radial_fd: lambda must be > 0");
    if (grid.nodes[grid.interface_index] != ball.radius)
        throw std::domain_error("solve_radial_fd: grid is not fitted to the interface");
    const auto op = assemble_radial_operator(ball, c, grid);
    const std::size_t n = grid.nodes.size();
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (i > 0) lower[i] = -op.face[i - 1];
        diag[i] = lambda * op.volume[i] + op.face[i] + (i > 0 ? op.face[i - 1] : 0.0);
        upper[i] = -op.face[i];
        rhs[i] = lambda * op.volume_inside[i];
    }
    diag[n - 1] = 1.0;  // outer Dirichlet row
    RadialField f{grid, solve_tridiagonal(lower, diag, upper, rhs), lambda, c,
                  Shape(ball).describe()};
    return f;
}

// ---------------------------------------------------------------------------
// Flat-interface profile ansatz P for the 2D solver. P equals the barrier
// Psi_lambda near the interface and is blended to the constant chi away from
// it (inside only; outside a convex interface the signed distance is globally
// valid). Solving for the deviation W = U - P moves the unresolved boundary
// layer into closed form and leaves a smooth, transmission-compatible
// correction carrying the curvature signal.
// ---------------------------------------------------------------------------

class FlatProfileAnsatz {
public:
    FlatProfileAnsatz(const Shape& shape, const Conductivity& c, double lambda)
        : shape_(shape), cond_(c), lambda_(lambda) {
        const double tube = shape.tube_radius();
        blend_lo_ = std::isfinite(tube) ? 0.55 * tube : std::numeric_limits<double>::infinity();
        blend_hi_ = std::isfinite(tube) ? 0.85 * tube : std::numeric_limits<double>::infinity();
    }

    bool inside(double x, double y) const {
        if (auto* b = shape_.as_ball()) return x * x + y * y <= b->radius * b->radius;
        auto* e = shape_.as_ellipse();
        return (x * x) / (e->a * e->a) + (y * y) / (e->b * e->b) <= 1.0;
    }

    struct TubeData {
        double delta;
        double lap_delta;
    };

    TubeData tube_data(double x, double y) const {
        if (auto* b = shape_.as_ball()) {
            const double r = std::hypot(x, y);
            return {b->radius - r, r > 0 ? -1.0 / r : 0.0};
        }
        auto* e = shape_.as_ellipse();
        const EllipseFoot f = ellipse_foot_point(e->a, e->b, x, y);
        const double lvl = (x * x) / (e->a * e->a) + (y * y) / (e->b * e->b);
        const double d = lvl <= 1.0 ? f.distance : -f.distance;
        const double kap = ellipse_theta_curvature(e->a, e->b, f.theta);
        return {d, -kap / (1.0 - d * kap)};
    }

    double signed_distance(double x, double y) const {
        if (auto* b = shape_.as_ball()) return b->radius - std::hypot(x, y);
        auto* e = shape_.as_ellipse();
        return ellipse_signed_distance(e->a, e->b, x, y);
    }

    double value_from_delta(double delta) const {
        const double S = cond_.sqrt_sum();
        if (delta > 0.0) {
            const double arg = std::sqrt(lambda_ / cond_.sigma_plus) * delta;
            if (arg > 700.0) return 1.0;
            return 1.0 - blend(delta) * (cond_.sqrt_minus() / S) * std::exp(-arg);
        }
        const double arg = std::sqrt(lambda_ / cond_.sigma_minus) * delta;
        return (cond_.sqrt_plus() / S) * std::exp(arg);
    }

    double value(double x, double y) const { return value_from_delta(signed_distance(x, y)); }

    /// lambda*chi - (-div(sigma grad P) + lambda P) at a point, evaluated
    /// analytically per branch. With the blend identically 1 this is exactly
    /// the negative of the Helmholtz residual of Psi_lambda.
    double source(double x, double y) const {
        const double qd = signed_distance(x, y);
        const double S = cond_.sqrt_sum();
        if (qd > 0.0) {
            const double pp = std::sqrt(lambda_ / cond_.sigma_plus);
            if (pp * qd > 40.0 || qd >= blend_hi_) return 0.0;
            const auto td = tube_data(x, y);
            const double E = (cond_.sqrt_minus() / S) * std::exp(-pp * qd);
            const auto [w, w1, w2] = blend3(qd);
            return E * (cond_.sigma_plus * (2.0 * w1 * pp - w2) +
                        cond_.sigma_plus * td.lap_delta * (w * pp - w1));
        }
        const double pm = std::sqrt(lambda_ / cond_.sigma_minus);
        if (-pm * qd > 40.0) return 0.0;
        const auto td = tube_data(x, y);
        return std::sqrt(cond_.sigma_minus * lambda_) * (cond_.sqrt_plus() / S) *
               std::exp(pm * td.delta) * td.lap_delta;
    }

private:
    double blend(double delta) const {
        if (delta <= blend_lo_) return 1.0;
        if (delta >= blend_hi_) return 0.0;
        const double u = (delta - blend_lo_) / (blend_hi_ - blend_lo_);
        return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    }

    // (w, w', w'') of the blend window at delta > 0
    std::array<double, 3> blend3(double delta) const {
        if (delta <= blend_lo_ || !(std::isfinite(blend_lo_))) return {1.0, 0.0, 0.0};
        if (delta >= blend_hi_) return {0.0, 0.0, 0.0};
        const double d = blend_hi_ - blend_lo_;
        const double u = (delta - blend_lo_) / d;
        const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        const double s1 = 30.0 * u * u * (1.0 + u * (-2.0 + u));
        const double s2 = u * (60.0 + u * (-180.0 + 120.0 * u));
        return {1.0 - s, -s1 / d, -s2 / (d * d)};
    }

    Shape shape_;
    Conductivity cond_;
    double lambda_;
    double blend_lo_, blend_hi_;
};

struct Cartesian2DOptions {
    double cg_tol = 1e-10;
    int cg_max_iter = 100000;
    bool subtract_profile = true;
};

struct CartesianField2D {
    CartesianGrid2D grid;
    std::vector<double> values;  // deviation W if subtracted, else U itself
    bool is_deviation;
    double lambda;
    Conductivity cond;
    Shape shape;
    CgResult cg;

    /// Bilinear interpolation of the stored cell-centered values.
    double interp(double x, double y) const {
        const auto& g = grid;
        double fx = (x - g.x0) / g.hx - 0.5, fy = (y - g.y0) / g.hy - 0.5;
        fx = std::clamp(fx, 0.0, static_cast<double>(g.nx - 1));
        fy = std::clamp(fy, 0.0, static_cast<double>(g.ny - 1));
        const int i = std::min(static_cast<int>(fx), g.nx - 2);
        const int j = std::min(static_cast<int>(fy), g.ny - 2);
        const double wx = fx - i, wy = fy - j;
        return (1 - wx) * (1 - wy) * values[g.idx(i, j)] +
               wx * (1 - wy) * values[g.idx(i + 1, j)] +
               (1 - wx) * wy * values[g.idx(i, j + 1)] +
               wx * wy * values[g.idx(i + 1, j + 1)];
    }

    double u_at(double x, double y) const {
        if (!is_deviation) return interp(x, y);
        return interp(x, y) + FlatProfileAnsatz(shape, cond, lambda).value(x, y);
    }

    /// U - Psi_lambda at a point (the curvature-carrying deviation).
    double deviation_at(double x, double y) const {
        const FlatProfileAnsatz p(shape, cond, lambda);
        const double delta = p.signed_distance(x, y);
        const double psi = phi_profile(std::sqrt(lambda) * delta, cond);
        if (!is_deviation) return interp(x, y) - psi;
        return interp(x, y) + p.value_from_delta(delta) - psi;
    }

    double cell_u(int i, int j) const {
        if (!is_deviation) return values[grid.idx(i, j)];
        return values[grid.idx(i, j)] +
               FlatProfileAnsatz(shape, cond, lambda).value(grid.cx(i), grid.cy(j));
    }

    /// Full solution on all cells (materialized once for range checks/exports).
    std::vector<double> u_cells() const {
        std::vector<double> u(values);
        if (is_deviation) {
            const FlatProfileAnsatz p(shape, cond, lambda);
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i)
                    u[grid.idx(i, j)] += p.value(grid.cx(i), grid.cy(j));
        }
        return u;
    }
};

/// Finite-volume solve of the two-phase modified Helmholtz problem on a
/// cell-centered Cartesian grid: harmonic-mean face conductivities,
/// cell-center sampled sigma and chi, Dirichlet U = 0 on the outer box,
/// Jacobi-preconditioned CG on the SPD system. With subtract_profile the
/// system is solved for the deviation from the flat-interface profile with
/// the analytically computed source.
/// The stiffness part of the 2D FV discretization: harmonic-mean face
/// transmissibilities with a homogeneous Dirichlet outer boundary. Shared by
/// the elliptic and parabolic solvers.
struct CartesianOperator2D {
    CartesianGrid2D grid;
    std::vector<double> sigma;  // cell-center sampled conductivity
    std::vector<double> te, tn;  // east/north interior face transmissibilities
    std::vector<double> diag;    // stiffness diagonal (incl. boundary faces)

    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        const int nx = grid.nx, ny = grid.ny;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t id = grid.idx(i, j);
                double v = diag[id] * u[id];
                if (i + 1 < nx) v -= te[id] * u[id + 1];
                if (i > 0) v -= te[id - 1] * u[id - 1];
                if (j + 1 < ny) v -= tn[id] * u[id + nx];
                if (j > 0) v -= tn[id - nx] * u[id - nx];
                out[id] = v;
            }
    }
};

inline CartesianOperator2D assemble_cartesian_operator(const Shape& shape,
                                                       const Conductivity& c,
                                                       const CartesianGrid2D& grid) {
    if (!shape.as_ball() && !shape.as_ellipse())
        throw std::domain_error("cartesian operator: unsupported shape " + shape.describe());
    const FlatProfileAnsatz prof(shape, c, 1.0);  // only the inside test is used
    const int nx = grid.nx, ny = grid.ny;
    const std::size_t n = grid.cells();
    const double hx = grid.hx, hy = grid.hy;

    CartesianOperator2D op{grid, std::vector<double>(n), std::vector<double>(n, 0.0),
                           std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            op.sigma[grid.idx(i, j)] =
                prof.inside(grid.cx(i), grid.cy(j)) ? c.sigma_plus : c.sigma_minus;

    auto hm = [](double a, double b) { return 2.0 * a * b / (a + b); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t id = grid.idx(i, j);
            if (i + 1 < nx) op.te[id] = hm(op.sigma[id], op.sigma[grid.idx(i + 1, j)]) * hy / hx;
            if (j + 1 < ny) op.tn[id] = hm(op.sigma[id], op.sigma[grid.idx(i, j + 1)]) * hx / hy;
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t id = grid.idx(i, j);
            double d = 0.0;
            d += (i + 1 < nx) ? op.te[id] : 2.0 * op.sigma[id] * hy / hx;
            d += (i > 0) ? op.te[grid.idx(i - 1, j)] : 2.0 * op.sigma[id] * hy / hx;
            d += (j + 1 < ny) ? op.tn[id] : 2.0 * op.sigma[id] * hx / hy;
            d += (j > 0) ? op.tn[grid.idx(i, j - 1)] : 2.0 * op.sigma[id] * hx / hy;
            op.diag[id] = d;
        }
    return op;
}

inline CartesianField2D solve_cartesian_2d(const Shape& shape, const Conductivity& c,
                                           double lambda, const CartesianGrid2D& grid,
                                           const Cartesian2DOptions& opt = {}) {
    if (!(lambda > 0)) throw std::domain_error("solve_cartesian_2d: lambda must be > 0");
    const auto op = assemble_cartesian_operator(shape, c, grid);
    const FlatProfileAnsatz prof(shape, c, lambda);
    const std::size_t n = grid.cells();
    const double area = grid.hx * grid.hy;

    std::vector<double> rhs(n), diag(n);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t id = grid.idx(i, j);
            const bool in = prof.inside(grid.cx(i), grid.cy(j));
            rhs[id] = opt.subtract_profile ? area * prof.source(grid.cx(i), grid.cy(j))
                                           : area * lambda * (in ? 1.0 : 0.0);
            diag[id] = op.diag[id] + lambda * area;
        }

    auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
        op.apply(u, out);
        for (std::size_t id = 0; id < n; ++id) out[id] += lambda * area * u[id];
    };

    std::vector<double> u(n, 0.0);
    const CgResult cg = conjugate_gradient(apply, diag, rhs, u, opt.cg_tol, opt.cg_max_iter);
    return CartesianField2D{grid, std::move(u), opt.subtract_profile, lambda, c, shape, cg};
}

/// Exact flat-interface solution: for a half-space, Psi_lambda solves the
/// problem exactly (Delta delta = 0), so U_lambda = Phi(sqrt(lambda) x_N).
inline double halfspace_solution(std::span<const double> x, double lambda,
                                 const Conductivity& c) {
    return phi_profile(std::sqrt(lambda) * x.back(), c);
}

// ---------------------------------------------------------------------------
// Transmission-condition residual reports.
// ---------------------------------------------------------------------------

struct TransmissionReport {
    double max_flux_jump;   // max |sigma+ dU/dnu|+ - sigma- dU/dnu|-|
    double max_value_jump;  // max |U+ - U-|
    double mesh_size;
};

inline TransmissionReport transmission_residual(const RadialBesselSolution& s) {
    const double R = s.radius;
    const double fin = s.cond.sigma_plus * s.derivative(R);  // inside branch at R
    const double km = s.k_minus();
    const double dout = -s.boundary_value * km *
                        specfun::bessel_k_ratio_next(s.base_order(), km * R);
    return {std::abs(fin - s.cond.sigma_minus * dout), 0.0, 0.0};
}

inline TransmissionReport transmission_residual(const RadialField& f) {
    const auto& r = f.grid.nodes;
    const std::size_t k = f.grid.interface_index;
    const double slope_in = (f.values[k] - f.values[k - 1]) / (r[k] - r[k - 1]);
    const double slope_out = (f.values[k + 1] - f.values[k]) / (r[k + 1] - r[k]);
    const double h = std::max(r[k] - r[k - 1], r[k + 1] - r[k]);
    return {std::abs(f.cond.sigma_plus * slope_in - f.cond.sigma_minus * slope_out), 0.0, h};
}

inline TransmissionReport transmission_residual(const CartesianField2D& f,
                                                const Shape& shape, int n_samples = 16) {
    const double h = std::max(f.grid.hx, f.grid.hy);
    double worst_flux = 0.0, worst_jump = 0.0;
    for (const auto& p : shape.interface_samples(n_samples)) {
        const auto nv = shape.unit_normal(p);
        auto at = [&](double d) {  // d > 0 inside (against the outward normal)
            return f.u_at(p[0] - d * nv[0], p[1] - d * nv[1]);
        };
        const double d1 = 1.5 * h, d2 = 3.0 * h;
        const double slope_in = (at(d1) - at(d2)) / (d2 - d1);   // dU/dnu from inside
        const double slope_out = (at(-d2) - at(-d1)) / (d2 - d1);
        worst_flux = std::max(worst_flux, std::abs(f.cond.sigma_plus * slope_in -
                                                   f.cond.sigma_minus * slope_out));
        // one-sided extrapolations of the value to the interface
        const double v_in = at(d1) + (at(d1) - at(d2)) * d1 / (d2 - d1);
        const double v_out = at(-d1) + (at(-d1) - at(-d2)) * d1 / (d2 - d1);
        worst_jump = std::max(worst_jump, std::abs(v_in - v_out));
    }
    return {worst_flux, worst_jump, h};
}

// ---------------------------------------------------------------------------
// Interface-value extraction from a cell-centered 2D field: fit the deviation
// from Psi_lambda along interface normals with the two-phase exponential
// basis {e^{-q|d|}, |d| e^{-q|d|}, 1}, q = sqrt(lambda/sigma_side), averaged
// over a few tangentially offset normal lines to suppress the staircase
// phase of the sigma sampling.
// ---------------------------------------------------------------------------

struct InterfaceProbe {
    double u_value;        // estimated U at the interface point
    double deficit;        // c_inf - U
    double side_mismatch;  // |plus-side estimate - minus-side estimate|
};

namespace detail {

// least-squares fit of samples (d_i, w_i), d_i > 0, to c + a e^{-q d} + b d e^{-q d},
// evaluated at d = 0 (returns c + a). Falls back to a 2-parameter fit when the
// window is too narrow to resolve the d e^{-q d} mode.
inline double fit_exponential_at_zero(const std::vector<double>& d,
                                      const std::vector<double>& w, double q) {
    const std::size_t m = d.size();
    const double span = (*std::max_element(d.begin(), d.end()) -
                         *std::min_element(d.begin(), d.end())) * q;
    const bool full = span > 1.5 && m >= 5;
    const int k = full ? 3 : 2;
    double ata[9] = {0}, atb[3] = {0};
    for (std::size_t i = 0; i < m; ++i) {
        const double e = std::exp(-q * d[i]);
        const double phi[3] = {1.0, e, d[i] * e};
        for (int r = 0; r < k; ++r) {
            atb[r] += phi[r] * w[i];
            for (int s = 0; s < k; ++s) ata[3 * r + s] += phi[r] * phi[s];
        }
    }
    // solve the k x k normal equations by Gaussian elimination
    double A[3][4];
    for (int r = 0; r < k; ++r) {
        for (int s = 0; s < k; ++s) A[r][s] = ata[3 * r + s];
        A[r][k] = atb[r];
    }
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (int r = col + 1; r < k; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int s = col; s <= k; ++s) A[r][s] -= f * A[col][s];
        }
    }
    double coef[3] = {0, 0, 0};
    for (int r = k - 1; r >= 0; --r) {
        double v = A[r][k];
        for (int s = r + 1; s < k; ++s) v -= A[r][s] * coef[s];
        coef[r] = v / A[r][r];
    }
    return coef[0] + coef[1];  // c + a
}

}  // namespace detail

inline InterfaceProbe probe_interface_value(const CartesianField2D& f, const Shape& shape,
                                            std::span<const double> p,
                                            int tangential_lines = 5) {
    const double h = std::max(f.grid.hx, f.grid.hy);
    const double lambda = f.lambda;
    const auto& c = f.cond;
    const auto nv = shape.unit_normal(p);
    const double tx = -nv[1], ty = nv[0];

    double acc_plus = 0.0, acc_minus = 0.0;
    int used = 0;
    for (int l = 0; l < tangential_lines; ++l) {
        const double off = (l - (tangential_lines - 1) / 2.0) * 2.5 * h;
        std::vector<double> q0 = {p[0] + off * tx, p[1] + off * ty};
        const auto base = shape.project_to_interface(q0);
        const auto nb = shape.unit_normal(base);
        for (Side side : {Side::Plus, Side::Minus}) {
            const double sgn = side == Side::Plus ? 1.0 : -1.0;
            const double qdecay = std::sqrt(lambda / c.sigma(side));
            const double dmax =
                std::min(6.0 / qdecay, 0.45 * std::min(shape.tube_radius(), 1e300));
            std::vector<double> ds, ws;
            for (double d = 1.5 * h; d <= dmax; d += 0.75 * h) {
                ds.push_back(d);
                ws.push_back(f.deviation_at(base[0] - sgn * d * nb[0],
                                            base[1] - sgn * d * nb[1]));
                if (ds.size() >= 24) break;
            }
            if (ds.size() < 4) continue;
            const double v = detail::fit_exponential_at_zero(ds, ws, qdecay);
            (side == Side::Plus ? acc_plus : acc_minus) += v;
        }
        ++used;
    }
    if (used == 0) throw std::runtime_error("probe_interface_value: no usable samples");
    const double vp = acc_plus / used, vm = acc_minus / used;
    const double dev0 = 0.5 * (vp + vm);
    const double cinf = interface_constant(c);
    return {cinf + dev0, -dev0, std::abs(vp - vm)};
}

}  // namespace curvlab
