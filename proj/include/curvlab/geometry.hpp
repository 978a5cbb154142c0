#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "curvlab/common.hpp"

namespace curvlab {

struct Ball {
    int dim;
    double radius;
};

/// Axis-aligned ellipse x^2/a^2 + y^2/b^2 = 1 with a >= b > 0.
struct Ellipse2D {
    double a, b;
};

/// Omega = { x : x_N > 0 }.
struct HalfSpace {
    int dim;
};

struct EllipseFoot {
    double theta;     // parameter of the foot point, folded to [0, pi/2]
    double px, py;    // foot point in the query's quadrant
    double distance;  // unsigned distance to the query point
};

/// Curvature of the ellipse boundary at parameter theta, positive (convex).
inline double ellipse_theta_curvature(double a, double b, double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
}

namespace detail {

// Derivative of half the squared distance from q (first quadrant) to the
// ellipse point (a cos t, b sin t).
inline double foot_objective(double a, double b, double qx, double qy, double t) {
    const double s = std::sin(t), c = std::cos(t);
    return (b * b - a * a) * s * c + a * qx * s - b * qy * c;
}

inline double foot_objective_deriv(double a, double b, double qx, double qy, double t) {
    const double s = std::sin(t), c = std::cos(t);
    return (b * b - a * a) * (c * c - s * s) + a * qx * c + b * qy * s;
}

}  // namespace detail

/// Nearest point on the ellipse from (x, y), by safeguarded Newton on the
/// foot-point equation. Converges to |residual| <= 1e-12 relative; throws
/// std::runtime_error (carrying the point) if 100 iterations do not suffice.
inline EllipseFoot ellipse_foot_point(double a, double b, double x, double y) {
    const double qx = std::abs(x), qy = std::abs(y);
    const double sx = x < 0 ? -1.0 : 1.0, sy = y < 0 ? -1.0 : 1.0;

    auto finish = [&](double theta) {
        const double px = a * std::cos(theta), py = b * std::sin(theta);
        return EllipseFoot{theta, sx * px, sy * py,
                           std::hypot(px - qx, py - qy)};
    };

    if (a == b) return finish(std::atan2(qy, qx));  // circle

    const double c2 = a * a - b * b;
    if (qy == 0.0) {
        // g = sin t * ((b^2-a^2) cos t + a qx); interior root exists iff
        // qx lies inside the evolute cusp at x = (a^2-b^2)/a.
        if (qx >= c2 / a) return finish(0.0);
        return finish(std::acos(a * qx / c2));
    }
    if (qx == 0.0) return finish(0.5 * kPi);

    // Bracket the root of g on [0, pi/2]: g(0) = -b qy < 0, g(pi/2) = a qx > 0.
    // For qy > 0 the in-quadrant critical point is unique; the scan guards
    // against pathological brackets anyway.
    const int kScan = 32;
    double lo = 0.0, hi = 0.5 * kPi;
    double glo = -b * qy;
    for (int i = 1; i <= kScan; ++i) {
        const double t = 0.5 * kPi * i / kScan;
        const double gt = detail::foot_objective(a, b, qx, qy, t);
        if (glo < 0.0 && gt >= 0.0) {
            lo = 0.5 * kPi * (i - 1) / kScan;
            hi = t;
            break;
        }
        glo = gt;
    }

    double t = 0.5 * (lo + hi);
    const double scale = a * (a + qx + qy);  // magnitude of g's coefficients
    for (int it = 0; it < 100; ++it) {
        const double g = detail::foot_objective(a, b, qx, qy, t);
        if (std::abs(g) <= 1e-12 * scale) return finish(t);
        if (g > 0.0)
            hi = t;
        else
            lo = t;
        const double dg = detail::foot_objective_deriv(a, b, qx, qy, t);
        double tn = t - g / dg;
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    std::ostringstream msg;
    msg << "ellipse_foot_point: no convergence at (" << x << ", " << y << ")";
    throw std::runtime_error(msg.str());
}

inline double ellipse_signed_distance(double a, double b, double x, double y) {
    const EllipseFoot f = ellipse_foot_point(a, b, x, y);
    const double level = (x * x) / (a * a) + (y * y) / (b * b);
    return level <= 1.0 ? f.distance : -f.distance;
}

/// Laplacian of the ellipse signed distance at a point with foot curvature
/// kappa_f: Delta delta = -kappa_f / (1 - delta * kappa_f).
inline double ellipse_laplacian_sdf(double a, double b, double x, double y) {
    const EllipseFoot f = ellipse_foot_point(a, b, x, y);
    const double level = (x * x) / (a * a) + (y * y) / (b * b);
    const double delta = level <= 1.0 ? f.distance : -f.distance;
    const double kap = ellipse_theta_curvature(a, b, f.theta);
    return -kap / (1.0 - delta * kap);
}

/// Shape catalog with exact differential geometry of the interface.
/// Sign conventions: signed distance delta > 0 inside Omega; the normal is
/// outward; mean curvature is positive where Omega is convex (sphere: 1/R).
class Shape {
public:
    Shape(Ball b) : v_(b) {
        if (b.dim < 2) throw std::domain_error("Ball: dim must be >= 2");
        if (!(b.radius > 0)) throw std::domain_error("Ball: radius must be > 0");
    }
    Shape(Ellipse2D e) : v_(e) {
        if (!(e.a >= e.b && e.b > 0))
            throw std::domain_error("Ellipse2D: require a >= b > 0");
    }
    Shape(HalfSpace h) : v_(h) {
        if (h.dim < 2) throw std::domain_error("HalfSpace: dim must be >= 2");
    }

    int dim() const {
        if (auto* b = std::get_if<Ball>(&v_)) return b->dim;
        if (std::get_if<Ellipse2D>(&v_)) return 2;
        return std::get_if<HalfSpace>(&v_)->dim;
    }

    /// Radius of the tubular neighborhood on which delta is C^2.
    double tube_radius() const {
        if (auto* b = std::get_if<Ball>(&v_)) return b->radius;
        if (auto* e = std::get_if<Ellipse2D>(&v_)) return e->b * e->b / e->a;
        return std::numeric_limits<double>::infinity();
    }

    double signed_distance(std::span<const double> x) const {
        check_dim(x);
        if (auto* b = std::get_if<Ball>(&v_)) return b->radius - norm(x);
        if (auto* e = std::get_if<Ellipse2D>(&v_))
            return ellipse_signed_distance(e->a, e->b, x[0], x[1]);
        return x.back();
    }

    /// Mean curvature at an interface point (|delta| <= 1e-8 required).
    double mean_curvature(std::span<const double> p) const {
        require_on_interface(p);
        if (auto* b = std::get_if<Ball>(&v_)) return 1.0 / b->radius;
        if (auto* e = std::get_if<Ellipse2D>(&v_)) {
            const EllipseFoot f = ellipse_foot_point(e->a, e->b, p[0], p[1]);
            return ellipse_theta_curvature(e->a, e->b, f.theta);
        }
        return 0.0;
    }

    /// Laplacian of the signed distance; requires |delta| < tube_radius.
    double laplacian_signed_distance(std::span<const double> x) const {
        require_in_tube(x);
        if (auto* b = std::get_if<Ball>(&v_))
            return -(b->dim - 1) / norm(x);
        if (auto* e = std::get_if<Ellipse2D>(&v_))
            return ellipse_laplacian_sdf(e->a, e->b, x[0], x[1]);
        return 0.0;
    }

    /// Outward unit normal at an interface point.
    std::vector<double> unit_normal(std::span<const double> p) const {
        require_on_interface(p);
        std::vector<double> n(p.begin(), p.end());
        if (auto* b = std::get_if<Ball>(&v_)) {
            (void)b;
            const double r = norm(p);
            for (auto& c : n) c /= r;
            return n;
        }
        if (auto* e = std::get_if<Ellipse2D>(&v_)) {
            n = {p[0] / (e->a * e->a), p[1] / (e->b * e->b)};
            const double m = std::hypot(n[0], n[1]);
            n[0] /= m;
            n[1] /= m;
            return n;
        }
        std::fill(n.begin(), n.end(), 0.0);
        n.back() = -1.0;  // points out of Omega = { x_N > 0 }
        return n;
    }

    std::vector<double> project_to_interface(std::span<const double> x) const {
        require_in_tube(x, /*closed=*/true);
        if (auto* b = std::get_if<Ball>(&v_)) {
            const double r = norm(x);
            std::vector<double> p(x.begin(), x.end());
            for (auto& c : p) c *= b->radius / r;
            return p;
        }
        if (auto* e = std::get_if<Ellipse2D>(&v_)) {
            const EllipseFoot f = ellipse_foot_point(e->a, e->b, x[0], x[1]);
            return {f.px, f.py};
        }
        std::vector<double> p(x.begin(), x.end());
        p.back() = 0.0;
        return p;
    }

    /// n quasi-uniform interface points (uniform angles / arclength;
    /// Fibonacci sphere for N = 3 balls; a line through the origin for
    /// half-spaces).
    std::vector<std::vector<double>> interface_samples(int n) const {
        if (n < 1) throw std::domain_error("interface_samples: n must be >= 1");
        std::vector<std::vector<double>> pts;
        pts.reserve(n);
        if (auto* b = std::get_if<Ball>(&v_)) {
            if (b->dim == 2) {
                for (int i = 0; i < n; ++i) {
                    const double th = 2.0 * kPi * i / n;
                    pts.push_back({b->radius * std::cos(th), b->radius * std::sin(th)});
                }
            } else if (b->dim == 3) {
                const double ga = kPi * (3.0 - std::sqrt(5.0));
                for (int i = 0; i < n; ++i) {
                    const double z = (n == 1) ? 0.0 : 1.0 - 2.0 * i / (n - 1.0);
                    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                    const double th = ga * i;
                    pts.push_back({b->radius * rho * std::cos(th),
                                   b->radius * rho * std::sin(th), b->radius * z});
                }
            } else {
                // axis-plane circle samples in higher dimensions
                for (int i = 0; i < n; ++i) {
                    const double th = 2.0 * kPi * i / n;
                    std::vector<double> p(b->dim, 0.0);
                    p[0] = b->radius * std::cos(th);
                    p[1] = b->radius * std::sin(th);
                    pts.push_back(std::move(p));
                }
            }
            return pts;
        }
        if (auto* e = std::get_if<Ellipse2D>(&v_)) {
            // invert the cumulative arclength on a dense parameter grid
            const int m = 4096;
            std::vector<double> s(m + 1, 0.0);
            auto speed = [&](double t) {
                return std::hypot(e->a * std::sin(t), e->b * std::cos(t));
            };
            for (int i = 1; i <= m; ++i) {
                const double t0 = 2.0 * kPi * (i - 1) / m, t1 = 2.0 * kPi * i / m;
                s[i] = s[i - 1] + 0.5 * (speed(t0) + speed(t1)) * (t1 - t0);
            }
            const double total = s[m];
            int j = 0;
            for (int i = 0; i < n; ++i) {
                const double target = total * i / n;
                while (j < m && s[j + 1] < target) ++j;
                const double w = (target - s[j]) / (s[j + 1] - s[j]);
                const double t = 2.0 * kPi * (j + w) / m;
                pts.push_back({e->a * std::cos(t), e->b * std::sin(t)});
            }
            return pts;
        }
        const int d = std::get_if<HalfSpace>(&v_)->dim;
        for (int i = 0; i < n; ++i) {
            std::vector<double> p(d, 0.0);
            p[0] = -0.5 + (i + 0.5) / n;
            pts.push_back(std::move(p));
        }
        return pts;
    }

    std::string describe() const {
        std::ostringstream os;
        if (auto* b = std::get_if<Ball>(&v_))
            os << "ball(dim=" << b->dim << ",R=" << b->radius << ")";
        else if (auto* e = std::get_if<Ellipse2D>(&v_))
            os << "ellipse(a=" << e->a << ",b=" << e->b << ")";
        else
            os << "halfspace(dim=" << std::get_if<HalfSpace>(&v_)->dim << ")";
        return os.str();
    }

    const Ball* as_ball() const { return std::get_if<Ball>(&v_); }
    const Ellipse2D* as_ellipse() const { return std::get_if<Ellipse2D>(&v_); }
    const HalfSpace* as_halfspace() const { return std::get_if<HalfSpace>(&v_); }

private:
    static double norm(std::span<const double> x) {
        double s = 0.0;
        for (double c : x) s += c * c;
        return std::sqrt(s);
    }
    void check_dim(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim())
            throw std::domain_error("Shape: point dimension mismatch");
    }
    void require_on_interface(std::span<const double> p) const {
        if (std::abs(signed_distance(p)) > 1e-8)
            throw std::domain_error("Shape: point is not on the interface");
    }
    void require_in_tube(std::span<const double> x, bool closed = false) const {
        const double d = signed_distance(x);
        const bool ok = closed ? std::abs(d) <= tube_radius() : std::abs(d) < tube_radius();
        if (!ok) {
            std::ostringstream msg;
            msg << "Shape: point outside the C^2 tube (|delta|=" << std::abs(d)
                << " >= tube_radius=" << tube_radius() << ")";
            throw std::domain_error(msg.str());
        }
    }

    std::variant<Ball, Ellipse2D, HalfSpace> v_;
};

}  // namespace curvlab
