#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "curvlab/geometry.hpp"
#include "oracles.hpp"

using namespace curvlab;
using Catch::Approx;

namespace {

// curvature by turning of the unit tangent: kappa = |T'(t)| / |p'(t)|
double ellipse_curvature_fd(double a, double b, double t) {
    auto tangent = [&](double s) {
        const double dx = -a * std::sin(s), dy = b * std::cos(s);
        const double n = std::hypot(dx, dy);
        return std::pair<double, double>{dx / n, dy / n};
    };
    const double h = 1e-6;
    auto [txp, typ] = tangent(t + h);
    auto [txm, tym] = tangent(t - h);
    const double dT = std::hypot(txp - txm, typ - tym) / (2.0 * h);
    return dT / std::hypot(a * std::sin(t), b * std::cos(t));
}

double grad_norm_fd(const Shape& s, const std::vector<double>& x, double h) {
    double g2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const double d = (s.signed_distance(xp) - s.signed_distance(xm)) / (2.0 * h);
        g2 += d * d;
    }
    return std::sqrt(g2);
}

}  // namespace

TEST_CASE("signed distance catalog values") {
    Shape ball(Ball{3, 1.0});
    CHECK(ball.signed_distance(std::vector<double>{0.25, 0.0, 0.0}) == Approx(0.75));
    Shape hs(HalfSpace{3});
    CHECK(hs.signed_distance(std::vector<double>{0.3, -2.0, 0.7}) == Approx(0.7));
    Shape ell(Ellipse2D{2.0, 1.0});
    CHECK(ell.signed_distance(std::vector<double>{3.0, 0.0}) == Approx(-1.0).margin(1e-12));
    CHECK(ell.signed_distance(std::vector<double>{0.0, 0.5}) == Approx(0.5).margin(1e-12));
    CHECK(ell.signed_distance(std::vector<double>{2.0, 0.0}) == Approx(0.0).margin(1e-12));
}

TEST_CASE("|grad delta| = 1 inside the tube") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    Shape shapes[] = {Shape(Ball{2, 1.0}), Shape(Ball{3, 1.5}), Shape(Ellipse2D{2.0, 1.0}),
                      Shape(HalfSpace{2})};
    for (const auto& s : shapes) {
        int accepted = 0;
        while (accepted < 200) {
            std::vector<double> x(s.dim());
            for (auto& c : x) c = 3.0 * uni(rng);
            const double d = s.signed_distance(x);
            const double tube = std::min(s.tube_radius(), 1.0);
            if (!(std::abs(d) < 0.8 * tube) || std::abs(d) < 0.05) continue;
            ++accepted;
            CHECK(grad_norm_fd(s, x, 1e-5) == Approx(1.0).margin(1e-6));
        }
    }
}

TEST_CASE("mean curvature catalog values and tangent-turning oracle") {
    Shape ball2(Ball{2, 2.0});
    CHECK(ball2.mean_curvature(std::vector<double>{2.0, 0.0}) == Approx(0.5));
    Shape ball3(Ball{3, 0.5});
    CHECK(ball3.mean_curvature(std::vector<double>{0.0, 0.0, 0.5}) == Approx(2.0));
    Shape hs(HalfSpace{2});
    CHECK(hs.mean_curvature(std::vector<double>{0.4, 0.0}) == Approx(0.0));

    Shape ell(Ellipse2D{2.0, 1.0});
    CHECK(ell.mean_curvature(std::vector<double>{2.0, 0.0}) == Approx(2.0));
    CHECK(ell.mean_curvature(std::vector<double>{0.0, 1.0}) == Approx(0.25));
    for (double t : {0.3, 0.9, 1.4, 2.5, 4.0}) {
        const std::vector<double> p{2.0 * std::cos(t), std::sin(t)};
        CHECK(ell.mean_curvature(p) == Approx(ellipse_curvature_fd(2.0, 1.0, t)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(ell.mean_curvature(std::vector<double>{1.5, 0.0}), std::domain_error);
}

TEST_CASE("laplacian of the signed distance") {
    Shape ball3(Ball{3, 1.0});
    CHECK(ball3.laplacian_signed_distance(std::vector<double>{0.5, 0.0, 0.0}) == Approx(-4.0));
    Shape hs(HalfSpace{3});
    CHECK(hs.laplacian_signed_distance(std::vector<double>{0.0, 0.0, 0.2}) == Approx(0.0));
    Shape ell(Ellipse2D{2.0, 1.0});
    CHECK(ell.laplacian_signed_distance(std::vector<double>{0.0, 1.0}) ==
          Approx(-0.25).margin(1e-10));
    // against a central-difference Laplacian of delta
    for (auto& pt : {std::vector<double>{0.1, 0.85}, std::vector<double>{1.2, 0.55}}) {
        const double h = 1e-4;
        double lap = 0.0;
        for (int k = 0; k < 2; ++k) {
            auto f = [&](double v) {
                auto x = pt;
                x[k] = v;
                return ell.signed_distance(x);
            };
            lap += oracles::central_diff2(f, pt[k], h);
        }
        CHECK(ell.laplacian_signed_distance(pt) == Approx(lap).margin(1e-4));
    }
    CHECK_THROWS_AS(ball3.laplacian_signed_distance(std::vector<double>{2.5, 0.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("projection to the interface") {
    Shape ball2(Ball{2, 1.0});
    auto p = ball2.project_to_interface(std::vector<double>{0.5, 0.0});
    CHECK(p[0] == Approx(1.0));
    CHECK(p[1] == Approx(0.0).margin(1e-15));

    Shape ell(Ellipse2D{2.0, 1.0});
    auto q = ell.project_to_interface(std::vector<double>{0.0, 0.5});
    CHECK(q[0] == Approx(0.0).margin(1e-12));
    CHECK(q[1] == Approx(1.0).margin(1e-12));

    // idempotent, and the output sits on the interface
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> x{2.2 * uni(rng), 1.2 * uni(rng)};
        if (std::abs(ell.signed_distance(x)) >= 0.8 * ell.tube_radius()) continue;
        auto f1 = ell.project_to_interface(x);
        CHECK(std::abs(ell.signed_distance(f1)) < 1e-10);
        auto f2 = ell.project_to_interface(f1);
        CHECK(f2[0] == Approx(f1[0]).margin(1e-9));
        CHECK(f2[1] == Approx(f1[1]).margin(1e-9));
    }
}

TEST_CASE("interface samples are quasi-uniform") {
    Shape ball2(Ball{2, 1.0});
    auto pts = ball2.interface_samples(4);
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const double ang_i = std::atan2(pts[i][1], pts[i][0]);
        const double ang_j = std::atan2(pts[(i + 1) % 4][1], pts[(i + 1) % 4][0]);
        double d = std::fmod(ang_j - ang_i + 4.0 * kPi, 2.0 * kPi);
        CHECK(d == Approx(0.5 * kPi).margin(1e-12));
    }

    Shape ell(Ellipse2D{2.0, 1.0});
    auto ep = ell.interface_samples(64);
    REQUIRE(ep.size() == 64);
    std::vector<double> arcs;
    for (std::size_t i = 0; i < ep.size(); ++i) {
        const auto& p0 = ep[i];
        const auto& p1 = ep[(i + 1) % ep.size()];
        arcs.push_back(std::hypot(p1[0] - p0[0], p1[1] - p0[1]));
        CHECK(std::abs(ell.signed_distance(p0)) < 1e-9);
    }
    const auto [mn, mx] = std::minmax_element(arcs.begin(), arcs.end());
    CHECK(*mx / *mn < 1.05);  // equal arclength up to chord/arc distortion

    Shape ball3(Ball{3, 1.0});
    for (auto& s : ball3.interface_samples(32))
        CHECK(std::abs(ball3.signed_distance(s)) < 1e-12);

    CHECK_THROWS_AS(ball2.interface_samples(0), std::domain_error);
}

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(Shape(Ball{1, 1.0}), std::domain_error);
    CHECK_THROWS_AS(Shape(Ball{2, -1.0}), std::domain_error);
    CHECK_THROWS_AS(Shape(Ellipse2D{1.0, 2.0}), std::domain_error);
    CHECK(Shape(Ellipse2D{2.0, 1.0}).tube_radius() == Approx(0.5));
    CHECK(Shape(Ball{3, 2.0}).tube_radius() == Approx(2.0));
    CHECK(std::isinf(Shape(HalfSpace{2}).tube_radius()));
}
