#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/klr.hpp"

using namespace cheegerpack;

namespace {

constexpr double kPi = std::numbers::pi;

ConvexPolygon unit_square() {
  return {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
}

ConvexPolygon scaled(const ConvexPolygon& p, double s) {
  ConvexPolygon q = p;
  for (auto& v : q.vertices) {
    v[0] *= s;
    v[1] *= s;
  }
  return q;
}

// independent area estimate: count midpoints of a fine lattice inside all
// inward-shifted halfplanes
double halfplane_area_oracle(const ConvexPolygon& p, double t, int n = 2000) {
  auto [lo, hi] = shape_bbox(Polygon2{p.vertices}, 2);
  double area = 0;
  double dx = (hi[0] - lo[0]) / n, dy = (hi[1] - lo[1]) / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Pt2 x{lo[0] + (i + 0.5) * dx, lo[1] + (j + 0.5) * dy};
      bool ok = true;
      for (std::size_t e = 0; e < p.vertices.size() && ok; ++e) {
        const Pt2& a = p.vertices[e];
        const Pt2& b = p.vertices[(e + 1) % p.vertices.size()];
        double ex = b[0] - a[0], ey = b[1] - a[1];
        double len = std::hypot(ex, ey);
        double d = (-ey * (x[0] - a[0]) + ex * (x[1] - a[1])) / len;
        ok = d >= t;
      }
      if (ok) area += dx * dy;
    }
  return area;
}

}  // namespace

TEST_CASE("inner_parallel: square shrinks, vanishes at the inradius") {
  ConvexPolygon sq = unit_square();
  ConvexPolygon in = inner_parallel(sq, 0.1);
  CHECK(in.area() == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(inner_parallel(sq, 0.5).empty());
  CHECK(inner_parallel(sq, 0.7).empty());
}

TEST_CASE("inner_parallel: right triangle against the halfplane oracle") {
  ConvexPolygon tri{{{0, 0}, {1, 0}, {0, 1}}};
  ConvexPolygon in = inner_parallel(tri, 0.1);
  double oracle = halfplane_area_oracle(tri, 0.1);
  CHECK(in.area() == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("inner_parallel rejects non-convex input") {
  ConvexPolygon bad{{{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}}};
  CHECK_THROWS_AS(inner_parallel(bad, 0.1), std::invalid_argument);
  ConvexPolygon cw{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
  CHECK_THROWS_AS(inner_parallel(cw, 0.1), std::invalid_argument);
}

TEST_CASE("cheeger_exact: unit square closed form") {
  CheegerExact res = cheeger_exact(unit_square());
  double h_exact = 2 + std::sqrt(kPi);
  CHECK(res.h == doctest::Approx(h_exact).epsilon(1e-10));
  CHECK(res.t_star == doctest::Approx(1.0 / h_exact).epsilon(1e-10));
  // defining equation: area of the inner body equals pi t*^2
  CHECK(res.inner_polygon.area() == doctest::Approx(kPi * res.t_star * res.t_star).epsilon(1e-10));
}

TEST_CASE("cheeger_exact: scaling law h(lambda P) = h(P)/lambda") {
  ConvexPolygon sq = unit_square();
  CheegerExact base = cheeger_exact(sq);
  for (double s : {0.5, 2.0, 3.7}) {
    CheegerExact res = cheeger_exact(scaled(sq, s));
    CHECK(res.h == doctest::Approx(base.h / s).epsilon(1e-10));
  }
}

TEST_CASE("cheeger_exact: equilateral triangle quadratic closed form") {
  double side = 1.0;
  ConvexPolygon tri{{{0, 0}, {side, 0}, {side / 2, side * std::sqrt(3.0) / 2}}};
  CheegerExact res = cheeger_exact(tri);
  // (sqrt(3)/4)(1 - 2 sqrt(3) t)^2 = pi t^2, smaller root of the quadratic
  double A = 3 * std::sqrt(3.0) - kPi;
  double t = (3.0 - std::sqrt(9.0 - A * std::sqrt(3.0))) / (2 * A);
  CHECK(res.t_star == doctest::Approx(t).epsilon(1e-10));
  CHECK(res.h == doctest::Approx(1.0 / t).epsilon(1e-10));
}

TEST_CASE("cheeger boundary: closes and is self-consistent") {
  std::mt19937_64 rng(123);
  // random convex hull polygons
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Pt2> pts(12);
    for (auto& p : pts)
      p = {double(rng() >> 11) * 0x1.0p-53, double(rng() >> 11) * 0x1.0p-53};
    // gift wrap
    std::sort(pts.begin(), pts.end());
    auto cross = [](const Pt2& o, const Pt2& a, const Pt2& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Pt2> hull;
    for (const auto& p : pts) {
      while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
        hull.pop_back();
      hull.push_back(p);
    }
    std::size_t lower = hull.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
        hull.pop_back();
      hull.push_back(*it);
    }
    hull.pop_back();
    ConvexPolygon poly{hull};
    CheegerExact res = cheeger_exact(poly);
    // the Cheeger set's own ratio equals h
    CHECK(res.boundary_perimeter() / res.boundary_area() ==
          doctest::Approx(res.h).epsilon(1e-8));
    // segment/arc chain closes: arc ends meet the next segment start
    for (std::size_t i = 0; i < res.segments.size(); ++i) {
      const auto& arc = res.arcs[i];
      const auto& next = res.segments[(i + 1) % res.segments.size()];
      double ex = arc.center[0] + arc.radius * std::cos(arc.ang1);
      double ey = arc.center[1] + arc.radius * std::sin(arc.ang1);
      CHECK(std::hypot(ex - next.a[0], ey - next.a[1]) < 1e-9);
    }
  }
}

TEST_CASE("A(t) decreases and the root is unique") {
  ConvexPolygon sq = unit_square();
  double prev = sq.area();
  int sign_changes = 0;
  double prev_g = prev;  // g(0) = area > 0
  for (int i = 1; i <= 40; ++i) {
    double t = 0.5 * i / 40.0;
    ConvexPolygon in = inner_parallel(sq, t);
    double a = in.empty() ? 0.0 : in.area();
    CHECK(a <= prev + 1e-12);
    prev = a;
    double gt = a - kPi * t * t;
    if (prev_g > 0 && gt <= 0) ++sign_changes;
    prev_g = gt;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("analytic_alpha_cheeger_ball") {
  CHECK(analytic_alpha_cheeger_ball(2, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(analytic_alpha_cheeger_ball(3, 1.0, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
  double alpha = 0.5 + 1e-4;
  CHECK(analytic_alpha_cheeger_ball(2, 1.0, alpha) ==
        doctest::Approx(2.0 * std::pow(kPi, 1.0 - alpha)).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_alpha_cheeger_ball(2, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(analytic_alpha_cheeger_ball(3, 1.0, 0.6), std::invalid_argument);
}

TEST_CASE("compare_relative_error") {
  CheegerExact exact = cheeger_exact(unit_square());
  SharpMeasurement ms;
  ms.per_phase_area = {0.9};
  ms.per_phase_perimeter = {3.5};
  ms.per_phase_h_alpha = {exact.h};
  CHECK(compare_relative_error(ms, exact) == 0.0);
  ms.per_phase_h_alpha = {1.01 * exact.h};
  CHECK(compare_relative_error(ms, exact) == doctest::Approx(0.01).epsilon(1e-12));
  ms.per_phase_h_alpha = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(compare_relative_error(ms, exact), std::invalid_argument);
}

TEST_CASE("polygonalize_shape: disk becomes a fine polygon") {
  ConvexPolygon p = polygonalize_shape(make_disk(0.4, {0.5, 0.5}), 256);
  CHECK(p.vertices.size() == 256);
  CHECK(p.area() == doctest::Approx(kPi * 0.16).epsilon(1e-3));
  CheegerExact res = cheeger_exact(p);
  CHECK(res.h == doctest::Approx(2.0 / 0.4).epsilon(1e-2));
}
