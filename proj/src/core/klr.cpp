#include "klr.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace cheegerpack {

namespace {

constexpr double kPi = std::numbers::pi;

Pt2 edge_inward_normal(const Pt2& a, const Pt2& b) {
  double ex = b[0] - a[0], ey = b[1] - a[1];
  double len = std::hypot(ex, ey);
  return {-ey / len, ex / len};
}

// Sutherland-Hodgman clip against the halfplane n.(x - a) >= t
std::vector<Pt2> clip_halfplane(const std::vector<Pt2>& poly, const Pt2& a, const Pt2& n,
                                double t) {
  std::vector<Pt2> out;
  const std::size_t nv = poly.size();
  auto side = [&](const Pt2& x) { return n[0] * (x[0] - a[0]) + n[1] * (x[1] - a[1]) - t; };
  for (std::size_t i = 0; i < nv; ++i) {
    const Pt2& p = poly[i];
    const Pt2& q = poly[(i + 1) % nv];
    double sp = side(p), sq = side(q);
    if (sp >= 0) {
      out.push_back(p);
      if (sq < 0) {
        double f = sp / (sp - sq);
        out.push_back({p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])});
      }
    } else if (sq >= 0) {
      double f = sp / (sp - sq);
      out.push_back({p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])});
    }
  }
  return out;
}

// drop collinear or repeated vertices
std::vector<Pt2> tidy(std::vector<Pt2> v, double scale) {
  const double tol = 1e-13 * scale;
  std::vector<Pt2> out;
  for (const auto& p : v) {
    if (!out.empty() && std::hypot(p[0] - out.back()[0], p[1] - out.back()[1]) < tol) continue;
    out.push_back(p);
  }
  while (out.size() > 1 &&
         std::hypot(out.front()[0] - out.back()[0], out.front()[1] - out.back()[1]) < tol)
    out.pop_back();
  if (out.size() < 3) return {};
  std::vector<Pt2> res;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Pt2& a = out[(i + out.size() - 1) % out.size()];
    const Pt2& b = out[i];
    const Pt2& c = out[(i + 1) % out.size()];
    double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (std::abs(cr) > tol * tol) res.push_back(b);
  }
  return res.size() >= 3 ? res : std::vector<Pt2>{};
}

}  // namespace

double ConvexPolygon::perimeter() const {
  double p = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Pt2& a = vertices[i];
    const Pt2& b = vertices[(i + 1) % vertices.size()];
    p += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return p;
}

double ConvexPolygon::inradius() const {
  // largest t with nonempty inner body, by bisection on emptiness
  double lo = 0, hi = std::sqrt(area());
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    (inner_parallel(*this, mid).empty() ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void ConvexPolygon::validate() const {
  if (vertices.size() < 3) throw std::invalid_argument("klr: polygon needs >= 3 vertices");
  if (!polygon_is_convex_ccw(vertices))
    throw std::invalid_argument("klr: polygon must be strictly convex with ccw vertices");
  if (!(polygon_area(vertices) > 0)) throw std::invalid_argument("klr: degenerate polygon");
}

ConvexPolygon inner_parallel(const ConvexPolygon& p, double t) {
  if (t < 0) throw std::invalid_argument("klr: inner_parallel needs t >= 0");
  p.validate();
  std::vector<Pt2> cur = p.vertices;
  double scale = std::sqrt(p.area());
  for (std::size_t i = 0; i < p.vertices.size() && !cur.empty(); ++i) {
    const Pt2& a = p.vertices[i];
    const Pt2& b = p.vertices[(i + 1) % p.vertices.size()];
    cur = clip_halfplane(cur, a, edge_inward_normal(a, b), t);
  }
  ConvexPolygon out;
  out.vertices = tidy(std::move(cur), scale);
  return out;
}

CheegerExact cheeger_exact(const ConvexPolygon& p) {
  p.validate();
  double a0 = p.area();
  auto g = [&](double t) {
    ConvexPolygon q = inner_parallel(p, t);
    return (q.empty() ? 0.0 : q.area()) - kPi * t * t;
  };
  double lo = 0, hi = std::sqrt(a0 / kPi);  // A(t) < A0 gives g(hi) < 0
  for (int i = 0; i < 120 && hi - lo > 1e-15 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  CheegerExact res;
  res.t_star = 0.5 * (lo + hi);
  res.h = 1.0 / res.t_star;
  res.inner_polygon = inner_parallel(p, res.t_star);
  if (res.inner_polygon.empty())
    throw std::runtime_error("klr: inner body vanished at t*; input polygon degenerate");

  const auto& q = res.inner_polygon.vertices;
  const std::size_t nq = q.size();
  std::vector<Pt2> normals(nq);
  for (std::size_t i = 0; i < nq; ++i) normals[i] = edge_inward_normal(q[i], q[(i + 1) % nq]);
  for (std::size_t i = 0; i < nq; ++i) {
    Pt2 n = normals[i];
    Pt2 off{-n[0] * res.t_star, -n[1] * res.t_star};  // outward
    res.segments.push_back({{q[i][0] + off[0], q[i][1] + off[1]},
                            {q[(i + 1) % nq][0] + off[0], q[(i + 1) % nq][1] + off[1]}});
    // arc at the next vertex, sweeping from this edge's outward normal to the next's
    Pt2 n2 = normals[(i + 1) % nq];
    double a1 = std::atan2(-n[1], -n[0]);
    double a2 = std::atan2(-n2[1], -n2[0]);
    while (a2 < a1) a2 += 2 * kPi;
    res.arcs.push_back({q[(i + 1) % nq], res.t_star, a1, a2});
  }
  return res;
}

double CheegerExact::boundary_perimeter() const {
  return inner_polygon.perimeter() + 2 * kPi * t_star;
}

double CheegerExact::boundary_area() const {
  return inner_polygon.area() + inner_polygon.perimeter() * t_star + kPi * t_star * t_star;
}

nlohmann::json CheegerExact::to_json() const {
  nlohmann::json j;
  j["t_star"] = t_star;
  j["h"] = h;
  j["inner_polygon"] = inner_polygon.vertices;
  j["area"] = boundary_area();
  j["perimeter"] = boundary_perimeter();
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : arcs)
    j["arcs"].push_back({{"center", a.center}, {"radius", a.radius}, {"from", a.ang0}, {"to", a.ang1}});
  j["segments"] = nlohmann::json::array();
  for (const auto& s : segments) j["segments"].push_back({{"a", s.a}, {"b", s.b}});
  return j;
}

void CheegerExact::write_boundary_csv(const std::string& path, int samples_per_arc) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("klr: cannot open '" + path + "' for writing");
  out << "x,y\n";
  char line[80];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", s.a[0], s.a[1]);
    out << line;
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", s.b[0], s.b[1]);
    out << line;
    const auto& a = arcs[i];
    for (int k = 1; k < samples_per_arc; ++k) {
      double ang = a.ang0 + (a.ang1 - a.ang0) * k / samples_per_arc;
      std::snprintf(line, sizeof(line), "%.17g,%.17g\n", a.center[0] + a.radius * std::cos(ang),
                    a.center[1] + a.radius * std::sin(ang));
      out << line;
    }
  }
}

double analytic_alpha_cheeger_ball(int dim, double radius, double alpha) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("klr: dim must be 2 or 3");
  if (!(radius > 0)) throw std::invalid_argument("klr: radius must be positive");
  if (!(alpha > double(dim - 1) / dim))
    throw std::invalid_argument("klr: alpha must exceed (N-1)/N");
  double gamma = dim == 2 ? kPi : 4.0 * kPi / 3.0;  // unit-ball volume
  double per = dim * gamma * std::pow(radius, dim - 1);
  double vol = gamma * std::pow(radius, dim);
  return per / std::pow(vol, alpha);
}

double compare_relative_error(const SharpMeasurement& measured, const CheegerExact& exact) {
  if (measured.per_phase_h_alpha.size() != 1)
    throw std::invalid_argument("klr: compare needs a single-phase measurement");
  double hm = measured.per_phase_h_alpha[0];
  if (!std::isfinite(hm)) throw std::invalid_argument("klr: empty measurement");
  return std::abs(hm - exact.h) / exact.h;
}

ConvexPolygon polygonalize_shape(const Shape& s, int circle_segments) {
  ConvexPolygon p;
  if (const auto* r = std::get_if<Rect>(&s)) {
    p.vertices = {{r->lo[0], r->lo[1]}, {r->hi[0], r->lo[1]}, {r->hi[0], r->hi[1]},
                  {r->lo[0], r->hi[1]}};
  } else if (const auto* b = std::get_if<Ball>(&s)) {
    for (int i = 0; i < circle_segments; ++i) {
      double ang = 2 * kPi * i / circle_segments;
      p.vertices.push_back({b->center[0] + b->radius * std::cos(ang),
                            b->center[1] + b->radius * std::sin(ang)});
    }
  } else if (const auto* poly = std::get_if<Polygon2>(&s)) {
    p.vertices = poly->vertices;
  } else {
    throw std::invalid_argument("klr: shape has no 2D convex polygonalization");
  }
  p.validate();
  return p;
}

}  // namespace cheegerpack
