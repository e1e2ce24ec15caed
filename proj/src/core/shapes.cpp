#include "shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cheegerpack {

namespace {

double dot2(const Pt2& a, const Pt2& b) { return a[0] * b[0] + a[1] * b[1]; }

double tetra_face_distance(const Tetra& t, const Pt& x) {
  // min over the 4 face planes, oriented inward
  double best = std::numeric_limits<double>::infinity();
  static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (int f = 0; f < 4; ++f) {
    const Pt& a = t.vertices[faces[f][0]];
    const Pt& b = t.vertices[faces[f][1]];
    const Pt& c = t.vertices[faces[f][2]];
    const Pt& d = t.vertices[6 - faces[f][0] - faces[f][1] - faces[f][2]];
    Pt ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    Pt ac{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    Pt n{ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2],
         ab[0] * ac[1] - ab[1] * ac[0]};
    double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    n = {n[0] / nn, n[1] / nn, n[2] / nn};
    double side = n[0] * (d[0] - a[0]) + n[1] * (d[1] - a[1]) + n[2] * (d[2] - a[2]);
    if (side < 0) n = {-n[0], -n[1], -n[2]};  // inward
    double dist = n[0] * (x[0] - a[0]) + n[1] * (x[1] - a[1]) + n[2] * (x[2] - a[2]);
    best = std::min(best, dist);
  }
  return best;
}

}  // namespace

double polygon_area(const std::vector<Pt2>& v) {
  double a = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    const Pt2& p = v[i];
    const Pt2& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

bool polygon_is_convex_ccw(const std::vector<Pt2>& v) {
  if (v.size() < 3) return false;
  for (size_t i = 0; i < v.size(); ++i) {
    const Pt2& a = v[i];
    const Pt2& b = v[(i + 1) % v.size()];
    const Pt2& c = v[(i + 2) % v.size()];
    double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
    if (cr <= 0) return false;
  }
  return true;
}

double polygon_boundary_distance(const std::vector<Pt2>& v, const Pt2& x) {
  // min over inward edge halfplanes; exact inside a convex polygon
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < v.size(); ++i) {
    const Pt2& a = v[i];
    const Pt2& b = v[(i + 1) % v.size()];
    Pt2 e{b[0] - a[0], b[1] - a[1]};
    double len = std::hypot(e[0], e[1]);
    Pt2 n{-e[1] / len, e[0] / len};  // inward for ccw
    best = std::min(best, dot2(n, {x[0] - a[0], x[1] - a[1]}));
  }
  return best;
}

bool polygon_contains(const std::vector<Pt2>& v, const Pt2& x) {
  return polygon_boundary_distance(v, x) >= 0;
}

bool shape_contains(const Shape& s, const Pt& x, int dim) {
  return boundary_distance(s, x, dim) >= 0;
}

double boundary_distance(const Shape& s, const Pt& x, int dim) {
  return std::visit(
      [&](const auto& sh) -> double {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, FullBox>) {
          return std::numeric_limits<double>::infinity();
        } else if constexpr (std::is_same_v<T, Rect>) {
          double best = std::numeric_limits<double>::infinity();
          for (int a = 0; a < dim; ++a)
            best = std::min({best, x[a] - sh.lo[a], sh.hi[a] - x[a]});
          return best;
        } else if constexpr (std::is_same_v<T, Ball>) {
          double r2 = 0;
          for (int a = 0; a < dim; ++a) r2 += (x[a] - sh.center[a]) * (x[a] - sh.center[a]);
          return sh.radius - std::sqrt(r2);
        } else if constexpr (std::is_same_v<T, Polygon2>) {
          return polygon_boundary_distance(sh.vertices, {x[0], x[1]});
        } else if constexpr (std::is_same_v<T, Tetra>) {
          return tetra_face_distance(sh, x);
        } else {  // Implicit
          return sh.inside(x, dim) ? 1.0 : -1.0;
        }
      },
      s);
}

std::pair<Pt, Pt> shape_bbox(const Shape& s, int dim) {
  return std::visit(
      [&](const auto& sh) -> std::pair<Pt, Pt> {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, FullBox>) {
          throw std::invalid_argument("shapes: full-box shape has no intrinsic bbox");
        } else if constexpr (std::is_same_v<T, Rect>) {
          return {sh.lo, sh.hi};
        } else if constexpr (std::is_same_v<T, Ball>) {
          Pt lo{}, hi{};
          for (int a = 0; a < dim; ++a) {
            lo[a] = sh.center[a] - sh.radius;
            hi[a] = sh.center[a] + sh.radius;
          }
          return {lo, hi};
        } else if constexpr (std::is_same_v<T, Polygon2>) {
          Pt lo{1e300, 1e300, 0}, hi{-1e300, -1e300, 0};
          for (const auto& v : sh.vertices) {
            lo[0] = std::min(lo[0], v[0]);
            lo[1] = std::min(lo[1], v[1]);
            hi[0] = std::max(hi[0], v[0]);
            hi[1] = std::max(hi[1], v[1]);
          }
          return {lo, hi};
        } else if constexpr (std::is_same_v<T, Tetra>) {
          Pt lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
          for (const auto& v : sh.vertices)
            for (int a = 0; a < 3; ++a) {
              lo[a] = std::min(lo[a], v[a]);
              hi[a] = std::max(hi[a], v[a]);
            }
          return {lo, hi};
        } else {
          throw std::invalid_argument("shapes: implicit shape has no bbox");
        }
      },
      s);
}

Shape make_square(double side) { return Rect{{0, 0, 0}, {side, side, 0}}; }
Shape make_rect(double w, double h) { return Rect{{0, 0, 0}, {w, h, 0}}; }
Shape make_disk(double radius, Pt2 center) {
  return Ball{{center[0], center[1], 0}, radius};
}
Shape make_cube(double side) { return Rect{{0, 0, 0}, {side, side, side}}; }
Shape make_ball3(double radius, Pt center) { return Ball{center, radius}; }

Shape make_equilateral_triangle(double side) {
  Polygon2 p;
  p.vertices = {{0, 0}, {side, 0}, {side / 2, side * std::sqrt(3.0) / 2}};
  return p;
}

Shape make_regular_tetrahedron(double edge) {
  Tetra t;
  double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
  t.vertices = {Pt{0, 0, 0}, Pt{edge, 0, 0}, Pt{edge / 2, edge * s3 / 2, 0},
                Pt{edge / 2, edge * s3 / 6, edge * s6 / 3}};
  return t;
}

nlohmann::json shape_to_json(const Shape& s) {
  nlohmann::json j;
  std::visit(
      [&](const auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, FullBox>) {
          j["type"] = "box";
        } else if constexpr (std::is_same_v<T, Rect>) {
          j["type"] = "rectangle";
          j["lo"] = sh.lo;
          j["hi"] = sh.hi;
        } else if constexpr (std::is_same_v<T, Ball>) {
          j["type"] = "ball";
          j["center"] = sh.center;
          j["radius"] = sh.radius;
        } else if constexpr (std::is_same_v<T, Polygon2>) {
          j["type"] = "polygon";
          j["vertices"] = sh.vertices;
        } else if constexpr (std::is_same_v<T, Tetra>) {
          j["type"] = "tetrahedron";
          j["vertices"] = sh.vertices;
        } else {
          throw std::invalid_argument("shapes: implicit shape is not serializable");
        }
      },
      s);
  return j;
}

Shape shape_from_json(const nlohmann::json& j, int dim) {
  std::string type = j.at("type").get<std::string>();
  if (type == "box") return FullBox{};
  if (type == "square") return make_square(j.value("side", 1.0));
  if (type == "rectangle") {
    if (j.contains("lo")) {
      Rect r;
      r.lo = j.at("lo").get<Pt>();
      r.hi = j.at("hi").get<Pt>();
      return r;
    }
    auto size = j.at("size").get<std::vector<double>>();
    if ((int)size.size() != dim) throw std::invalid_argument("shapes: rectangle size/dim mismatch");
    Rect r;
    r.lo = {0, 0, 0};
    r.hi = {size[0], size[1], dim == 3 ? size[2] : 0.0};
    return r;
  }
  if (type == "disk" || type == "ball") {
    Ball b;
    b.radius = j.at("radius").get<double>();
    if (j.contains("center")) {
      auto c = j.at("center").get<std::vector<double>>();
      for (int a = 0; a < dim; ++a) b.center[a] = c[a];
    } else {
      for (int a = 0; a < dim; ++a) b.center[a] = b.radius;
    }
    return b;
  }
  if (type == "polygon") {
    Polygon2 p;
    p.vertices = j.at("vertices").get<std::vector<Pt2>>();
    if (!polygon_is_convex_ccw(p.vertices))
      throw std::invalid_argument("shapes: polygon must be convex with ccw vertices");
    return p;
  }
  if (type == "equilateral_triangle") return make_equilateral_triangle(j.value("side", 1.0));
  if (type == "cube") return make_cube(j.value("side", 1.0));
  if (type == "tetrahedron") {
    if (j.contains("vertices")) {
      Tetra t;
      auto v = j.at("vertices").get<std::vector<Pt>>();
      if (v.size() != 4) throw std::invalid_argument("shapes: tetrahedron needs 4 vertices");
      std::copy(v.begin(), v.end(), t.vertices.begin());
      return t;
    }
    return make_regular_tetrahedron(j.value("edge", 1.0));
  }
  throw std::invalid_argument("shapes: unknown shape type '" + type + "'");
}

}  // namespace cheegerpack
