#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cheegerpack {

using Pt = std::array<double, 3>;
using Pt2 = std::array<double, 2>;

/// Domain descriptors. All shapes live in physical coordinates; the grid box
/// that encloses them is chosen by the pipeline.
struct FullBox {};

struct Rect {
  Pt lo{0, 0, 0};
  Pt hi{1, 1, 0};
};

struct Ball {
  Pt center{0, 0, 0};
  double radius = 1.0;
};

struct Polygon2 {
  std::vector<Pt2> vertices;  // counterclockwise, convex
};

struct Tetra {
  std::array<Pt, 4> vertices;
};

/// Mask-only shape sampled from a predicate; not serializable.
struct Implicit {
  std::function<bool(const Pt&, int dim)> inside;
};

using Shape = std::variant<FullBox, Rect, Ball, Polygon2, Tetra, Implicit>;

bool shape_contains(const Shape& s, const Pt& x, int dim);

/// Signed distance to the shape boundary, positive inside. For points outside
/// the value is negative but not necessarily the Euclidean distance.
double boundary_distance(const Shape& s, const Pt& x, int dim);

/// Axis-aligned bounding box {lo, hi}.
std::pair<Pt, Pt> shape_bbox(const Shape& s, int dim);

Shape make_square(double side = 1.0);
Shape make_rect(double w, double h);
Shape make_disk(double radius, Pt2 center);
Shape make_equilateral_triangle(double side = 1.0);
Shape make_cube(double side = 1.0);
Shape make_ball3(double radius, Pt center);
Shape make_regular_tetrahedron(double edge = 1.0);

nlohmann::json shape_to_json(const Shape& s);
Shape shape_from_json(const nlohmann::json& j, int dim);

// polygon helpers shared with the KLR oracle
double polygon_area(const std::vector<Pt2>& v);
bool polygon_is_convex_ccw(const std::vector<Pt2>& v);
bool polygon_contains(const std::vector<Pt2>& v, const Pt2& x);
double polygon_boundary_distance(const std::vector<Pt2>& v, const Pt2& x);

}  // namespace cheegerpack
