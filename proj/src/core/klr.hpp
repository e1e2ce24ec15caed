#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "measure.hpp"
#include "shapes.hpp"

namespace cheegerpack {

/// Convex polygon, counterclockwise vertices.
struct ConvexPolygon {
  std::vector<Pt2> vertices;

  double area() const { return polygon_area(vertices); }
  double perimeter() const;
  double inradius() const;
  bool empty() const { return vertices.size() < 3; }
  void validate() const;  // throws std::invalid_argument unless strictly convex ccw
};

/// Inner parallel body at distance t: intersection of inward-shifted edge
/// halfplanes. Returns an empty polygon once t reaches the inradius.
ConvexPolygon inner_parallel(const ConvexPolygon& p, double t);

struct BoundarySegment {
  Pt2 a, b;
};
struct BoundaryArc {
  Pt2 center;
  double radius, ang0, ang1;  // ccw
};

/// Exact Cheeger set of a convex polygon: the inner parallel body at t*
/// dilated by a disk of radius t*, where area(inner body at t*) = pi t*^2.
struct CheegerExact {
  double t_star = 0;
  double h = 0;  // 1 / t_star
  ConvexPolygon inner_polygon;
  std::vector<BoundarySegment> segments;
  std::vector<BoundaryArc> arcs;

  double boundary_perimeter() const;
  double boundary_area() const;
  nlohmann::json to_json() const;
  void write_boundary_csv(const std::string& path, int samples_per_arc = 32) const;
};

CheegerExact cheeger_exact(const ConvexPolygon& p);

/// h_alpha of a ball: P(B_R) / |B_R|^alpha, valid for alpha > (N-1)/N where
/// the ball is its own alpha-Cheeger set.
double analytic_alpha_cheeger_ball(int dim, double radius, double alpha);

/// |h_measured - h_exact| / h_exact for a k=1 measurement.
double compare_relative_error(const SharpMeasurement& measured, const CheegerExact& exact);

/// Convex domains as polygons for the oracle; curved boundaries are
/// polygonalized (default 256 vertices).
ConvexPolygon polygonalize_shape(const Shape& s, int circle_segments = 256);

}  // namespace cheegerpack
