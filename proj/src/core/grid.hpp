#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapes.hpp"

namespace cheegerpack {

/// Uniform finite-difference grid on [0,L1]x...x[0,LN] with m nodes per axis.
/// Periodic grids sample the torus: node i sits at i*L/m and stencils wrap
/// modulo m, so a one-node circular shift is an exact isometry.
struct GridSpec {
  int dim = 2;          // 2 or 3
  int m = 4;            // nodes per axis
  Pt extent{1, 1, 1};   // box side lengths
  bool periodic = false;

  double spacing(int axis) const {
    return periodic ? extent[axis] / m : extent[axis] / (m - 1);
  }
  double max_spacing() const;
  std::size_t node_count() const;
  double volume() const;
  double node_weight() const { return volume() / double(node_count()); }
  double cell_volume() const;  // prod of spacings
  Pt coords(std::size_t idx) const;
  std::size_t index(int x, int y, int z = 0) const;
  void validate() const;  // throws std::invalid_argument
};

GridSpec refined(const GridSpec& g);  // 2m nodes per axis

struct DomainMask {
  Shape shape = FullBox{};
  std::vector<std::uint8_t> inside;  // one flag per node
  bool all_inside = true;

  bool is_inside(std::size_t idx) const { return all_inside || inside[idx]; }
};

DomainMask build_mask(const GridSpec& g, const Shape& s);

using ScalarField = std::vector<double>;

void apply_mask(ScalarField& f, const DomainMask& mask);

/// Arithmetic-mean quadrature: volume * mean over all nodes, field forced to
/// zero outside the mask.
double integrate(const ScalarField& f, const GridSpec& g, const DomainMask& mask);

/// Quadrature of |grad f|^2 as a sum over grid edges of first-order
/// difference quotients (2/3 axis, 1/3 split across diagonal families).
/// Only edges between real nodes are summed, so constants have zero energy.
double gradient_energy(const ScalarField& f, const GridSpec& g, const DomainMask& mask);

double lp_power(const ScalarField& f, double q, const GridSpec& g, const DomainMask& mask);

/// Multilinear interpolation onto the grid with 2m nodes per axis; the caller
/// rebuilds the mask on the fine grid and re-applies it.
ScalarField refine(const ScalarField& f, const GridSpec& g);

/// Sample a field at a physical point by multilinear interpolation.
double interpolate_at(const ScalarField& f, const GridSpec& g, const Pt& x);

// raw dump: 16-byte header (u32 dim, u32 m per axis, zero padded) then
// little-endian f64 node values, x fastest
void write_field_f64(const std::string& path, const ScalarField& f, const GridSpec& g);
ScalarField read_field_f64(const std::string& path, GridSpec* g_out);
void write_field_csv(const std::string& path, const ScalarField& f, const GridSpec& g);

}  // namespace cheegerpack
