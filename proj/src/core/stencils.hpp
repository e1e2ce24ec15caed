#pragma once

#include "grid.hpp"

namespace cheegerpack::detail {

struct EdgeFamily {
  int dx = 0, dy = 0, dz = 0;
  double inv_len2 = 1.0;  // 1 / |physical offset|^2
  double weight = 1.0;    // contribution coefficient in the Dirichlet form
};

// Axis families weighted 2/3 and diagonal families so that linear fields
// reproduce |grad f|^2 exactly (2D: 1/3 per family, 3D face diagonals: 1/6).
// Grids with unequal spacings get axis-only weights; the diagonal quotients
// would mix the axes there.
inline std::vector<EdgeFamily> dirichlet_families(const GridSpec& g) {
  std::vector<EdgeFamily> fams;
  double hx = g.spacing(0), hy = g.spacing(1);
  double hz = g.dim == 3 ? g.spacing(2) : hx;
  bool iso = std::abs(hx - hy) <= 1e-12 * hx && (g.dim == 2 || std::abs(hx - hz) <= 1e-12 * hx);
  double w_axis = iso ? 2.0 / 3.0 : 1.0;
  fams.push_back({1, 0, 0, 1.0 / (hx * hx), w_axis});
  fams.push_back({0, 1, 0, 1.0 / (hy * hy), w_axis});
  if (g.dim == 3) fams.push_back({0, 0, 1, 1.0 / (hz * hz), w_axis});
  if (iso) {
    double d2 = 1.0 / (hx * hx + hy * hy);
    double w_diag = g.dim == 2 ? 1.0 / 3.0 : 1.0 / 6.0;
    fams.push_back({1, 1, 0, d2, w_diag});
    fams.push_back({1, -1, 0, d2, w_diag});
    if (g.dim == 3) {
      fams.push_back({1, 0, 1, d2, w_diag});
      fams.push_back({1, 0, -1, d2, w_diag});
      fams.push_back({0, 1, 1, d2, w_diag});
      fams.push_back({0, 1, -1, d2, w_diag});
    }
  }
  return fams;
}

inline std::vector<EdgeFamily> axis_families(const GridSpec& g) {
  std::vector<EdgeFamily> fams;
  for (int a = 0; a < g.dim; ++a) {
    EdgeFamily f;
    f.dx = a == 0;
    f.dy = a == 1;
    f.dz = a == 2;
    double h = g.spacing(a);
    f.inv_len2 = 1.0 / (h * h);
    fams.push_back(f);
  }
  return fams;
}

template <typename Fn>
void for_each_edge(const GridSpec& g, const EdgeFamily& fam, Fn&& fn) {
  const int m = g.m;
  const int mz = g.dim == 3 ? m : 1;
  for (int z = 0; z < mz; ++z) {
    int z2 = z + fam.dz;
    if (g.periodic) z2 = (z2 + mz) % mz;
    else if (z2 < 0 || z2 >= mz) continue;
    for (int y = 0; y < m; ++y) {
      int y2 = y + fam.dy;
      if (g.periodic) y2 = (y2 + m) % m;
      else if (y2 < 0 || y2 >= m) continue;
      const std::size_t row1 = g.index(0, y, z), row2 = g.index(0, y2, z2);
      if (fam.dx == 0) {
        for (int x = 0; x < m; ++x) fn(row1 + x, row2 + x);
      } else {
        for (int x = 0; x < m - 1; ++x) fn(row1 + x, row2 + x + 1);
        if (g.periodic) fn(row1 + m - 1, row2);
      }
    }
  }
}

}  // namespace cheegerpack::detail
