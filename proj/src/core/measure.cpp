#include "measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cheegerpack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline int wrap(int i, int m) { return (i + m) % m; }

double cell_value(const ScalarField& f, const GridSpec& g, int x, int y, int z) {
  if (g.periodic) {
    x = wrap(x, g.m);
    y = wrap(y, g.m);
    z = g.dim == 3 ? wrap(z, g.m) : 0;
  }
  return f[g.index(x, y, z)];
}

}  // namespace

int measure_smoothing_passes(int m) { return std::max(2, int(std::lround(m / 64.0))); }

ScalarField smooth_pass(const ScalarField& f, const GridSpec& g) {
  const int m = g.m;
  const int mz = g.dim == 3 ? m : 1;
  ScalarField a = f, b(f.size());
  auto at = [&](const ScalarField& v, int x, int y, int z) -> double {
    if (g.periodic) {
      x = wrap(x, m);
      y = wrap(y, m);
      z = g.dim == 3 ? wrap(z, m) : 0;
    } else if (x < 0 || x >= m || y < 0 || y >= m || z < 0 || z >= mz) {
      return 0.0;
    }
    return v[g.index(x, y, z)];
  };
  for (int axis = 0; axis < g.dim; ++axis) {
    int dx = axis == 0, dy = axis == 1, dz = axis == 2;
    for (int z = 0; z < mz; ++z)
      for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x)
          b[g.index(x, y, z)] = 0.25 * at(a, x - dx, y - dy, z - dz) +
                                0.5 * at(a, x, y, z) +
                                0.25 * at(a, x + dx, y + dy, z + dz);
    std::swap(a, b);
  }
  return a;
}

double contour_length_2d(const ScalarField& f, const GridSpec& g, double level) {
  if (g.dim != 2) throw std::invalid_argument("measure: contour_length_2d needs dim 2");
  const int m = g.m;
  const int cells = g.periodic ? m : m - 1;
  const double hx = g.spacing(0), hy = g.spacing(1);
  double total = 0;

  for (int cy = 0; cy < cells; ++cy) {
    for (int cx = 0; cx < cells; ++cx) {
      // corners: c0=(x,y) c1=(x+1,y) c2=(x+1,y+1) c3=(x,y+1)
      double c0 = cell_value(f, g, cx, cy, 0) - level;
      double c1 = cell_value(f, g, cx + 1, cy, 0) - level;
      double c2 = cell_value(f, g, cx + 1, cy + 1, 0) - level;
      double c3 = cell_value(f, g, cx, cy + 1, 0) - level;
      int idx = (c0 > 0) | ((c1 > 0) << 1) | ((c2 > 0) << 2) | ((c3 > 0) << 3);
      if (idx == 0 || idx == 15) continue;
      // edge crossings in cell-local coordinates
      double px[4], py[4];
      bool has[4] = {false, false, false, false};
      auto cross = [](double a, double b) { return a / (a - b); };
      if ((c0 > 0) != (c1 > 0)) { px[0] = cross(c0, c1); py[0] = 0; has[0] = true; }
      if ((c1 > 0) != (c2 > 0)) { px[1] = 1; py[1] = cross(c1, c2); has[1] = true; }
      if ((c3 > 0) != (c2 > 0)) { px[2] = cross(c3, c2); py[2] = 1; has[2] = true; }
      if ((c0 > 0) != (c3 > 0)) { px[3] = 0; py[3] = cross(c0, c3); has[3] = true; }
      int e[4], ne = 0;
      for (int i = 0; i < 4; ++i)
        if (has[i]) e[ne++] = i;
      auto seg = [&](int a, int b) {
        total += std::hypot((px[b] - px[a]) * hx, (py[b] - py[a]) * hy);
      };
      if (ne == 2) {
        seg(e[0], e[1]);
      } else if (ne == 4) {
        // saddle: pair by the cell-center sign
        bool center = (c0 + c1 + c2 + c3) > 0;
        bool pair_bottom_right = (idx == 5) == center;  // idx 5: c0,c2 above
        if (pair_bottom_right) {
          seg(0, 1);
          seg(2, 3);
        } else {
          seg(0, 3);
          seg(1, 2);
        }
      }
    }
  }
  return total;
}

namespace {

// Kuhn subdivision of the unit cube into 6 tetrahedra along the main diagonal
const int kTets[6][4] = {{0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
                         {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};

struct P3 {
  double x, y, z;
};

double tri_area(const P3& a, const P3& b, const P3& c) {
  double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
  double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

}  // namespace

double isosurface_area_3d(const ScalarField& f, const GridSpec& g, double level) {
  if (g.dim != 3) throw std::invalid_argument("measure: isosurface_area_3d needs dim 3");
  const int m = g.m;
  const int cells = g.periodic ? m : m - 1;
  const double hx = g.spacing(0), hy = g.spacing(1), hz = g.spacing(2);
  double total = 0;

  for (int cz = 0; cz < cells; ++cz)
    for (int cy = 0; cy < cells; ++cy)
      for (int cx = 0; cx < cells; ++cx) {
        double v[8];
        P3 pos[8];
        bool any_pos = false, any_neg = false;
        for (int c = 0; c < 8; ++c) {
          int ox = c & 1, oy = (c >> 1) & 1, oz = (c >> 2) & 1;
          v[c] = cell_value(f, g, cx + ox, cy + oy, cz + oz) - level;
          pos[c] = {(cx + ox) * hx, (cy + oy) * hy, (cz + oz) * hz};
          (v[c] > 0 ? any_pos : any_neg) = true;
        }
        if (!any_pos || !any_neg) continue;
        for (const auto& tet : kTets) {
          int above[4], below[4];
          int na = 0, nb = 0;
          for (int t = 0; t < 4; ++t)
            (v[tet[t]] > 0 ? above[na++] : below[nb++]) = tet[t];
          if (na == 0 || na == 4) continue;
          auto ipt = [&](int a, int b) -> P3 {
            double t = v[a] / (v[a] - v[b]);
            return {pos[a].x + t * (pos[b].x - pos[a].x), pos[a].y + t * (pos[b].y - pos[a].y),
                    pos[a].z + t * (pos[b].z - pos[a].z)};
          };
          if (na == 1 || nb == 1) {
            int lone = (na == 1) ? above[0] : below[0];
            const int* rest = (na == 1) ? below : above;
            P3 p0 = ipt(lone, rest[0]), p1 = ipt(lone, rest[1]), p2 = ipt(lone, rest[2]);
            total += tri_area(p0, p1, p2);
          } else {
            P3 q00 = ipt(above[0], below[0]), q01 = ipt(above[0], below[1]);
            P3 q11 = ipt(above[1], below[1]), q10 = ipt(above[1], below[0]);
            total += tri_area(q00, q01, q11) + tri_area(q00, q11, q10);
          }
        }
      }
  return total;
}

SharpMeasurement measure_threshold(const PhaseSystem& sys, double level, double alpha) {
  if (!(level > 0 && level < 1))
    throw std::invalid_argument("measure: level must lie in (0,1)");
  const GridSpec& g = sys.grid;
  SharpMeasurement out;
  out.level = level;
  const double cellvol = g.cell_volume();
  const int passes = measure_smoothing_passes(g.m);
  for (const auto& u : sys.phases) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i] > level && sys.mask.is_inside(i)) ++count;
    double area = double(count) * cellvol;
    ScalarField s = u;
    for (int pass = 0; pass < passes; ++pass) s = smooth_pass(s, g);
    double perim = g.dim == 2 ? contour_length_2d(s, g, level) : isosurface_area_3d(s, g, level);
    out.per_phase_area.push_back(area);
    out.per_phase_perimeter.push_back(perim);
    out.per_phase_h_alpha.push_back(area > 0 ? perim / std::pow(area, alpha) : kInf);
  }
  return out;
}

double overlap_area(const PhaseSystem& sys, int i, int j, double level) {
  const auto& a = sys.phases.at(i);
  const auto& b = sys.phases.at(j);
  std::size_t count = 0;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n] > level && b[n] > level) ++count;
  return double(count) * sys.grid.cell_volume();
}

nlohmann::json SharpMeasurement::to_json() const {
  nlohmann::json j;
  j["level"] = level;
  j["per_phase_area"] = per_phase_area;
  j["per_phase_perimeter"] = per_phase_perimeter;
  j["per_phase_h_alpha"] = nlohmann::json::array();
  for (double h : per_phase_h_alpha)
    j["per_phase_h_alpha"].push_back(std::isfinite(h) ? nlohmann::json(h) : nlohmann::json("inf"));
  return j;
}

}  // namespace cheegerpack
