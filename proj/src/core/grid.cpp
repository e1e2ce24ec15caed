#include "grid.hpp"

#include "stencils.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cheegerpack {

double GridSpec::max_spacing() const {
  double h = 0;
  for (int a = 0; a < dim; ++a) h = std::max(h, spacing(a));
  return h;
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= std::size_t(m);
  return n;
}

double GridSpec::volume() const {
  double v = 1;
  for (int a = 0; a < dim; ++a) v *= extent[a];
  return v;
}

double GridSpec::cell_volume() const {
  double v = 1;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

Pt GridSpec::coords(std::size_t idx) const {
  Pt x{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    x[a] = double(idx % m) * spacing(a);
    idx /= m;
  }
  return x;
}

std::size_t GridSpec::index(int x, int y, int z) const {
  std::size_t i = std::size_t(x) + std::size_t(m) * std::size_t(y);
  if (dim == 3) i += std::size_t(m) * std::size_t(m) * std::size_t(z);
  return i;
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
  if (m < 4) throw std::invalid_argument("grid: need at least 4 nodes per axis");
  for (int a = 0; a < dim; ++a)
    if (!(extent[a] > 0)) throw std::invalid_argument("grid: extent must be positive");
}

GridSpec refined(const GridSpec& g) {
  GridSpec f = g;
  f.m = 2 * g.m;
  return f;
}

DomainMask build_mask(const GridSpec& g, const Shape& s) {
  DomainMask mask;
  mask.shape = s;
  if (std::holds_alternative<FullBox>(s)) {
    mask.all_inside = true;
    return mask;
  }
  mask.all_inside = false;
  mask.inside.resize(g.node_count());
  for (std::size_t i = 0; i < mask.inside.size(); ++i)
    mask.inside[i] = shape_contains(s, g.coords(i), g.dim) ? 1 : 0;
  return mask;
}

void apply_mask(ScalarField& f, const DomainMask& mask) {
  if (mask.all_inside) return;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!mask.inside[i]) f[i] = 0.0;
}

static void check_size(const ScalarField& f, const GridSpec& g) {
  if (f.size() != g.node_count())
    throw std::invalid_argument("grid: field length does not match grid node count");
}

double integrate(const ScalarField& f, const GridSpec& g, const DomainMask& mask) {
  check_size(f, g);
  double s = 0;
  if (mask.all_inside) {
    for (double v : f) s += v;
  } else {
    for (std::size_t i = 0; i < f.size(); ++i)
      if (mask.inside[i]) s += f[i];
  }
  return g.node_weight() * s;
}

double lp_power(const ScalarField& f, double q, const GridSpec& g, const DomainMask& mask) {
  check_size(f, g);
  if (!(q > 1)) throw std::invalid_argument("grid: lp_power needs q > 1");
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!mask.is_inside(i)) continue;
    s += std::pow(std::abs(f[i]), q);
  }
  return g.node_weight() * s;
}

double gradient_energy(const ScalarField& f, const GridSpec& g, const DomainMask& mask) {
  check_size(f, g);
  const double* u = f.data();
  double total = 0;
  for (const auto& fam : detail::dirichlet_families(g)) {
    double fam_sum = 0;
    detail::for_each_edge(g, fam, [&](std::size_t i, std::size_t j) {
      double a = mask.is_inside(i) ? u[i] : 0.0;
      double b = mask.is_inside(j) ? u[j] : 0.0;
      double d = b - a;
      fam_sum += d * d;
    });
    total += fam.weight * fam.inv_len2 * fam_sum;
  }
  return g.node_weight() * total;
}

ScalarField refine(const ScalarField& f, const GridSpec& g) {
  check_size(f, g);
  GridSpec fine = refined(g);
  ScalarField out(fine.node_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = interpolate_at(f, g, fine.coords(i));
  return out;
}

double interpolate_at(const ScalarField& f, const GridSpec& g, const Pt& x) {
  const int m = g.m;
  int base[3] = {0, 0, 0};
  double fr[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a) {
    double t = x[a] / g.spacing(a);
    if (g.periodic) {
      double wrapped = std::fmod(t, double(m));
      if (wrapped < 0) wrapped += m;
      base[a] = int(wrapped);
      fr[a] = wrapped - base[a];
      if (base[a] >= m) base[a] -= m;
    } else {
      t = std::min(std::max(t, 0.0), double(m - 1));
      base[a] = std::min(int(t), m - 2);
      fr[a] = t - base[a];
    }
  }
  auto node = [&](int ox, int oy, int oz) {
    int xx = base[0] + ox, yy = base[1] + oy, zz = base[2] + oz;
    if (g.periodic) {
      xx %= m;
      yy %= m;
      zz %= m;
    }
    return f[g.index(xx, yy, g.dim == 3 ? zz : 0)];
  };
  if (g.dim == 2) {
    double v00 = node(0, 0, 0), v10 = node(1, 0, 0);
    double v01 = node(0, 1, 0), v11 = node(1, 1, 0);
    return v00 * (1 - fr[0]) * (1 - fr[1]) + v10 * fr[0] * (1 - fr[1]) +
           v01 * (1 - fr[0]) * fr[1] + v11 * fr[0] * fr[1];
  }
  double v = 0;
  for (int oz = 0; oz < 2; ++oz)
    for (int oy = 0; oy < 2; ++oy)
      for (int ox = 0; ox < 2; ++ox) {
        double w = (ox ? fr[0] : 1 - fr[0]) * (oy ? fr[1] : 1 - fr[1]) * (oz ? fr[2] : 1 - fr[2]);
        v += w * node(ox, oy, oz);
      }
  return v;
}

void write_field_f64(const std::string& path, const ScalarField& f, const GridSpec& g) {
  check_size(f, g);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("grid: cannot open '" + path + "' for writing");
  std::uint32_t header[4] = {std::uint32_t(g.dim), std::uint32_t(g.m), std::uint32_t(g.m),
                             g.dim == 3 ? std::uint32_t(g.m) : 0u};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(f.data()), std::streamsize(f.size() * sizeof(double)));
}

ScalarField read_field_f64(const std::string& path, GridSpec* g_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("grid: cannot open '" + path + "'");
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  GridSpec g;
  g.dim = int(header[0]);
  g.m = int(header[1]);
  std::size_t n = g.node_count();
  ScalarField f(n);
  in.read(reinterpret_cast<char*>(f.data()), std::streamsize(n * sizeof(double)));
  if (!in) throw std::runtime_error("grid: truncated field file '" + path + "'");
  if (g_out) *g_out = g;
  return f;
}

void write_field_csv(const std::string& path, const ScalarField& f, const GridSpec& g) {
  check_size(f, g);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("grid: cannot open '" + path + "' for writing");
  out << (g.dim == 2 ? "x,y,value\n" : "x,y,z,value\n");
  char line[128];
  for (std::size_t i = 0; i < f.size(); ++i) {
    Pt x = g.coords(i);
    if (g.dim == 2)
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", x[0], x[1], f[i]);
    else
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", x[0], x[1], x[2], f[i]);
    out << line;
  }
}

}  // namespace cheegerpack
