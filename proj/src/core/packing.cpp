#include "packing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cheegerpack {

namespace {

constexpr double kTol = 1e-11;

double dist(const Pt& a, const Pt& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

// one linearized boundary constraint: d0 + g . delta >= r
struct BoundaryPlane {
  Pt g{0, 0, 0};
  double d0 = 0;
};

std::vector<BoundaryPlane> boundary_planes(const Shape& domain, const Pt& c, int dim) {
  std::vector<BoundaryPlane> planes;
  if (const auto* r = std::get_if<Rect>(&domain)) {
    for (int a = 0; a < dim; ++a) {
      BoundaryPlane lo, hi;
      lo.g[a] = 1;
      lo.d0 = c[a] - r->lo[a];
      hi.g[a] = -1;
      hi.d0 = r->hi[a] - c[a];
      planes.push_back(lo);
      planes.push_back(hi);
    }
  } else if (const auto* b = std::get_if<Ball>(&domain)) {
    BoundaryPlane p;
    double rr = dist(c, b->center, dim);
    p.d0 = b->radius - rr;
    if (rr > 1e-14)
      for (int a = 0; a < dim; ++a) p.g[a] = (b->center[a] - c[a]) / rr;
    planes.push_back(p);
  } else if (const auto* poly = std::get_if<Polygon2>(&domain)) {
    const auto& v = poly->vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Pt2& a = v[i];
      const Pt2& bb = v[(i + 1) % v.size()];
      double ex = bb[0] - a[0], ey = bb[1] - a[1];
      double len = std::hypot(ex, ey);
      BoundaryPlane p;
      p.g = {-ey / len, ex / len, 0};
      p.d0 = p.g[0] * (c[0] - a[0]) + p.g[1] * (c[1] - a[1]);
      planes.push_back(p);
    }
  } else if (const auto* t = std::get_if<Tetra>(&domain)) {
    static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (int f = 0; f < 4; ++f) {
      const Pt& a = t->vertices[faces[f][0]];
      const Pt& b2 = t->vertices[faces[f][1]];
      const Pt& c2 = t->vertices[faces[f][2]];
      const Pt& d = t->vertices[6 - faces[f][0] - faces[f][1] - faces[f][2]];
      Pt ab{b2[0] - a[0], b2[1] - a[1], b2[2] - a[2]};
      Pt ac{c2[0] - a[0], c2[1] - a[1], c2[2] - a[2]};
      Pt nn{ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2],
            ab[0] * ac[1] - ab[1] * ac[0]};
      double norm = std::sqrt(nn[0] * nn[0] + nn[1] * nn[1] + nn[2] * nn[2]);
      for (double& x : nn) x /= norm;
      double side = nn[0] * (d[0] - a[0]) + nn[1] * (d[1] - a[1]) + nn[2] * (d[2] - a[2]);
      if (side < 0) nn = {-nn[0], -nn[1], -nn[2]};
      BoundaryPlane p;
      p.g = nn;
      p.d0 = nn[0] * (c[0] - a[0]) + nn[1] * (c[1] - a[1]) + nn[2] * (c[2] - a[2]);
      planes.push_back(p);
    }
  } else {
    throw std::invalid_argument("packing: unsupported domain shape");
  }
  return planes;
}

double domain_scale(const Shape& domain, int dim) {
  auto [lo, hi] = shape_bbox(domain, dim);
  double s = 0;
  for (int a = 0; a < dim; ++a) s = std::max(s, hi[a] - lo[a]);
  return s;
}

struct Slacks {
  double min_pair = std::numeric_limits<double>::infinity();   // min |ci-cj|
  double min_boundary = std::numeric_limits<double>::infinity();
};

Slacks center_slacks(const std::vector<Pt>& c, const Shape& domain, int dim) {
  Slacks s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    s.min_boundary = std::min(s.min_boundary, boundary_distance(domain, c[i], dim));
    for (std::size_t j = i + 1; j < c.size(); ++j)
      s.min_pair = std::min(s.min_pair, dist(c[i], c[j], dim));
  }
  return s;
}

// maximin objective for given centers: the best common radius
double maximin_radius(const std::vector<Pt>& c, const Shape& domain, int dim) {
  Slacks s = center_slacks(c, domain, dim);
  return std::min(s.min_pair / 2, s.min_boundary);
}

}  // namespace

bool DiskConfig::feasible() const { return min_slack() >= -tau_feas; }

double DiskConfig::min_slack() const {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    slack = std::min(slack, boundary_distance(domain, centers[i], dim) - radii[i]);
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      slack = std::min(slack, dist(centers[i], centers[j], dim) - radii[i] - radii[j]);
  }
  return slack;
}

std::vector<Pt> extract_centers(const PhaseSystem& sys, double level) {
  std::vector<Pt> centers;
  for (int i = 0; i < sys.k(); ++i) {
    const auto& u = sys.phases[i];
    Pt acc{0, 0, 0};
    std::size_t count = 0;
    for (std::size_t n = 0; n < u.size(); ++n) {
      if (u[n] > level && sys.mask.is_inside(n)) {
        Pt x = sys.grid.coords(n);
        for (int a = 0; a < sys.grid.dim; ++a) acc[a] += x[a];
        ++count;
      }
    }
    if (count == 0)
      throw std::runtime_error("packing: empty super-level set for phase " + std::to_string(i));
    for (int a = 0; a < sys.grid.dim; ++a) acc[a] /= double(count);
    centers.push_back(acc);
  }
  return centers;
}

std::optional<std::vector<double>> simplex_maximize(const std::vector<double>& c,
                                                    const std::vector<std::vector<double>>& A,
                                                    const std::vector<double>& b) {
  const int m = int(A.size());
  const int n = int(c.size());
  int n_art = 0;
  for (double bi : b)
    if (bi < 0) ++n_art;
  const int width = n + m + n_art + 1;  // vars, slacks, artificials, rhs
  std::vector<std::vector<double>> T(m, std::vector<double>(width, 0.0));
  std::vector<int> basis(m);
  int art = n + m;
  for (int i = 0; i < m; ++i) {
    double sgn = b[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) T[i][j] = sgn * A[i][j];
    T[i][n + i] = sgn;
    T[i][width - 1] = sgn * b[i];
    if (b[i] < 0) {
      T[i][art] = 1.0;
      basis[i] = art++;
    } else {
      basis[i] = n + i;
    }
  }

  auto pivot = [&](int pr, int pc) {
    double pv = T[pr][pc];
    for (double& x : T[pr]) x /= pv;
    for (int i = 0; i < m; ++i) {
      if (i == pr) continue;
      double f = T[i][pc];
      if (f == 0.0) continue;
      for (int j = 0; j < width; ++j) T[i][j] -= f * T[pr][j];
    }
    basis[pr] = pc;
  };

  // price a column against an objective vector over all variables
  auto run = [&](const std::vector<double>& obj, int ncols) -> bool {
    for (int iter = 0; iter < 20000; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {  // Bland: first improving column
        double rc = obj[j];
        for (int i = 0; i < m; ++i) rc -= obj[basis[i]] * T[i][j];
        if (rc > 1e-9) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best = 0;
      for (int i = 0; i < m; ++i) {
        if (T[i][enter] > kTol) {
          double ratio = T[i][width - 1] / T[i][enter];
          if (leave < 0 || ratio < best - kTol ||
              (ratio < best + kTol && basis[i] < basis[leave]))
            best = ratio, leave = i;
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
    return false;
  };

  if (n_art > 0) {
    std::vector<double> obj(width - 1, 0.0);
    for (int j = n + m; j < width - 1; ++j) obj[j] = -1.0;  // max of -sum(artificials)
    if (!run(obj, width - 1)) return std::nullopt;
    double phase1 = 0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n + m) phase1 += T[i][width - 1];
    if (phase1 > 1e-7) return std::nullopt;  // infeasible
    // kick residual artificials out of the basis
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n + m) continue;
      int col = -1;
      for (int j = 0; j < n + m; ++j)
        if (std::abs(T[i][j]) > 1e-9) {
          col = j;
          break;
        }
      if (col >= 0) pivot(i, col);
    }
    for (auto& row : T)
      std::fill(row.begin() + n + m, row.end() - 1, 0.0);
  }

  std::vector<double> obj(width - 1, 0.0);
  for (int j = 0; j < n; ++j) obj[j] = c[j];
  if (!run(obj, n + m)) return std::nullopt;

  std::vector<double> z(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) z[basis[i]] = T[i][width - 1];
  return z;
}

namespace {

struct LpStep {
  std::vector<Pt> centers;
  std::vector<double> radii;
};

// one SLP subproblem; trust region rho on center moves and radius changes
std::optional<LpStep> lp_step(const std::vector<Pt>& c, const std::vector<double>& r,
                              const Shape& domain, int dim, double rho, bool equal_radius,
                              const std::vector<Pt>& c0, double cap) {
  const int k = int(c.size());
  // variables: center shifts (k*dim, shifted by +rho) then radius terms:
  // equal_radius: one variable r_new >= 0; else per-ball shifts (k, +rho)
  const int nshift = k * dim;
  const int nvar = nshift + (equal_radius ? 1 : k);
  std::vector<double> obj(nvar, 0.0);
  if (equal_radius)
    obj[nshift] = 1.0;
  else
    for (int i = 0; i < k; ++i) obj[nshift + i] = 1.0 / r[i];  // d(sum log r)/dr

  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto add_row = [&](std::vector<double> row, double rhs) {
    A.push_back(std::move(row));
    b.push_back(rhs);
  };
  auto delta_index = [&](int ball, int axis) { return ball * dim + axis; };

  // pair constraints: r_i + r_j - u.(d_i - d_j) <= |ci - cj|  (u = (ci-cj)/|.|)
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      double dij = dist(c[i], c[j], dim);
      std::vector<double> row(nvar, 0.0);
      double rhs = dij;
      for (int a = 0; a < dim; ++a) {
        double u = (c[i][a] - c[j][a]) / dij;
        row[delta_index(i, a)] = -u;  // the +rho shifts cancel between i and j
        row[delta_index(j, a)] = u;
      }
      if (equal_radius) {
        row[nshift] = 2.0;
      } else {
        row[nshift + i] = 1.0;
        row[nshift + j] = 1.0;
        rhs += -r[i] - r[j] + 2 * rho;  // radius vars shifted by +rho
      }
      add_row(std::move(row), rhs);
    }
  // boundary constraints: r - g.d <= d0 per linearized plane
  for (int i = 0; i < k; ++i) {
    for (const auto& pl : boundary_planes(domain, c[i], dim)) {
      std::vector<double> row(nvar, 0.0);
      double rhs = pl.d0;
      for (int a = 0; a < dim; ++a) {
        row[delta_index(i, a)] = -pl.g[a];
        rhs += -pl.g[a] * rho;
      }
      if (equal_radius) {
        row[nshift] = 1.0;
      } else {
        row[nshift + i] = 1.0;
        rhs += -r[i] + rho;
      }
      add_row(std::move(row), rhs);
    }
  }
  // trust region: shifted vars in [0, 2 rho]
  for (int v = 0; v < nvar; ++v) {
    if (equal_radius && v == nshift) continue;
    std::vector<double> row(nvar, 0.0);
    row[v] = 1.0;
    add_row(std::move(row), 2 * rho);
  }
  // total displacement cap around the extraction points
  if (cap < std::numeric_limits<double>::infinity()) {
    for (int i = 0; i < k; ++i)
      for (int a = 0; a < dim; ++a) {
        double moved = c[i][a] - c0[i][a];
        std::vector<double> row1(nvar, 0.0), row2(nvar, 0.0);
        row1[delta_index(i, a)] = 1.0;
        add_row(std::move(row1), cap - moved + rho);
        row2[delta_index(i, a)] = -1.0;
        add_row(std::move(row2), cap + moved - rho);
      }
  }

  auto sol = simplex_maximize(obj, A, b);
  if (!sol) return std::nullopt;
  LpStep step;
  step.centers = c;
  for (int i = 0; i < k; ++i)
    for (int a = 0; a < dim; ++a) step.centers[i][a] += (*sol)[delta_index(i, a)] - rho;
  if (equal_radius) {
    step.radii.assign(k, (*sol)[nshift]);
  } else {
    step.radii = r;
    for (int i = 0; i < k; ++i) step.radii[i] += (*sol)[nshift + i] - rho;
  }
  return step;
}

void validate_centers(const std::vector<Pt>& centers, const Shape& domain, int dim) {
  if (centers.empty()) throw std::invalid_argument("packing: no centers");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (boundary_distance(domain, centers[i], dim) <= 0)
      throw std::invalid_argument("packing: center " + std::to_string(i) + " outside domain");
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (dist(centers[i], centers[j], dim) < 1e-12)
        throw std::invalid_argument("packing: coincident centers " + std::to_string(i) + "," +
                                    std::to_string(j));
  }
}

std::vector<std::string> collect_active(const DiskConfig& cfg, double tol) {
  std::vector<std::string> act;
  char buf[64];
  for (std::size_t i = 0; i < cfg.centers.size(); ++i) {
    if (boundary_distance(cfg.domain, cfg.centers[i], cfg.dim) - cfg.radii[i] <= tol) {
      std::snprintf(buf, sizeof(buf), "boundary(%zu)", i);
      act.push_back(buf);
    }
    for (std::size_t j = i + 1; j < cfg.centers.size(); ++j)
      if (dist(cfg.centers[i], cfg.centers[j], cfg.dim) - cfg.radii[i] - cfg.radii[j] <= tol) {
        std::snprintf(buf, sizeof(buf), "pair(%zu,%zu)", i, j);
        act.push_back(buf);
      }
  }
  return act;
}

}  // namespace

PackingResult refine_maximin(const std::vector<Pt>& centers, const Shape& domain, int dim) {
  validate_centers(centers, domain, dim);
  const int k = int(centers.size());
  std::vector<Pt> c = centers;
  double phi = maximin_radius(c, domain, dim);
  const double scale = domain_scale(domain, dim);
  const double cap = k > 1 ? 10.0 * std::max(phi, 1e-6 * scale)
                           : std::numeric_limits<double>::infinity();
  double rho = 0.1 * scale;
  std::vector<double> r(k, phi);

  for (int iter = 0; iter < 400 && rho > 1e-13 * scale; ++iter) {
    auto step = lp_step(c, r, domain, dim, rho, true, centers, cap);
    if (step) {
      double phin = maximin_radius(step->centers, domain, dim);
      if (phin > phi * (1 + 1e-14) + 1e-16) {
        c = step->centers;
        phi = phin;
        rho = std::min(rho * 1.6, 0.1 * scale);
        continue;
      }
    }
    rho *= 0.5;
  }
  // compass polish
  for (double step = 1e-6 * scale; step > 1e-14 * scale; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < k; ++i)
        for (int a = 0; a < dim; ++a)
          for (double sgn : {1.0, -1.0}) {
            Pt saved = c[i];
            c[i][a] += sgn * step;
            double cand = maximin_radius(c, domain, dim);
            bool within = true;
            if (k > 1) {
              double moved = dist(c[i], centers[i], dim);
              within = moved <= cap;
            }
            if (within && cand > phi) {
              phi = cand;
              improved = true;
            } else {
              c[i] = saved;
            }
          }
    }
  }

  PackingResult res;
  res.config.dim = dim;
  res.config.centers = c;
  res.config.radii.assign(k, phi);
  res.config.domain = domain;
  res.objective = PackObjective::maximin;
  res.value = phi;
  res.active_constraints = collect_active(res.config, 1e-7 * scale);
  return res;
}

PackingResult refine_product(const std::vector<Pt>& centers, const Shape& domain, int dim) {
  validate_centers(centers, domain, dim);
  const int k = int(centers.size());
  std::vector<Pt> c = centers;
  const double scale = domain_scale(domain, dim);

  std::vector<double> r(k);
  for (int i = 0; i < k; ++i) {
    double nearest = boundary_distance(domain, c[i], dim);
    for (int j = 0; j < k; ++j)
      if (j != i) nearest = std::min(nearest, 0.5 * dist(c[i], c[j], dim));
    r[i] = nearest * (1 - 1e-12);
  }
  auto objective = [&](const std::vector<double>& radii) {
    double s = 0;
    for (double x : radii) s += std::log(x);
    return s;
  };
  auto repair = [&](std::vector<Pt>& cc, std::vector<double>& rr) -> bool {
    DiskConfig cfg{dim, cc, rr, domain};
    double slack = cfg.min_slack();
    if (slack < 0) {
      for (double& x : rr) x += slack;  // shrink all by the worst violation
      for (double x : rr)
        if (!(x > 0)) return false;
    }
    return true;
  };

  double phi0 = maximin_radius(c, domain, dim);
  const double cap = k > 1 ? 10.0 * std::max(phi0, 1e-6 * scale)
                           : std::numeric_limits<double>::infinity();
  double val = objective(r);
  double rho = 0.05 * scale;
  for (int iter = 0; iter < 600 && rho > 1e-13 * scale; ++iter) {
    auto step = lp_step(c, r, domain, dim, rho, false, centers, cap);
    if (step) {
      auto cn = step->centers;
      auto rn = step->radii;
      bool ok = true;
      for (double x : rn)
        if (!(x > 0)) ok = false;
      if (ok && repair(cn, rn)) {
        double vn = objective(rn);
        if (vn > val + 1e-15) {
          c = cn;
          r = rn;
          val = vn;
          rho = std::min(rho * 1.6, 0.05 * scale);
          continue;
        }
      }
    }
    rho *= 0.5;
  }

  PackingResult res;
  res.config.dim = dim;
  res.config.centers = c;
  res.config.radii = r;
  res.config.domain = domain;
  res.objective = PackObjective::log_product;
  res.value = objective(r);
  res.active_constraints = collect_active(res.config, 1e-7 * scale);
  return res;
}

nlohmann::json PackingResult::to_json() const {
  nlohmann::json j;
  j["dim"] = config.dim;
  j["domain"] = shape_to_json(config.domain);
  j["objective"] = objective == PackObjective::maximin ? "maximin" : "log_product";
  j["value"] = value;
  j["radii"] = config.radii;
  j["centers"] = nlohmann::json::array();
  for (const auto& cc : config.centers) {
    if (config.dim == 2)
      j["centers"].push_back({cc[0], cc[1]});
    else
      j["centers"].push_back({cc[0], cc[1], cc[2]});
  }
  j["active_constraints"] = active_constraints;
  return j;
}

void write_packing_svg(const std::string& path, const PackingResult& result) {
  const auto& cfg = result.config;
  auto [lo, hi] = shape_bbox(cfg.domain, cfg.dim);
  double w = hi[0] - lo[0], h = hi[1] - lo[1];
  const double view = 400.0;
  double sc = view / std::max(w, h);
  int panels = cfg.dim == 2 ? 1 : 3;  // xy, xz, yz projections in 3D
  std::ofstream out(path);
  if (!out) throw std::runtime_error("packing: cannot open '" + path + "'");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << int(panels * (view + 20)) + 20
      << "' height='" << int(view) + 40 << "'>\n";
  char buf[256];
  for (int panel = 0; panel < panels; ++panel) {
    int ax = panel == 2 ? 1 : 0;
    int ay = panel == 0 ? 1 : 2;
    double ox = 10 + panel * (view + 20);
    auto X = [&](double v) { return ox + (v - lo[ax]) * sc; };
    auto Y = [&](double v) { return 20 + view - (v - lo[ay]) * sc; };
    // domain outline
    if (const auto* rect = std::get_if<Rect>(&cfg.domain)) {
      std::snprintf(buf, sizeof(buf),
                    "<rect x='%.2f' y='%.2f' width='%.2f' height='%.2f' fill='none' "
                    "stroke='black'/>\n",
                    X(rect->lo[ax]), Y(rect->hi[ay]), (rect->hi[ax] - rect->lo[ax]) * sc,
                    (rect->hi[ay] - rect->lo[ay]) * sc);
      out << buf;
    } else if (const auto* ball = std::get_if<Ball>(&cfg.domain)) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx='%.2f' cy='%.2f' r='%.2f' fill='none' stroke='black'/>\n",
                    X(ball->center[ax]), Y(ball->center[ay]), ball->radius * sc);
      out << buf;
    } else if (const auto* poly = std::get_if<Polygon2>(&cfg.domain)) {
      out << "<polygon fill='none' stroke='black' points='";
      for (const auto& v : poly->vertices) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", X(v[0]), Y(v[1]));
        out << buf;
      }
      out << "'/>\n";
    } else if (const auto* tet = std::get_if<Tetra>(&cfg.domain)) {
      static const int edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
      for (const auto& e : edges) {
        std::snprintf(buf, sizeof(buf),
                      "<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='black'/>\n",
                      X(tet->vertices[e[0]][ax]), Y(tet->vertices[e[0]][ay]),
                      X(tet->vertices[e[1]][ax]), Y(tet->vertices[e[1]][ay]));
        out << buf;
      }
    }
    for (std::size_t i = 0; i < cfg.centers.size(); ++i) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx='%.2f' cy='%.2f' r='%.2f' fill='steelblue' fill-opacity='0.5' "
                    "stroke='navy'/>\n",
                    X(cfg.centers[i][ax]), Y(cfg.centers[i][ay]), cfg.radii[i] * sc);
      out << buf;
    }
  }
  out << "</svg>\n";
}

}  // namespace cheegerpack
