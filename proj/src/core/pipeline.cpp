#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "errors.hpp"

namespace cheegerpack {

namespace {

Shape translate_shape(const Shape& s, const Pt& off) {
  Shape out = s;
  std::visit(
      [&](auto& sh) {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, Rect>) {
          for (int a = 0; a < 3; ++a) {
            sh.lo[a] += off[a];
            sh.hi[a] += off[a];
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          for (int a = 0; a < 3; ++a) sh.center[a] += off[a];
        } else if constexpr (std::is_same_v<T, Polygon2>) {
          for (auto& v : sh.vertices) {
            v[0] += off[0];
            v[1] += off[1];
          }
        } else if constexpr (std::is_same_v<T, Tetra>) {
          for (auto& v : sh.vertices)
            for (int a = 0; a < 3; ++a) v[a] += off[a];
        }
      },
      out);
  return out;
}

// euclidean ball max-filter, in cells
void dilate_field(ScalarField& u, const GridSpec& g, double radius_cells) {
  if (radius_cells <= 0) return;
  const int R = int(std::floor(radius_cells));
  std::vector<std::array<int, 3>> offs;
  const int zr = g.dim == 3 ? R : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -R; dy <= R; ++dy)
      for (int dx = -R; dx <= R; ++dx)
        if (dx * dx + dy * dy + dz * dz <= radius_cells * radius_cells + 1e-9)
          offs.push_back({dx, dy, dz});
  const int m = g.m;
  const int mz = g.dim == 3 ? m : 1;
  ScalarField out(u.size(), 0.0);
  for (int z = 0; z < mz; ++z)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        double best = 0;
        for (const auto& o : offs) {
          int xx = x + o[0], yy = y + o[1], zz = z + o[2];
          if (g.periodic) {
            xx = (xx + m) % m;
            yy = (yy + m) % m;
            zz = (zz + mz) % mz;
          } else if (xx < 0 || xx >= m || yy < 0 || yy >= m || zz < 0 || zz >= mz) {
            continue;
          }
          best = std::max(best, u[g.index(xx, yy, zz)]);
        }
        out[g.index(x, y, z)] = best;
      }
  u = std::move(out);
}

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

int RunConfig::resolved_m0() const { return m0 > 0 ? m0 : (dim == 2 ? 20 : 10); }

int RunConfig::resolved_target() const {
  return target_resolution > 0 ? target_resolution : (dim == 2 ? 320 : 80);
}

int RunConfig::resolved_stages() const {
  if (stages > 0) return stages;
  int n = 1, m = resolved_m0();
  while (m < resolved_target()) {
    m *= 2;
    ++n;
  }
  return n;
}

void RunConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("config: dim must be 2 or 3");
  if (k < 1) throw ConfigError("config: k must be >= 1");
  if (objective == Objective::cheeger_pnorm) {
    double critical = double(dim - 1) / dim;
    if (!(alpha > critical))
      throw ConfigError("config: alpha must exceed (N-1)/N = " + std::to_string(critical));
    if (!(p >= 1)) throw ConfigError("config: p must be >= 1");
  }
  if (!(eps_factor >= 0.5 && eps_factor <= 8))
    throw ConfigError("config: eps_factor out of range [0.5, 8]");
  if (resolved_m0() < 4 + 2 * pad_cells) throw ConfigError("config: m0 too small");
  if (stages > 0 && target_resolution > 0) {
    long final_m = long(resolved_m0()) << (stages - 1);
    if (final_m < target_resolution)
      throw ConfigError("config: stages too few for target_resolution");
  }
  if (!(tol > 0)) throw ConfigError("config: tol must be positive");
  if (maxit < 1) throw ConfigError("config: maxit must be >= 1");
  if (!(level > 0 && level < 1)) throw ConfigError("config: level must lie in (0,1)");
  if (pad_cells < 0) throw ConfigError("config: pad_cells must be >= 0");
  if (periodic && !std::holds_alternative<Rect>(domain) &&
      !std::holds_alternative<FullBox>(domain))
    throw ConfigError("config: periodic runs need a rectangle domain (the torus extent)");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["alpha"] = alpha;
  j["p"] = p;
  j["dim"] = dim;
  j["domain"] = std::holds_alternative<Implicit>(domain) ? nlohmann::json{{"type", "implicit"}}
                                                         : shape_to_json(domain);
  j["m0"] = resolved_m0();
  j["stages"] = resolved_stages();
  j["target_resolution"] = resolved_target();
  j["eps_factor"] = eps_factor;
  j["seed"] = seed;
  j["objective"] = objective == Objective::cheeger_pnorm ? "cheeger_pnorm" : "log_perimeter";
  j["periodic"] = periodic;
  j["tol"] = tol;
  j["maxit"] = maxit;
  j["penalty_weight"] = penalty_weight;
  j["area_target"] = area_target;
  j["area_weight"] = area_weight;
  j["pad_cells"] = pad_cells;
  j["level"] = level;
  j["anneal"] = anneal;
  j["dilate_radius"] = dilate_radius;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    try {
      dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: bad value for key '") + key + "'");
    }
  };
  get("k", c.k);
  get("alpha", c.alpha);
  get("p", c.p);
  get("dim", c.dim);
  get("m0", c.m0);
  get("stages", c.stages);
  get("target_resolution", c.target_resolution);
  get("eps_factor", c.eps_factor);
  get("seed", c.seed);
  get("periodic", c.periodic);
  get("tol", c.tol);
  get("maxit", c.maxit);
  get("penalty_weight", c.penalty_weight);
  get("area_target", c.area_target);
  get("area_weight", c.area_weight);
  get("pad_cells", c.pad_cells);
  get("level", c.level);
  get("anneal", c.anneal);
  get("dilate_radius", c.dilate_radius);
  if (j.contains("objective")) {
    std::string o = j.at("objective").get<std::string>();
    if (o == "cheeger_pnorm")
      c.objective = Objective::cheeger_pnorm;
    else if (o == "log_perimeter")
      c.objective = Objective::log_perimeter;
    else
      throw ConfigError("config: unknown objective '" + o + "'");
  }
  if (c.dim != 2 && c.dim != 3) throw ConfigError("config: dim must be 2 or 3");
  if (j.contains("domain")) {
    try {
      c.domain = shape_from_json(j.at("domain"), c.dim);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: bad value for key 'domain': ") + e.what());
    }
  } else if (c.periodic) {
    c.domain = FullBox{};
  }
  c.validate();
  return c;
}

Shape grid_frame_domain(const RunResult& result) {
  if (result.config.periodic) {
    Rect r;
    r.lo = {0, 0, 0};
    r.hi = result.system.grid.extent;
    return r;
  }
  return translate_shape(result.config.domain, result.origin_offset);
}

PhaseSystem init_random(const GridSpec& g, const DomainMask& mask, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("pipeline: k must be >= 1");
  std::mt19937_64 rng(seed);
  PhaseSystem sys;
  sys.grid = g;
  sys.mask = mask;
  sys.phases.assign(k, ScalarField(g.node_count(), 0.0));
  for (int i = 0; i < k; ++i)
    for (std::size_t n = 0; n < sys.phases[i].size(); ++n) {
      double v = uniform01(rng);
      if (mask.is_inside(n)) sys.phases[i][n] = v;
    }
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    double s = 0;
    for (int i = 0; i < k; ++i) s += sys.phases[i][n];
    if (s > 1.0)
      for (int i = 0; i < k; ++i) sys.phases[i][n] /= s;
  }
  return sys;
}

RunResult run(const RunConfig& config) {
  config.validate();
  RunResult result;
  result.config = config;

  const int m0 = config.resolved_m0();
  const int n_stages = config.resolved_stages();

  GridSpec g;
  g.dim = config.dim;
  g.m = m0;
  g.periodic = config.periodic;
  Shape domain = config.domain;
  if (config.periodic) {
    if (const auto* r = std::get_if<Rect>(&config.domain)) {
      for (int a = 0; a < config.dim; ++a) g.extent[a] = r->hi[a] - r->lo[a];
    } else {
      for (int a = 0; a < config.dim; ++a) g.extent[a] = 1.0;
    }
    domain = FullBox{};
  } else {
    auto [lo, hi] = shape_bbox(config.domain, config.dim);
    const int interior = m0 - 1 - 2 * config.pad_cells;
    for (int a = 0; a < config.dim; ++a) {
      double d = hi[a] - lo[a];
      g.extent[a] = d * double(m0 - 1) / interior;
      double pad = config.pad_cells * g.extent[a] / (m0 - 1);
      result.origin_offset[a] = pad - lo[a];
    }
    domain = translate_shape(config.domain, result.origin_offset);
  }
  g.validate();

  DomainMask mask = build_mask(g, domain);
  PhaseSystem sys = init_random(g, mask, config.k, config.seed);
  const std::size_t nodes0 = g.node_count();
  std::vector<double> x;
  x.reserve(nodes0 * config.k);
  for (const auto& ph : sys.phases) x.insert(x.end(), ph.begin(), ph.end());

  for (int s = 0; s < n_stages; ++s) {
    if (s > 0) {
      GridSpec fine = refined(g);
      DomainMask fine_mask = build_mask(fine, domain);
      std::vector<double> xf;
      xf.reserve(fine.node_count() * config.k);
      for (int i = 0; i < config.k; ++i) {
        ScalarField coarse(x.begin() + std::size_t(i) * g.node_count(),
                           x.begin() + std::size_t(i + 1) * g.node_count());
        ScalarField f = refine(coarse, g);
        dilate_field(f, fine, config.dilate_radius);
        apply_mask(f, fine_mask);
        xf.insert(xf.end(), f.begin(), f.end());
      }
      g = fine;
      mask = std::move(fine_mask);
      x = std::move(xf);
    }
    const std::size_t n = g.node_count();
    const double eps = config.eps_factor * g.max_spacing();

    BoundProblem prob;
    prob.dimension = n * config.k;
    prob.lower.assign(prob.dimension, 0.0);
    prob.upper.resize(prob.dimension);
    for (int i = 0; i < config.k; ++i)
      for (std::size_t a = 0; a < n; ++a)
        prob.upper[std::size_t(i) * n + a] = mask.is_inside(a) ? 1.0 : 0.0;

    StageReport sr;
    sr.m = g.m;
    sr.eps = eps;

    std::vector<double> pass_eps = config.anneal ? std::vector<double>{2 * eps, eps}
                                                 : std::vector<double>{eps};
    for (std::size_t pass = 0; pass < pass_eps.size(); ++pass) {
      if (pass > 0) {
        for (int i = 0; i < config.k; ++i) {
          ScalarField f(x.begin() + std::size_t(i) * n, x.begin() + std::size_t(i + 1) * n);
          dilate_field(f, g, config.dilate_radius);
          apply_mask(f, mask);
          std::copy(f.begin(), f.end(), x.begin() + std::size_t(i) * n);
        }
      }
      double pe = pass_eps[pass];
      if (config.objective == RunConfig::Objective::cheeger_pnorm) {
        EnergyParams params;
        params.alpha = config.alpha;
        params.p = config.p;
        params.eps = pe;
        params.penalty_weight = config.penalty_weight;
        params.k = config.k;
        prob.objective_and_gradient = [&, params](std::span<const double> u,
                                                  std::span<double> grad) {
          return evaluate_and_gradient_stacked(g, mask, u, params, grad).total;
        };
      } else {
        LogPerimeterParams params;
        params.eps = pe;
        params.area_target = config.area_target;
        params.area_weight = config.area_weight;
        params.penalty_weight = config.penalty_weight;
        prob.objective_and_gradient = [&, params](std::span<const double> u,
                                                  std::span<double> grad) {
          return evaluate_log_perimeter_stacked(g, mask, u, params, grad);
        };
      }
      OptimizerOptions opts;
      opts.tol = config.tol;
      opts.maxit = config.maxit;
      auto [xs, rep] = minimize(prob, std::move(x), opts);
      x = std::move(xs);
      (pass + 1 == pass_eps.size() ? sr.main : sr.warm) = std::move(rep);
    }
    sr.final_energy = sr.main.final_value;
    result.stage_reports.push_back(std::move(sr));
  }

  sys.grid = g;
  sys.mask = mask;
  sys.phases.assign(config.k, ScalarField());
  for (int i = 0; i < config.k; ++i)
    sys.phases[i].assign(x.begin() + std::size_t(i) * g.node_count(),
                         x.begin() + std::size_t(i + 1) * g.node_count());
  result.system = std::move(sys);
  result.sharp = measure_threshold(result.system, config.level, config.alpha);
  if (config.objective == RunConfig::Objective::cheeger_pnorm) {
    EnergyParams params;
    params.alpha = config.alpha;
    params.p = config.p;
    params.eps = config.eps_factor * g.max_spacing();
    params.penalty_weight = config.penalty_weight;
    params.k = config.k;
    result.final_energy = evaluate(result.system, params);
  }
  return result;
}

nlohmann::json RunResult::summary_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["origin_offset"] = origin_offset;
  j["grid"] = {{"dim", system.grid.dim},
               {"m", system.grid.m},
               {"extent", system.grid.extent},
               {"periodic", system.grid.periodic}};
  j["stages"] = nlohmann::json::array();
  for (const auto& sr : stage_reports) {
    j["stages"].push_back({{"m", sr.m},
                           {"eps", sr.eps},
                           {"final_value", sr.main.final_value},
                           {"iterations", sr.main.iterations},
                           {"warm_iterations", sr.warm.iterations},
                           {"converged", sr.main.converged},
                           {"projected_gradient_norm", sr.main.projected_gradient_norm}});
  }
  j["sharp"] = sharp.to_json();
  if (!config.periodic && config.objective == RunConfig::Objective::cheeger_pnorm)
    j["energy"] = final_energy.to_json();
  j["final_energy"] = stage_reports.empty() ? 0.0 : stage_reports.back().final_energy;
  return j;
}

void write_pgm(const std::string& path, const ScalarField& f, const GridSpec& g, int slice_axis,
               int slice_index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pipeline: cannot open '" + path + "'");
  const int m = g.m;
  out << "P5\n" << m << " " << m << "\n255\n";
  std::vector<unsigned char> row(m);
  for (int yi = 0; yi < m; ++yi) {
    int y = m - 1 - yi;  // top row = largest y
    for (int xi = 0; xi < m; ++xi) {
      double v;
      if (g.dim == 2) {
        v = f[g.index(xi, y, 0)];
      } else {
        int idx = slice_index >= 0 ? slice_index : m / 2;
        if (slice_axis == 0)
          v = f[g.index(idx, xi, y)];
        else if (slice_axis == 1)
          v = f[g.index(xi, idx, y)];
        else
          v = f[g.index(xi, y, idx)];
      }
      row[xi] = (unsigned char)std::lround(255.0 * std::min(std::max(v, 0.0), 1.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()), m);
  }
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto& sys = result.system;
  const GridSpec& g = sys.grid;

  {
    std::ofstream out(out_dir + "/result.json");
    if (!out) throw std::runtime_error("pipeline: cannot open result.json");
    out << result.summary_json().dump(2) << "\n";
  }
  for (int i = 0; i < sys.k(); ++i) {
    std::string base = out_dir + "/phase_" + std::to_string(i);
    write_field_f64(base + ".f64", sys.phases[i], g);
    if (g.dim == 2) {
      write_pgm(base + ".pgm", sys.phases[i], g);
    } else {
      write_pgm(base + "_slice_x.pgm", sys.phases[i], g, 0);
      write_pgm(base + "_slice_y.pgm", sys.phases[i], g, 1);
      write_pgm(base + "_slice_z.pgm", sys.phases[i], g, 2);
    }
  }
  if (sys.k() > 1 && g.dim == 2) {
    // composite: argmax phase, scaled to gray
    std::ofstream out(out_dir + "/composite.pgm", std::ios::binary);
    const int m = g.m;
    out << "P5\n" << m << " " << m << "\n255\n";
    std::vector<unsigned char> row(m);
    for (int yi = 0; yi < m; ++yi) {
      int y = m - 1 - yi;
      for (int xi = 0; xi < m; ++xi) {
        std::size_t idx = g.index(xi, y, 0);
        int best = -1;
        double bv = result.config.level;
        for (int i = 0; i < sys.k(); ++i)
          if (sys.phases[i][idx] > bv) {
            bv = sys.phases[i][idx];
            best = i;
          }
        row[xi] = best < 0 ? 0 : (unsigned char)((best + 1) * 255 / sys.k());
      }
      out.write(reinterpret_cast<const char*>(row.data()), m);
    }
  }
  {
    std::ofstream out(out_dir + "/trace.csv");
    out << "stage,m,pass,iteration,value\n";
    char line[96];
    for (std::size_t s = 0; s < result.stage_reports.size(); ++s) {
      const auto& sr = result.stage_reports[s];
      for (std::size_t it = 0; it < sr.warm.value_trace.size(); ++it) {
        std::snprintf(line, sizeof(line), "%zu,%d,warm,%zu,%.17g\n", s, sr.m, it,
                      sr.warm.value_trace[it]);
        out << line;
      }
      for (std::size_t it = 0; it < sr.main.value_trace.size(); ++it) {
        std::snprintf(line, sizeof(line), "%zu,%d,main,%zu,%.17g\n", s, sr.m, it,
                      sr.main.value_trace[it]);
        out << line;
      }
    }
  }
}

}  // namespace cheegerpack
