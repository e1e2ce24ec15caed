// Command-line front end. Talks to the library exclusively through the
// public C API so it doubles as an integration check of the shared library.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cheegerpack/cheegerpack.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitInitFailure = 3;

int status_exit_code(chp_status st) {
  switch (st) {
    case CHP_OK:
      return kExitOk;
    case CHP_ERROR_BAD_CONFIG:
    case CHP_ERROR_INVALID_ARGUMENT:
      return kExitBadConfig;
    case CHP_ERROR_INIT_FAILURE:
      return kExitInitFailure;
    default:
      return kExitError;
  }
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string seeds;  // "a..b" fan-out
  std::optional<double> alpha, p, eps_factor;
  std::optional<int> k, stages, m0, target;
  std::optional<bool> periodic;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--seeds", o.seeds, "seed range a..b; keeps the best final energy");
  cmd->add_option("--alpha", o.alpha, "alpha exponent");
  cmd->add_option("--p", o.p, "p-norm exponent");
  cmd->add_option("--k", o.k, "number of phases");
  cmd->add_option("--eps-factor", o.eps_factor, "eps = eps_factor * grid spacing");
  cmd->add_option("--stages", o.stages, "number of refinement stages");
  cmd->add_option("--m0", o.m0, "initial nodes per axis");
  cmd->add_option("--target-resolution", o.target, "final nodes per axis");
  cmd->add_option("--periodic", o.periodic, "periodic grid (torus)");
}

json load_config(const CommonOpts& o) {
  json cfg = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      std::cerr << "cli: cannot open config file '" << o.config_path << "'\n";
      std::exit(kExitBadConfig);
    }
    try {
      in >> cfg;
    } catch (const std::exception& e) {
      std::cerr << "cli: config parse error: " << e.what() << "\n";
      std::exit(kExitBadConfig);
    }
  }
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.alpha) cfg["alpha"] = *o.alpha;
  if (o.p) cfg["p"] = *o.p;
  if (o.k) cfg["k"] = *o.k;
  if (o.eps_factor) cfg["eps_factor"] = *o.eps_factor;
  if (o.stages) cfg["stages"] = *o.stages;
  if (o.m0) cfg["m0"] = *o.m0;
  if (o.target) cfg["target_resolution"] = *o.target;
  if (o.periodic) cfg["periodic"] = *o.periodic;
  return cfg;
}

int die(const char* module, chp_status st) {
  std::cerr << module << ": " << chp_last_error() << "\n";
  return status_exit_code(st);
}

std::vector<std::uint64_t> parse_seed_range(const std::string& spec, std::uint64_t fallback) {
  if (spec.empty()) return {fallback};
  auto pos = spec.find("..");
  if (pos == std::string::npos) return {std::stoull(spec)};
  std::uint64_t a = std::stoull(spec.substr(0, pos));
  std::uint64_t b = std::stoull(spec.substr(pos + 2));
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

// runs the pipeline over the seed fan-out, keeping the best final energy
chp_status best_run(json cfg, const CommonOpts& o, chp_run** out) {
  auto seeds = parse_seed_range(o.seeds, cfg.value("seed", std::uint64_t(0)));
  chp_run* best = nullptr;
  double best_energy = 0;
  chp_status last = CHP_ERROR_INTERNAL;
  for (std::uint64_t s : seeds) {
    cfg["seed"] = s;
    chp_run* r = nullptr;
    last = chp_run_create(cfg.dump().c_str(), &r);
    if (last != CHP_OK) {
      if (best) chp_run_destroy(best);
      return last;
    }
    double e = 0;
    chp_run_final_energy(r, &e);
    if (!best || e < best_energy) {
      if (best) chp_run_destroy(best);
      best = r;
      best_energy = e;
    } else {
      chp_run_destroy(r);
    }
  }
  *out = best;
  return CHP_OK;
}

int cmd_run(const CommonOpts& o, json cfg) {
  chp_run* run = nullptr;
  chp_status st = best_run(std::move(cfg), o, &run);
  if (st != CHP_OK) return die("pipeline", st);
  st = chp_run_write_outputs(run, o.out_dir.c_str());
  if (st != CHP_OK) {
    chp_run_destroy(run);
    return die("pipeline", st);
  }
  const char* js = nullptr;
  chp_run_result_json(run, &js);
  json summary = json::parse(js);
  std::cout << "final energy " << summary["final_energy"] << ", sharp h "
            << summary["sharp"]["per_phase_h_alpha"].dump() << "\n"
            << "outputs in " << o.out_dir << "\n";
  chp_run_destroy(run);
  return kExitOk;
}

std::vector<double> domain_polygon_xy(const json& cfg) {
  // convex polygon vertices for the oracle from the config's domain
  json domain = cfg.contains("domain") ? cfg["domain"] : json{{"type", "square"}};
  std::string type = domain.value("type", "square");
  std::vector<double> xy;
  auto push_rect = [&](double x0, double y0, double x1, double y1) {
    xy = {x0, y0, x1, y0, x1, y1, x0, y1};
  };
  if (type == "square") {
    double s = domain.value("side", 1.0);
    push_rect(0, 0, s, s);
  } else if (type == "rectangle") {
    if (domain.contains("size")) {
      auto sz = domain["size"].get<std::vector<double>>();
      push_rect(0, 0, sz[0], sz[1]);
    } else {
      auto lo = domain["lo"].get<std::vector<double>>();
      auto hi = domain["hi"].get<std::vector<double>>();
      push_rect(lo[0], lo[1], hi[0], hi[1]);
    }
  } else if (type == "polygon") {
    for (const auto& v : domain["vertices"]) {
      xy.push_back(v[0].get<double>());
      xy.push_back(v[1].get<double>());
    }
  } else if (type == "equilateral_triangle") {
    double s = domain.value("side", 1.0);
    xy = {0, 0, s, 0, s / 2, s * 0.8660254037844386};
  } else if (type == "disk") {
    double r = domain.value("radius", 1.0);
    double cx = r, cy = r;
    if (domain.contains("center")) {
      cx = domain["center"][0].get<double>();
      cy = domain["center"][1].get<double>();
    }
    const int nseg = 256;
    for (int i = 0; i < nseg; ++i) {
      double ang = 2 * 3.14159265358979323846 * i / nseg;
      xy.push_back(cx + r * std::cos(ang));
      xy.push_back(cy + r * std::sin(ang));
    }
  } else {
    std::cerr << "oracle: domain type '" << type << "' has no polygon form\n";
    std::exit(kExitBadConfig);
  }
  return xy;
}

int cmd_oracle(const CommonOpts& o, const json& cfg) {
  auto xy = domain_polygon_xy(cfg);
  chp_oracle* oracle = nullptr;
  chp_status st = chp_oracle_create(xy.data(), xy.size() / 2, &oracle);
  if (st != CHP_OK) return die("klr_oracle", st);
  const char* js = nullptr;
  chp_oracle_json(oracle, &js);
  std::filesystem::create_directories(o.out_dir);
  std::ofstream(o.out_dir + "/oracle.json") << js << "\n";
  st = chp_oracle_boundary_csv(oracle, (o.out_dir + "/boundary.csv").c_str(), 64);
  if (st != CHP_OK) {
    chp_oracle_destroy(oracle);
    return die("klr_oracle", st);
  }
  double h = 0;
  chp_oracle_h(oracle, &h);
  std::cout << "exact h " << h << "\noutputs in " << o.out_dir << "\n";
  chp_oracle_destroy(oracle);
  return kExitOk;
}

int cmd_compare(const CommonOpts& o, json cfg) {
  auto xy = domain_polygon_xy(cfg);
  chp_oracle* oracle = nullptr;
  chp_status st = chp_oracle_create(xy.data(), xy.size() / 2, &oracle);
  if (st != CHP_OK) return die("klr_oracle", st);

  chp_run* run = nullptr;
  cfg["k"] = 1;
  st = best_run(std::move(cfg), o, &run);
  if (st != CHP_OK) {
    chp_oracle_destroy(oracle);
    return die("pipeline", st);
  }
  double rel = 0, h_exact = 0, h_measured = 0;
  st = chp_compare(run, oracle, &rel);
  if (st != CHP_OK) {
    chp_run_destroy(run);
    chp_oracle_destroy(oracle);
    return die("compare", st);
  }
  chp_oracle_h(oracle, &h_exact);
  chp_run_sharp(run, 0, nullptr, nullptr, &h_measured);

  chp_run_write_outputs(run, o.out_dir.c_str());
  const char* js = nullptr;
  chp_run_result_json(run, &js);
  json result = json::parse(js);
  result["h_exact"] = h_exact;
  result["h_measured"] = h_measured;
  result["relative_error"] = rel;
  std::ofstream(o.out_dir + "/result.json") << result.dump(2) << "\n";
  chp_oracle_boundary_csv(oracle, (o.out_dir + "/boundary.csv").c_str(), 64);
  std::cout << "h exact " << h_exact << ", measured " << h_measured << ", relative error "
            << rel << "\n";
  chp_run_destroy(run);
  chp_oracle_destroy(oracle);
  return kExitOk;
}

int cmd_pack(const CommonOpts& o, json cfg, const std::string& pack_objective) {
  int dim = cfg.value("dim", 2);
  if (!cfg.contains("alpha")) cfg["alpha"] = double(dim - 1) / dim + 1e-3;
  if (!cfg.contains("p")) cfg["p"] = 50.0;
  if (!cfg.contains("eps_factor")) cfg["eps_factor"] = 2.0;
  if (!cfg.contains("target_resolution") && !cfg.contains("stages"))
    cfg["target_resolution"] = dim == 2 ? 160 : 64;

  chp_run* run = nullptr;
  chp_status st = best_run(std::move(cfg), o, &run);
  if (st != CHP_OK) return die("pipeline", st);
  st = chp_run_write_outputs(run, o.out_dir.c_str());
  if (st != CHP_OK) {
    chp_run_destroy(run);
    return die("pipeline", st);
  }
  chp_packing* packing = nullptr;
  chp_pack_objective obj =
      pack_objective == "product" ? CHP_PACK_PRODUCT : CHP_PACK_MAXIMIN;
  st = chp_pack_refine(run, obj, &packing);
  if (st != CHP_OK) {
    chp_run_destroy(run);
    return die("packing", st);
  }
  st = chp_packing_write(packing, o.out_dir.c_str());
  if (st != CHP_OK) {
    chp_packing_destroy(packing);
    chp_run_destroy(run);
    return die("packing", st);
  }
  double value = 0;
  chp_packing_value(packing, &value);
  std::cout << (obj == CHP_PACK_MAXIMIN ? "maximin radius " : "sum log radius ") << value
            << "\noutputs in " << o.out_dir << "\n";
  chp_packing_destroy(packing);
  chp_run_destroy(run);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-Cheeger sets, clusters and ball packings via phase fields"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string pack_objective = "maximin";

  auto* cheeger = app.add_subcommand("cheeger", "single alpha-Cheeger set (k=1)");
  auto* cluster = app.add_subcommand("cluster", "alpha-Cheeger cluster (k>1)");
  auto* pack = app.add_subcommand("pack", "packing: cluster near critical alpha, then refine");
  auto* oracle = app.add_subcommand("oracle", "exact Cheeger set of a convex polygon");
  auto* compare = app.add_subcommand("compare", "pipeline vs exact oracle, relative error");
  auto* perim = app.add_subcommand("perimeter-product", "log-perimeter partition on the torus");
  for (auto* cmd : {cheeger, cluster, pack, oracle, compare, perim}) add_common(cmd, o);
  pack->add_option("--pack-objective", pack_objective, "maximin|product");

  CLI11_PARSE(app, argc, argv);

  json cfg = load_config(o);
  try {
    if (app.got_subcommand(cheeger)) {
      cfg["k"] = 1;
      cfg["objective"] = "cheeger_pnorm";
      return cmd_run(o, std::move(cfg));
    }
    if (app.got_subcommand(cluster)) {
      if (!cfg.contains("k") || cfg["k"].get<int>() < 2) {
        std::cerr << "cli: cluster needs k >= 2 (set --k)\n";
        return kExitBadConfig;
      }
      cfg["objective"] = "cheeger_pnorm";
      return cmd_run(o, std::move(cfg));
    }
    if (app.got_subcommand(pack)) return cmd_pack(o, std::move(cfg), pack_objective);
    if (app.got_subcommand(oracle)) return cmd_oracle(o, cfg);
    if (app.got_subcommand(compare)) return cmd_compare(o, std::move(cfg));
    if (app.got_subcommand(perim)) {
      cfg["objective"] = "log_perimeter";
      if (!cfg.contains("periodic")) cfg["periodic"] = true;
      int k = cfg.value("k", 8);
      cfg["k"] = k;
      if (!cfg.contains("domain")) {
        double area = cfg.value("area_target", 1.0);
        double side = std::sqrt(double(k) * area);
        cfg["domain"] = {{"type", "rectangle"}, {"size", {side, side}}};
      }
      if (!cfg.contains("target_resolution") && !cfg.contains("stages"))
        cfg["target_resolution"] = 160;
      return cmd_run(o, std::move(cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "cli: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
