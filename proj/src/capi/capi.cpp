#include "cheegerpack/cheegerpack.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "../core/errors.hpp"
#include "../core/klr.hpp"
#include "../core/packing.hpp"
#include "../core/pipeline.hpp"

using namespace cheegerpack;

namespace {

thread_local std::string g_last_error;

chp_status fail(chp_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <typename Fn>
chp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(CHP_ERROR_BAD_CONFIG, e.what());
  } catch (const InitFailure& e) {
    return fail(CHP_ERROR_INIT_FAILURE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CHP_ERROR_BAD_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CHP_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CHP_ERROR_INTERNAL, e.what());
  }
}

}  // namespace

struct chp_run {
  RunResult result;
  std::string json_cache;
};

struct chp_oracle {
  CheegerExact exact;
  std::string json_cache;
};

struct chp_packing {
  PackingResult result;
  std::string json_cache;
};

const char* chp_version(void) { return "0.1.0"; }

const char* chp_last_error(void) { return g_last_error.c_str(); }

chp_status chp_run_create(const char* config_json, chp_run** out) {
  if (!config_json || !out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(config_json);
    RunConfig config = RunConfig::from_json(j);
    auto* handle = new chp_run{run(config), {}};
    *out = handle;
    return CHP_OK;
  });
}

void chp_run_destroy(chp_run* run) { delete run; }

chp_status chp_run_result_json(chp_run* run, const char** json_out) {
  if (!run || !json_out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    run->json_cache = run->result.summary_json().dump(2);
    *json_out = run->json_cache.c_str();
    return CHP_OK;
  });
}

chp_status chp_run_write_outputs(chp_run* run, const char* out_dir) {
  if (!run || !out_dir) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      write_outputs(run->result, out_dir);
    } catch (const std::runtime_error& e) {
      return fail(CHP_ERROR_IO, e.what());
    }
    return CHP_OK;
  });
}

int chp_run_phase_count(const chp_run* run) { return run ? run->result.system.k() : 0; }

chp_status chp_run_grid(const chp_run* run, unsigned* dim, unsigned* m) {
  if (!run || !dim || !m) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *dim = unsigned(run->result.system.grid.dim);
  *m = unsigned(run->result.system.grid.m);
  return CHP_OK;
}

chp_status chp_run_field(const chp_run* run, int phase, double* buf, size_t len) {
  if (!run || !buf) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  if (phase < 0 || phase >= run->result.system.k())
    return fail(CHP_ERROR_INVALID_ARGUMENT, "phase index out of range");
  const auto& f = run->result.system.phases[phase];
  if (len < f.size()) return fail(CHP_ERROR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, f.data(), f.size() * sizeof(double));
  return CHP_OK;
}

chp_status chp_run_sharp(const chp_run* run, int phase, double* area, double* perimeter,
                         double* h_alpha) {
  if (!run) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  const auto& sharp = run->result.sharp;
  if (phase < 0 || phase >= int(sharp.per_phase_area.size()))
    return fail(CHP_ERROR_INVALID_ARGUMENT, "phase index out of range");
  if (area) *area = sharp.per_phase_area[phase];
  if (perimeter) *perimeter = sharp.per_phase_perimeter[phase];
  if (h_alpha) *h_alpha = sharp.per_phase_h_alpha[phase];
  return CHP_OK;
}

chp_status chp_run_final_energy(const chp_run* run, double* value) {
  if (!run || !value) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  if (run->result.stage_reports.empty()) return fail(CHP_ERROR_INTERNAL, "no stages recorded");
  *value = run->result.stage_reports.back().final_energy;
  return CHP_OK;
}

chp_status chp_oracle_create(const double* xy, size_t n_vertices, chp_oracle** out) {
  if (!xy || !out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    ConvexPolygon p;
    for (size_t i = 0; i < n_vertices; ++i)
      p.vertices.push_back({xy[2 * i], xy[2 * i + 1]});
    auto* handle = new chp_oracle{cheeger_exact(p), {}};
    *out = handle;
    return CHP_OK;
  });
}

void chp_oracle_destroy(chp_oracle* oracle) { delete oracle; }

chp_status chp_oracle_h(const chp_oracle* oracle, double* h) {
  if (!oracle || !h) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *h = oracle->exact.h;
  return CHP_OK;
}

chp_status chp_oracle_t_star(const chp_oracle* oracle, double* t_star) {
  if (!oracle || !t_star) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *t_star = oracle->exact.t_star;
  return CHP_OK;
}

chp_status chp_oracle_json(chp_oracle* oracle, const char** json_out) {
  if (!oracle || !json_out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    oracle->json_cache = oracle->exact.to_json().dump(2);
    *json_out = oracle->json_cache.c_str();
    return CHP_OK;
  });
}

chp_status chp_oracle_boundary_csv(chp_oracle* oracle, const char* path, int samples_per_arc) {
  if (!oracle || !path) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      oracle->exact.write_boundary_csv(path, samples_per_arc);
    } catch (const std::runtime_error& e) {
      return fail(CHP_ERROR_IO, e.what());
    }
    return CHP_OK;
  });
}

chp_status chp_compare(const chp_run* run, const chp_oracle* oracle, double* relative_error) {
  if (!run || !oracle || !relative_error)
    return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *relative_error = compare_relative_error(run->result.sharp, oracle->exact);
    return CHP_OK;
  });
}

chp_status chp_ball_h_alpha(unsigned dim, double radius, double alpha, double* out) {
  if (!out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = analytic_alpha_cheeger_ball(int(dim), radius, alpha);
    return CHP_OK;
  });
}

namespace {

chp_status make_packing(const std::vector<Pt>& centers, const Shape& domain, int dim,
                        chp_pack_objective objective, chp_packing** out) {
  PackingResult res = objective == CHP_PACK_MAXIMIN ? refine_maximin(centers, domain, dim)
                                                    : refine_product(centers, domain, dim);
  *out = new chp_packing{std::move(res), {}};
  return CHP_OK;
}

}  // namespace

chp_status chp_pack_refine(const chp_run* run, chp_pack_objective objective, chp_packing** out) {
  if (!run || !out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<Pt> centers;
    try {
      centers = extract_centers(run->result.system, run->result.config.level);
    } catch (const std::runtime_error& e) {
      return fail(CHP_ERROR_EXTRACTION, e.what());
    }
    // centers come out in the grid frame; refine against the domain there
    Shape domain = grid_frame_domain(run->result);
    return make_packing(centers, domain, run->result.system.grid.dim, objective, out);
  });
}

chp_status chp_pack_refine_centers(const char* domain_json, unsigned dim, const double* centers,
                                   size_t k, chp_pack_objective objective, chp_packing** out) {
  if (!domain_json || !centers || !out)
    return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    Shape domain = shape_from_json(nlohmann::json::parse(domain_json), int(dim));
    std::vector<Pt> pts(k, Pt{0, 0, 0});
    for (size_t i = 0; i < k; ++i)
      for (unsigned a = 0; a < dim; ++a) pts[i][a] = centers[i * dim + a];
    return make_packing(pts, domain, int(dim), objective, out);
  });
}

void chp_packing_destroy(chp_packing* packing) { delete packing; }

chp_status chp_packing_json(chp_packing* packing, const char** json_out) {
  if (!packing || !json_out) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    packing->json_cache = packing->result.to_json().dump(2);
    *json_out = packing->json_cache.c_str();
    return CHP_OK;
  });
}

chp_status chp_packing_value(const chp_packing* packing, double* value) {
  if (!packing || !value) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  *value = packing->result.value;
  return CHP_OK;
}

chp_status chp_packing_radii(const chp_packing* packing, double* radii, size_t k) {
  if (!packing || !radii) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  const auto& r = packing->result.config.radii;
  if (k < r.size()) return fail(CHP_ERROR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(radii, r.data(), r.size() * sizeof(double));
  return CHP_OK;
}

chp_status chp_packing_write(chp_packing* packing, const char* out_dir) {
  if (!packing || !out_dir) return fail(CHP_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      std::filesystem::create_directories(out_dir);
      std::ofstream json_file(std::string(out_dir) + "/packing.json");
      if (!json_file) return fail(CHP_ERROR_IO, "cannot open packing.json");
      json_file << packing->result.to_json().dump(2) << "\n";
      write_packing_svg(std::string(out_dir) + "/packing.svg", packing->result);
    } catch (const std::runtime_error& e) {
      return fail(CHP_ERROR_IO, e.what());
    }
    return CHP_OK;
  });
}
