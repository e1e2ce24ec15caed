#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "measure.hpp"
#include "optimizer.hpp"

namespace cheegerpack {

/// One multigrid run: random init on a coarse grid, staged refinement with
/// eps = eps_factor * spacing, threshold measurement at the end.
struct RunConfig {
  enum class Objective { cheeger_pnorm, log_perimeter };

  int k = 1;
  double alpha = 1.0;
  double p = 1.0;
  int dim = 2;
  Shape domain = make_square();
  int m0 = 0;                 // 0 selects 20 (2D) / 10 (3D)
  int stages = 0;             // 0 derives the count from target_resolution
  int target_resolution = 0;  // 0 selects 320 (2D) / 80 (3D)
  double eps_factor = 1.0;
  std::uint64_t seed = 0;
  Objective objective = Objective::cheeger_pnorm;
  bool periodic = false;
  double tol = 1e-8;
  int maxit = 10000;
  double penalty_weight = 0;  // 0 -> 1/eps
  double area_target = 1.0;   // log_perimeter only
  double area_weight = 0;     // 0 -> 10/eps
  int pad_cells = 2;
  double level = 0.5;
  bool anneal = true;          // warm pass at 2*eps before each stage's main pass
  double dilate_radius = 2.0;  // cells of ball dilation after refinement

  int resolved_m0() const;
  int resolved_target() const;
  int resolved_stages() const;
  void validate() const;  // ConfigError names the offending key
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

struct StageReport {
  int m = 0;
  double eps = 0;
  double final_energy = 0;
  OptimizerReport warm;  // empty when anneal is off
  OptimizerReport main;
};

struct RunResult {
  PhaseSystem system;
  std::vector<StageReport> stage_reports;
  SharpMeasurement sharp;
  EnergyValue final_energy;
  RunConfig config;
  Pt origin_offset{0, 0, 0};  // grid frame = physical frame + offset

  nlohmann::json summary_json() const;
};

/// Independent uniform values inside the mask, jointly rescaled nodewise so
/// sum_i u_i <= 1; reproducible from the seed.
PhaseSystem init_random(const GridSpec& g, const DomainMask& mask, int k, std::uint64_t seed);

/// The run's domain in the grid frame (config domain shifted by origin_offset).
Shape grid_frame_domain(const RunResult& result);

RunResult run(const RunConfig& config);

/// result.json, per-phase .f64/.pgm dumps, composite.pgm, trace.csv.
void write_outputs(const RunResult& result, const std::string& out_dir);

void write_pgm(const std::string& path, const ScalarField& f, const GridSpec& g,
               int slice_axis = -1, int slice_index = -1);

}  // namespace cheegerpack
