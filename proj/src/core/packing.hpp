#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "functional.hpp"
#include "shapes.hpp"

namespace cheegerpack {

enum class PackObjective { maximin, log_product };

/// Feasible ball configuration: pairwise disjoint, inside the domain up to
/// tau_feas = 1e-9.
struct DiskConfig {
  int dim = 2;
  std::vector<Pt> centers;
  std::vector<double> radii;
  Shape domain;

  static constexpr double tau_feas = 1e-9;
  bool feasible() const;
  double min_slack() const;  // min over constraints of slack (radius units)
};

struct PackingResult {
  DiskConfig config;
  PackObjective objective = PackObjective::maximin;
  double value = 0;  // min r_i or sum log r_i
  std::vector<std::string> active_constraints;

  nlohmann::json to_json() const;
};

/// Barycenters of the super-level sets {u_i > level}; throws if a phase's set
/// is empty (message names the phase).
std::vector<Pt> extract_centers(const PhaseSystem& sys, double level = 0.5);

/// Local refinement of the common-radius packing: sequential LP steps on the
/// linearized constraints inside a shrinking trust region, then a compass
/// polish. Centers stay within 10x the initial slack of their start.
PackingResult refine_maximin(const std::vector<Pt>& centers, const Shape& domain, int dim);

/// Local refinement of centers and per-ball radii maximizing sum log r_i.
PackingResult refine_product(const std::vector<Pt>& centers, const Shape& domain, int dim);

void write_packing_svg(const std::string& path, const PackingResult& result);

/// Dense two-phase simplex: maximize c.z subject to A z <= b, z >= 0.
/// Returns nullopt when infeasible or unbounded.
std::optional<std::vector<double>> simplex_maximize(const std::vector<double>& c,
                                                    const std::vector<std::vector<double>>& A,
                                                    const std::vector<double>& b);

}  // namespace cheegerpack
