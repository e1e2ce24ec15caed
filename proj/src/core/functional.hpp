#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "grid.hpp"

namespace cheegerpack {

/// k density fields on a common grid, zero outside the mask.
struct PhaseSystem {
  GridSpec grid;
  DomainMask mask;
  std::vector<ScalarField> phases;

  int k() const { return int(phases.size()); }
  void validate() const;  // throws on bound/mask violations
};

struct EnergyParams {
  double alpha = 1.0;
  double p = 1.0;
  double eps = 0.05;
  double penalty_weight = 0.0;  // 0 selects the default 1/eps
  int k = 1;

  double penalty() const { return penalty_weight > 0 ? penalty_weight : 1.0 / eps; }
  void validate(int dim) const;
};

/// Decomposed value of the penalized ratio functional. per_phase_perimeter is
/// the Modica-Mortola term eps*int|grad u|^2 + (9/eps)*int u^2(1-u)^2,
/// per_phase_volume is int |u|^{2N/(N-1)} (the alpha power is applied in the
/// ratio). An empty phase makes its ratio and the total +inf.
struct EnergyValue {
  double total = 0;
  std::vector<double> per_phase_perimeter;
  std::vector<double> per_phase_volume;
  std::vector<double> per_phase_ratio;
  double penalty_term = 0;

  bool is_finite() const;
  nlohmann::json to_json() const;
};

EnergyValue evaluate(const PhaseSystem& sys, const EnergyParams& params);

/// Exact gradient of the discrete energy, zero at masked-out nodes.
/// Throws std::domain_error if the energy is infinite.
std::vector<double> gradient(const PhaseSystem& sys, const EnergyParams& params);

// stacked [phase0 nodes..., phase1 nodes, ...] views used by the optimizer
EnergyValue evaluate_stacked(const GridSpec& g, const DomainMask& mask,
                             std::span<const double> u, const EnergyParams& params);
void gradient_stacked(const GridSpec& g, const DomainMask& mask, std::span<const double> u,
                      const EnergyParams& params, std::span<double> grad_out);

/// Single-pass value plus gradient; the gradient is zeroed (not an error)
/// when the energy is infinite, so the optimizer can back off.
EnergyValue evaluate_and_gradient_stacked(const GridSpec& g, const DomainMask& mask,
                                          std::span<const double> u, const EnergyParams& params,
                                          std::span<double> grad_out);

struct LogPerimeterParams {
  double eps = 0.05;
  double area_target = 1.0;
  double area_weight = 0.0;    // 0 selects 10/eps
  double penalty_weight = 0.0; // 0 selects 1/eps

  double area_w() const { return area_weight > 0 ? area_weight : 10.0 / eps; }
  double penalty() const { return penalty_weight > 0 ? penalty_weight : 1.0 / eps; }
};

/// Sum of log Modica-Mortola terms with quadratic area penalty and the
/// cross-phase penalty; +inf if some phase's MM term vanishes.
double evaluate_log_perimeter(const PhaseSystem& sys, const LogPerimeterParams& params);
double evaluate_log_perimeter_stacked(const GridSpec& g, const DomainMask& mask,
                                      std::span<const double> u, const LogPerimeterParams& params,
                                      std::span<double> grad_out);  // empty span skips gradient

}  // namespace cheegerpack
