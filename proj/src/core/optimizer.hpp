#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cheegerpack {

/// Bound-constrained problem: the callback fills the gradient and returns the
/// value (+inf is a recoverable sentinel, never an error).
struct BoundProblem {
  std::size_t dimension = 0;
  std::function<double(std::span<const double>, std::span<double>)> objective_and_gradient;
  std::vector<double> lower, upper;
};

struct OptimizerOptions {
  int memory = 5;
  double tol = 1e-8;  // projected gradient sup-norm
  int maxit = 10000;
};

struct OptimizerReport {
  int iterations = 0;
  double final_value = 0;
  double projected_gradient_norm = 0;
  bool converged = false;
  std::vector<double> value_trace;  // accepted iterates, nonincreasing
};

/// Projected limited-memory BFGS with Armijo backtracking. Iterates stay in
/// the box; curvature pairs with s^T y <= 1e-12 are discarded; infinite trial
/// values are treated as failed line-search steps. Throws std::runtime_error
/// if the objective stays infinite after perturbing x0 toward the box center
/// (20 attempts).
std::pair<std::vector<double>, OptimizerReport> minimize(const BoundProblem& prob,
                                                         std::vector<double> x0,
                                                         const OptimizerOptions& opts = {});

}  // namespace cheegerpack
