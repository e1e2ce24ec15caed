#include "optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "errors.hpp"

namespace cheegerpack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

std::pair<std::vector<double>, OptimizerReport> minimize(const BoundProblem& prob,
                                                         std::vector<double> x,
                                                         const OptimizerOptions& opts) {
  const std::size_t n = prob.dimension;
  if (x.size() != n || prob.lower.size() != n || prob.upper.size() != n)
    throw std::invalid_argument("optimizer: dimension mismatch");
  if (opts.memory < 1 || !(opts.tol > 0))
    throw std::invalid_argument("optimizer: bad options");
  const auto& lo = prob.lower;
  const auto& up = prob.upper;

  auto clamp = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::min(std::max(v[i], lo[i]), up[i]);
  };
  clamp(x);

  std::vector<double> g(n), gn(n), xn(n), d(n), q(n);
  double f = prob.objective_and_gradient(x, g);

  // infinite start: walk toward the box center
  for (int attempt = 0; !std::isfinite(f) && attempt < 20; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.5 * (lo[i] + up[i]);
      x[i] += 0.5 * (c - x[i]);
    }
    f = prob.objective_and_gradient(x, g);
  }
  if (!std::isfinite(f))
    throw InitFailure("optimizer: objective infinite at start after perturbation");

  OptimizerReport rep;
  rep.value_trace.push_back(f);

  std::deque<Pair> mem;
  const double c1 = 1e-4;
  const double active_eps = 1e-12;

  auto pg_norm = [&]() {
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double step = std::min(std::max(x[i] - g[i], lo[i]), up[i]) - x[i];
      norm = std::max(norm, std::abs(step));
    }
    return norm;
  };

  int it = 0;
  double pgn = pg_norm();
  while (it < opts.maxit && pgn > opts.tol) {
    // free-variable gradient (active bounds removed)
    for (std::size_t i = 0; i < n; ++i) {
      bool active = (x[i] <= lo[i] + active_eps && g[i] > 0) ||
                    (x[i] >= up[i] - active_eps && g[i] < 0) || lo[i] == up[i];
      q[i] = active ? 0.0 : g[i];
    }
    // two-loop recursion on the free gradient
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * dot(mem[k].s, q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * mem[k].y[i];
    }
    if (!mem.empty()) {
      const Pair& last = mem.back();
      double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      double beta = mem[k].rho * dot(mem[k].y, q);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * mem[k].s[i];
    }
    bool restarted = false;
    for (int pass = 0;; ++pass) {
      for (std::size_t i = 0; i < n; ++i) {
        bool active = (x[i] <= lo[i] + active_eps && g[i] > 0) ||
                      (x[i] >= up[i] - active_eps && g[i] < 0) || lo[i] == up[i];
        d[i] = active ? 0.0 : -q[i];
      }
      if (dot(d, g) < -1e-300) break;  // descent
      if (pass > 0 || mem.empty()) {
        d.assign(n, 0.0);  // no usable direction
        break;
      }
      mem.clear();  // restart with steepest descent
      restarted = true;
      q = g;
    }
    (void)restarted;
    double dg = dot(d, g);
    if (!(dg < 0)) break;

    double step = 1.0;
    double fn = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i)
        xn[i] = std::min(std::max(x[i] + step * d[i], lo[i]), up[i]);
      fn = prob.objective_and_gradient(xn, gn);
      if (std::isfinite(fn)) {
        double gain = 0;
        for (std::size_t i = 0; i < n; ++i) gain += g[i] * (xn[i] - x[i]);
        if (fn <= f + c1 * gain && fn <= f) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Pair pr;
    pr.s.resize(n);
    pr.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = xn[i] - x[i];
      pr.y[i] = gn[i] - g[i];
    }
    double sy = dot(pr.s, pr.y);
    if (sy > 1e-12) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (int(mem.size()) > opts.memory) mem.pop_front();
    }
    x.swap(xn);
    g.swap(gn);
    f = fn;
    rep.value_trace.push_back(f);
    ++it;
    pgn = pg_norm();
  }

  rep.iterations = it;
  rep.final_value = f;
  rep.projected_gradient_norm = pgn;
  rep.converged = pgn <= opts.tol;
  return {std::move(x), std::move(rep)};
}

}  // namespace cheegerpack
