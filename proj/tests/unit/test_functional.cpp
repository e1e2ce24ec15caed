#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/functional.hpp"

using namespace cheegerpack;

namespace {

GridSpec unit_grid(int m, int dim = 2) {
  GridSpec g;
  g.dim = dim;
  g.m = m;
  g.extent = {1, 1, 1};
  return g;
}

PhaseSystem random_system(int m, int k, std::uint64_t seed) {
  PhaseSystem sys;
  sys.grid = unit_grid(m);
  sys.mask = build_mask(sys.grid, FullBox{});
  sys.phases.assign(k, ScalarField(sys.grid.node_count(), 0.0));
  std::mt19937_64 rng(seed);
  for (auto& ph : sys.phases)
    for (auto& v : ph) v = double(rng() >> 11) * 0x1.0p-53;
  for (std::size_t n = 0; n < sys.grid.node_count(); ++n) {
    double s = 0;
    for (auto& ph : sys.phases) s += ph[n];
    if (s > 1)
      for (auto& ph : sys.phases) ph[n] /= s;
  }
  return sys;
}

EnergyParams params_for(const PhaseSystem& sys, double alpha = 1, double p = 1,
                        double eps = 0.1) {
  EnergyParams prm;
  prm.alpha = alpha;
  prm.p = p;
  prm.eps = eps;
  prm.k = sys.k();
  return prm;
}

}  // namespace

TEST_CASE("evaluate: zero phase gives the infinite sentinel") {
  PhaseSystem sys;
  sys.grid = unit_grid(16);
  sys.mask = build_mask(sys.grid, FullBox{});
  sys.phases.assign(1, ScalarField(sys.grid.node_count(), 0.0));
  EnergyValue ev = evaluate(sys, params_for(sys));
  CHECK(!ev.is_finite());
  CHECK(std::isinf(ev.per_phase_ratio[0]));
  CHECK_THROWS_AS(gradient(sys, params_for(sys)), std::domain_error);
}

TEST_CASE("evaluate: disjoint supports give zero penalty") {
  PhaseSystem sys;
  sys.grid = unit_grid(20);
  sys.mask = build_mask(sys.grid, FullBox{});
  sys.phases.assign(2, ScalarField(sys.grid.node_count(), 0.0));
  for (std::size_t i = 0; i < sys.grid.node_count(); ++i) {
    double x = sys.grid.coords(i)[0];
    if (x < 0.45)
      sys.phases[0][i] = 0.8;
    else if (x > 0.55)
      sys.phases[1][i] = 0.8;
  }
  EnergyValue ev = evaluate(sys, params_for(sys));
  CHECK(ev.penalty_term == 0.0);
  CHECK(ev.is_finite());

  // overlapping supports -> strictly positive penalty
  sys.phases[1][sys.grid.index(2, 2)] = 0.5;
  sys.phases[0][sys.grid.index(2, 2)] = 0.5;
  EnergyValue ev2 = evaluate(sys, params_for(sys));
  CHECK(ev2.penalty_term > 0.0);
}

TEST_CASE("evaluate: Modica-Mortola term of an optimal disk profile") {
  // u = logistic(dist/eps) around a disk of radius 0.25; the MM energy of the
  // optimal profile for the well 9u^2(1-u)^2 equals the perimeter.
  const int m = 256;
  PhaseSystem sys;
  sys.grid = unit_grid(m);
  sys.mask = build_mask(sys.grid, FullBox{});
  double eps = 4.0 / m;
  sys.phases.assign(1, ScalarField(sys.grid.node_count()));
  for (std::size_t i = 0; i < sys.grid.node_count(); ++i) {
    Pt x = sys.grid.coords(i);
    double d = 0.25 - std::hypot(x[0] - 0.5, x[1] - 0.5);
    sys.phases[0][i] = 1.0 / (1.0 + std::exp(std::clamp(-3.0 * d / eps, -60.0, 60.0)));
  }
  EnergyParams prm = params_for(sys, 1, 1, eps);
  EnergyValue ev = evaluate(sys, prm);
  double perimeter = 2 * std::numbers::pi * 0.25;
  CHECK(ev.per_phase_perimeter[0] == doctest::Approx(perimeter).epsilon(0.05));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(1234);
  for (int k : {1, 2, 3}) {
    PhaseSystem sys = random_system(8, k, 100 + k);
    EnergyParams prm = params_for(sys, k == 1 ? 1.0 : 0.75, k == 1 ? 1.0 : 2.0, 0.2);
    std::vector<double> stacked;
    for (auto& ph : sys.phases) stacked.insert(stacked.end(), ph.begin(), ph.end());
    std::vector<double> grad(stacked.size());
    gradient_stacked(sys.grid, sys.mask, stacked, prm, grad);

    // directional derivative along a random direction
    std::vector<double> dir(stacked.size());
    for (auto& v : dir) v = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
    const double step = 1e-6;
    auto eval_at = [&](double t) {
      std::vector<double> xt(stacked.size());
      for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = stacked[i] + t * dir[i];
      return evaluate_stacked(sys.grid, sys.mask, xt, prm).total;
    };
    double fd = (eval_at(step) - eval_at(-step)) / (2 * step);
    double an = 0;
    for (std::size_t i = 0; i < grad.size(); ++i) an += grad[i] * dir[i];
    CHECK(an == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("gradient keeps the x<->y symmetry of a symmetric field") {
  const int m = 16;
  PhaseSystem sys;
  sys.grid = unit_grid(m);
  sys.mask = build_mask(sys.grid, FullBox{});
  sys.phases.assign(1, ScalarField(sys.grid.node_count()));
  for (std::size_t i = 0; i < sys.grid.node_count(); ++i) {
    Pt x = sys.grid.coords(i);
    sys.phases[0][i] = 0.3 + 0.4 * std::exp(-8 * (x[0] - 0.5) * (x[0] - 0.5)) *
                                 std::exp(-8 * (x[1] - 0.5) * (x[1] - 0.5)) +
                       0.1 * (x[0] + x[1]);
  }
  auto grad = gradient(sys, params_for(sys, 1, 1, 0.2));
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x)
      CHECK(grad[sys.grid.index(x, y)] ==
            doctest::Approx(grad[sys.grid.index(y, x)]).epsilon(1e-12));
}

TEST_CASE("phase-label permutation invariance") {
  PhaseSystem sys = random_system(10, 3, 77);
  EnergyParams prm = params_for(sys, 0.8, 2.0, 0.15);
  EnergyValue ev = evaluate(sys, prm);
  PhaseSystem perm = sys;
  std::swap(perm.phases[0], perm.phases[2]);
  EnergyValue ev2 = evaluate(perm, prm);
  CHECK(ev.total == ev2.total);
  CHECK(ev.penalty_term == ev2.penalty_term);
}

TEST_CASE("total is reconstructible from the decomposed parts") {
  PhaseSystem sys = random_system(12, 2, 9);
  EnergyParams prm = params_for(sys, 0.9, 3.0, 0.12);
  EnergyValue ev = evaluate(sys, prm);
  double total = ev.penalty_term;
  for (double r : ev.per_phase_ratio) total += std::pow(r, prm.p);
  CHECK(ev.total == doctest::Approx(total).epsilon(1e-12));
  for (double v : ev.per_phase_perimeter) CHECK(v >= 0);
  for (double v : ev.per_phase_volume) CHECK(v >= 0);
}

TEST_CASE("total excluding penalty is nondecreasing in p when ratios >= 1") {
  PhaseSystem sys = random_system(10, 2, 5);
  EnergyParams prm = params_for(sys, 0.9, 1.0, 0.05);
  EnergyValue ev1 = evaluate(sys, prm);
  for (double r : ev1.per_phase_ratio) REQUIRE(r >= 1.0);  // rough random fields
  double prev = 0;
  for (double p : {1.0, 2.0, 4.0, 8.0}) {
    prm.p = p;
    EnergyValue ev = evaluate(sys, prm);
    double sum = ev.total - ev.penalty_term;
    CHECK(sum >= prev - 1e-12);
    prev = sum;
  }
}

TEST_CASE("log-perimeter objective: symmetry, sentinel, gradient") {
  PhaseSystem sys;
  sys.grid = unit_grid(16);
  sys.mask = build_mask(sys.grid, FullBox{});
  sys.phases.assign(2, ScalarField(sys.grid.node_count(), 0.0));
  for (std::size_t i = 0; i < sys.grid.node_count(); ++i) {
    double x = sys.grid.coords(i)[0];
    if (x < 0.4)
      sys.phases[0][i] = 0.9;
    else if (x > 0.6)
      sys.phases[1][i] = 0.9;
  }
  LogPerimeterParams prm;
  prm.eps = 0.1;
  prm.area_target = 0.36;
  double v = evaluate_log_perimeter(sys, prm);
  CHECK(std::isfinite(v));
  CHECK(v == evaluate_log_perimeter(sys, prm));  // deterministic

  PhaseSystem zero = sys;
  zero.phases[0].assign(zero.phases[0].size(), 0.0);
  CHECK(std::isinf(evaluate_log_perimeter(zero, prm)));

  // mirror-image phases on disjoint supports carry equal log terms
  PhaseSystem mirror;
  mirror.grid = sys.grid;
  mirror.mask = sys.mask;
  mirror.phases.assign(1, ScalarField(sys.grid.node_count(), 0.0));
  const int mm = sys.grid.m;
  for (int y = 0; y < mm; ++y)
    for (int x = 0; x < mm; ++x)
      mirror.phases[0][mirror.grid.index(mm - 1 - x, y)] = sys.phases[0][sys.grid.index(x, y)];
  PhaseSystem first = mirror;
  first.phases[0] = sys.phases[0];
  CHECK(evaluate_log_perimeter(first, prm) ==
        doctest::Approx(evaluate_log_perimeter(mirror, prm)).epsilon(1e-13));

  // finite-difference gradient check
  std::vector<double> stacked;
  for (auto& ph : sys.phases) stacked.insert(stacked.end(), ph.begin(), ph.end());
  std::vector<double> grad(stacked.size());
  evaluate_log_perimeter_stacked(sys.grid, sys.mask, stacked, prm, grad);
  std::mt19937_64 rng(42);
  std::vector<double> dir(stacked.size());
  for (auto& d : dir) d = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
  const double step = 1e-6;
  auto eval_at = [&](double t) {
    std::vector<double> xt(stacked.size());
    for (std::size_t i = 0; i < xt.size(); ++i) xt[i] = stacked[i] + t * dir[i];
    return evaluate_log_perimeter_stacked(sys.grid, sys.mask, xt, prm, {});
  };
  double fd = (eval_at(step) - eval_at(-step)) / (2 * step);
  double an = 0;
  for (std::size_t i = 0; i < grad.size(); ++i) an += grad[i] * dir[i];
  CHECK(an == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("params validation") {
  EnergyParams prm;
  prm.alpha = 0.4;  // below (N-1)/N in 2D
  CHECK_THROWS_AS(prm.validate(2), std::invalid_argument);
  prm.alpha = 0.6;
  CHECK_NOTHROW(prm.validate(2));
  CHECK_THROWS_AS(prm.validate(3), std::invalid_argument);  // below 2/3
  prm.alpha = 1.0;
  prm.eps = -1;
  CHECK_THROWS_AS(prm.validate(2), std::invalid_argument);
}
