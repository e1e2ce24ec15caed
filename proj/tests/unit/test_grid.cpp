#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "core/grid.hpp"

using namespace cheegerpack;

namespace {

GridSpec unit_grid(int m, bool periodic = false) {
  GridSpec g;
  g.dim = 2;
  g.m = m;
  g.extent = {1, 1, 1};
  g.periodic = periodic;
  return g;
}

ScalarField from_fn(const GridSpec& g, double (*fn)(double, double)) {
  ScalarField f(g.node_count());
  for (std::size_t i = 0; i < f.size(); ++i) {
    Pt x = g.coords(i);
    f[i] = fn(x[0], x[1]);
  }
  return f;
}

}  // namespace

TEST_CASE("integrate: constants and half-box indicator") {
  GridSpec g = unit_grid(101);
  DomainMask mask = build_mask(g, FullBox{});
  ScalarField ones(g.node_count(), 1.0);
  CHECK(integrate(ones, g, mask) == doctest::Approx(1.0).epsilon(1e-14));
  ScalarField zeros(g.node_count(), 0.0);
  CHECK(integrate(zeros, g, mask) == 0.0);

  // indicator of x <= 0.5; expected value from a direct node count
  ScalarField half(g.node_count());
  std::size_t count = 0;
  for (std::size_t i = 0; i < half.size(); ++i) {
    half[i] = g.coords(i)[0] <= 0.5 ? 1.0 : 0.0;
    count += std::size_t(half[i]);
  }
  double expected = double(count) / double(g.node_count());
  CHECK(expected == doctest::Approx(51.0 * 101.0 / (101.0 * 101.0)));
  CHECK(integrate(half, g, mask) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("integrate is linear in the field") {
  GridSpec g = unit_grid(17);
  DomainMask mask = build_mask(g, FullBox{});
  std::mt19937_64 rng(3);
  ScalarField a(g.node_count()), b(g.node_count());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = double(rng() >> 11) * 0x1.0p-53;
    b[i] = double(rng() >> 11) * 0x1.0p-53;
  }
  ScalarField combo(g.node_count());
  for (std::size_t i = 0; i < a.size(); ++i) combo[i] = 2.5 * a[i] - 0.75 * b[i];
  double lhs = integrate(combo, g, mask);
  double rhs = 2.5 * integrate(a, g, mask) - 0.75 * integrate(b, g, mask);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gradient_energy: constants, linear field, homogeneity") {
  GridSpec g = unit_grid(64);
  DomainMask mask = build_mask(g, FullBox{});

  ScalarField c(g.node_count(), 0.7);
  CHECK(gradient_energy(c, g, mask) == 0.0);

  ScalarField fx = from_fn(g, [](double x, double) { return x; });
  // analytic int |grad x|^2 = 1, edge sum misses one spacing per line
  CHECK(gradient_energy(fx, g, mask) == doctest::Approx(1.0).epsilon(2.0 / g.m));

  std::mt19937_64 rng(11);
  ScalarField r(g.node_count());
  for (auto& v : r) v = double(rng() >> 11) * 0x1.0p-53;
  double e1 = gradient_energy(r, g, mask);
  ScalarField r2 = r;
  for (auto& v : r2) v *= 3.0;
  CHECK(gradient_energy(r2, g, mask) == doctest::Approx(9.0 * e1).epsilon(1e-12));
}

TEST_CASE("gradient_energy: periodic translation invariance") {
  GridSpec g = unit_grid(32, true);
  DomainMask mask = build_mask(g, FullBox{});
  std::mt19937_64 rng(5);
  ScalarField f(g.node_count());
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  ScalarField shifted(g.node_count());
  for (int y = 0; y < g.m; ++y)
    for (int x = 0; x < g.m; ++x)
      shifted[g.index((x + 1) % g.m, y)] = f[g.index(x, y)];
  double e0 = gradient_energy(f, g, mask);
  double e1 = gradient_energy(shifted, g, mask);
  CHECK(e1 == doctest::Approx(e0).epsilon(1e-12));
}

TEST_CASE("lp_power: constants and indicator idempotence") {
  GridSpec g = unit_grid(41);
  DomainMask mask = build_mask(g, FullBox{});
  ScalarField ones(g.node_count(), 1.0);
  CHECK(lp_power(ones, 4.0, g, mask) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp_power(ones, 2.7, g, mask) == doctest::Approx(1.0).epsilon(1e-14));

  ScalarField half_const(g.node_count(), 0.5);
  CHECK(lp_power(half_const, 4.0, g, mask) == doctest::Approx(0.0625).epsilon(1e-14));

  ScalarField ind(g.node_count());
  for (std::size_t i = 0; i < ind.size(); ++i) ind[i] = g.coords(i)[0] <= 0.5 ? 1.0 : 0.0;
  CHECK(lp_power(ind, 4.0, g, mask) == doctest::Approx(integrate(ind, g, mask)).epsilon(1e-14));

  std::mt19937_64 rng(7);
  ScalarField r(g.node_count());
  for (auto& v : r) v = double(rng() >> 11) * 0x1.0p-53;
  double base = lp_power(r, 3.0, g, mask);
  ScalarField r2 = r;
  for (auto& v : r2) v *= 2.0;
  CHECK(lp_power(r2, 3.0, g, mask) == doctest::Approx(8.0 * base).epsilon(1e-12));
}

TEST_CASE("refine: constants, affine reproduction, shared nodes") {
  GridSpec g = unit_grid(12);
  ScalarField c(g.node_count(), 0.7);
  ScalarField rc = refine(c, g);
  GridSpec fine = refined(g);
  for (double v : rc) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));

  ScalarField fx = from_fn(g, [](double x, double) { return x; });
  ScalarField rfx = refine(fx, g);
  for (std::size_t i = 0; i < rfx.size(); ++i)
    CHECK(rfx[i] == doctest::Approx(fine.coords(i)[0]).epsilon(1e-13));

  // corners are the only locations shared between the m and 2m node grids
  std::mt19937_64 rng(23);
  ScalarField r(g.node_count());
  for (auto& v : r) v = double(rng() >> 11) * 0x1.0p-53;
  ScalarField rr = refine(r, g);
  CHECK(rr.front() == doctest::Approx(r.front()).epsilon(1e-15));
  CHECK(rr[fine.index(fine.m - 1, 0)] == doctest::Approx(r[g.index(g.m - 1, 0)]).epsilon(1e-13));
  CHECK(rr.back() == doctest::Approx(r.back()).epsilon(1e-13));
}

TEST_CASE("refine then restrict is the identity on periodic grids") {
  GridSpec g = unit_grid(16, true);
  std::mt19937_64 rng(29);
  ScalarField f(g.node_count());
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  ScalarField ff = refine(f, g);
  GridSpec fine = refined(g);
  // periodic fine nodes at even indices coincide with the coarse nodes
  for (int y = 0; y < g.m; ++y)
    for (int x = 0; x < g.m; ++x)
      CHECK(ff[fine.index(2 * x, 2 * y)] == doctest::Approx(f[g.index(x, y)]).epsilon(1e-14));
}

TEST_CASE("refine rebuilds the mask on the fine grid") {
  GridSpec g = unit_grid(20);
  Shape disk = make_disk(0.4, {0.5, 0.5});
  DomainMask mask = build_mask(g, disk);
  ScalarField f(g.node_count(), 1.0);
  apply_mask(f, mask);
  ScalarField ff = refine(f, g);
  GridSpec fine = refined(g);
  DomainMask fine_mask = build_mask(fine, disk);
  apply_mask(ff, fine_mask);
  for (std::size_t i = 0; i < ff.size(); ++i)
    if (!fine_mask.inside[i]) CHECK(ff[i] == 0.0);
}

TEST_CASE("field dump round trip and csv") {
  GridSpec g = unit_grid(9);
  std::mt19937_64 rng(31);
  ScalarField f(g.node_count());
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  auto tmp = std::filesystem::temp_directory_path() / "cheegerpack_grid_test.f64";
  write_field_f64(tmp.string(), f, g);
  GridSpec g2;
  ScalarField f2 = read_field_f64(tmp.string(), &g2);
  CHECK(g2.dim == g.dim);
  CHECK(g2.m == g.m);
  REQUIRE(f2.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i] == f[i]);
  std::filesystem::remove(tmp);

  auto csv = std::filesystem::temp_directory_path() / "cheegerpack_grid_test.csv";
  write_field_csv(csv.string(), f, g);
  CHECK(std::filesystem::file_size(csv) > 0);
  std::filesystem::remove(csv);
}

TEST_CASE("grid validation") {
  GridSpec g = unit_grid(3);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.m = 8;
  g.dim = 4;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g.dim = 2;
  ScalarField wrong(5, 0.0);
  DomainMask mask = build_mask(unit_grid(8), FullBox{});
  CHECK_THROWS_AS(integrate(wrong, unit_grid(8), mask), std::invalid_argument);
}
