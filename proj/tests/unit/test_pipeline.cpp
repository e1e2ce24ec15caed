#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "core/errors.hpp"
#include "core/pipeline.hpp"

using namespace cheegerpack;

TEST_CASE("init_random: determinism, bounds, rescale, mask zeros") {
  GridSpec g;
  g.dim = 2;
  g.m = 24;
  g.extent = {1, 1, 1};
  Shape disk = make_disk(0.4, {0.5, 0.5});
  DomainMask mask = build_mask(g, disk);

  PhaseSystem a = init_random(g, mask, 3, 42);
  PhaseSystem b = init_random(g, mask, 3, 42);
  PhaseSystem c = init_random(g, mask, 3, 43);
  bool differs = false;
  for (int i = 0; i < 3; ++i)
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      CHECK(a.phases[i][n] == b.phases[i][n]);
      differs |= a.phases[i][n] != c.phases[i][n];
    }
  CHECK(differs);

  for (std::size_t n = 0; n < g.node_count(); ++n) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
      CHECK(a.phases[i][n] >= 0.0);
      CHECK(a.phases[i][n] <= 1.0);
      s += a.phases[i][n];
      if (!mask.inside[n]) CHECK(a.phases[i][n] == 0.0);
    }
    CHECK(s <= 1.0 + 1e-14);
  }
}

TEST_CASE("config: json round trip and validation errors") {
  RunConfig c;
  c.k = 3;
  c.alpha = 0.8;
  c.seed = 99;
  c.domain = make_disk(0.4, {0.4, 0.4});
  auto j = c.to_json();
  RunConfig c2 = RunConfig::from_json(j);
  CHECK(c2.k == 3);
  CHECK(c2.alpha == 0.8);
  CHECK(c2.seed == 99);

  nlohmann::json bad = {{"alpha", 0.3}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(bad), doctest::Contains("alpha"), ConfigError);
  nlohmann::json bad2 = {{"objective", "nope"}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(bad2), doctest::Contains("objective"), ConfigError);
  nlohmann::json bad3 = {{"k", "many"}};
  CHECK_THROWS_WITH_AS(RunConfig::from_json(bad3), doctest::Contains("k"), ConfigError);
}

TEST_CASE("run: small square pipeline sanity") {
  RunConfig c;
  c.k = 1;
  c.alpha = 1.0;
  c.domain = make_square();
  c.m0 = 20;
  c.stages = 2;
  c.seed = 7;
  RunResult r = run(c);
  CHECK(r.stage_reports.size() == 2);
  CHECK(r.system.grid.m == 40);
  // traces nonincreasing within each pass
  for (const auto& sr : r.stage_reports) {
    for (std::size_t i = 1; i < sr.main.value_trace.size(); ++i)
      CHECK(sr.main.value_trace[i] <= sr.main.value_trace[i - 1]);
    for (std::size_t i = 1; i < sr.warm.value_trace.size(); ++i)
      CHECK(sr.warm.value_trace[i] <= sr.warm.value_trace[i - 1]);
  }
  double h = r.sharp.per_phase_h_alpha[0];
  CHECK(std::isfinite(h));
  CHECK(h > 3.0);
  CHECK(h < 5.0);  // coarse run brackets the square's Cheeger constant loosely
  // bounds hold on the final field
  for (double v : r.system.phases[0]) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("run: identical config gives identical results") {
  RunConfig c;
  c.k = 2;
  c.alpha = 1.0;
  c.domain = make_square();
  c.m0 = 16;
  c.stages = 1;
  c.seed = 11;
  RunResult r1 = run(c);
  RunResult r2 = run(c);
  REQUIRE(r1.system.phases.size() == r2.system.phases.size());
  for (std::size_t i = 0; i < r1.system.phases.size(); ++i)
    for (std::size_t n = 0; n < r1.system.phases[i].size(); ++n)
      CHECK(r1.system.phases[i][n] == r2.system.phases[i][n]);
  CHECK(r1.stage_reports[0].final_energy == r2.stage_reports[0].final_energy);
}

TEST_CASE("run: masked tetrahedron domain keeps outside nodes at zero") {
  RunConfig c;
  c.k = 1;
  c.dim = 3;
  c.alpha = 1.0;
  c.domain = make_regular_tetrahedron(1.0);
  c.m0 = 12;
  c.stages = 1;
  c.seed = 3;
  c.maxit = 200;
  RunResult r = run(c);
  for (std::size_t n = 0; n < r.system.grid.node_count(); ++n)
    if (!r.system.mask.inside[n]) CHECK(r.system.phases[0][n] == 0.0);
}

TEST_CASE("write_outputs produces the documented tree") {
  RunConfig c;
  c.k = 2;
  c.alpha = 1.0;
  c.domain = make_square();
  c.m0 = 16;
  c.stages = 1;
  c.seed = 5;
  c.maxit = 300;
  RunResult r = run(c);
  auto dir = std::filesystem::temp_directory_path() / "cheegerpack_run_test";
  std::filesystem::remove_all(dir);
  write_outputs(r, dir.string());
  for (const char* name :
       {"result.json", "phase_0.f64", "phase_0.pgm", "phase_1.pgm", "composite.pgm", "trace.csv"})
    CHECK(std::filesystem::exists(dir / name));
  GridSpec g2;
  ScalarField f = read_field_f64((dir / "phase_0.f64").string(), &g2);
  CHECK(g2.m == r.system.grid.m);
  CHECK(f == r.system.phases[0]);
  std::filesystem::remove_all(dir);
}
