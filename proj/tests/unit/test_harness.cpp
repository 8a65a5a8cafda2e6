#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "bubbly/config.hpp"
#include "bubbly/harness.hpp"
#include "bubbly/outputs.hpp"

using namespace bubbly;

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("bubbly_test_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

ExperimentConfig quick_config() {
  ExperimentConfig c = parse_config(R"(
sweep:
  deltas: [8.0e-3]
time:
  h: 0.02
  t_end: 6.0
)");
  return c;
}

}  // namespace

TEST_CASE("rate fit recovers known slopes") {
  std::vector<std::pair<double, double>> line{{1e-2, 2e-2}, {5e-3, 1e-2}, {2.5e-3, 5e-3}};
  CHECK(fit_rate(line).slope == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<std::pair<double, double>> third;
  for (double d : {8e-3, 4e-3, 2e-3, 1e-3}) third.emplace_back(d, 0.7 * std::cbrt(d));
  CHECK(std::abs(fit_rate(third).slope - 1.0 / 3.0) <= 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<std::pair<double, double>> noisy;
  for (double d : {8e-3, 4e-3, 2e-3, 1e-3, 5e-4}) noisy.emplace_back(d, std::cbrt(d) * std::exp(noise(rng)));
  const double s = fit_rate(noisy).slope;
  CHECK(s >= 0.28);
  CHECK(s <= 0.39);

  std::vector<std::pair<double, double>> one{{1e-2, 1.0}};
  CHECK_THROWS_AS(fit_rate(one), Error);
}

TEST_CASE("box potential matches the cube constant, the far field and sampling") {
  const Box3 unit{{0, 0, 0}, {1, 1, 1}};
  CHECK(box_newton_potential(unit, {0.5, 0.5, 0.5}) == doctest::Approx(2.3800772).epsilon(1e-7));
  CHECK(box_newton_potential(unit, {10.0, 0.5, 0.5}) == doctest::Approx(1.0 / 9.5).epsilon(1e-3));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 x{1.3, -0.2, 0.4};
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += 1.0 / distance(x, {u(rng), u(rng), u(rng)});
  CHECK(box_newton_potential(unit, x) == doctest::Approx(acc / n).epsilon(2e-3));

  // scaling: potential of a cube of edge a at its centre is a^2 times the unit value
  const Box3 small{{0, 0, 0}, {0.25, 0.25, 0.25}};
  CHECK(box_newton_potential(small, {0.125, 0.125, 0.125}) == doctest::Approx(2.3800772 / 16.0).epsilon(1e-7));
}

TEST_CASE("discretization diagnostics on the unit cube") {
  const std::vector<Vec3> probes = automatic_probes(Domain::unit_cube(), {-1.0, 0.5, 0.5});
  std::vector<double> gaps;
  for (int n : {2, 4, 8}) {
    const double eps = 1.0 / (n * n * n);
    const CellPartition part = partition_domain(Domain::unit_cube(), eps);
    const BubbleCloud cloud = place_bubbles(part, KField::constant(0.0), 1e-3, make_sphere(1.0));
    const EffectiveGrid grid = grid_from_partition(part, KField::constant(0.0), 1.0, 1.0);
    const GapDiagnostics g = discretization_gap(cloud, grid, probes);
    CHECK(g.e1 <= 1e-12);
    CHECK(g.e2_formula == doctest::Approx(g.e2_ball).epsilon(0.01));
    CHECK(g.e2_cube == doctest::Approx(g.e2_ball).epsilon(0.02));
    CHECK(g.e3 > 0.0);
    gaps.push_back(g.local_gap);
  }
  MESSAGE("local gaps " << gaps[0] << " " << gaps[1] << " " << gaps[2]);
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
}

TEST_CASE("snapped cell volume divides the domain") {
  ExperimentConfig c;
  CHECK(cell_epsilon(c, 8e-3) == doctest::Approx(1.0 / 64.0).epsilon(1e-14));
  c.epsilon_rule = EpsilonRule::Exact;
  CHECK(cell_epsilon(c, 8e-3) == doctest::Approx(8e-3 * c.shape().diameter).epsilon(1e-14));
}

TEST_CASE("comparison with zero effective coupling and no bubble solve is identically zero") {
  ExperimentConfig c = quick_config();
  c.solve_bubbles = false;
  c.effective.b_scale = 0.0;
  const ComparisonResult r = run_comparison(c);
  REQUIRE(r.runs.size() == 1);
  CHECK(r.runs[0].e_max == 0.0);
  CHECK_FALSE(r.fit.has_value());
}

TEST_CASE("single-delta comparison runs both solvers and reports no fit") {
  const ExperimentConfig c = quick_config();
  std::ostringstream log;
  const ComparisonResult r = run_comparison(c, &log);
  REQUIRE(r.runs.size() == 1);
  const DeltaRun& run = r.runs[0];
  CHECK(run.M == 64);
  CHECK(run.e_max > 0.0);
  CHECK(run.u_s.size() == r.probes.size());
  CHECK(run.w_s[0].size() == run.times.size());
  CHECK_FALSE(run.conditions.rows.empty());
  CHECK_FALSE(r.fit.has_value());
  CHECK(log.str().find("delta=") != std::string::npos);
}

TEST_CASE("budget guard skips expensive runs") {
  ExperimentConfig c = quick_config();
  c.budget = 10.0;
  const ComparisonResult r = run_comparison(c);
  REQUIRE(r.runs.size() == 1);
  CHECK(r.runs[0].skipped);
  CHECK_FALSE(r.runs[0].annotations.empty());
}

TEST_CASE("outputs: header-only, row count and round-trip") {
  ComparisonResult empty;
  const std::string d0 = temp_dir("empty");
  const auto files = emit_outputs(empty, d0);
  CHECK(files.size() == 3);
  CHECK(count_lines(d0 + "/errors.csv") == 1);
  CHECK(read_errors_csv(d0 + "/errors.csv").empty());

  ComparisonResult res;
  res.probes = {{2, 0, 0}};
  for (double d : {8e-3, 4e-3, 2e-3, 1e-3}) {
    DeltaRun run;
    run.delta = d;
    run.M = static_cast<std::size_t>(1.0 / d);
    run.d = 0.1234567890123;
    run.eps = d * 2.0;
    run.e_max = std::sqrt(d) / 3.0;
    run.e_l2 = d / 7.0;
    run.runtime_s = 0.5;
    run.times = {0.0, 0.1};
    run.u_s = {{0.0, 1.0 / 3.0}};
    run.w_s = {{0.0, 2.0 / 3.0}};
    res.runs.push_back(run);
  }
  const std::string d1 = temp_dir("rows");
  emit_outputs(res, d1);
  const auto rows = read_errors_csv(d1 + "/errors.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].delta == res.runs[i].delta);
    CHECK(rows[i].M == res.runs[i].M);
    CHECK(rows[i].d == res.runs[i].d);
    CHECK(rows[i].e_max == res.runs[i].e_max);
    CHECK(rows[i].e_l2 == res.runs[i].e_l2);
  }
  CHECK(count_lines(d1 + "/probes_0.csv") == 3);
  CHECK(count_lines(d1 + "/plot_data.csv") == 5);
}

TEST_CASE("configuration parsing and validation") {
  const ExperimentConfig c = parse_config(R"(
domain: {kind: box, lo: [0, 0, 0], hi: [1, 1, 1]}
kfield: {kind: linear, base: 1.5, gradient: [1, 0, 0]}
pulse: {kind: carrier, support: 3.0, omega0: 4.0}
source: [-2, 0.5, 0.5]
probes: [[3, 0.5, 0.5]]
sweep: {deltas: [4.0e-3, 2.0e-3], lambda1: 0.3333333333333333, seed: 9}
effective: {refine: 2, b_scale: 1.5}
)");
  CHECK(c.kfield.kind == KKind::Linear);
  CHECK(c.pulse.kind == PulseKind::WindowedCarrier);
  CHECK(c.pulse.support == 3.0);
  CHECK_FALSE(c.auto_probes);
  CHECK(c.resolved_probes().size() == 1);
  CHECK(c.deltas.size() == 2);
  CHECK(c.seed == 9);
  CHECK(c.effective.refine == 2);

  CHECK_THROWS_AS(parse_config("sweep: {deltas: [1.0e-3, 2.0e-3]}"), Error);
  CHECK_THROWS_AS(parse_config("source: [0.5, 0.5, 0.5]"), Error);
  CHECK_THROWS_AS(parse_config("probes: [[0.5, 0.5, 0.5]]"), Error);
  CHECK_THROWS_AS(parse_config("domain: {kind: torus}"), Error);
  CHECK_THROWS_AS(parse_config("source: [1, 2]"), Error);
  CHECK_THROWS_AS(parse_config("sweep: {epsilon_rule: round}"), Error);
  CHECK_THROWS_AS(parse_config("effective: {refine: 0}"), Error);
  CHECK_THROWS_AS(parse_config("pulse: {support: -1}"), Error);
  CHECK_THROWS_AS(parse_config("a: [unclosed"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), Error);
}

TEST_CASE("shipped configuration files load") {
  const std::filesystem::path dir = std::filesystem::path(BUBBLY_SOURCE_DIR) / "configs";
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++n;
  }
  CHECK(n >= 2);
}

TEST_CASE("automatic probes surround the domain away from the source") {
  const Domain d = Domain::unit_cube();
  const Vec3 src{-1.0, 0.5, 0.5};
  const auto probes = automatic_probes(d, src);
  REQUIRE(probes.size() == 6);
  const double R = 2.0 * d.circumradius();
  for (const Vec3& p : probes) {
    CHECK(distance(p, d.centroid()) == doctest::Approx(R).epsilon(1e-14));
    CHECK(d.distance_to(p) > 0.0);
    CHECK(dot(p - d.centroid(), src - d.centroid()) <= 0.0);
  }
  const auto ball = automatic_probes(Domain::unit_volume_ball(), {0.5, 0.5, 3.0});
  CHECK(ball.size() == 6);
  for (const Vec3& p : ball) CHECK(p.z <= 0.5 + 1e-12 + 2.0 * Domain::unit_volume_ball().circumradius() / std::sqrt(3.0));
}
