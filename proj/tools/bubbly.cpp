#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bubbly/bubble_solver.hpp"
#include "bubbly/cloud_io.hpp"
#include "bubbly/coefficients.hpp"
#include "bubbly/config.hpp"
#include "bubbly/fdtd.hpp"
#include "bubbly/harness.hpp"
#include "bubbly/laplace.hpp"
#include "bubbly/ls_solver.hpp"
#include "bubbly/numerics.hpp"
#include "bubbly/outputs.hpp"

using namespace bubbly;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<double> delta;
};

/// Tracks enabled assertions; the process exit code reflects them.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << '\n';
    if (!ok) ++failed_;
  }
  int exit_code() const { return failed_ == 0 ? 0 : 1; }

 private:
  int failed_ = 0;
};

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.threads > 0) set_thread_count(c.threads);
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

std::vector<double> selected_deltas(const ExperimentConfig& cfg, const Common& c) {
  if (c.delta) return {*c.delta};
  return cfg.deltas;
}

BubbleCloud make_cloud(const ExperimentConfig& cfg, double delta) {
  const CellPartition part = partition_domain(cfg.domain, cell_epsilon(cfg, delta));
  return place_bubbles(part, cfg.kfield, delta, cfg.shape(), {cfg.seed, cfg.jitter});
}

std::vector<double> time_nodes(const TimeGrid& tg) {
  std::vector<double> t(tg.nodes());
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = tg.time(n);
  return t;
}

double ls_step(const ExperimentConfig& cfg, const EffectiveGrid& g, double hbar) {
  return cfg.h > 0.0 ? cfg.h : default_time_step(g.min_offdiag_delay(), cfg.pulse.support, hbar);
}

int cmd_generate(const Common& c) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  for (double delta : selected_deltas(cfg, c)) {
    const BubbleCloud cloud = make_cloud(cfg, delta);
    const CloudStats st = cloud_stats(cloud);
    const std::string path = out_path(cfg, "cloud_" + format_double(delta) + ".txt");
    write_cloud(path, cloud);
    std::cout << "delta=" << format_double(delta) << " M=" << st.M << " d=" << format_double(st.d)
              << " eps=" << format_double(st.epsilon) << " M*d^3=" << format_double(st.md3)
              << " d/delta^3=" << format_double(st.d_over_delta3) << " -> " << path << '\n';
    checks.expect(st.d > cloud.max_diameter(), "bubbles are disjoint at delta " + format_double(delta));
    if (!st.md3_in_band) std::cout << "  note: M d^3 outside the configured band\n";
    if (!st.d_delta3_in_band) std::cout << "  note: d / delta^3 outside the configured band\n";
  }
  return checks.exit_code();
}

int cmd_check_conditions(const Common& c) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  std::ofstream csv(out_path(cfg, "conditions.csv"));
  csv << "delta,id,lhs,rhs,margin,pass\n";
  std::cout << "lambda1 = " << format_double(cfg.lambda1) << " (user-supplied)\n";
  for (double delta : selected_deltas(cfg, c)) {
    const BubbleCloud cloud = make_cloud(cfg, delta);
    const CouplingSystem sys = coupling_matrix(cloud, cfg.medium);
    const ConditionReport rep = check_conditions(sys, cloud, cfg.medium, cfg.lambda1);
    std::cout << "delta=" << format_double(delta) << " M=" << sys.M << '\n';
    write_condition_text(std::cout, rep);
    for (const auto& r : rep.rows) {
      csv << format_double(delta) << ',' << r.id << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
          << format_double(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
      checks.expect(r.pass, r.id + " at delta " + format_double(delta));
    }
    const DominanceResult dom = check_block_dominance(block_view(sys, cloud), sys);
    std::cout << "block dominance: lhs=" << format_double(dom.lhs) << " rhs=" << format_double(dom.rhs)
              << " margin=" << format_double(dom.margin) << '\n';
    checks.expect(dom.pass, "block dominance at delta " + format_double(delta));
  }
  return checks.exit_code();
}

int cmd_solve_bubbles(const Common& c) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  const double delta = c.delta ? *c.delta : cfg.deltas.front();
  const BubbleCloud cloud = make_cloud(cfg, delta);
  const CouplingSystem sys = coupling_matrix(cloud, cfg.medium);
  const PointSource src = cfg.point_source();
  const double h = cfg.h > 0.0 ? cfg.h : default_time_step(sys.tau_min, cfg.pulse.support, sys.min_hbar());
  const TimeGrid tg{cfg.t_end, h};
  IncidentForcing forcing(src, cloud.centers());
  SolveStats stats;
  const TrajectorySet traj = solve_coupled(sys, forcing, tg, &stats);
  const double res = node_residual(sys, forcing, traj);
  const auto times = time_nodes(tg);
  std::vector<std::vector<double>> series;
  for (const Vec3& x : cfg.resolved_probes()) series.push_back(scattered_series(traj, sys, cloud, x, times));
  const std::string path = out_path(cfg, "bubbles_probes.csv");
  write_probe_csv(path, times, series);
  std::cout << "M=" << sys.M << " h=" << format_double(h) << " steps=" << stats.steps << " seconds=" << stats.seconds
            << " -> " << path << '\n';
  checks.expect(res <= 1e-8, "node residual " + format_double(res) + " <= 1e-8");
  return checks.exit_code();
}

int cmd_solve_effective(const Common& c) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  const double hbar = cfg.effective_hbar();
  const EffectiveGrid g = build_grid(cfg.domain, cfg.kfield, cfg.effective.voxel_edge, cfg.effective_b(),
                                     cfg.medium.c0());
  const TimeGrid tg{cfg.t_end, ls_step(cfg, g, hbar)};
  const PointSource src = cfg.point_source();
  std::vector<Vec3> pts;
  for (std::size_t k = 0; k < g.size(); ++k) pts.push_back(g.centroid(k));
  IncidentForcing forcing(src, pts);
  LsStats stats;
  const FieldHistory hist = solve_ls_time(g, hbar, forcing, tg, {}, &stats);
  const double res = ls_node_residual(g, hbar, forcing, hist);
  const auto times = time_nodes(tg);
  std::vector<std::vector<double>> series;
  for (const Vec3& x : cfg.resolved_probes()) series.push_back(effective_scattered_series(hist, g, x, times));
  const std::string path = out_path(cfg, "effective_probes.csv");
  write_probe_csv(path, times, series);
  std::cout << "voxels=" << g.size() << " hbar=" << format_double(hbar) << " b=" << format_double(g.b)
            << " h=" << format_double(tg.h) << " seconds=" << stats.seconds << " -> " << path << '\n';
  checks.expect(res <= 1e-8, "LS node residual " + format_double(res) + " <= 1e-8");
  return checks.exit_code();
}

int cmd_solve_fdtd(const Common& c, double tolerance) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  FdtdConfig f;
  f.domain = cfg.domain;
  f.k = cfg.kfield;
  f.c0 = cfg.medium.c0();
  f.hbar = cfg.effective_hbar();
  f.b = cfg.effective_b();
  f.src = cfg.point_source();
  f.dx = cfg.fdtd.dx;
  f.dt = cfg.fdtd.dt;
  f.t_end = cfg.fdtd.t_end;
  f.padding = cfg.fdtd.padding;
  f.probes = cfg.resolved_probes();
  const FdtdResult r = solve_fdtd(f);
  std::cout << "cells=" << r.cells << " steps=" << r.steps << " dt=" << format_double(r.dt)
            << " courant=" << format_double(r.courant) << " seconds=" << r.seconds << '\n';
  write_probe_csv(out_path(cfg, "fdtd_probes.csv"), r.times, r.probe_scattered);

  const EffectiveGrid g = build_grid(f.domain, f.k, f.dx, f.b, f.c0);
  const FieldHistory hist = solve_ls_time(g, f.hbar, f.src, TimeGrid{f.t_end, ls_step(cfg, g, f.hbar)});
  std::vector<std::vector<double>> ls;
  double worst = 0.0;
  for (std::size_t p = 0; p < f.probes.size(); ++p) {
    ls.push_back(effective_scattered_series(hist, g, f.probes[p], r.times, 0, -1.0));
    worst = std::max(worst, relative_l2(r.probe_scattered[p], ls.back()));
  }
  write_probe_csv(out_path(cfg, "fdtd_ls_probes.csv"), r.times, ls);
  checks.expect(worst <= tolerance,
                "FDTD vs LS relative L2 " + format_double(worst) + " <= " + format_double(tolerance));
  return checks.exit_code();
}

int cmd_laplace_check(const Common& c, double tolerance) {
  const ExperimentConfig cfg = load(c);
  Checks checks;
  const double hbar = cfg.effective_hbar();
  const EffectiveGrid g = build_grid(cfg.domain, cfg.kfield, cfg.effective.voxel_edge, cfg.effective_b(),
                                     cfg.medium.c0());
  const PointSource src = cfg.point_source();
  std::vector<cplx> s_list;
  for (double sg : cfg.laplace.sigmas)
    for (double om : cfg.laplace.omegas) s_list.emplace_back(sg, om);
  const auto rows = coercivity_check(laplace_oracle(g, hbar, src, s_list), g);
  std::ofstream csv(out_path(cfg, "laplace_bound.csv"));
  csv << "sigma,omega,lhs,rhs,margin,pass\n";
  for (const auto& r : rows) {
    csv << format_double(r.sigma) << ',' << format_double(r.omega) << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << format_double(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
    checks.expect(r.pass, "bound at s = " + format_double(r.sigma) + " + " + format_double(r.omega) + "i");
  }
  const LaplaceSection& L = cfg.laplace;
  const auto samples = laplace_oracle(g, hbar, src, bromwich_nodes(L.bromwich_sigma, L.bromwich_dw, L.bromwich_count));
  const TimeGrid tg{cfg.t_end, ls_step(cfg, g, hbar)};
  const FieldHistory hist = solve_ls_time(g, hbar, src, tg);
  const auto times = time_nodes(tg);
  for (const Vec3& x : cfg.resolved_probes()) {
    std::vector<cplx> F;
    for (const auto& s : samples) F.push_back(laplace_probe(s, g, x, 0));
    const auto inv = bromwich_invert(F, L.bromwich_sigma, L.bromwich_dw, times);
    const double e = relative_l2(inv, effective_scattered_series(hist, g, x, times));
    checks.expect(e <= tolerance, "Bromwich vs LS relative L2 " + format_double(e) + " <= " + format_double(tolerance));
  }
  return checks.exit_code();
}

int cmd_compare(const Common& c, bool sweep) {
  ExperimentConfig cfg = load(c);
  Checks checks;
  if (!sweep) cfg.deltas = {c.delta ? *c.delta : cfg.deltas.front()};
  const ComparisonResult res = run_comparison(cfg, &std::cout);
  for (const auto& p : emit_outputs(res, cfg.output_dir)) std::cout << "wrote " << p << '\n';
  for (const auto& r : res.runs) checks.expect(!r.skipped, "delta " + format_double(r.delta) + " solved");
  if (!sweep) return checks.exit_code();
  if (cfg.require_decreasing) {
    bool dec = true;
    for (std::size_t i = 1; i < res.runs.size(); ++i)
      if (!(res.runs[i].e_max < res.runs[i - 1].e_max)) dec = false;
    checks.expect(dec, "error strictly decreasing in delta");
  }
  if (res.fit) {
    checks.expect(res.fit->slope >= cfg.min_slope,
                  "fitted slope " + format_double(res.fit->slope) + " >= " + format_double(cfg.min_slope));
  } else {
    checks.expect(false, "rate fit needs at least two solved deltas");
  }
  return checks.exit_code();
}

void add_common(CLI::App* sub, Common& c, bool with_delta) {
  sub->add_option("--config", c.config, "YAML configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (overrides output_dir)");
  sub->add_option("--seed", c.seed, "Placement seed (overrides sweep.seed)");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  if (with_delta) sub->add_option("--delta", c.delta, "Single delta instead of the configured list");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bubbly-medium discrete and effective acoustic solvers"};
  app.require_subcommand(1);
  Common common;
  double fdtd_tol = 0.10;
  double laplace_tol = 0.05;

  auto* gen = app.add_subcommand("generate", "Place bubble clouds and write them to disk");
  add_common(gen, common, true);
  auto* cond = app.add_subcommand("check-conditions", "Evaluate the sufficient conditions for each delta");
  add_common(cond, common, true);
  auto* sb = app.add_subcommand("solve-bubbles", "Solve the delay-coupled bubble system");
  add_common(sb, common, true);
  auto* se = app.add_subcommand("solve-effective", "Solve the voxelized effective equation in time");
  add_common(se, common, false);
  auto* sf = app.add_subcommand("solve-fdtd", "Solve the dispersive PDE and compare with the effective solver");
  add_common(sf, common, false);
  sf->add_option("--tolerance", fdtd_tol, "Relative L2 tolerance against the effective solver");
  auto* lc = app.add_subcommand("laplace-check", "Laplace-domain bound and Bromwich cross-check");
  add_common(lc, common, false);
  lc->add_option("--tolerance", laplace_tol, "Relative L2 tolerance of the Bromwich cross-check");
  auto* cmp = app.add_subcommand("compare", "Discrete versus effective comparison at one delta");
  add_common(cmp, common, true);
  auto* sw = app.add_subcommand("sweep", "Comparison over the delta list with rate assertions");
  add_common(sw, common, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(common);
    if (cond->parsed()) return cmd_check_conditions(common);
    if (sb->parsed()) return cmd_solve_bubbles(common);
    if (se->parsed()) return cmd_solve_effective(common);
    if (sf->parsed()) return cmd_solve_fdtd(common, fdtd_tol);
    if (lc->parsed()) return cmd_laplace_check(common, laplace_tol);
    if (cmp->parsed()) return cmd_compare(common, false);
    if (sw->parsed()) return cmd_compare(common, true);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
