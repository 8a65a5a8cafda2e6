#include "bubbly/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace bubbly {

double cell_epsilon(const ExperimentConfig& config, double delta) {
  const double eps = delta * config.shape().diameter;
  if (config.epsilon_rule == EpsilonRule::Exact) return eps;
  const Vec3 ext = config.domain.bounding_box().extent();
  const double L = std::min({ext.x, ext.y, ext.z});
  const double n = std::max(1.0, std::round(L / std::cbrt(eps)));
  const double a = L / n;
  return a * a * a;
}

ComparisonResult run_comparison(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  ComparisonResult result;
  result.probes = config.resolved_probes();
  result.scatter_scale = 1.0 / (4.0 * kPi);
  const ShapeConstants shape = config.shape();
  const PointSource src = config.point_source();
  const MinnaertCoefficient mc = minnaert_h(config.medium, shape);
  const double b_bar = scattering_b(config.medium, shape);

  for (double delta : config.deltas) {
    const auto t0 = std::chrono::steady_clock::now();
    DeltaRun run;
    run.delta = delta;
    try {
      run.eps = cell_epsilon(config, delta);
      const CellPartition part = partition_domain(config.domain, run.eps);
      const BubbleCloud cloud = place_bubbles(part, config.kfield, delta, shape, {config.seed, config.jitter});
      const CloudStats st = cloud_stats(cloud);
      run.M = st.M;
      run.d = st.d;
      const CouplingSystem sys = coupling_matrix(cloud, config.medium);
      run.conditions = check_conditions(sys, cloud, config.medium, config.lambda1);
      for (const auto& row : run.conditions.rows) {
        if (!row.pass) run.annotations.push_back("condition " + row.id + " fails (margin " + format_double(row.margin) + ")");
      }
      run.h = config.h > 0.0 ? config.h : default_time_step(sys.tau_min, config.pulse.support, sys.min_hbar());
      const TimeGrid tg{config.t_end, run.h};
      run.steps = tg.steps();
      const double cost = static_cast<double>(run.M) * static_cast<double>(run.M) * static_cast<double>(run.steps);
      if (cost > config.budget) {
        run.skipped = true;
        run.annotations.push_back("skipped: predicted cost " + format_double(cost) + " exceeds budget");
        result.runs.push_back(std::move(run));
        continue;
      }
      run.times.resize(tg.nodes());
      for (std::size_t n = 0; n < tg.nodes(); ++n) run.times[n] = tg.time(n);
      const std::size_t P = result.probes.size();
      run.u_s.assign(P, std::vector<double>(run.times.size(), 0.0));
      run.w_s.assign(P, std::vector<double>(run.times.size(), 0.0));
      if (config.solve_bubbles) {
        const TrajectorySet traj = solve_coupled(sys, cloud, src, tg);
        for (std::size_t p = 0; p < P; ++p) run.u_s[p] = scattered_series(traj, sys, cloud, result.probes[p], run.times);
      }
      if (config.solve_effective) {
        run.b_eff = 4.0 * kPi * b_bar * delta / run.eps * config.effective.b_scale;
        EffectiveGrid grid;
        if (config.effective.refine == 1) {
          grid = grid_from_partition(part, config.kfield, run.b_eff, config.medium.c0());
          std::vector<long> counts(cloud.cell_count());
          for (std::size_t m = 0; m < counts.size(); ++m) counts[m] = cloud.cell_begin[m + 1] - cloud.cell_begin[m];
          grid.set_kappa(std::move(counts));
        } else {
          grid = build_grid(config.domain, config.kfield, part.edge / config.effective.refine, run.b_eff,
                            config.medium.c0());
        }
        const FieldHistory hist = solve_ls_time(grid, mc.hbar, src, tg);
        for (std::size_t p = 0; p < P; ++p)
          run.w_s[p] = effective_scattered_series(hist, grid, result.probes[p], run.times, 0, result.scatter_scale);
      }
      for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t n = 0; n < run.times.size(); ++n)
          run.e_max = std::max(run.e_max, std::abs(run.u_s[p][n] - run.w_s[p][n]));
        run.e_l2 = std::max(run.e_l2, relative_l2(run.w_s[p], run.u_s[p]));
      }
    } catch (const Error& e) {
      throw Error("delta = " + format_double(delta) + ": " + e.what());
    }
    run.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log) {
      *log << "delta=" << format_double(run.delta) << " M=" << run.M << " eps=" << format_double(run.eps)
           << " h=" << format_double(run.h) << " e_max=" << format_double(run.e_max)
           << " e_l2=" << format_double(run.e_l2) << " runtime_s=" << run.runtime_s << '\n';
      for (const auto& a : run.annotations) *log << "  note: " << a << '\n';
    }
    result.runs.push_back(std::move(run));
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : result.runs)
    if (!r.skipped && r.e_max > 0.0) pts.emplace_back(r.delta, r.e_max);
  if (pts.size() >= 2) result.fit = fit_rate(pts);
  return result;
}

LineFit fit_rate(std::span<const std::pair<double, double>> errors) {
  std::vector<double> x, y;
  for (const auto& [d, e] : errors) {
    if (d > 0.0 && e > 0.0) {
      x.push_back(std::log(d));
      y.push_back(std::log(e));
    }
  }
  if (x.size() < 2) throw Error("fit_rate: need at least two positive points");
  return least_squares_line(x, y);
}

namespace {

double corner_term(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  auto xlog = [&](double coef, double a) {
    if (coef == 0.0) return 0.0;
    const double arg = a + r;
    return arg > 0.0 ? coef * std::log(arg) : 0.0;
  };
  auto xatan = [&](double a, double num) {
    if (a == 0.0) return 0.0;
    return 0.5 * a * a * std::atan(num / (a * r));
  };
  return xlog(y * z, x) + xlog(x * z, y) + xlog(x * y, z) - xatan(x, y * z) - xatan(y, x * z) - xatan(z, x * y);
}

}  // namespace

double box_newton_potential(const Box3& box, const Vec3& x) {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double u = (a ? box.hi.x : box.lo.x) - x.x;
        const double v = (b ? box.hi.y : box.lo.y) - x.y;
        const double w = (c ? box.hi.z : box.lo.z) - x.z;
        const double sign = ((a + b + c) % 2 == 1) ? 1.0 : -1.0;
        acc += sign * corner_term(u, v, w);
      }
  return acc;
}

GapDiagnostics discretization_gap(const BubbleCloud& cloud, const EffectiveGrid& grid, std::span<const Vec3> probes) {
  if (cloud.cell_count() != grid.size()) throw Error("discretization_gap: cloud and grid partitions differ");
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const Box3& a = cloud.cell_boxes[m];
    const Box3& b = grid.lattice.cells[m].box;
    if (distance(a.lo, b.lo) > 1e-12 || distance(a.hi, b.hi) > 1e-12)
      throw Error("discretization_gap: cloud and grid partitions differ");
  }
  GapDiagnostics g;
  const double eps = grid.voxel_volume;
  const Domain& dom = grid.lattice.domain;
  for (const Vec3& x : probes) {
    double cells = 0.0, mid = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      cells += box_newton_potential(grid.lattice.cells[m].box, x);
      mid += eps / distance(x, grid.centroid(m));
    }
    double whole;
    if (dom.kind == DomainKind::Box) {
      whole = box_newton_potential(dom.box, x);
    } else {
      const double R = dom.radius;
      const double r = distance(x, dom.center);
      whole = r >= R ? 4.0 * kPi * R * R * R / (3.0 * r) : 2.0 * kPi * (R * R - r * r / 3.0);
    }
    g.e1 = std::max(g.e1, std::abs(whole - cells) / (4.0 * kPi));
    g.e3 = std::max(g.e3, std::abs(mid - cells) / (4.0 * kPi));
  }
  const double r_sol = std::cbrt(3.0 / (4.0 * kPi)) * std::cbrt(eps);
  g.e2_formula = 2.0 * kPi * r_sol * r_sol + (eps - 4.0 * kPi * r_sol * r_sol * r_sol / 3.0) / r_sol;
  {
    const QuadratureRule rule = gauss_legendre(16, 0.0, r_sol);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * 4.0 * kPi * rule.nodes[i];
    g.e2_ball = acc;
  }
  {
    const double a = std::cbrt(eps);
    g.e2_cube = box_newton_potential({{0.0, 0.0, 0.0}, {a, a, a}}, {0.5 * a, 0.5 * a, 0.5 * a});
  }
  const std::size_t N = cloud.cell_count();
  for (std::size_t j = 0; j < N; ++j) {
    const int first = cloud.cell_begin[j];
    if (first == cloud.cell_begin[j + 1]) continue;
    const Vec3 xj = cloud.bubbles[first].center;
    CompensatedSum disc, cont;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud.bubbles[i].cell == static_cast<int>(j)) continue;
      disc.add(1.0 / distance(xj, cloud.bubbles[i].center));
    }
    for (std::size_t m = 0; m < N; ++m) {
      const double count = static_cast<double>(cloud.cell_begin[m + 1] - cloud.cell_begin[m]);
      cont.add(count * box_newton_potential(cloud.cell_boxes[m], xj));
    }
    g.local_gap = std::max(g.local_gap, std::abs(disc.value() / static_cast<double>(N) - cont.value()));
  }
  return g;
}

}  // namespace bubbly
