#include "bubbly/bubble_solver.hpp"

#include <algorithm>
#include <cmath>

#include "bubbly/numerics.hpp"

namespace bubbly {

IncidentForcing::IncidentForcing(const PointSource& src, std::vector<Vec3> points)
    : src_(src), points_(std::move(points)) {}

void IncidentForcing::evaluate(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < points_.size(); ++i) out[i] = incident_field(src_, points_[i], t, 2);
}

double IncidentForcing::onset(std::size_t i) const { return distance(points_[i], src_.location) / src_.c0; }

FunctionForcing::FunctionForcing(std::size_t size, std::function<double(std::size_t, double)> fn)
    : size_(size), fn_(std::move(fn)) {}

void FunctionForcing::evaluate(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < size_; ++i) out[i] = fn_(i, t);
}

double default_time_step(double tau_min, double pulse_support, double min_hbar) {
  double h = std::min(pulse_support / 200.0, 2.0 * kPi * std::sqrt(min_hbar) / 40.0);
  if (std::isfinite(tau_min)) h = std::min(h, tau_min);
  return h;
}

namespace {

/// Earliest time each trajectory can be non-zero: min over k of onset_k + tau_jk.
std::vector<double> support_onsets(const CouplingSystem& sys, const Forcing& forcing) {
  std::vector<double> a(sys.M);
  for (std::size_t j = 0; j < sys.M; ++j) {
    double best = forcing.onset(j);
    for (std::size_t k = 0; k < sys.M; ++k)
      if (k != j) best = std::min(best, forcing.onset(k) + sys.tau_at(j, k));
    a[j] = std::max(best, 0.0);
  }
  return a;
}

class CoupledProblem final : public DelayProblem {
 public:
  CoupledProblem(const CouplingSystem& sys, const Forcing& forcing, double h)
      : sys_(sys), forcing_(forcing), h_(h), inv_h_(1.0 / h), quiet_(support_onsets(sys, forcing)) {}

  std::size_t size() const override { return sys_.M; }

  void forcing(double t, std::span<double> out) const override { forcing_.evaluate(t, out); }

  void delayed(const History& hist, std::size_t n, double c, std::span<double> out) const override {
    const std::size_t M = sys_.M;
    const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < M; ++i) {
      CompensatedSum acc;
      const double* q = sys_.q.data() + i * M;
      const double* tau = sys_.tau.data() + i * M;
      for (std::size_t j = 0; j < M; ++j) {
        if (j == i || q[j] == 0.0) continue;
        // Y_j vanishes identically up to quiet_[j]; skip so stencils cannot leak across the front
        if ((static_cast<double>(n) + c) * h_ - tau[j] <= quiet_[j]) continue;
        const DelayStencil s = delay_stencil(c - tau[j] * inv_h_);
        if (nl + s.base + 3 < 0) continue;
        acc.add(q[j] * hist.apply(j, n, s));
      }
      out[i] = acc.value();
    }
  }

  void accelerate(const History&, std::size_t, double, bool, std::span<const double> rhs,
                  std::span<double> acc) const override {
    for (std::size_t i = 0; i < sys_.M; ++i) acc[i] = rhs[i] / sys_.hbar[i];
  }

 private:
  const CouplingSystem& sys_;
  const Forcing& forcing_;
  double h_;
  double inv_h_;
  std::vector<double> quiet_;
};

}  // namespace

TrajectorySet solve_coupled(const CouplingSystem& system, const Forcing& forcing, const TimeGrid& grid,
                            SolveStats* stats) {
  grid.validate();
  if (forcing.size() != system.M) throw Error("solve_coupled: forcing size differs from the system size");
  if (system.M >= 2 && grid.h > system.tau_min * (1.0 + 1e-12)) {
    throw Error("solve_coupled: step " + format_double(grid.h) + " exceeds the minimum delay " +
                format_double(system.tau_min));
  }
  CoupledProblem problem(system, forcing, grid.h);
  MarchStats ms;
  TrajectorySet out = march(problem, grid, &ms);
  if (stats) {
    stats->steps = ms.steps;
    stats->seconds = ms.seconds;
  }
  return out;
}

TrajectorySet solve_coupled(const CouplingSystem& system, const BubbleCloud& cloud, const PointSource& src,
                            const TimeGrid& grid, SolveStats* stats) {
  IncidentForcing forcing(src, cloud.centers());
  return solve_coupled(system, forcing, grid, stats);
}

double node_residual(const CouplingSystem& system, const Forcing& forcing, const TrajectorySet& trajs) {
  const std::size_t M = system.M;
  const std::size_t N = trajs.nodes();
  const double h = trajs.h();
  std::vector<double> f(M);
  const std::vector<double> quiet = support_onsets(system, forcing);
  double fmax = 0.0, rmax = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const double t = h * static_cast<double>(n);
    forcing.evaluate(t, f);
    for (std::size_t i = 0; i < M; ++i) {
      fmax = std::max(fmax, std::abs(f[i]));
      CompensatedSum d;
      for (std::size_t j = 0; j < M; ++j) {
        if (j == i || system.q_at(i, j) == 0.0) continue;
        const double ts = t - system.tau_at(i, j);
        if (ts <= quiet[j]) continue;
        d.add(system.q_at(i, j) * trajs.value(j, ts, 2, n == 0 ? 0 : n - 1));
      }
      const double r = system.hbar[i] * trajs.A(i)[n] + trajs.Y(i)[n] + d.value() - f[i];
      rmax = std::max(rmax, std::abs(r));
    }
  }
  return fmax > 0.0 ? rmax / fmax : rmax;
}

double scattered_field(const TrajectorySet& trajs, const CouplingSystem& system, const BubbleCloud& cloud,
                       const Vec3& x, double t) {
  if (cloud.domain.bounding_box().contains(x)) throw Error("scattered_field: probe lies inside the cloud region");
  CompensatedSum acc;
  for (std::size_t i = 0; i < system.M; ++i) {
    const double r = distance(x, cloud.bubbles[i].center);
    const double ts = t - r / system.c0;
    if (ts <= 0.0) continue;
    acc.add(system.b(i) / (4.0 * kPi * r) * trajs.value(i, ts, 0));
  }
  return acc.value();
}

std::vector<double> scattered_series(const TrajectorySet& trajs, const CouplingSystem& system,
                                     const BubbleCloud& cloud, const Vec3& x, std::span<const double> times) {
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out[k] = scattered_field(trajs, system, cloud, x, times[k]);
  return out;
}

BlockSystemView block_view(const CouplingSystem& system, const BubbleCloud& cloud) {
  if (cloud.cell_begin.size() < 2) throw Error("block_view: cloud has no cell ownership");
  BlockSystemView v;
  v.cells = cloud.cell_begin.size() - 1;
  v.members.resize(v.cells);
  for (std::size_t i = 0; i < cloud.size(); ++i) v.members[cloud.bubbles[i].cell].push_back(i);
  v.diag.resize(v.cells);
  v.representative.resize(v.cells);
  v.coupling.assign(v.cells, std::vector<std::vector<double>>(v.cells));
  CompensatedSum intra;
  for (std::size_t m = 0; m < v.cells; ++m) {
    const auto& rows = v.members[m];
    v.max_block = std::max(v.max_block, rows.size());
    for (std::size_t a : rows) v.diag[m].push_back(system.hbar[a]);
    if (!rows.empty()) v.representative[m] = cloud.bubbles[rows.front()].center;
    for (std::size_t a : rows)
      for (std::size_t b : rows)
        if (a != b) intra.add(system.q_at(a, b));
    for (std::size_t j = 0; j < v.cells; ++j) {
      if (j == m) continue;
      const auto& cols = v.members[j];
      auto& blk = v.coupling[m][j];
      blk.reserve(rows.size() * cols.size());
      for (std::size_t a : rows)
        for (std::size_t b : cols) blk.push_back(system.q_at(a, b));
    }
  }
  v.intra_cell_sum = intra.value();
  return v;
}

DominanceResult check_block_dominance(const BlockSystemView& view, const CouplingSystem& system) {
  double worst = 0.0;
  for (std::size_t m = 0; m < view.cells; ++m) {
    const std::size_t rows = view.members[m].size();
    for (std::size_t l = 0; l < rows; ++l) {
      CompensatedSum s;
      for (std::size_t j = 0; j < view.cells; ++j) {
        if (j == m) continue;
        const std::size_t cols = view.members[j].size();
        const auto& blk = view.coupling[m][j];
        for (std::size_t c = 0; c < cols; ++c) s.add(blk[l * cols + c]);
      }
      worst = std::max(worst, s.value());
    }
  }
  DominanceResult r;
  r.lhs = std::sqrt(static_cast<double>(view.max_block)) * worst;
  r.rhs = system.min_hbar();
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs < r.rhs;
  return r;
}

}  // namespace bubbly
