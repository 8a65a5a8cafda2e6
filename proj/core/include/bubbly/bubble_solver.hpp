#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bubbly/coefficients.hpp"
#include "bubbly/history.hpp"
#include "bubbly/incident.hpp"
#include "bubbly/placement.hpp"

namespace bubbly {

using TrajectorySet = History;

/// Right-hand side of the oscillator family.
class Forcing {
 public:
  virtual ~Forcing() = default;
  virtual std::size_t size() const = 0;
  virtual void evaluate(double t, std::span<double> out) const = 0;
  /// Time before which component i vanishes identically; zero when unknown.
  virtual double onset(std::size_t) const { return 0.0; }
};

/// Second time derivative of the incident field at fixed points.
class IncidentForcing final : public Forcing {
 public:
  IncidentForcing(const PointSource& src, std::vector<Vec3> points);
  std::size_t size() const override { return points_.size(); }
  void evaluate(double t, std::span<double> out) const override;
  double onset(std::size_t i) const override;

 private:
  PointSource src_;
  std::vector<Vec3> points_;
};

/// Arbitrary forcing f(i, t).
class FunctionForcing final : public Forcing {
 public:
  FunctionForcing(std::size_t size, std::function<double(std::size_t, double)> fn);
  std::size_t size() const override { return size_; }
  void evaluate(double t, std::span<double> out) const override;

 private:
  std::size_t size_;
  std::function<double(std::size_t, double)> fn_;
};

/// Step rule min(tau_min, T_p / 200, 2 pi sqrt(min hbar) / 40).
double default_time_step(double tau_min, double pulse_support, double min_hbar);

struct SolveStats {
  std::size_t steps = 0;
  double seconds = 0.0;
};

/// Method of steps for hbar_i Y_i'' + Y_i + sum_j q_ij Y_j''(t - tau_ij) = f_i(t).
TrajectorySet solve_coupled(const CouplingSystem& system, const Forcing& forcing, const TimeGrid& grid,
                            SolveStats* stats = nullptr);
TrajectorySet solve_coupled(const CouplingSystem& system, const BubbleCloud& cloud, const PointSource& src,
                            const TimeGrid& grid, SolveStats* stats = nullptr);

/// Max over nodes and bubbles of |residual| divided by max |f|, with delayed
/// values interpolated from the history available when each node was computed.
double node_residual(const CouplingSystem& system, const Forcing& forcing, const TrajectorySet& trajs);

/// u^s(x, t) = sum_i b_i / (4 pi |x - z_i|) Y_i(t - |x - z_i| / c0).
double scattered_field(const TrajectorySet& trajs, const CouplingSystem& system, const BubbleCloud& cloud,
                       const Vec3& x, double t);
std::vector<double> scattered_series(const TrajectorySet& trajs, const CouplingSystem& system,
                                     const BubbleCloud& cloud, const Vec3& x, std::span<const double> times);

struct BlockSystemView {
  std::size_t cells = 0;
  /// Bubble indices of each cell.
  std::vector<std::vector<std::size_t>> members;
  /// Diagonal of the per-cell block A_m.
  std::vector<std::vector<double>> diag;
  /// Inter-cell block C_mj stored row-major as members[m].size() x members[j].size().
  std::vector<std::vector<std::vector<double>>> coupling;
  /// Representative point z_m of each cell (first bubble).
  std::vector<Vec3> representative;
  double intra_cell_sum = 0.0;
  std::size_t max_block = 0;

  const std::vector<double>& block(std::size_t m, std::size_t j) const { return coupling[m][j]; }
};

BlockSystemView block_view(const CouplingSystem& system, const BubbleCloud& cloud);

struct DominanceResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

DominanceResult check_block_dominance(const BlockSystemView& view, const CouplingSystem& system);

}  // namespace bubbly
