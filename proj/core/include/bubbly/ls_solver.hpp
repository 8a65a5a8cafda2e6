#pragma once

#include <span>
#include <vector>

#include "bubbly/bubble_solver.hpp"
#include "bubbly/effective_grid.hpp"
#include "bubbly/history.hpp"
#include "bubbly/incident.hpp"

namespace bubbly {

using FieldHistory = History;

struct LsOptions {
  int max_iterations = 50;
  double tolerance = 1e-10;
};

struct LsStats {
  std::size_t steps = 0;
  double seconds = 0.0;
  int max_iterations_used = 0;
  std::size_t implicit_neighbours = 0;
};

/// Time-domain Lippmann-Schwinger marching:
/// hbar Y_k'' + Y_k + sum_l w_kl Y_l''(t - tau_kl) = f_k(t).
FieldHistory solve_ls_time(const EffectiveGrid& grid, double hbar, const Forcing& forcing, const TimeGrid& tgrid,
                           const LsOptions& options = {}, LsStats* stats = nullptr);
FieldHistory solve_ls_time(const EffectiveGrid& grid, double hbar, const PointSource& src, const TimeGrid& tgrid,
                           const LsOptions& options = {}, LsStats* stats = nullptr);

/// Node residual of the discrete equation normalised by max |f|.
double ls_node_residual(const EffectiveGrid& grid, double hbar, const Forcing& forcing, const FieldHistory& hist);

/// Retarded volume potential sum_k b kappa_k v / (4 pi |x - x_k|) d^m Y(x_k, t - |x - x_k| / c0) times `scale`.
double effective_scattered(const FieldHistory& hist, const EffectiveGrid& grid, const Vec3& x, double t,
                           int derivative = 0, double scale = 1.0);
std::vector<double> effective_scattered_series(const FieldHistory& hist, const EffectiveGrid& grid, const Vec3& x,
                                               std::span<const double> times, int derivative = 0,
                                               double scale = 1.0);

}  // namespace bubbly
