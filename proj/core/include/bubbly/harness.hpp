#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bubbly/bubble_solver.hpp"
#include "bubbly/coefficients.hpp"
#include "bubbly/config.hpp"
#include "bubbly/effective_grid.hpp"
#include "bubbly/ls_solver.hpp"
#include "bubbly/numerics.hpp"

namespace bubbly {

/// Cell volume for a given delta under the configured rule.
double cell_epsilon(const ExperimentConfig& config, double delta);

struct DeltaRun {
  double delta = 0.0;
  std::size_t M = 0;
  double d = 0.0;
  double eps = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  double b_eff = 0.0;
  double e_max = 0.0;
  double e_l2 = 0.0;
  double runtime_s = 0.0;
  bool skipped = false;
  std::vector<std::string> annotations;
  ConditionReport conditions;
  std::vector<double> times;
  /// [probe][time]
  std::vector<std::vector<double>> u_s;
  std::vector<std::vector<double>> w_s;
};

struct ComparisonResult {
  std::vector<Vec3> probes;
  std::vector<DeltaRun> runs;
  std::optional<LineFit> fit;
  /// Factor applied to the effective scattered potential.
  double scatter_scale = 1.0;
};

/// Discrete-versus-effective comparison over the configured delta list.
ComparisonResult run_comparison(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Least-squares line through (log delta, log e).
LineFit fit_rate(std::span<const std::pair<double, double>> errors);

/// Integral of 1 / |x - y| over the axis-aligned box.
double box_newton_potential(const Box3& box, const Vec3& x);

struct GapDiagnostics {
  /// Max over probes of the potential of the domain part not covered by cells.
  double e1 = 0.0;
  /// Self-cell estimate 2 pi r^2 + (eps - 4 pi r^3 / 3) / r at the critical radius.
  double e2_formula = 0.0;
  /// Numerical integral of 1 / |y| over the equivalent ball.
  double e2_ball = 0.0;
  /// Exact integral of 1 / |y - centre| over the cell cube.
  double e2_cube = 0.0;
  /// Max over probes of the midpoint-versus-cell-integral mismatch of 1 / (4 pi |x - y|).
  double e3 = 0.0;
  /// Localized discrete-to-continuum gap for psi = 1.
  double local_gap = 0.0;
};

GapDiagnostics discretization_gap(const BubbleCloud& cloud, const EffectiveGrid& grid, std::span<const Vec3> probes);

}  // namespace bubbly
