#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bubbly/coefficients.hpp"
#include "bubbly/incident.hpp"
#include "bubbly/placement.hpp"

namespace bubbly {

enum class EpsilonRule { Snap, Exact };

struct EffectiveSection {
  /// Non-positive values select the bubble-derived coefficients.
  double hbar = 0.0;
  double b = 0.0;
  double voxel_edge = 0.125;
  /// Effective voxels per cell edge in the comparison pipeline.
  int refine = 1;
  /// Multiplies the effective coupling in the comparison pipeline.
  double b_scale = 1.0;
};

struct FdtdSection {
  double dx = 1.0 / 16.0;
  double dt = 0.0;
  double t_end = 6.0;
  double padding = 0.0;
};

struct LaplaceSection {
  std::vector<double> sigmas{2.0, 4.0};
  std::vector<double> omegas{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
  double bromwich_sigma = 0.6;
  double bromwich_dw = 0.5;
  int bromwich_count = 64;
};

struct ExperimentConfig {
  Domain domain = Domain::unit_cube();
  KField kfield;
  MediumParams medium;
  double shape_radius = 1.0;
  Pulse pulse{PulseKind::Window, 2.0, 0.0, 1.0};
  Vec3 source{-1.0, 0.5, 0.5};
  bool auto_probes = true;
  std::vector<Vec3> probes;

  std::vector<double> deltas{8e-3, 4e-3, 2e-3, 1e-3};
  EpsilonRule epsilon_rule = EpsilonRule::Snap;
  double lambda1 = 1.0 / 3.0;
  std::uint64_t seed = 0;
  double jitter = 0.0;
  double budget = 1e13;

  /// Non-positive h selects the default step rule.
  double h = 0.0;
  double t_end = 20.0;

  bool solve_bubbles = true;
  bool solve_effective = true;

  EffectiveSection effective;
  FdtdSection fdtd;
  LaplaceSection laplace;

  double min_slope = 0.25;
  bool require_decreasing = true;
  std::string output_dir = "out";

  void validate() const;
  PointSource point_source() const;
  ShapeConstants shape() const;
  /// Probe points, generating the automatic set when requested.
  std::vector<Vec3> resolved_probes() const;
  double effective_hbar() const;
  double effective_b() const;
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Six points on a sphere of twice the circumradius, skipping the direction of the source.
std::vector<Vec3> automatic_probes(const Domain& domain, const Vec3& source);

}  // namespace bubbly
