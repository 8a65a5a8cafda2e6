#pragma once

#include <cstddef>
#include <vector>

#include "bubbly/placement.hpp"

namespace bubbly {

/// Voxelization of the effective medium on a uniform lattice.
struct EffectiveGrid {
  CellPartition lattice;
  double b = 0.0;
  double c0 = 1.0;
  double voxel_volume = 0.0;
  std::vector<long> kappa;
  std::vector<double> self_weight;

  std::size_t size() const { return lattice.cells.size(); }
  const Vec3& centroid(std::size_t k) const { return lattice.cells[k].centroid; }
  /// w_kl = b kappa_l v / (4 pi |x_k - x_l|), with the self weight on the diagonal.
  double weight(std::size_t k, std::size_t l) const;
  double delay(std::size_t k, std::size_t l) const;
  double min_offdiag_delay() const;
  /// Replaces the per-voxel weights and refreshes the self weights.
  void set_kappa(std::vector<long> values);
};

/// Exact integral over a ball of volume v of 1 / (4 pi |y|): r^2 / 2 with r = (3 v / 4 pi)^(1/3).
double equivalent_ball_self_integral(double v);

EffectiveGrid build_grid(const Domain& domain, const KField& k, double voxel_edge, double b, double c0);
EffectiveGrid grid_from_partition(const CellPartition& partition, const KField& k, double b, double c0);

}  // namespace bubbly
