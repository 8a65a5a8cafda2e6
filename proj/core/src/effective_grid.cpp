#include "bubbly/effective_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bubbly/numerics.hpp"

namespace bubbly {

double equivalent_ball_self_integral(double v) {
  const double r = std::cbrt(3.0 * v / (4.0 * kPi));
  return 0.5 * r * r;
}

double EffectiveGrid::weight(std::size_t k, std::size_t l) const {
  if (k == l) return self_weight[k];
  const double r = distance(centroid(k), centroid(l));
  return b * static_cast<double>(kappa[l]) * voxel_volume / (4.0 * kPi * r);
}

double EffectiveGrid::delay(std::size_t k, std::size_t l) const {
  if (k == l) return 0.0;
  return distance(centroid(k), centroid(l)) / c0;
}

double EffectiveGrid::min_offdiag_delay() const {
  if (size() < 2) return std::numeric_limits<double>::infinity();
  return lattice.edge / c0;
}

void EffectiveGrid::set_kappa(std::vector<long> values) {
  if (values.size() != size()) throw Error("EffectiveGrid::set_kappa: size mismatch");
  for (long v : values)
    if (v < 1) throw Error("EffectiveGrid::set_kappa: weights must be positive integers");
  kappa = std::move(values);
  const double self = equivalent_ball_self_integral(voxel_volume);
  self_weight.resize(size());
  for (std::size_t k = 0; k < size(); ++k) self_weight[k] = b * static_cast<double>(kappa[k]) * self;
}

EffectiveGrid grid_from_partition(const CellPartition& partition, const KField& k, double b, double c0) {
  if (!(b >= 0.0)) throw Error("effective grid: coupling coefficient must be non-negative");
  if (!(c0 > 0.0)) throw Error("effective grid: wave speed must be positive");
  EffectiveGrid g;
  g.lattice = partition;
  g.b = b;
  g.c0 = c0;
  g.voxel_volume = partition.epsilon;
  std::vector<long> kap(partition.cells.size());
  for (std::size_t i = 0; i < kap.size(); ++i) kap[i] = k.weight(partition.cells[i].centroid);
  g.set_kappa(std::move(kap));
  return g;
}

EffectiveGrid build_grid(const Domain& domain, const KField& k, double voxel_edge, double b, double c0) {
  if (!(voxel_edge > 0.0)) throw Error("build_grid: voxel edge must be positive");
  const Vec3 ext = domain.bounding_box().extent();
  if (voxel_edge > std::min({ext.x, ext.y, ext.z}) * (1.0 + 1e-12))
    throw Error("build_grid: voxel edge larger than the domain");
  const double eps = voxel_edge * voxel_edge * voxel_edge;
  const CellPartition p = partition_domain(domain, eps);
  return grid_from_partition(p, k, b, c0);
}

}  // namespace bubbly
