#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bubbly/shape.hpp"
#include "bubbly/vec3.hpp"

namespace bubbly {

enum class DomainKind { Box, Ball };

struct Domain {
  DomainKind kind = DomainKind::Box;
  Box3 box{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  Vec3 center{0.5, 0.5, 0.5};
  double radius = 0.0;

  static Domain unit_cube();
  static Domain make_box(const Vec3& lo, const Vec3& hi);
  /// Ball of volume one centred at (0.5, 0.5, 0.5).
  static Domain unit_volume_ball();
  static Domain make_ball(const Vec3& center, double radius);

  double volume() const;
  Box3 bounding_box() const;
  bool contains(const Vec3& p) const;
  /// True when the closed box lies inside the closed domain.
  bool contains_box(const Box3& b) const;
  /// Distance from p to the closed domain (0 inside).
  double distance_to(const Vec3& p) const;
  double circumradius() const;
  Vec3 centroid() const;
  std::string describe() const;
  static Domain parse(const std::string& descriptor);
};

enum class KKind { Constant, IntegerConstant, Linear, Gaussian };

/// Non-negative bubble-count density K(x).
struct KField {
  KKind kind = KKind::Constant;
  double base = 0.0;
  Vec3 gradient_vec{};
  double amplitude = 0.0;
  Vec3 center{};
  double width = 1.0;

  static KField constant(double value);
  static KField integer_constant(long value);
  static KField linear(double base, const Vec3& gradient);
  static KField gaussian(double base, double amplitude, const Vec3& center, double width);

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  /// [K(x)] + 1 with the floor convention.
  long weight(const Vec3& x) const;
  std::string describe() const;
  static KField parse(const std::string& descriptor);
};

/// Checks K >= 0 on the points and, for smooth kinds, that the gradient is
/// non-zero wherever K is integral. Returns an empty string when valid.
std::string validate_kfield(const KField& k, std::span<const Vec3> points);

struct Cell {
  int index = 0;
  int ix = 0, iy = 0, iz = 0;
  Box3 box;
  Vec3 centroid;
};

struct CellPartition {
  Domain domain;
  double epsilon = 0.0;
  double edge = 0.0;
  Vec3 origin;
  int nx = 0, ny = 0, nz = 0;
  std::vector<Cell> cells;
  long nominal_count = 0;
  double dropped_volume = 0.0;
};

CellPartition partition_domain(const Domain& domain, double epsilon);

struct Bubble {
  Vec3 center;
  int cell = 0;
  int shape = 0;
};

struct BubbleCloud {
  Domain domain;
  KField kfield;
  double delta = 0.0;
  double cell_epsilon = 0.0;
  double cell_edge = 0.0;
  std::uint64_t seed = 0;
  double jitter = 0.0;
  std::vector<ShapeConstants> shapes;
  std::vector<Bubble> bubbles;
  /// Bubbles of cell m are bubbles[cell_begin[m] .. cell_begin[m + 1]).
  std::vector<int> cell_begin;
  std::vector<Box3> cell_boxes;

  std::size_t size() const { return bubbles.size(); }
  std::size_t cell_count() const { return cell_boxes.size(); }
  std::vector<Vec3> centers() const;
  double max_diameter() const;
};

struct PlacementOptions {
  std::uint64_t seed = 0;
  /// Fraction of each sub-box slack used for uniform random offsets.
  double jitter = 0.0;
};

BubbleCloud place_bubbles(const CellPartition& partition, const KField& k, double delta,
                          const ShapeConstants& shape, const PlacementOptions& options = {});

/// Scaled bubble cloud with explicit centres, one cell per bubble.
BubbleCloud make_point_cloud(std::span<const Vec3> centers, double delta, const ShapeConstants& shape);

struct RegimeBands {
  double md3_lo = 0.05;
  double md3_hi = 20.0;
  double d_over_delta3_lo = 0.05;
  double d_over_delta3_hi = 20.0;
};

struct CloudStats {
  double d = 0.0;
  double epsilon = 0.0;
  std::size_t M = 0;
  double md3 = 0.0;
  double d_over_delta3 = 0.0;
  bool md3_in_band = false;
  bool d_delta3_in_band = false;
};

/// Minimum pairwise distance by a sorted plane sweep.
double min_pair_distance(std::span<const Vec3> points);
/// Minimum pairwise distance by exhaustive scan.
double min_pair_distance_bruteforce(std::span<const Vec3> points);

CloudStats cloud_stats(const BubbleCloud& cloud, const RegimeBands& bands = {});

struct CountingResult {
  double exponent = 0.0;
  std::vector<double> sums;
  double max_sum = 0.0;
  double d = 0.0;
  double normalized = 0.0;
};

CountingResult verify_counting(std::span<const Vec3> points, double exponent);
/// Several exponents in one pass over the pairs.
std::vector<CountingResult> verify_counting(std::span<const Vec3> points, std::span<const double> exponents);

/// Regular n x n x n lattice of spacing 1/n at cell centres of the unit cube.
std::vector<Vec3> cubic_lattice(int n);

}  // namespace bubbly
