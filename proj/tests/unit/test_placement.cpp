#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bubbly/cloud_io.hpp"
#include "bubbly/numerics.hpp"
#include "bubbly/placement.hpp"
#include "bubbly/shape.hpp"

using namespace bubbly;

namespace {

const ShapeConstants kUnit = make_sphere(1.0);

bool box_inside(const Box3& inner, const Box3& outer, double tol = 1e-12) {
  for (int a = 0; a < 3; ++a)
    if (inner.lo[a] < outer.lo[a] - tol || inner.hi[a] > outer.hi[a] + tol) return false;
  return true;
}

}  // namespace

TEST_CASE("unit cube partitions tile exactly") {
  const CellPartition p8 = partition_domain(Domain::unit_cube(), 1.0 / 8.0);
  CHECK(p8.cells.size() == 8);
  CHECK(p8.dropped_volume == doctest::Approx(0.0));
  const CellPartition p27 = partition_domain(Domain::unit_cube(), 1.0 / 27.0);
  CHECK(p27.cells.size() == 27);
  CHECK(p27.dropped_volume == doctest::Approx(0.0).epsilon(1e-12));
  for (const Cell& c : p27.cells) CHECK(c.box.volume() == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
}

TEST_CASE("ball partition drops boundary cells within the shell bound") {
  const Domain ball = Domain::unit_volume_ball();
  const double eps = 1.0 / 64.0;
  const CellPartition p = partition_domain(ball, eps);
  CHECK(p.cells.size() <= 64);
  CHECK(p.cells.size() >= 1);

  // brute-force enumeration of lattice cells that lie inside the ball
  const double a = std::cbrt(eps);
  const Box3 bb = ball.bounding_box();
  std::size_t count = 0;
  const int n = static_cast<int>(std::floor(bb.extent().x / a + 1e-9));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 lo = bb.lo + Vec3{i * a, j * a, k * a};
        const Box3 box{lo, lo + Vec3{a, a, a}};
        bool inside = true;
        for (const Vec3& c : box.corners()) inside = inside && distance(c, ball.center) <= ball.radius + 1e-12;
        if (inside) ++count;
      }
  CHECK(p.cells.size() == count);
  CHECK(p.dropped_volume == doctest::Approx(1.0 - static_cast<double>(count) * eps).epsilon(1e-9));

  // every dropped point lies within sqrt(3) a of the boundary
  const double area = 4.0 * kPi * ball.radius * ball.radius;
  const double C = area * std::sqrt(3.0);
  CHECK(p.dropped_volume <= C * std::cbrt(eps));
  MESSAGE("ball, eps = 1/64: N = " << p.cells.size() << ", dropped volume = " << p.dropped_volume);
  for (const Cell& c : p.cells) CHECK(ball.contains_box(c.box));
}

TEST_CASE("partition errors") {
  CHECK_THROWS_AS(partition_domain(Domain::unit_cube(), 2.0), Error);
  CHECK_THROWS_AS(partition_domain(Domain::unit_cube(), -1.0), Error);
  CHECK_THROWS_AS(partition_domain(Domain::unit_volume_ball(), 0.9), Error);
}

TEST_CASE("K = 0 reduces to one bubble at each cell centroid") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 64.0);
  const BubbleCloud c = place_bubbles(p, KField::constant(0.0), 1e-3, kUnit);
  REQUIRE(c.size() == p.cells.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.bubbles[i].cell == static_cast<int>(i));
    CHECK(distance(c.bubbles[i].center, p.cells[i].centroid) < 1e-15);
  }
}

TEST_CASE("K = 2 places three bubbles per cell") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 27.0);
  const BubbleCloud c = place_bubbles(p, KField::constant(2.0), 1e-3, kUnit);
  CHECK(c.size() == 3 * p.cells.size());
  for (std::size_t m = 0; m < c.cell_count(); ++m) CHECK(c.cell_begin[m + 1] - c.cell_begin[m] == 3);
}

TEST_CASE("linear K gives counts 2 and 3 and the count law holds") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 64.0);
  const KField k = KField::linear(1.5, {1.0, 0.0, 0.0});
  const BubbleCloud c = place_bubbles(p, k, 1e-3, kUnit);
  long recount = 0;
  bool saw2 = false, saw3 = false;
  for (std::size_t m = 0; m < c.cell_count(); ++m) {
    const int first = c.cell_begin[m];
    const long n = c.cell_begin[m + 1] - first;
    const long expected = entire_part(k.value(c.bubbles[first].center)) + 1;
    CHECK(n == expected);
    recount += expected;
    saw2 = saw2 || n == 2;
    saw3 = saw3 || n == 3;
    // transition across the plane K = 2, i.e. x = 0.5
    const double x = c.bubbles[first].center.x;
    CHECK(n == (x < 0.5 ? 2 : 3));
  }
  CHECK(saw2);
  CHECK(saw3);
  CHECK(recount == static_cast<long>(c.size()));
}

TEST_CASE("placement is deterministic, contained and separated") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 27.0);
  const KField k = KField::gaussian(0.5, 3.0, {0.5, 0.5, 0.5}, 0.3);
  const PlacementOptions opt{42, 0.5};
  const BubbleCloud a = place_bubbles(p, k, 1e-3, kUnit, opt);
  const BubbleCloud b = place_bubbles(p, k, 1e-3, kUnit, opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.bubbles[i].center.x == b.bubbles[i].center.x);
    CHECK(a.bubbles[i].center.y == b.bubbles[i].center.y);
    CHECK(a.bubbles[i].center.z == b.bubbles[i].center.z);
  }
  const double r = a.delta * kUnit.radius;
  for (const Bubble& bub : a.bubbles) {
    const Box3 ball_box{bub.center - Vec3{r, r, r}, bub.center + Vec3{r, r, r}};
    CHECK(box_inside(ball_box, a.cell_boxes[static_cast<std::size_t>(bub.cell)]));
    CHECK(a.domain.contains_box(a.cell_boxes[static_cast<std::size_t>(bub.cell)]));
  }
  CHECK(min_pair_distance(a.centers()) > a.max_diameter());
}

TEST_CASE("infeasible packing names the failing cell") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 8.0);
  try {
    place_bubbles(p, KField::constant(0.0), 0.3, kUnit);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
  }
}

TEST_CASE("cloud statistics") {
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}};
  const BubbleCloud c2 = make_point_cloud(two, 1e-3, kUnit);
  CHECK(cloud_stats(c2).d == doctest::Approx(0.5));

  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 8.0);
  const BubbleCloud c8 = place_bubbles(p, KField::constant(0.0), 1e-3, kUnit);
  const CloudStats s = cloud_stats(c8);
  CHECK(s.d == doctest::Approx(0.5));
  CHECK(s.M == 8);
  CHECK(s.md3 == doctest::Approx(1.0));
  CHECK(s.md3_in_band);
}

TEST_CASE("plane-sweep minimum distance equals brute force on random clouds") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> pts(400);
    for (auto& q : pts) q = {u(rng), u(rng), u(rng)};
    CHECK(min_pair_distance(pts) == min_pair_distance_bruteforce(pts));
  }
}

TEST_CASE("counting sums") {
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  CHECK(verify_counting(two, 1.0).max_sum == doctest::Approx(1.0));

  // direct recount at one anchor
  const std::vector<Vec3> lat = cubic_lattice(6);
  const CountingResult r2 = verify_counting(lat, 2.0);
  for (std::size_t i : {std::size_t{0}, std::size_t{100}}) {
    double s = 0.0;
    for (std::size_t j = 0; j < lat.size(); ++j)
      if (j != i) s += 1.0 / std::pow(distance(lat[i], lat[j]), 2);
    CHECK(r2.sums[i] == doctest::Approx(s).epsilon(1e-13));
  }
  const CountingResult r25 = verify_counting(lat, 2.5);
  double s = 0.0;
  for (std::size_t j = 1; j < lat.size(); ++j) s += std::pow(distance(lat[0], lat[j]), -2.5);
  CHECK(r25.sums[0] == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("counting normalisations stay bounded under lattice refinement") {
  std::vector<double> prev1, prev4;
  for (int n : {4, 8, 16}) {
    const auto lat = cubic_lattice(n);
    const std::vector<double> ex{1.0, 4.0};
    const auto r = verify_counting(lat, ex);
    CHECK(r[0].d == doctest::Approx(1.0 / n));
    prev1.push_back(r[0].normalized);
    prev4.push_back(r[1].normalized);
  }
  for (std::size_t i = 1; i < prev1.size(); ++i) {
    CHECK(prev1[i] / prev1[i - 1] <= 2.0);
    CHECK(prev1[i] / prev1[i - 1] >= 0.5);
    CHECK(prev4[i] / prev4[i - 1] <= 2.0);
    CHECK(prev4[i] / prev4[i - 1] >= 0.5);
  }
  // the lower-order sum settles quickly
  CHECK(prev1[2] / prev1[1] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("K field descriptors and validation") {
  const KField k = KField::gaussian(0.5, 2.0, {0.1, 0.2, 0.3}, 0.4);
  const KField back = KField::parse(k.describe());
  CHECK(back.value({0.3, 0.3, 0.3}) == k.value({0.3, 0.3, 0.3}));
  CHECK(KField::constant(1.0).weight({0, 0, 0}) == 2);
  CHECK(KField::constant(0.999).weight({0, 0, 0}) == 1);
  const std::vector<Vec3> pts{{0.5, 0.5, 0.5}};
  CHECK(validate_kfield(KField::linear(1.5, {1.0, 0.0, 0.0}), pts).empty());
  CHECK_FALSE(validate_kfield(KField::linear(-3.0, {1.0, 0.0, 0.0}), pts).empty());
  CHECK_FALSE(validate_kfield(KField::linear(1.0, {0.0, 0.0, 0.0}), pts).empty());
  CHECK_THROWS_AS(KField::constant(-1.0), Error);
  const Domain d = Domain::parse(Domain::make_ball({0.5, 0.5, 0.5}, 0.4).describe());
  CHECK(d.kind == DomainKind::Ball);
  CHECK(d.radius == 0.4);
}

TEST_CASE("cloud record round-trips exactly") {
  const CellPartition p = partition_domain(Domain::unit_cube(), 1.0 / 27.0);
  const BubbleCloud c = place_bubbles(p, KField::linear(0.2, {1.0, 1.0, 0.0}), 2e-3, kUnit, {9, 0.7});
  std::stringstream ss;
  write_cloud(ss, c);
  const BubbleCloud back = read_cloud(ss);
  REQUIRE(back.size() == c.size());
  CHECK(back.delta == c.delta);
  CHECK(back.seed == c.seed);
  CHECK(back.cell_count() == c.cell_count());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back.bubbles[i].center.x == c.bubbles[i].center.x);
    CHECK(back.bubbles[i].center.y == c.bubbles[i].center.y);
    CHECK(back.bubbles[i].center.z == c.bubbles[i].center.z);
    CHECK(back.bubbles[i].cell == c.bubbles[i].cell);
  }
  std::stringstream bad("not a cloud\n");
  CHECK_THROWS_AS(read_cloud(bad), Error);
}
