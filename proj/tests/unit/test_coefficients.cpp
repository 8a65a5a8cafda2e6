#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bubbly/coefficients.hpp"
#include "bubbly/numerics.hpp"
#include "bubbly/placement.hpp"
#include "bubbly/shape.hpp"

using namespace bubbly;

namespace {

// Adaptive Simpson, independent of the library's Gauss-Legendre path.
template <class F>
double simpson(F f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double simpson(F f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v{n(rng), n(rng), n(rng)};
  return v * (1.0 / norm(v));
}

}  // namespace

TEST_CASE("surface constant of the unit sphere against two oracles") {
  const double A = surface_constant_A({ShapeKind::Sphere, 1.0, 32});
  CHECK(A == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-6));

  // polar-angle reduction with an independent integrator
  const double reduced =
      2.0 * kPi * simpson([](double t) { return std::sin(0.5 * t) * std::sin(t); }, 0.0, kPi, 1e-13);
  CHECK(reduced == doctest::Approx(A).epsilon(1e-10));

  // Monte-Carlo double surface integral: (x - y).n_x / |x - y| averaged over pairs, times |dB| / |dB|
  std::mt19937_64 rng(2024);
  const int N = 1000000;
  CompensatedSum s;
  for (int i = 0; i < N; ++i) {
    const Vec3 x = random_unit(rng);
    const Vec3 y = random_unit(rng);
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r > 0.0) s.add(dot(d, x) / r);
  }
  const double mc = 4.0 * kPi * s.value() / N;
  // 4 standard errors of the estimator (sample sd 0.236 per unit area)
  CHECK(std::abs(mc - A) / A < 4.0 * 0.236 / std::sqrt(static_cast<double>(N)) / (2.0 / 3.0));
}

TEST_CASE("surface constant scales with the square of the radius") {
  const double A1 = surface_constant_A({ShapeKind::Sphere, 1.0, 32});
  const double A2 = surface_constant_A({ShapeKind::Sphere, 2.0, 32});
  CHECK(A2 == doctest::Approx(4.0 * A1).epsilon(1e-12));
  CHECK(A2 == doctest::Approx(33.51032).epsilon(1e-6));
  CHECK_THROWS_AS(surface_constant_A({ShapeKind::Sphere, 0.0, 32}), Error);
  CHECK_THROWS_AS(surface_constant_A({ShapeKind::Sphere, -1.0, 32}), Error);
}

TEST_CASE("sphere constants") {
  const ShapeConstants s = make_sphere(1.0);
  CHECK(s.volume == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(s.diameter == 2.0);
  CHECK(parse_shape_kind(shape_kind_name(ShapeKind::Sphere)) == ShapeKind::Sphere);
  CHECK_THROWS_AS(parse_shape_kind("torus"), Error);
}

TEST_CASE("minnaert coefficient and its homogeneity") {
  const ShapeConstants unit = make_sphere(1.0);
  MediumParams p;
  const MinnaertCoefficient m = minnaert_h(p, unit);
  CHECK(m.hbar == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-9));
  CHECK(m.omega == doctest::Approx(1.0 / std::sqrt(m.hbar)));
  MediumParams p2 = p;
  p2.rho_c = 2.0;
  CHECK(minnaert_h(p2, unit).hbar == 2.0 * m.hbar);
  MediumParams p3 = p;
  p3.k_b_bar = 2.0;
  CHECK(minnaert_h(p3, unit).hbar == 0.5 * m.hbar);
}

TEST_CASE("scattering coefficient and its homogeneity") {
  const ShapeConstants unit = make_sphere(1.0);
  MediumParams p;
  const double b = scattering_b(p, unit);
  CHECK(b == doctest::Approx(4.0 * kPi / 3.0));
  ShapeConstants twice = unit;
  twice.volume *= 2.0;
  CHECK(scattering_b(p, twice) == 2.0 * b);
  MediumParams p2 = p;
  p2.k_b_bar = 2.0;
  CHECK(scattering_b(p2, unit) == doctest::Approx(2.0 * kPi / 3.0));
  MediumParams bad = p;
  bad.rho_c = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  MediumParams c4;
  c4.k_c = 4.0;
  CHECK(c4.c0() == 2.0);
}

TEST_CASE("coupling matrix entries") {
  const ShapeConstants unit = make_sphere(1.0);
  MediumParams p;
  p.rho_c = 1.0;
  p.k_b_bar = unit.volume;  // b_bar = 1
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}};
  const BubbleCloud c = make_point_cloud(two, 0.1, unit);
  const CouplingSystem s = coupling_matrix(c, p);
  CHECK(s.q_at(0, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(s.q_at(0, 0) == 0.0);
  CHECK(s.tau_at(0, 1) == doctest::Approx(0.5));
  CHECK(s.tau_min == doctest::Approx(0.5));
}

TEST_CASE("collinear coupling equals brute-force recomputation") {
  const ShapeConstants unit = make_sphere(1.0);
  MediumParams p;
  p.k_c = 2.25;
  const std::vector<Vec3> pts{{0.0, 0.0, 0.0}, {0.3, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  const double delta = 1e-3;
  const BubbleCloud c = make_point_cloud(pts, delta, unit);
  const CouplingSystem s = coupling_matrix(c, p);
  const double bbar = p.rho_c * unit.volume / p.k_b_bar;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) {
        CHECK(s.q_at(i, j) == 0.0);
        continue;
      }
      const double r = std::abs(pts[i].x - pts[j].x);
      CHECK(s.q_at(i, j) == doctest::Approx(bbar * delta / r).epsilon(1e-14));
      CHECK(s.q_at(i, j) * r == doctest::Approx(s.b(j)).epsilon(1e-14));
      CHECK(s.tau_at(i, j) == doctest::Approx(r / 1.5).epsilon(1e-14));
      CHECK(s.tau_at(i, j) == s.tau_at(j, i));
    }
}

TEST_CASE("coincident centres are rejected") {
  const std::vector<Vec3> pts{{0.2, 0.2, 0.2}, {0.2, 0.2, 0.2}};
  const BubbleCloud c = make_point_cloud(pts, 1e-3, make_sphere(1.0));
  CHECK_THROWS_AS(coupling_matrix(c, MediumParams{}), Error);
}

TEST_CASE("single bubble passes every coupling condition with full margin") {
  const std::vector<Vec3> one{{0.5, 0.5, 0.5}};
  const BubbleCloud c = make_point_cloud(one, 1e-3, make_sphere(1.0));
  const CouplingSystem s = coupling_matrix(c, MediumParams{});
  const ConditionReport r = check_conditions(s, c, MediumParams{}, 1.0 / 3.0);
  CHECK(r.get("C2").pass);
  CHECK(r.get("C2").lhs == 0.0);
  CHECK(r.get("C2").margin == doctest::Approx(s.min_hbar()));
  CHECK(r.get("C3").pass);
  CHECK(r.get("C3").lhs == 0.0);
}

TEST_CASE("strong coupling fails C2") {
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}};
  const BubbleCloud c = make_point_cloud(two, 1e-3, make_sphere(1.0));
  CouplingSystem s = coupling_matrix(c, MediumParams{});
  const double q = 1.5 * s.min_hbar();
  s.q[1] = q;
  s.q[2] = q;
  const ConditionReport r = check_conditions(s, c, MediumParams{}, 1.0 / 3.0);
  CHECK_FALSE(r.get("C2").pass);
  CHECK(r.get("C2").margin == doctest::Approx(s.min_hbar() - q));
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("C1 on a periodic 4x4x4 cloud matches independent re-evaluation") {
  const CellPartition part = partition_domain(Domain::unit_cube(), 1.0 / 64.0);
  const ShapeConstants unit = make_sphere(1.0);
  const BubbleCloud c = place_bubbles(part, KField::constant(0.0), 1e-3, unit);
  MediumParams p;
  const CouplingSystem s = coupling_matrix(c, p);
  const double lambda1 = 1.0 / 3.0;
  const ConditionReport r = check_conditions(s, c, p, lambda1);
  const double d = 0.25;
  const double expected = (1.0 / (4.0 * kPi)) * (4.0 * kPi / 3.0) * std::pow(1e-3 / d, 6) * 9.0;
  CHECK(r.get("C1").lhs == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r.get("C1").pass);
  MESSAGE("C1 lhs = " << format_double(r.get("C1").lhs) << ", margin = " << format_double(r.get("C1").margin));
  CHECK(r.k_max == 1.0);

  // C2 by direct summation
  double row_max = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j)
      if (i != j) row += scattering_b(p, unit) * 1e-3 / distance(c.bubbles[i].center, c.bubbles[j].center);
    row_max = std::max(row_max, row);
  }
  CHECK(r.get("C2").lhs == doctest::Approx(row_max).epsilon(1e-12));
}

TEST_CASE("condition margins increase strictly as delta halves at fixed geometry") {
  const CellPartition part = partition_domain(Domain::unit_cube(), 1.0 / 64.0);
  const ShapeConstants unit = make_sphere(1.0);
  const BubbleCloud base = place_bubbles(part, KField::constant(1.0), 4e-3, unit);
  MediumParams p;
  std::vector<ConditionReport> reps;
  for (double delta : {4e-3, 2e-3, 1e-3, 5e-4}) {
    BubbleCloud c = base;
    c.delta = delta;
    reps.push_back(check_conditions(coupling_matrix(c, p), c, p, 1.0 / 3.0));
  }
  for (std::size_t i = 1; i < reps.size(); ++i)
    for (const char* id : {"C1", "C2", "C3"}) CHECK(reps[i].get(id).margin > reps[i - 1].get(id).margin);
}

TEST_CASE("condition report output") {
  const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}};
  const BubbleCloud c = make_point_cloud(two, 1e-3, make_sphere(1.0));
  const ConditionReport r = check_conditions(coupling_matrix(c, MediumParams{}), c, MediumParams{}, 1.0 / 3.0);
  std::ostringstream csv;
  write_condition_csv(csv, r);
  CHECK(csv.str().rfind("id,lhs,rhs,margin,pass\n", 0) == 0);
  CHECK(csv.str().find("C1,") != std::string::npos);
  std::ostringstream txt;
  write_condition_text(txt, r);
  CHECK(txt.str().find("KMAX") != std::string::npos);
  CHECK_THROWS_AS(r.get("C9"), Error);
  CHECK_THROWS_AS(check_conditions(coupling_matrix(c, MediumParams{}), c, MediumParams{}, 0.0), Error);
}
