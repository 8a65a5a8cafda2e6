#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "bubbly/numerics.hpp"

using namespace bubbly;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  const QuadratureRule q = gauss_legendre(5, 0.0, 2.0);
  double s9 = 0.0, s10 = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    s9 += q.weights[i] * std::pow(q.nodes[i], 9);
    s10 += q.weights[i] * std::pow(q.nodes[i], 10);
  }
  CHECK(s9 == doctest::Approx(std::pow(2.0, 10) / 10.0).epsilon(1e-13));
  CHECK(std::abs(s10 - std::pow(2.0, 11) / 11.0) > 1e-6);
}

TEST_CASE("gauss-legendre integrates a smooth function to high accuracy") {
  const QuadratureRule q = gauss_legendre(20, 0.0, kPi);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::sin(q.nodes[i]);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(gauss_legendre(0), Error);
}

TEST_CASE("entire part uses the half-open floor convention") {
  CHECK(entire_part(0.0) == 0);
  CHECK(entire_part(0.999) == 0);
  CHECK(entire_part(1.0) == 1);
  CHECK(entire_part(2.5) == 2);
  CHECK(entire_part(-0.5) == -1);
}

TEST_CASE("hermite basis reproduces cubic polynomials") {
  auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x; };
  auto df = [](double x) { return -2.0 + x + 9.0 * x * x; };
  for (double th : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const HermiteBasis b = hermite_basis(th);
    const double v = b.h00 * f(0.0) + b.h10 * df(0.0) + b.h01 * f(1.0) + b.h11 * df(1.0);
    CHECK(v == doctest::Approx(f(th)).epsilon(1e-14));
  }
}

TEST_CASE("compensated sum recovers small terms lost by naive summation") {
  CompensatedSum s;
  double naive = 0.0;
  s.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 1000; ++i) {
    s.add(1e-16);
    naive += 1e-16;
  }
  CHECK(naive == 1.0);
  CHECK(s.value() == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
}

TEST_CASE("relative l2 distance") {
  const std::vector<double> a{1.0, 2.0, 2.0};
  const std::vector<double> b{1.0, 2.0, 3.0};
  CHECK(relative_l2(a, b) == doctest::Approx(1.0 / std::sqrt(14.0)));
  const std::vector<double> z{0.0, 0.0, 0.0};
  CHECK(relative_l2(a, z) == doctest::Approx(3.0));
  CHECK_THROWS_AS(relative_l2(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("least squares line recovers exact slope and intercept") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y;
  for (double v : x) y.push_back(0.25 - 1.5 * v);
  const LineFit f = least_squares_line(x, y);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f.residual < 1e-14);
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 2.0e-300, -123456.789, 8e-3}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("thread count setter") {
  set_thread_count(1);
  CHECK(thread_count() == 1);
}
