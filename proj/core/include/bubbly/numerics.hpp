#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bubbly/vec3.hpp"

namespace bubbly {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator. Used wherever a long reduction must be
/// independent of summation order to within round-off.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Entire part [x]: the unique integer n with n <= x < n + 1.
long entire_part(double x);

/// Cubic Hermite basis on [0, 1] evaluated at theta.
struct HermiteBasis {
  double h00, h10, h01, h11;
};
HermiteBasis hermite_basis(double theta);

/// Number of worker threads used by the parallel loops; 0 keeps the runtime
/// default.
void set_thread_count(int threads);
int thread_count();

/// Relative L2 distance ||a - b|| / ||b|| (returns ||a|| when b vanishes).
double relative_l2(std::span<const double> a, std::span<const double> b);

/// Least-squares line through (x, y): returns slope, intercept and RMS residual.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

/// Shortest round-trip decimal representation (17 significant digits).
std::string format_double(double v);

}  // namespace bubbly
