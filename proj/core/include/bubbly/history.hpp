#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bubbly {

struct TimeGrid {
  double t_end = 1.0;
  double h = 1e-2;

  std::size_t steps() const;
  std::size_t nodes() const { return steps() + 1; }
  double time(std::size_t n) const { return static_cast<double>(n) * h; }
  void validate() const;
};

/// Four-node interpolation stencil on nodes newest + base .. newest + base + 3.
struct DelayStencil {
  int base = 0;
  double w[4] = {0.0, 0.0, 0.0, 0.0};
};

/// Cubic Hermite stencil with finite-difference slopes for a point located
/// x steps after the newest stored node (x <= 0). Central slopes are used
/// where both neighbours exist, a one-sided slope at the newest node.
DelayStencil delay_stencil(double x);

/// Per-series samples of (Y, Y', Y'') on a uniform grid, stored series-major
/// with a few leading zero nodes so causal look-ups before t = 0 need no
/// branches.
class History {
 public:
  static constexpr std::size_t kPad = 3;

  History() = default;
  History(std::size_t series, std::size_t nodes, double h);

  std::size_t series() const { return series_; }
  std::size_t nodes() const { return nodes_; }
  double h() const { return h_; }
  double t_end() const { return h_ * static_cast<double>(nodes_ - 1); }

  double* Y(std::size_t i) { return y_.data() + i * stride_ + kPad; }
  double* V(std::size_t i) { return v_.data() + i * stride_ + kPad; }
  double* A(std::size_t i) { return a_.data() + i * stride_ + kPad; }
  const double* Y(std::size_t i) const { return y_.data() + i * stride_ + kPad; }
  const double* V(std::size_t i) const { return v_.data() + i * stride_ + kPad; }
  const double* A(std::size_t i) const { return a_.data() + i * stride_ + kPad; }

  /// Interpolated derivative (0, 1 or 2) of series i at time t using only
  /// nodes up to `newest`; zero for t < 0.
  double value(std::size_t i, double t, int derivative, std::size_t newest) const;
  double value(std::size_t i, double t, int derivative = 0) const { return value(i, t, derivative, nodes_ - 1); }

  /// Applies a stencil relative to `newest` to the stored second derivative.
  double apply(std::size_t i, std::size_t newest, const DelayStencil& s) const {
    const double* a = A(i) + static_cast<std::ptrdiff_t>(newest) + s.base;
    return s.w[0] * a[0] + s.w[1] * a[1] + s.w[2] * a[2] + s.w[3] * a[3];
  }

  /// Uniform-grid samples of one series.
  std::vector<double> samples(std::size_t i, int derivative) const;

 private:
  std::size_t series_ = 0;
  std::size_t nodes_ = 0;
  std::size_t stride_ = 0;
  double h_ = 0.0;
  std::vector<double> y_, v_, a_;
};

/// A delay-coupled family of oscillators m_i Y'' + Y + D_i = f_i marched by
/// the method of steps.
class DelayProblem {
 public:
  virtual ~DelayProblem() = default;
  virtual std::size_t size() const = 0;
  /// Right-hand side f_i(t).
  virtual void forcing(double t, std::span<double> out) const = 0;
  /// Part of D_i(t_n + c h) that only involves stored history (nodes <= n).
  virtual void delayed(const History& hist, std::size_t n, double c, std::span<double> out) const = 0;
  /// Solves for the second derivative at t_n + c h given rhs_i = f_i - Y_i - explicit delayed part.
  /// `initial` marks the solve at t = 0 where no history exists.
  virtual void accelerate(const History& hist, std::size_t n, double c, bool initial, std::span<const double> rhs,
                          std::span<double> acc) const = 0;
};

struct MarchStats {
  std::size_t steps = 0;
  double seconds = 0.0;
};

/// Classic four-stage Runge-Kutta on (Y, Y') with the delayed sum as known forcing.
History march(const DelayProblem& problem, const TimeGrid& grid, MarchStats* stats = nullptr);

}  // namespace bubbly
