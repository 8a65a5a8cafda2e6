#include "bubbly/history.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "bubbly/numerics.hpp"

namespace bubbly {

std::size_t TimeGrid::steps() const {
  validate();
  return static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
}

void TimeGrid::validate() const {
  if (!(h > 0.0)) throw Error("time grid step must be positive");
  if (!(t_end > 0.0)) throw Error("time grid end must be positive");
}

DelayStencil delay_stencil(double x) {
  if (x > 1e-12) throw Error("delay_stencil: point lies after the newest node");
  long k = static_cast<long>(std::floor(x));
  double theta = x - static_cast<double>(k);
  if (k >= 0) {
    k = -1;
    theta = 1.0;
  }
  const HermiteBasis hb = hermite_basis(theta);
  DelayStencil s;
  if (k <= -2) {
    s.base = static_cast<int>(k) - 1;
    s.w[0] = -0.5 * hb.h10;
    s.w[1] = hb.h00 - 0.5 * hb.h11;
    s.w[2] = hb.h01 + 0.5 * hb.h10;
    s.w[3] = 0.5 * hb.h11;
  } else {
    s.base = -2;
    s.w[0] = -0.5 * hb.h10 + 0.5 * hb.h11;
    s.w[1] = hb.h00 - 2.0 * hb.h11;
    s.w[2] = hb.h01 + 0.5 * hb.h10 + 1.5 * hb.h11;
    s.w[3] = 0.0;
  }
  return s;
}

History::History(std::size_t series, std::size_t nodes, double h)
    : series_(series), nodes_(nodes), stride_(nodes + kPad + 1), h_(h) {
  if (nodes < 1) throw Error("History: need at least one node");
  y_.assign(series * stride_, 0.0);
  v_.assign(series * stride_, 0.0);
  a_.assign(series * stride_, 0.0);
}

double History::value(std::size_t i, double t, int derivative, std::size_t newest) const {
  if (derivative < 0 || derivative > 2) throw Error("History::value: derivative must be 0, 1 or 2");
  if (newest >= nodes_) throw Error("History::value: newest node out of range");
  if (t <= 0.0) return 0.0;
  const double x = t / h_ - static_cast<double>(newest);
  if (x > 1e-9) throw Error("History::value: time " + format_double(t) + " lies beyond the stored history");
  if (derivative == 2) {
    const DelayStencil s = delay_stencil(std::min(x, 0.0));
    return apply(i, newest, s);
  }
  const double* f = derivative == 0 ? Y(i) : V(i);
  const double* g = derivative == 0 ? V(i) : A(i);
  long k = static_cast<long>(std::floor(t / h_));
  if (k >= static_cast<long>(newest)) k = static_cast<long>(newest) - 1;
  if (k < 0) k = 0;
  if (newest == 0) return f[0];
  const double theta = t / h_ - static_cast<double>(k);
  const HermiteBasis hb = hermite_basis(theta);
  return hb.h00 * f[k] + hb.h10 * h_ * g[k] + hb.h01 * f[k + 1] + hb.h11 * h_ * g[k + 1];
}

std::vector<double> History::samples(std::size_t i, int derivative) const {
  const double* p = derivative == 0 ? Y(i) : (derivative == 1 ? V(i) : A(i));
  return std::vector<double>(p, p + nodes_);
}

History march(const DelayProblem& problem, const TimeGrid& grid, MarchStats* stats) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t M = problem.size();
  const std::size_t steps = grid.steps();
  const double h = grid.h;
  History hist(M, steps + 1, h);

  std::vector<double> f(M), e_half(M), e_full(M), rhs(M), y(M), v(M);
  std::vector<double> y2(M), v2(M), y3(M), v3(M), y4(M), v4(M), a1(M), a2(M), a3(M), a4(M);

  problem.forcing(0.0, f);
  problem.accelerate(hist, 0, 0.0, true, f, a1);
  for (std::size_t i = 0; i < M; ++i) hist.A(i)[0] = a1[i];

  for (std::size_t n = 0; n < steps; ++n) {
    const double tn = grid.time(n);
    for (std::size_t i = 0; i < M; ++i) {
      y[i] = hist.Y(i)[n];
      v[i] = hist.V(i)[n];
      a1[i] = hist.A(i)[n];
    }
    problem.delayed(hist, n, 0.5, e_half);
    problem.forcing(tn + 0.5 * h, f);
    for (std::size_t i = 0; i < M; ++i) {
      y2[i] = y[i] + 0.5 * h * v[i];
      v2[i] = v[i] + 0.5 * h * a1[i];
      rhs[i] = f[i] - y2[i] - e_half[i];
    }
    problem.accelerate(hist, n, 0.5, false, rhs, a2);
    for (std::size_t i = 0; i < M; ++i) {
      y3[i] = y[i] + 0.5 * h * v2[i];
      v3[i] = v[i] + 0.5 * h * a2[i];
      rhs[i] = f[i] - y3[i] - e_half[i];
    }
    problem.accelerate(hist, n, 0.5, false, rhs, a3);
    problem.delayed(hist, n, 1.0, e_full);
    problem.forcing(grid.time(n + 1), f);
    for (std::size_t i = 0; i < M; ++i) {
      y4[i] = y[i] + h * v3[i];
      v4[i] = v[i] + h * a3[i];
      rhs[i] = f[i] - y4[i] - e_full[i];
    }
    problem.accelerate(hist, n, 1.0, false, rhs, a4);
    for (std::size_t i = 0; i < M; ++i) {
      const double yn = y[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
      const double vn = v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
      hist.Y(i)[n + 1] = yn;
      hist.V(i)[n + 1] = vn;
      rhs[i] = f[i] - yn - e_full[i];
    }
    problem.accelerate(hist, n, 1.0, false, rhs, a4);
    for (std::size_t i = 0; i < M; ++i) {
      hist.A(i)[n + 1] = a4[i];
      if (!std::isfinite(hist.Y(i)[n + 1]) || !std::isfinite(a4[i])) {
        throw Error("march: non-finite state in series " + std::to_string(i) + " at t = " +
                    format_double(grid.time(n + 1)) + " (step " + std::to_string(n + 1) + ")");
      }
    }
  }
  if (stats) {
    stats->steps = steps;
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return hist;
}

}  // namespace bubbly
