#include "bubbly/incident.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "bubbly/numerics.hpp"

namespace bubbly {

namespace {

constexpr int kWindowPower = 10;

struct Term {
  double coef;
  int p;  // power of sin
  int q;  // power of cos
};

/// Window derivatives in u = pi t / T_p as lists of c * sin^p cos^q.
const std::array<std::vector<Term>, kMaxPulseOrder + 1>& window_terms() {
  static const auto table = [] {
    std::array<std::vector<Term>, kMaxPulseOrder + 1> t;
    t[0] = {{1.0, kWindowPower, 0}};
    for (int m = 1; m <= kMaxPulseOrder; ++m) {
      for (const Term& term : t[m - 1]) {
        if (term.p > 0) t[m].push_back({term.coef * term.p, term.p - 1, term.q + 1});
        if (term.q > 0) t[m].push_back({-term.coef * term.q, term.p + 1, term.q - 1});
      }
    }
    return t;
  }();
  return table;
}

double window_derivative(double t, double T, int order) {
  const double u = kPi * t / T;
  const double s = std::sin(u);
  const double c = std::cos(u);
  double acc = 0.0;
  for (const Term& term : window_terms()[order]) {
    double v = term.coef;
    for (int i = 0; i < term.p; ++i) v *= s;
    for (int i = 0; i < term.q; ++i) v *= c;
    acc += v;
  }
  return acc * std::pow(kPi / T, order);
}

}  // namespace

void Pulse::validate() const {
  if (!(support > 0.0)) throw Error("pulse support must be positive");
  if (kind == PulseKind::WindowedCarrier && !(omega0 > 0.0)) throw Error("carrier frequency must be positive");
}

double pulse_eval(const Pulse& pulse, double t, int order) {
  if (order < 0 || order > kMaxPulseOrder) throw Error("pulse_eval: derivative order must lie in 0..3");
  if (t <= 0.0 || t >= pulse.support) return 0.0;
  if (pulse.kind == PulseKind::Window) return pulse.amplitude * window_derivative(t, pulse.support, order);
  static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double acc = 0.0;
  for (int k = 0; k <= order; ++k) {
    const int j = order - k;
    const double carrier = std::pow(pulse.omega0, j) * std::sin(pulse.omega0 * t + 0.5 * kPi * j);
    acc += binom[order][k] * window_derivative(t, pulse.support, k) * carrier;
  }
  return pulse.amplitude * acc;
}

void validate_source(const PointSource& src, const Domain& domain) {
  src.pulse.validate();
  if (!(src.c0 > 0.0)) throw Error("source wave speed must be positive");
  if (domain.distance_to(src.location) <= 0.0) throw Error("point source must lie outside the closed domain");
}

double incident_field(const PointSource& src, const Vec3& x, double t, int order) {
  const double r = distance(x, src.location);
  if (r == 0.0) throw Error("incident_field: evaluation point coincides with the source");
  return pulse_eval(src.pulse, t - r / src.c0, order) / r;
}

std::string pulse_kind_name(PulseKind kind) { return kind == PulseKind::Window ? "window" : "carrier"; }

PulseKind parse_pulse_kind(const std::string& name) {
  if (name == "window") return PulseKind::Window;
  if (name == "carrier") return PulseKind::WindowedCarrier;
  throw Error("unknown pulse kind: " + name);
}

}  // namespace bubbly
