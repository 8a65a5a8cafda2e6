#pragma once

#include <string>

#include "bubbly/placement.hpp"
#include "bubbly/vec3.hpp"

namespace bubbly {

enum class PulseKind { Window, WindowedCarrier };

/// Causal pulse amplitude * sin^10(pi t / T_p) on [0, T_p], optionally times sin(omega0 t).
struct Pulse {
  PulseKind kind = PulseKind::Window;
  double support = 1.0;
  double omega0 = 0.0;
  double amplitude = 1.0;

  void validate() const;
};

inline constexpr int kMaxPulseOrder = 3;

/// d^order lambda / dt^order, analytic.
double pulse_eval(const Pulse& pulse, double t, int order);

struct PointSource {
  Vec3 location;
  Pulse pulse;
  double c0 = 1.0;
};

/// Throws unless the source lies strictly outside the closed domain.
void validate_source(const PointSource& src, const Domain& domain);

/// d^order/dt^order of lambda(t - |x - x0|/c0) / |x - x0|.
double incident_field(const PointSource& src, const Vec3& x, double t, int order);

std::string pulse_kind_name(PulseKind kind);
PulseKind parse_pulse_kind(const std::string& name);

}  // namespace bubbly
