#include <doctest.h>

#include <cmath>
#include <random>

#include "bubbly/incident.hpp"
#include "bubbly/numerics.hpp"

using namespace bubbly;

namespace {

Pulse window(double T) { return {PulseKind::Window, T, 0.0, 1.0}; }

double central(const Pulse& p, double t, int order, double h) {
  return (pulse_eval(p, t + h, order - 1) - pulse_eval(p, t - h, order - 1)) / (2.0 * h);
}

}  // namespace

TEST_CASE("pulse is causal and compactly supported") {
  const Pulse p = window(2.0);
  for (int order = 0; order <= 3; ++order) {
    CHECK(pulse_eval(p, -0.1, order) == 0.0);
    CHECK(pulse_eval(p, 2.5, order) == 0.0);
    CHECK(pulse_eval(p, 0.0, order) == 0.0);
    CHECK(pulse_eval(p, 2.0, order) == 0.0);
  }
  CHECK(pulse_eval(p, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(pulse_eval(p, 1.0, 4), Error);
  CHECK_THROWS_AS(pulse_eval(p, 1.0, -1), Error);
}

TEST_CASE("analytic derivatives match central finite differences") {
  for (const Pulse& p : {window(2.0), Pulse{PulseKind::WindowedCarrier, 3.0, 5.0, 0.7}}) {
    const double T = p.support;
    const double h = 1e-5 * T;
    for (double frac : {0.3, 0.55, 0.81}) {
      const double t = frac * T;
      const double d1 = pulse_eval(p, t, 1);
      CHECK(d1 == doctest::Approx(central(p, t, 1, h)).epsilon(1e-6));
      CHECK(pulse_eval(p, t, 2) == doctest::Approx(central(p, t, 2, h)).epsilon(1e-6));
      CHECK(pulse_eval(p, t, 3) == doctest::Approx(central(p, t, 3, h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("incident field is a delayed, scaled pulse") {
  PointSource src;
  src.location = {-1.0, 0.5, 0.5};
  src.pulse = window(2.0);
  src.c0 = 1.0;
  const Vec3 x{0.0, 0.5, 0.5};
  for (double t : {0.5, 1.3, 2.1, 2.9})
    CHECK(incident_field(src, x, t, 0) == doctest::Approx(pulse_eval(src.pulse, t - 1.0, 0)).epsilon(1e-15));
  CHECK_THROWS_AS(incident_field(src, src.location, 1.0, 0), Error);
}

TEST_CASE("second time derivative matches finite differences at a probe") {
  PointSource src;
  src.location = {-1.0, 0.2, 0.4};
  src.pulse = window(1.5);
  src.c0 = 1.0;
  const Vec3 x{0.7, 0.5, 0.5};
  const double r = distance(x, src.location);
  const double h = 1e-4;
  for (double t : {r + 0.3, r + 0.75, r + 1.1}) {
    const double fd = (incident_field(src, x, t + h, 0) - 2.0 * incident_field(src, x, t, 0) +
                       incident_field(src, x, t - h, 0)) /
                      (h * h);
    CHECK(incident_field(src, x, t, 2) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("incident field vanishes before arrival on random probes") {
  PointSource src;
  src.location = {-1.0, 0.5, 0.5};
  src.pulse = {PulseKind::WindowedCarrier, 2.0, 4.0, 1.0};
  src.c0 = 1.3;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    const double r = distance(x, src.location);
    if (r < 1e-3) continue;
    const double t = r / src.c0 * 0.999;
    for (int order = 0; order <= 3; ++order) CHECK(incident_field(src, x, t, order) == 0.0);
  }
}

TEST_CASE("orders 0 to 3 are continuous at the front") {
  PointSource src;
  src.location = {-1.0, 0.5, 0.5};
  src.pulse = window(2.0);
  const Vec3 x{0.0, 0.5, 0.5};
  for (int order = 0; order <= 3; ++order) CHECK(std::abs(incident_field(src, x, 1.0 + 1e-3, order)) < 1e-8);
}

TEST_CASE("incident field is linear in the amplitude") {
  PointSource a;
  a.location = {-1.0, 0.5, 0.5};
  a.pulse = window(2.0);
  PointSource b = a;
  b.pulse.amplitude = 2.0;
  const Vec3 x{0.3, 0.1, 0.9};
  for (int order = 0; order <= 3; ++order)
    CHECK(incident_field(b, x, 2.0, order) == 2.0 * incident_field(a, x, 2.0, order));
}

TEST_CASE("source validation and kind names") {
  PointSource src;
  src.location = {0.5, 0.5, 0.5};
  src.pulse = window(1.0);
  CHECK_THROWS_AS(validate_source(src, Domain::unit_cube()), Error);
  src.location = {1.0, 0.5, 0.5};
  CHECK_THROWS_AS(validate_source(src, Domain::unit_cube()), Error);
  src.location = {1.5, 0.5, 0.5};
  CHECK_NOTHROW(validate_source(src, Domain::unit_cube()));
  CHECK(parse_pulse_kind(pulse_kind_name(PulseKind::WindowedCarrier)) == PulseKind::WindowedCarrier);
  CHECK_THROWS_AS(parse_pulse_kind("chirp"), Error);
  Pulse bad{PulseKind::Window, -1.0, 0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}
