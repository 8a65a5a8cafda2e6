#include "bubbly/shape.hpp"

#include <cmath>

#include "bubbly/numerics.hpp"

namespace bubbly {

double surface_constant_A(const ShapeRequest& request) {
  if (request.kind != ShapeKind::Sphere) throw Error("surface_constant_A: unsupported shape");
  if (!(request.radius > 0.0)) throw Error("surface_constant_A: radius must be positive");
  // For a sphere the inner integral is independent of y; in polar angle theta
  // measured from y it reduces to 2 pi r^2 * int sin(theta/2) sin(theta) dtheta.
  const QuadratureRule rule = gauss_legendre(request.quadrature_points, 0.0, kPi);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = rule.nodes[i];
    acc.add(rule.weights[i] * std::sin(0.5 * th) * std::sin(th));
  }
  return 2.0 * kPi * request.radius * request.radius * acc.value();
}

ShapeConstants make_sphere(double radius, int id) {
  if (!(radius > 0.0)) throw Error("make_sphere: radius must be positive");
  ShapeConstants s;
  s.id = id;
  s.kind = ShapeKind::Sphere;
  s.radius = radius;
  s.volume = 4.0 * kPi * radius * radius * radius / 3.0;
  s.diameter = 2.0 * radius;
  s.surface_A = surface_constant_A({ShapeKind::Sphere, radius, 32});
  return s;
}

std::string shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Sphere:
      return "sphere";
  }
  return "unknown";
}

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "sphere") return ShapeKind::Sphere;
  throw Error("unsupported shape kind: " + name);
}

}  // namespace bubbly
