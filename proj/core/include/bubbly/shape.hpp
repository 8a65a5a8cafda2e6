#pragma once

#include <string>

namespace bubbly {

enum class ShapeKind { Sphere };

/// Reference shape B of a bubble together with its geometric constants.
struct ShapeConstants {
  int id = 0;
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 1.0;
  double volume = 0.0;
  double diameter = 0.0;
  double surface_A = 0.0;
};

/// Request for the surface double-integral constant.
struct ShapeRequest {
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 1.0;
  int quadrature_points = 32;
};

/// A = (1/|dB|) * double surface integral of (x - y).n_x / |x - y|.
double surface_constant_A(const ShapeRequest& request);

/// Sphere of the given radius with all constants evaluated.
ShapeConstants make_sphere(double radius, int id = 0);

std::string shape_kind_name(ShapeKind kind);
ShapeKind parse_shape_kind(const std::string& name);

}  // namespace bubbly
