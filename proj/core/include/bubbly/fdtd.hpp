#pragma once

#include <vector>

#include "bubbly/incident.hpp"
#include "bubbly/placement.hpp"

namespace bubbly {

struct FdtdConfig {
  Domain domain = Domain::unit_cube();
  KField k;
  double c0 = 1.0;
  /// Oscillator coefficient; zero selects the non-dispersive limit W = P.
  double hbar = 1.0;
  double b = 1.0;
  PointSource src;
  double dx = 1.0 / 16.0;
  /// Zero selects 0.5 dx min(1, 1 / sqrt(c0)).
  double dt = 0.0;
  double t_end = 1.0;
  /// Zero selects the smallest padding that holds every probe with a margin.
  double padding = 0.0;
  std::vector<Vec3> probes;
  bool record_field = false;
};

/// Total pressure on the domain cells plus a one-cell halo, every time step.
struct FieldRecord {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0;
  double dt = 0.0;
  double c0 = 1.0;
  std::vector<unsigned char> inside;
  std::vector<double> kappa;
  /// frames[n * cells + ((i * ny) + j) * nz + k]
  std::vector<double> frames;
  std::size_t frame_count = 0;

  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny * nz; }
  std::size_t cell(int i, int j, int k) const { return (static_cast<std::size_t>(i) * ny + j) * nz + k; }
  double at(std::size_t n, int i, int j, int k) const { return frames[n * cells() + cell(i, j, k)]; }
};

struct FdtdResult {
  std::vector<double> times;
  /// Scattered pressure per probe, one value per time.
  std::vector<std::vector<double>> probe_scattered;
  FieldRecord record;
  std::size_t cells = 0;
  std::size_t steps = 0;
  double dt = 0.0;
  double courant = 0.0;
  double seconds = 0.0;
};

double fdtd_default_dt(double dx, double c0);

FdtdResult solve_fdtd(const FdtdConfig& config);

struct SinKernelOptions {
  /// Omit b in the convolution coefficient.
  bool literal_coefficient = false;
};

struct SinKernelResidual {
  double residual = 0.0;
  double reference = 0.0;
  double relative = 0.0;
};

/// Residual of (c0^-1 d_tt - Lap_h + (b/hbar) kappa chi) P - chi b hbar^(-3/2) kappa int sin(hbar^(-1/2)(t - s)) P(s) ds
/// on the recorded inside cells; reference is the norm of c0^-1 d_tt P.
SinKernelResidual sin_kernel_residual(const FieldRecord& record, double hbar, double b,
                                      const SinKernelOptions& options = {});

}  // namespace bubbly
