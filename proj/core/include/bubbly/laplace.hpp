#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bubbly/effective_grid.hpp"
#include "bubbly/incident.hpp"

namespace bubbly {

using cplx = std::complex<double>;

struct LaplaceSample {
  cplx s;
  std::vector<cplx> Y;
  std::vector<cplx> P_in;
  std::vector<cplx> P_sc;
  double in_norm = 0.0;
  double sc_norm = 0.0;
  double solve_residual = 0.0;
};

struct LaplaceOptions {
  int quadrature_panels = 64;
  int points_per_panel = 8;
  double sigma_min = 1e-8;
};

/// int_0^T lambda(t) e^{-s t} dt by composite Gauss-Legendre.
cplx pulse_laplace(const Pulse& pulse, cplx s, const LaplaceOptions& options = {});

/// Solves (hbar s^2 + 1) Y + s^2 V Y = s^2 u_in on the voxels; P_sc = -V Y.
std::vector<LaplaceSample> laplace_oracle(const EffectiveGrid& grid, double hbar, const PointSource& src,
                                          std::span<const cplx> s_list, const LaplaceOptions& options = {});

/// Discrete norm sqrt(sum_k v |f_k|^2).
double voxel_norm(const EffectiveGrid& grid, std::span<const cplx> f);

struct CoercivityRow {
  double sigma = 0.0;
  double omega = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// (rhs - lhs) / ||P_in||.
  double margin = 0.0;
  bool pass = false;
};

/// ||P_sc|| <= b kappa_max |s|^3 / sigma ||chi P_in|| for every sample.
std::vector<CoercivityRow> coercivity_check(std::span<const LaplaceSample> samples, const EffectiveGrid& grid);

/// Transform of the effective scattered potential at x: sum_k b kappa_k v e^{-s r / c0} / (4 pi r) s^m Y_k.
cplx laplace_probe(const LaplaceSample& sample, const EffectiveGrid& grid, const Vec3& x, int derivative = 0);

/// f(t) = e^{sigma t} / pi * Re sum' F(sigma + i k dw) e^{i k dw t} dw with half weight at k = 0.
std::vector<double> bromwich_invert(std::span<const cplx> F, double sigma, double dw, std::span<const double> times);

/// Nodes sigma + i k dw, k = 0..count-1.
std::vector<cplx> bromwich_nodes(double sigma, double dw, std::size_t count);

}  // namespace bubbly
