#include "bubbly/laplace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "bubbly/numerics.hpp"

namespace bubbly {

cplx pulse_laplace(const Pulse& pulse, cplx s, const LaplaceOptions& options) {
  const QuadratureRule rule = gauss_legendre(options.points_per_panel, 0.0, 1.0);
  const double T = pulse.support;
  const double w = T / options.quadrature_panels;
  cplx acc(0.0, 0.0);
  for (int p = 0; p < options.quadrature_panels; ++p) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = (p + rule.nodes[q]) * w;
      acc += rule.weights[q] * w * pulse_eval(pulse, t, 0) * std::exp(-s * t);
    }
  }
  return acc;
}

double voxel_norm(const EffectiveGrid& grid, std::span<const cplx> f) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < f.size(); ++k) acc.add(grid.voxel_volume * std::norm(f[k]));
  return std::sqrt(acc.value());
}

std::vector<LaplaceSample> laplace_oracle(const EffectiveGrid& grid, double hbar, const PointSource& src,
                                          std::span<const cplx> s_list, const LaplaceOptions& options) {
  const std::size_t N = grid.size();
  std::vector<double> r0(N);
  for (std::size_t k = 0; k < N; ++k) r0[k] = distance(grid.centroid(k), src.location);
  std::vector<LaplaceSample> out;
  out.reserve(s_list.size());
  for (const cplx s : s_list) {
    if (!(s.real() >= options.sigma_min)) throw Error("laplace_oracle: Re(s) must be positive");
    LaplaceSample smp;
    smp.s = s;
    const cplx lam = pulse_laplace(src.pulse, s, options);
    smp.P_in.resize(N);
    for (std::size_t k = 0; k < N; ++k) smp.P_in[k] = lam * std::exp(-s * r0[k] / src.c0) / r0[k];
    Eigen::MatrixXcd V(N, N);
    for (std::size_t k = 0; k < N; ++k) {
      for (std::size_t l = 0; l < N; ++l) {
        if (k == l) {
          V(k, l) = grid.self_weight[k];
        } else {
          const double r = distance(grid.centroid(k), grid.centroid(l));
          V(k, l) = grid.b * static_cast<double>(grid.kappa[l]) * grid.voxel_volume * std::exp(-s * r / grid.c0) /
                    (4.0 * kPi * r);
        }
      }
    }
    const cplx s2 = s * s;
    Eigen::MatrixXcd A = s2 * V;
    A.diagonal().array() += hbar * s2 + 1.0;
    Eigen::VectorXcd rhs(N);
    for (std::size_t k = 0; k < N; ++k) rhs[k] = s2 * smp.P_in[k];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::VectorXcd y = lu.solve(rhs);
    const double rn = rhs.norm();
    smp.solve_residual = rn > 0.0 ? (A * y - rhs).norm() / rn : (A * y - rhs).norm();
    if (!(smp.solve_residual <= 1e-10)) throw Error("laplace_oracle: linear solve residual above 1e-10");
    const Eigen::VectorXcd psc = -(V * y);
    smp.Y.assign(y.data(), y.data() + N);
    smp.P_sc.assign(psc.data(), psc.data() + N);
    smp.in_norm = voxel_norm(grid, smp.P_in);
    smp.sc_norm = voxel_norm(grid, smp.P_sc);
    out.push_back(std::move(smp));
  }
  return out;
}

std::vector<CoercivityRow> coercivity_check(std::span<const LaplaceSample> samples, const EffectiveGrid& grid) {
  long kmax = 1;
  for (long k : grid.kappa) kmax = std::max(kmax, k);
  std::vector<CoercivityRow> rows;
  for (const auto& smp : samples) {
    CoercivityRow r;
    r.sigma = smp.s.real();
    r.omega = smp.s.imag();
    const double mod = std::abs(smp.s);
    r.lhs = smp.sc_norm;
    r.rhs = grid.b * static_cast<double>(kmax) * mod * mod * mod / r.sigma * smp.in_norm;
    r.margin = smp.in_norm > 0.0 ? (r.rhs - r.lhs) / smp.in_norm : r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    rows.push_back(r);
  }
  return rows;
}

cplx laplace_probe(const LaplaceSample& sample, const EffectiveGrid& grid, const Vec3& x, int derivative) {
  cplx acc(0.0, 0.0);
  const cplx sm = std::pow(sample.s, derivative);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = distance(x, grid.centroid(k));
    acc += grid.b * static_cast<double>(grid.kappa[k]) * grid.voxel_volume * std::exp(-sample.s * r / grid.c0) /
           (4.0 * kPi * r) * sample.Y[k];
  }
  return sm * acc;
}

std::vector<cplx> bromwich_nodes(double sigma, double dw, std::size_t count) {
  std::vector<cplx> s(count);
  for (std::size_t k = 0; k < count; ++k) s[k] = cplx(sigma, dw * static_cast<double>(k));
  return s;
}

std::vector<double> bromwich_invert(std::span<const cplx> F, double sigma, double dw, std::span<const double> times) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
      const double wk = k == 0 ? 0.5 : 1.0;
      acc += wk * (F[k] * std::polar(1.0, dw * static_cast<double>(k) * t)).real();
    }
    out[i] = std::exp(sigma * t) / kPi * acc * dw;
  }
  return out;
}

}  // namespace bubbly
