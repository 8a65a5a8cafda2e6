#include "bubbly/fdtd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <string>

#include "bubbly/numerics.hpp"

namespace bubbly {

double fdtd_default_dt(double dx, double c0) { return 0.5 * dx * std::min(1.0, 1.0 / std::sqrt(c0)); }

namespace {

int snap_count(double length, double dx, const char* what) {
  const double n = length / dx;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-6 * std::max(1.0, n) || r < 1.0)
    throw Error(std::string("solve_fdtd: domain ") + what + " extent is not a multiple of the space step");
  return static_cast<int>(r);
}

}  // namespace

FdtdResult solve_fdtd(const FdtdConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  if (!(cfg.dx > 0.0)) throw Error("solve_fdtd: space step must be positive");
  if (!(cfg.c0 > 0.0)) throw Error("solve_fdtd: wave speed must be positive");
  if (!(cfg.hbar >= 0.0)) throw Error("solve_fdtd: hbar must be non-negative");
  if (!(cfg.b >= 0.0)) throw Error("solve_fdtd: b must be non-negative");
  if (!(cfg.t_end > 0.0)) throw Error("solve_fdtd: end time must be positive");
  validate_source(cfg.src, cfg.domain);
  const double dx = cfg.dx;
  const double dt = cfg.dt > 0.0 ? cfg.dt : fdtd_default_dt(dx, cfg.c0);
  const double courant = std::sqrt(cfg.c0) * dt / dx;
  if (courant > 1.0 / std::sqrt(3.0) + 1e-12)
    throw Error("solve_fdtd: CFL violation, sqrt(c0) dt / dx = " + format_double(courant));

  const Box3 bb = cfg.domain.bounding_box();
  const Vec3 ext = bb.extent();
  const int ox = snap_count(ext.x, dx, "x");
  const int oy = snap_count(ext.y, dx, "y");
  const int oz = snap_count(ext.z, dx, "z");
  double pad = cfg.padding;
  if (pad <= 0.0) {
    pad = 4.0 * dx;
    for (const Vec3& p : cfg.probes)
      for (int a = 0; a < 3; ++a) pad = std::max({pad, bb.lo[a] - p[a] + 3.0 * dx, p[a] - bb.hi[a] + 3.0 * dx});
  }
  const int np = static_cast<int>(std::ceil(pad / dx - 1e-9));
  const int nx = ox + 2 * np, ny = oy + 2 * np, nz = oz + 2 * np;
  const Vec3 origin = bb.lo - Vec3{np * dx, np * dx, np * dx};
  const std::size_t ncell = static_cast<std::size_t>(nx) * ny * nz;
  auto cid = [&](int i, int j, int k) { return (static_cast<std::size_t>(i) * ny + j) * nz + k; };
  auto center = [&](int i, int j, int k) { return origin + Vec3{(i + 0.5) * dx, (j + 0.5) * dx, (k + 0.5) * dx}; };

  // oscillator cells
  std::vector<std::size_t> osc_cell;
  std::vector<double> osc_beta, osc_dist;
  std::vector<long> cell_osc(ncell, -1);
  for (int i = np; i < np + ox; ++i)
    for (int j = np; j < np + oy; ++j)
      for (int k = np; k < np + oz; ++k) {
        const Vec3 c = center(i, j, k);
        const Box3 box{c - Vec3{0.5 * dx, 0.5 * dx, 0.5 * dx}, c + Vec3{0.5 * dx, 0.5 * dx, 0.5 * dx}};
        if (!cfg.domain.contains_box(box)) continue;
        cell_osc[cid(i, j, k)] = static_cast<long>(osc_cell.size());
        osc_cell.push_back(cid(i, j, k));
        osc_beta.push_back(cfg.b * static_cast<double>(cfg.k.weight(c)));
        osc_dist.push_back(distance(c, cfg.src.location));
      }

  // probes: trilinear weights on cell centres
  struct ProbeStencil {
    std::size_t idx[8];
    double w[8];
  };
  std::vector<ProbeStencil> probes;
  for (const Vec3& p : cfg.probes) {
    if (cfg.domain.contains(p)) throw Error("solve_fdtd: probe lies inside the domain");
    const Vec3 r = (p - origin) * (1.0 / dx) - Vec3{0.5, 0.5, 0.5};
    const int i0 = static_cast<int>(std::floor(r.x));
    const int j0 = static_cast<int>(std::floor(r.y));
    const int k0 = static_cast<int>(std::floor(r.z));
    if (i0 < 1 || j0 < 1 || k0 < 1 || i0 + 2 >= nx || j0 + 2 >= ny || k0 + 2 >= nz)
      throw Error("solve_fdtd: probe lies outside the computational box");
    const double fx = r.x - i0, fy = r.y - j0, fz = r.z - k0;
    ProbeStencil s;
    int c = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int d = 0; d < 2; ++d) {
          s.idx[c] = cid(i0 + a, j0 + b, k0 + d);
          s.w[c] = (a ? fx : 1.0 - fx) * (b ? fy : 1.0 - fy) * (d ? fz : 1.0 - fz);
          ++c;
        }
    probes.push_back(s);
  }

  const std::size_t steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
  FdtdResult res;
  res.dt = dt;
  res.courant = courant;
  res.cells = ncell;
  res.steps = steps;
  res.probe_scattered.assign(probes.size(), std::vector<double>(steps + 1, 0.0));
  res.times.resize(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) res.times[n] = dt * static_cast<double>(n);

  // record window: domain cells plus one halo cell
  FieldRecord& rec = res.record;
  const int rx0 = np - 1, ry0 = np - 1, rz0 = np - 1;
  if (cfg.record_field) {
    rec.nx = ox + 2;
    rec.ny = oy + 2;
    rec.nz = oz + 2;
    rec.dx = dx;
    rec.dt = dt;
    rec.c0 = cfg.c0;
    const double total = static_cast<double>(rec.cells()) * static_cast<double>(steps + 1);
    if (total > 4e8) throw Error("solve_fdtd: field record too large");
    rec.inside.assign(rec.cells(), 0);
    rec.kappa.assign(rec.cells(), 0.0);
    rec.frames.assign(rec.cells() * (steps + 1), 0.0);
    rec.frame_count = steps + 1;
    for (std::size_t o = 0; o < osc_cell.size(); ++o) {
      const std::size_t c = osc_cell[o];
      const int i = static_cast<int>(c / (static_cast<std::size_t>(ny) * nz));
      const int j = static_cast<int>((c / nz) % ny);
      const int k = static_cast<int>(c % nz);
      const std::size_t rc = rec.cell(i - rx0, j - ry0, k - rz0);
      rec.inside[rc] = 1;
      rec.kappa[rc] = cfg.b > 0.0 ? osc_beta[o] / cfg.b : static_cast<double>(cfg.k.weight(center(i, j, k)));
    }
  }

  std::vector<double> P(ncell, 0.0);
  std::vector<double> Ux(static_cast<std::size_t>(nx + 1) * ny * nz, 0.0);
  std::vector<double> Uy(static_cast<std::size_t>(nx) * (ny + 1) * nz, 0.0);
  std::vector<double> Uz(static_cast<std::size_t>(nx) * ny * (nz + 1), 0.0);
  auto ux = [&](int i, int j, int k) -> double& { return Ux[(static_cast<std::size_t>(i) * ny + j) * nz + k]; };
  auto uy = [&](int i, int j, int k) -> double& { return Uy[(static_cast<std::size_t>(i) * (ny + 1) + j) * nz + k]; };
  auto uz = [&](int i, int j, int k) -> double& { return Uz[(static_cast<std::size_t>(i) * ny + j) * (nz + 1) + k]; };
  const std::size_t nosc = osc_cell.size();
  std::vector<double> W(nosc, 0.0), Wd(nosc, 0.0), pin_prev(nosc, 0.0), pin_next(nosc, 0.0);

  const bool dispersive = cfg.hbar > 0.0;
  const double omega = dispersive ? 1.0 / std::sqrt(cfg.hbar) : 0.0;
  const double cs = dispersive ? std::cos(omega * dt) : 0.0;
  const double sn = dispersive ? std::sin(omega * dt) : 0.0;
  // W(dt) = A P1 + B with A = 1 - sin(w dt) / (w dt)
  const double sinc = dispersive ? sn / (omega * dt) : 0.0;
  const double Acoef = 1.0 - sinc;
  const double inv_z = 1.0 / std::sqrt(cfg.c0);
  const double rdx = dt / dx;

  auto record_frame = [&](std::size_t n) {
    if (!cfg.record_field) return;
    const double t = dt * static_cast<double>(n);
    for (int i = 0; i < rec.nx; ++i)
      for (int j = 0; j < rec.ny; ++j)
        for (int k = 0; k < rec.nz; ++k) {
          const int gi = i + rx0, gj = j + ry0, gk = k + rz0;
          const Vec3 c = center(gi, gj, gk);
          rec.frames[n * rec.cells() + rec.cell(i, j, k)] =
              P[cid(gi, gj, gk)] + incident_field(cfg.src, c, t, 0);
        }
  };
  record_frame(0);

  for (std::size_t n = 0; n < steps; ++n) {
    const double t1 = dt * static_cast<double>(n + 1);
    // velocity half step
#pragma omp parallel for schedule(static)
    for (int i = 1; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) ux(i, j, k) -= rdx * (P[cid(i, j, k)] - P[cid(i - 1, j, k)]);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
      for (int j = 1; j < ny; ++j)
        for (int k = 0; k < nz; ++k) uy(i, j, k) -= rdx * (P[cid(i, j, k)] - P[cid(i, j - 1, k)]);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 1; k < nz; ++k) uz(i, j, k) -= rdx * (P[cid(i, j, k)] - P[cid(i, j, k - 1)]);
    // outgoing impedance on the outer faces
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k) {
        ux(0, j, k) = -inv_z * P[cid(0, j, k)];
        ux(nx, j, k) = inv_z * P[cid(nx - 1, j, k)];
      }
    for (int i = 0; i < nx; ++i)
      for (int k = 0; k < nz; ++k) {
        uy(i, 0, k) = -inv_z * P[cid(i, 0, k)];
        uy(i, ny, k) = inv_z * P[cid(i, ny - 1, k)];
      }
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        uz(i, j, 0) = -inv_z * P[cid(i, j, 0)];
        uz(i, j, nz) = inv_z * P[cid(i, j, nz - 1)];
      }
    // pressure step; oscillator cells solve a scalar implicit equation
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
          const double div = (ux(i + 1, j, k) - ux(i, j, k)) + (uy(i, j + 1, k) - uy(i, j, k)) +
                             (uz(i, j, k + 1) - uz(i, j, k));
          const std::size_t c = cid(i, j, k);
          const double R = P[c] - cfg.c0 * rdx * div;
          const long o = cell_osc[c];
          if (o < 0) {
            P[c] = R;
            continue;
          }
          const double beta = osc_beta[o];
          const double pin1 = pulse_eval(cfg.src.pulse, t1 - osc_dist[o] / cfg.src.c0, 0) / osc_dist[o];
          const double p0 = pin_prev[o] + P[c];
          double Bcoef;
          if (dispersive) {
            Bcoef = p0 * (sinc - cs) + W[o] * cs + Wd[o] * sn / omega;
          } else {
            Bcoef = 0.0;
          }
          const double psc1 = (R - cfg.c0 * beta * (Acoef * pin1 + Bcoef - W[o])) / (1.0 + cfg.c0 * beta * Acoef);
          const double p1 = pin1 + psc1;
          const double w1 = Acoef * p1 + Bcoef;
          if (dispersive) {
            const double s = (p1 - p0) / dt;
            Wd[o] = s - omega * (W[o] - p0) * sn + (Wd[o] - s) * cs;
          } else {
            Wd[o] = (w1 - W[o]) / dt;
          }
          W[o] = w1;
          pin_next[o] = pin1;
          P[c] = psc1;
        }
    std::swap(pin_prev, pin_next);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      double v = 0.0;
      for (int a = 0; a < 8; ++a) v += probes[p].w[a] * P[probes[p].idx[a]];
      res.probe_scattered[p][n + 1] = v;
    }
    if ((n & 63) == 0) {
      for (std::size_t c = 0; c < ncell; c += 97)
        if (!std::isfinite(P[c])) throw Error("solve_fdtd: non-finite field at step " + std::to_string(n + 1));
    }
    record_frame(n + 1);
  }
  for (double v : P)
    if (!std::isfinite(v)) throw Error("solve_fdtd: non-finite field at the final step");
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

SinKernelResidual sin_kernel_residual(const FieldRecord& rec, double hbar, double b, const SinKernelOptions& options) {
  if (!(hbar > 0.0)) throw Error("sin_kernel_residual: hbar must be positive");
  SinKernelResidual out;
  if (rec.frame_count < 3) return out;
  const double dt = rec.dt;
  const double dx = rec.dx;
  const double omega = 1.0 / std::sqrt(hbar);
  const double conv_coef = (options.literal_coefficient ? 1.0 : b) * std::pow(hbar, -1.5);
  const std::complex<double> rot = std::polar(1.0, omega * dt);
  CompensatedSum res2, ref2;
  for (int i = 1; i + 1 < rec.nx; ++i)
    for (int j = 1; j + 1 < rec.ny; ++j)
      for (int k = 1; k + 1 < rec.nz; ++k) {
        const std::size_t c = rec.cell(i, j, k);
        if (!rec.inside[c]) continue;
        const double kap = rec.kappa[c];
        std::complex<double> J(0.0, 0.0);
        for (std::size_t n = 1; n + 1 < rec.frame_count; ++n) {
          // trapezoidal running convolution with e^{i w (t - s)}
          J = rot * J + 0.5 * dt * (rot * rec.at(n - 1, i, j, k) + rec.at(n, i, j, k));
          const double p = rec.at(n, i, j, k);
          const double dtt = (rec.at(n + 1, i, j, k) - 2.0 * p + rec.at(n - 1, i, j, k)) / (dt * dt) / rec.c0;
          const double lap = (rec.at(n, i + 1, j, k) + rec.at(n, i - 1, j, k) + rec.at(n, i, j + 1, k) +
                              rec.at(n, i, j - 1, k) + rec.at(n, i, j, k + 1) + rec.at(n, i, j, k - 1) - 6.0 * p) /
                             (dx * dx);
          const double r = dtt - lap + (b / hbar) * kap * p - conv_coef * kap * J.imag();
          res2.add(r * r);
          ref2.add(dtt * dtt);
        }
      }
  out.residual = std::sqrt(res2.value());
  out.reference = std::sqrt(ref2.value());
  out.relative = out.reference > 0.0 ? out.residual / out.reference : out.residual;
  return out;
}

}  // namespace bubbly
