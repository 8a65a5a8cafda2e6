#include "bubbly/ls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bubbly/numerics.hpp"

namespace bubbly {

namespace {

/// Interaction data for one lattice offset, shared by every voxel pair with that offset.
struct OffsetEntry {
  double g = 0.0;  // v / (4 pi r)
  double tau = 0.0;
  bool explicit_half = true;
  bool explicit_full = true;
  DelayStencil half;
  DelayStencil full;
  double alpha_half = 0.0;
  double alpha_full = 0.0;
};

struct Neighbour {
  std::size_t l;
  double w;      // b kappa_l g
  double alpha;  // weight of the unknown value
};

class LsProblem final : public DelayProblem {
 public:
  LsProblem(const EffectiveGrid& grid, double hbar, const Forcing& forcing, double h, const LsOptions& opt)
      : grid_(grid), forcing_(forcing), opt_(opt) {
    const auto& L = grid.lattice;
    sx_ = 2 * L.nx - 1;
    sy_ = 2 * L.ny - 1;
    sz_ = 2 * L.nz - 1;
    table_.resize(static_cast<std::size_t>(sx_) * sy_ * sz_);
    const double a = L.edge;
    for (int dx = -(L.nx - 1); dx <= L.nx - 1; ++dx) {
      for (int dy = -(L.ny - 1); dy <= L.ny - 1; ++dy) {
        for (int dz = -(L.nz - 1); dz <= L.nz - 1; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          OffsetEntry e;
          const double r = a * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
          e.g = grid.voxel_volume / (4.0 * kPi * r);
          e.tau = r / grid.c0;
          const double xh = 0.5 - e.tau / h;
          const double xf = 1.0 - e.tau / h;
          e.explicit_half = xh <= 0.0;
          e.explicit_full = xf <= 0.0;
          if (e.explicit_half) e.half = delay_stencil(xh); else e.alpha_half = xh / 0.5;
          if (e.explicit_full) e.full = delay_stencil(xf); else e.alpha_full = xf;
          if (!e.explicit_full) any_implicit_ = true;
          if (e.explicit_half) min_base_ = std::min<long>(min_base_, e.half.base);
          if (e.explicit_full) min_base_ = std::min<long>(min_base_, e.full.base);
          table_[index(dx, dy, dz)] = e;
        }
      }
    }
    const std::size_t N = grid.size();
    build_taps();
    origin_ = static_cast<long>(index(0, 0, 0));
    lin_.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
      const Cell& ck = L.cells[k];
      lin_[k] = static_cast<long>(index(ck.ix, ck.iy, ck.iz)) - static_cast<long>(index(0, 0, 0));
    }
    mass_.resize(N);
    bk_.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
      mass_[k] = hbar + grid.self_weight[k];
      bk_[k] = grid.b * static_cast<double>(grid.kappa[k]);
    }
    if (any_implicit_) {
      implicit_half_.resize(N);
      implicit_full_.resize(N);
      for (std::size_t k = 0; k < N; ++k) {
        for (std::size_t l = 0; l < N; ++l) {
          if (l == k) continue;
          const OffsetEntry& e = entry(k, l);
          if (!e.explicit_half) implicit_half_[k].push_back({l, bk_[l] * e.g, e.alpha_half});
          if (!e.explicit_full) implicit_full_[k].push_back({l, bk_[l] * e.g, e.alpha_full});
          if (!e.explicit_full) ++implicit_count_;
        }
      }
    }
  }

  std::size_t size() const override { return grid_.size(); }
  std::size_t implicit_count() const { return implicit_count_; }
  int max_iterations_used() const { return max_iter_used_; }

  void forcing(double t, std::span<double> out) const override { forcing_.evaluate(t, out); }

  void delayed(const History& hist, std::size_t n, double c, std::span<double> out) const override {
    const std::size_t N = grid_.size();
    const long nl = static_cast<long>(n);
    // time-major copy of b kappa_l A_l over the lags the stencils can reach
    const long rows = 2 - min_base_;
    window_.assign(static_cast<std::size_t>(rows) * N, 0.0);
    for (long m = 0; m < rows; ++m) {
      const long node = nl + min_base_ + m;
      if (node < 0 || node > nl + 1) continue;
      double* row = window_.data() + static_cast<std::size_t>(m) * N;
      for (std::size_t l = 0; l < N; ++l) row[l] = bk_[l] * hist.A(l)[node];
    }
    const std::vector<Tap>& taps = c < 0.75 ? half_taps_ : full_taps_;
    const double* win = window_.data();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < N; ++k) {
      const long base_k = origin_ - offset_index(k);
      double acc = 0.0;
      for (std::size_t l = 0; l < N; ++l) {
        if (l == k) continue;
        const Tap& t = taps[static_cast<std::size_t>(base_k + offset_index(l))];
        const double* w = win + t.row * N + l;
        acc += t.gw[0] * w[0] + t.gw[1] * w[N] + t.gw[2] * w[2 * N] + t.gw[3] * w[3 * N];
      }
      out[k] = acc;
    }
  }

  void accelerate(const History&, std::size_t, double c, bool initial, std::span<const double> rhs,
                  std::span<double> acc) const override {
    const std::size_t N = grid_.size();
    for (std::size_t k = 0; k < N; ++k) acc[k] = rhs[k] / mass_[k];
    if (initial || !any_implicit_) return;
    const auto& lists = c < 0.75 ? implicit_half_ : implicit_full_;
    std::vector<double> next(N);
    for (int it = 1; it <= opt_.max_iterations; ++it) {
      double change = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < N; ++k) {
        CompensatedSum s;
        for (const Neighbour& nb : lists[k]) s.add(nb.w * nb.alpha * acc[nb.l]);
        next[k] = (rhs[k] - s.value()) / mass_[k];
        change = std::max(change, std::abs(next[k] - acc[k]));
        scale = std::max(scale, std::abs(next[k]));
      }
      std::copy(next.begin(), next.end(), acc.begin());
      max_iter_used_ = std::max(max_iter_used_, it);
      if (change <= opt_.tolerance * std::max(scale, 1e-300)) return;
    }
    throw Error("solve_ls_time: fixed-point iteration did not converge within " +
                std::to_string(opt_.max_iterations) + " iterations");
  }

 private:
  /// Stencil weights premultiplied by g, with the first window row they touch.
  struct Tap {
    std::size_t row = 0;
    double gw[4] = {0.0, 0.0, 0.0, 0.0};
  };

  void build_taps() {
    const long rows = 2 - min_base_;
    half_taps_.resize(table_.size());
    full_taps_.resize(table_.size());
    for (std::size_t i = 0; i < table_.size(); ++i) {
      const OffsetEntry& e = table_[i];
      for (int which = 0; which < 2; ++which) {
        Tap& t = which == 0 ? half_taps_[i] : full_taps_[i];
        const bool expl = which == 0 ? e.explicit_half : e.explicit_full;
        if (e.g == 0.0) {
          t.row = static_cast<std::size_t>(-min_base_);
          continue;
        }
        if (expl) {
          const DelayStencil& st = which == 0 ? e.half : e.full;
          t.row = static_cast<std::size_t>(st.base - min_base_);
          for (int j = 0; j < 4; ++j) t.gw[j] = e.g * st.w[j];
        } else {
          // implicit part handled in accelerate; the known newest node carries 1 - alpha
          const double alpha = which == 0 ? e.alpha_half : e.alpha_full;
          t.row = static_cast<std::size_t>(-min_base_);
          t.gw[0] = e.g * (1.0 - alpha);
        }
        if (static_cast<long>(t.row) + 3 >= rows) throw Error("LsProblem: stencil outside the history window");
      }
    }
  }
  long offset_index(std::size_t k) const { return lin_[k]; }

  std::size_t index(int dx, int dy, int dz) const {
    const auto& L = grid_.lattice;
    return (static_cast<std::size_t>(dx + L.nx - 1) * sy_ + static_cast<std::size_t>(dy + L.ny - 1)) * sz_ +
           static_cast<std::size_t>(dz + L.nz - 1);
  }
  const OffsetEntry& entry(std::size_t k, std::size_t l) const {
    const Cell& a = grid_.lattice.cells[k];
    const Cell& b = grid_.lattice.cells[l];
    return table_[index(b.ix - a.ix, b.iy - a.iy, b.iz - a.iz)];
  }

  const EffectiveGrid& grid_;
  const Forcing& forcing_;
  LsOptions opt_;
  int sx_ = 0, sy_ = 0, sz_ = 0;
  std::vector<OffsetEntry> table_;
  std::vector<double> mass_, bk_;
  bool any_implicit_ = false;
  std::size_t implicit_count_ = 0;
  std::vector<std::vector<Neighbour>> implicit_half_, implicit_full_;
  long min_base_ = -2;
  std::vector<Tap> half_taps_, full_taps_;
  std::vector<long> lin_;
  long origin_ = 0;
  mutable std::vector<double> window_;
  mutable int max_iter_used_ = 0;
};

}  // namespace

FieldHistory solve_ls_time(const EffectiveGrid& grid, double hbar, const Forcing& forcing, const TimeGrid& tgrid,
                           const LsOptions& options, LsStats* stats) {
  tgrid.validate();
  if (!(hbar > 0.0)) throw Error("solve_ls_time: hbar must be positive");
  if (forcing.size() != grid.size()) throw Error("solve_ls_time: forcing size differs from the voxel count");
  LsProblem problem(grid, hbar, forcing, tgrid.h, options);
  MarchStats ms;
  FieldHistory out = march(problem, tgrid, &ms);
  if (stats) {
    stats->steps = ms.steps;
    stats->seconds = ms.seconds;
    stats->max_iterations_used = problem.max_iterations_used();
    stats->implicit_neighbours = problem.implicit_count();
  }
  return out;
}

FieldHistory solve_ls_time(const EffectiveGrid& grid, double hbar, const PointSource& src, const TimeGrid& tgrid,
                           const LsOptions& options, LsStats* stats) {
  std::vector<Vec3> pts(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) pts[k] = grid.centroid(k);
  IncidentForcing forcing(src, std::move(pts));
  return solve_ls_time(grid, hbar, forcing, tgrid, options, stats);
}

double ls_node_residual(const EffectiveGrid& grid, double hbar, const Forcing& forcing, const FieldHistory& hist) {
  const std::size_t N = grid.size();
  const double h = hist.h();
  std::vector<double> f(N);
  double fmax = 0.0, rmax = 0.0;
  for (std::size_t n = 0; n < hist.nodes(); ++n) {
    const double t = h * static_cast<double>(n);
    forcing.evaluate(t, f);
    for (std::size_t k = 0; k < N; ++k) {
      fmax = std::max(fmax, std::abs(f[k]));
      CompensatedSum d;
      for (std::size_t l = 0; l < N; ++l) {
        if (l == k) continue;
        const double w = grid.weight(k, l);
        if (w == 0.0) continue;
        const double ts = t - grid.delay(k, l);
        if (ts <= 0.0) continue;
        double val;
        if (n == 0) {
          val = 0.0;
        } else if (ts <= h * static_cast<double>(n - 1)) {
          val = hist.value(l, ts, 2, n - 1);
        } else {
          const double alpha = (ts - h * static_cast<double>(n - 1)) / h;
          val = (1.0 - alpha) * hist.A(l)[n - 1] + alpha * hist.A(l)[n];
        }
        d.add(w * val);
      }
      const double r = (hbar + grid.self_weight[k]) * hist.A(k)[n] + hist.Y(k)[n] + d.value() - f[k];
      rmax = std::max(rmax, std::abs(r));
    }
  }
  return fmax > 0.0 ? rmax / fmax : rmax;
}

double effective_scattered(const FieldHistory& hist, const EffectiveGrid& grid, const Vec3& x, double t,
                           int derivative, double scale) {
  if (grid.lattice.domain.contains(x)) throw Error("effective_scattered: probe lies inside the domain");
  CompensatedSum acc;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = distance(x, grid.centroid(k));
    const double ts = t - r / grid.c0;
    if (ts <= 0.0) continue;
    acc.add(grid.b * static_cast<double>(grid.kappa[k]) * grid.voxel_volume / (4.0 * kPi * r) *
            hist.value(k, ts, derivative));
  }
  return scale * acc.value();
}

std::vector<double> effective_scattered_series(const FieldHistory& hist, const EffectiveGrid& grid, const Vec3& x,
                                               std::span<const double> times, int derivative, double scale) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out[i] = effective_scattered(hist, grid, x, times[i], derivative, scale);
  return out;
}

}  // namespace bubbly
