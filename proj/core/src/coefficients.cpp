#include "bubbly/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bubbly/numerics.hpp"

namespace bubbly {

double MediumParams::c0() const { return std::sqrt(k_c / rho_c); }

void MediumParams::validate() const {
  if (!(rho_c > 0.0 && k_c > 0.0 && rho_b_bar > 0.0 && k_b_bar > 0.0))
    throw Error("medium parameters must be strictly positive");
}

MinnaertCoefficient minnaert_h(const MediumParams& params, const ShapeConstants& shape) {
  params.validate();
  MinnaertCoefficient m;
  m.hbar = params.rho_c * shape.surface_A / (2.0 * params.k_b_bar);
  m.omega = 1.0 / std::sqrt(m.hbar);
  return m;
}

double scattering_b(const MediumParams& params, const ShapeConstants& shape) {
  params.validate();
  return params.rho_c * shape.volume / params.k_b_bar;
}

double CouplingSystem::min_hbar() const {
  double m = std::numeric_limits<double>::infinity();
  for (double h : hbar) m = std::min(m, h);
  return m;
}

CouplingSystem coupling_matrix(const BubbleCloud& cloud, const MediumParams& params) {
  const std::size_t M = cloud.size();
  if (M < 1) throw Error("coupling_matrix: empty cloud");
  CouplingSystem sys;
  sys.M = M;
  sys.delta = cloud.delta;
  sys.c0 = params.c0();
  sys.hbar.resize(M);
  sys.b_bar.resize(M);
  std::vector<double> shape_h(cloud.shapes.size()), shape_b(cloud.shapes.size());
  for (std::size_t s = 0; s < cloud.shapes.size(); ++s) {
    shape_h[s] = minnaert_h(params, cloud.shapes[s]).hbar;
    shape_b[s] = scattering_b(params, cloud.shapes[s]);
  }
  for (std::size_t i = 0; i < M; ++i) {
    sys.hbar[i] = shape_h[cloud.bubbles[i].shape];
    sys.b_bar[i] = shape_b[cloud.bubbles[i].shape];
  }
  sys.q.assign(M * M, 0.0);
  sys.tau.assign(M * M, 0.0);
  bool coincident = false;
#pragma omp parallel for schedule(static) reduction(|| : coincident)
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (i == j) continue;
      const double r = distance(cloud.bubbles[i].center, cloud.bubbles[j].center);
      if (r == 0.0) {
        coincident = true;
        continue;
      }
      sys.q[i * M + j] = sys.b_bar[j] * sys.delta / r;
      sys.tau[i * M + j] = r / sys.c0;
    }
  }
  if (coincident) throw Error("coupling_matrix: coincident bubble centres");
  sys.tau_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j) sys.tau_min = std::min(sys.tau_min, sys.tau[i * M + j]);
  if (M < 2) sys.tau_min = std::numeric_limits<double>::infinity();
  return sys;
}

const ConditionRow& ConditionReport::get(const std::string& id) const {
  for (const auto& r : rows)
    if (r.id == id) return r;
  throw Error("condition report has no row " + id);
}

bool ConditionReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConditionRow& r) { return r.pass; });
}

namespace {

ConditionRow make_row(const std::string& id, double lhs, double rhs) {
  return {id, lhs, rhs, rhs - lhs, lhs < rhs};
}

}  // namespace

double inter_cell_row_max(const CouplingSystem& system, const BubbleCloud& cloud) {
  const std::size_t M = system.M;
  double best = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    CompensatedSum s;
    const int ci = cloud.bubbles[i].cell;
    for (std::size_t j = 0; j < M; ++j)
      if (cloud.bubbles[j].cell != ci) s.add(system.q_at(i, j));
    best = std::max(best, s.value());
  }
  return best;
}

ConditionReport check_conditions(const CouplingSystem& system, const BubbleCloud& cloud, const MediumParams& params,
                                 double lambda1) {
  if (!(lambda1 > 0.0)) throw Error("check_conditions: lambda1 must be positive");
  if (system.M != cloud.size()) throw Error("check_conditions: system and cloud sizes differ");
  ConditionReport rep;
  const std::size_t M = system.M;
  double vol_max = 0.0, r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
  for (const auto& s : cloud.shapes) {
    vol_max = std::max(vol_max, s.volume);
    r_min = std::min(r_min, s.radius);
    r_max = std::max(r_max, s.radius);
  }
  const double d = M >= 2 ? min_pair_distance(cloud.centers()) : std::numeric_limits<double>::infinity();
  const double ratio = system.delta / d;
  const double c1 = params.rho_c / (4.0 * kPi) * vol_max * std::pow(ratio, 6) / (lambda1 * lambda1);
  rep.rows.push_back(make_row("C1", c1, 1.0));

  double row_max = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    CompensatedSum s;
    for (std::size_t j = 0; j < M; ++j) s.add(system.q_at(i, j));
    row_max = std::max(row_max, s.value());
  }
  const double h_min = system.min_hbar();
  rep.rows.push_back(make_row("C2", row_max, h_min));

  double k_max = 0.0;
  for (std::size_t m = 0; m + 1 < cloud.cell_begin.size(); ++m) {
    const int first = cloud.cell_begin[m];
    if (first == cloud.cell_begin[m + 1]) continue;
    k_max = std::max(k_max, cloud.kfield.value(cloud.bubbles[first].center) + 1.0);
  }
  rep.k_max = k_max;
  const double inter = inter_cell_row_max(system, cloud);
  rep.rows.push_back(make_row("C3", std::sqrt(k_max) * inter, h_min));

  double a_max = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    CompensatedSum s;
    const int ci = cloud.bubbles[i].cell;
    for (std::size_t j = 0; j < M; ++j) {
      if (cloud.bubbles[j].cell == ci) continue;
      s.add(system.delta / distance(cloud.bubbles[i].center, cloud.bubbles[j].center));
    }
    a_max = std::max(a_max, s.value());
  }
  rep.a_max = a_max;
  const ShapeConstants unit = make_sphere(1.0);
  double design = std::numeric_limits<double>::infinity();
  if (a_max > 0.0) {
    const double f = unit.surface_A / (2.0 * a_max * unit.volume);
    design = f * f * std::pow(r_min, 4) / std::pow(r_max, 6);
  }
  rep.rows.push_back(make_row("KMAX", k_max, design));
  return rep;
}

void write_condition_csv(std::ostream& out, const ConditionReport& report) {
  out << "id,lhs,rhs,margin,pass\n";
  for (const auto& r : report.rows)
    out << r.id << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << format_double(r.margin) << ','
        << (r.pass ? 1 : 0) << '\n';
}

void write_condition_text(std::ostream& out, const ConditionReport& report) {
  for (const auto& r : report.rows)
    out << r.id << ": lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs)
        << " margin=" << format_double(r.margin) << (r.pass ? " pass" : " FAIL") << '\n';
}

}  // namespace bubbly
