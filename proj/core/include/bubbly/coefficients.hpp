#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bubbly/placement.hpp"
#include "bubbly/shape.hpp"

namespace bubbly {

struct MediumParams {
  double rho_c = 1.0;
  double k_c = 1.0;
  double rho_b_bar = 1.0;
  double k_b_bar = 1.0;

  double c0() const;
  void validate() const;
};

struct MinnaertCoefficient {
  double hbar = 0.0;
  double omega = 0.0;
};

MinnaertCoefficient minnaert_h(const MediumParams& params, const ShapeConstants& shape);

/// Delta-free scattering coefficient rho_c vol(B) / k_b_bar.
double scattering_b(const MediumParams& params, const ShapeConstants& shape);

/// Dense pairwise coupling of a cloud; row-major M x M storage.
struct CouplingSystem {
  std::size_t M = 0;
  double delta = 0.0;
  double c0 = 1.0;
  std::vector<double> hbar;
  std::vector<double> b_bar;
  std::vector<double> q;
  std::vector<double> tau;
  double tau_min = 0.0;

  double q_at(std::size_t i, std::size_t j) const { return q[i * M + j]; }
  double tau_at(std::size_t i, std::size_t j) const { return tau[i * M + j]; }
  /// b_j = b_bar_j * delta.
  double b(std::size_t j) const { return b_bar[j] * delta; }
  double min_hbar() const;
};

CouplingSystem coupling_matrix(const BubbleCloud& cloud, const MediumParams& params);

struct ConditionRow {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  double k_max = 0.0;
  double a_max = 0.0;

  const ConditionRow& get(const std::string& id) const;
  bool all_pass() const;
};

/// Max over bubbles of the coupling sum restricted to bubbles in other cells.
double inter_cell_row_max(const CouplingSystem& system, const BubbleCloud& cloud);

ConditionReport check_conditions(const CouplingSystem& system, const BubbleCloud& cloud, const MediumParams& params,
                                 double lambda1);

void write_condition_csv(std::ostream& out, const ConditionReport& report);
void write_condition_text(std::ostream& out, const ConditionReport& report);

}  // namespace bubbly
