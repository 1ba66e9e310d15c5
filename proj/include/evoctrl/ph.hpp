#pragma once

#include "evoctrl/integrators.hpp"
#include "evoctrl/ocp.hpp"

#include <optional>
#include <string>

namespace evoctrl {

/// Port-Hamiltonian node on xi = (H x, u):
///   M x' = FG xi,   y = -KL xi,
/// with storage 1/2 x^T M H x and supply <y, u>_Wu. M H must be symmetric.
struct PHNode {
  Sparse M;
  Dense FG; // n x (n+m)
  Dense KL; // m x (n+m)
  Dense H;  // n x n
  Dense Wu; // m x m
  Dense RS; // w x (n+m); empty until a dissipation factor is attached

  Index n() const { return FG.rows(); }
  Index m() const { return FG.cols() - FG.rows(); }
  Index w() const { return RS.rows(); }

  void validate() const;
  /// P = [FG; Wu KL], so that d/dt(stored) - <y,u>_Wu = xi^T P xi.
  Dense quadratic_form() const;
  /// Largest eigenvalue of sym(P) relative to ||P||_max; <= 0 for dissipative nodes.
  double dissipativity_violation() const;
};

/// RS with 2 ||RS xi||^2 = -xi^T P xi. Rows from eigenvalues of -sym(P)
/// above 1e-12 lambda_max, scaled by sqrt(lambda/2).
Dense dissipation_factor(const Dense &P);

/// Node with RS = dissipation_factor(quadratic_form()).
PHNode with_dissipation(PHNode ph);

/// (M, FG_x H, FG_u, -KL_x H, -KL_u) with Wu on both ports.
DescriptorSystem to_descriptor(const PHNode &ph);

/// Same dynamics with output w = RS xi and Wy = 4 I, so that
/// 1/2 ||w||^2_Wy integrates to the dissipated energy 2 int ||w||^2.
DescriptorSystem dissipation_system(const PHNode &ph);

/// Output extension (C; 0), (D; sqrt(alpha) I), Wy' = diag(Wy, Wu): an
/// alpha = 0 tracking cost on the extended system equals the input-penalized one.
DescriptorSystem extend_with_input_output(const DescriptorSystem &sys, double alpha);

struct EnergyLedger {
  TimeGrid grid;
  Vec stored;     // N+1 node values 1/2 x^T M H x
  Vec supplied;   // N interval values dt <y,u>_Wu at the stage
  Vec dissipated; // N interval values dt 2 ||w||^2 at the stage

  double residual() const;
  double scale() const;
  double relative_residual() const;
};

EnergyLedger energy_ledger(const PHNode &ph, const Vec &x0, const IntervalTrajectory &u,
                           Scheme scheme);
double energy_balance_residual(const PHNode &ph, const Vec &x0, const IntervalTrajectory &u,
                               Scheme scheme);
/// `t,stored,supplied_cum,dissipated_cum,balance_residual` per node.
void write_energy_csv(const std::string &path, const EnergyLedger &ledger);

struct Reformulation {
  DescriptorSystem system;
  CostSpec cost;
  std::optional<Dense> Fc;
  std::optional<Vec> z_c;
};

/// Output w, terminal operator [F; sqrt(M H)] with target (z_f, 0) and Z
/// weight diag(scale Wz, I). For every u:
///   J_reform(u) - 1/2 <x0, H x0>_M = int <y,u>_Wu + scale/2 ||F x(T) - z_f||^2_Wz.
Reformulation energy_optimal_reformulate(const PHNode &ph, const TerminalWeight &F,
                                         const TimeGrid &grid,
                                         std::optional<Dense> Fc = std::nullopt,
                                         std::optional<Vec> z_c = std::nullopt);

/// Supplied energy plus terminal weight, evaluated directly from the y-output run.
double supplied_energy_cost(const PHNode &ph, const TerminalWeight &F, const Vec &x0,
                            const IntervalTrajectory &u, Scheme scheme);

} // namespace evoctrl
