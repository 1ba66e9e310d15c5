#pragma once

#include "evoctrl/integrators.hpp"

namespace evoctrl {

/// Dense realizations of the solution operators on a small instance.
/// Trajectories are vectorized sample-major (interval 0 first).
struct OperatorPanel {
  Dense B_T; // n x (N m): input to final state, x0 = 0
  Dense C_T; // (N p) x n: initial state to output, u = 0
  Dense D_T; // (N p) x (N m): input to output, x0 = 0
  Dense T_FT; // z x (N m): F B_T
};

/// Column-by-column impulse assembly. Refuses instances with more than
/// `max_columns` impulse columns.
OperatorPanel assemble_panel(const DescriptorSystem &sys, const Dense &F,
                             const TimeGrid &grid, Scheme scheme,
                             Index max_columns = 4096);

Vec vectorize(const IntervalTrajectory &traj);
IntervalTrajectory unvectorize(const TimeGrid &grid, const Vec &v, Index width);

/// x(T) from x0 = 0.
Vec input_to_state(const DescriptorSystem &sys, const IntervalTrajectory &u, Scheme scheme);

/// F x(T) for the run from (x0, u).
Vec terminal_map(const DescriptorSystem &sys, const Dense &F, const Vec &x0,
                 const IntervalTrajectory &u, Scheme scheme);

struct InputMapValue {
  Vec terminal;
  IntervalTrajectory output;
};

/// u -> (F x(T), y) from one pass with x0 = 0.
InputMapValue input_map_apply(const DescriptorSystem &sys, const Dense &F,
                              const IntervalTrajectory &u, Scheme scheme);

/// Output of the (adjoint) node started at G z and driven by y_d.
IntervalTrajectory output_map_apply(const DescriptorSystem &sys_adj, const Dense &G,
                                    const Vec &z, const IntervalTrajectory &y_d,
                                    Scheme scheme);

/// Matrix of u -> (F x(T), y), rows ordered [z; vec(y)].
Dense input_map_matrix(const DescriptorSystem &sys, const Dense &F,
                       const TimeGrid &grid, Scheme scheme);

/// Matrix of (z, y_d) -> Refl O_{d,F*}(z, Refl y_d) built from the adjoint
/// node with F* = M^-1 F^T Wz.
Dense reflected_output_map_matrix(const DescriptorSystem &sys, const Dense &F,
                                  const Dense &Wz, const TimeGrid &grid, Scheme scheme);

/// Max-abs difference between the weighted transpose of the input map and
/// the reflected adjoint output map. Z carries the Wz inner product.
double adjoint_identity_residual(const DescriptorSystem &sys, const Dense &F,
                                 const Dense &Wz, const TimeGrid &grid, Scheme scheme);
double adjoint_identity_residual(const DescriptorSystem &sys, const Dense &F,
                                 const TimeGrid &grid, Scheme scheme);

} // namespace evoctrl
