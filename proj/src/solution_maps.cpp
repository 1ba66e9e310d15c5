#include "evoctrl/solution_maps.hpp"

namespace evoctrl {

Vec vectorize(const IntervalTrajectory &traj) {
  return Eigen::Map<const Vec>(traj.values.data(), traj.values.size());
}

IntervalTrajectory unvectorize(const TimeGrid &grid, const Vec &v, Index width) {
  if (v.size() != grid.steps() * width)
    throw DimensionError("unvectorize: length mismatch");
  RowMat values = Eigen::Map<const RowMat>(v.data(), grid.steps(), width);
  return IntervalTrajectory(grid, std::move(values));
}

OperatorPanel assemble_panel(const DescriptorSystem &sys, const Dense &F,
                             const TimeGrid &grid, Scheme scheme, Index max_columns) {
  const Index n = sys.n(), m = sys.m(), p = sys.p(), N = grid.steps();
  if (N * m > max_columns || n > max_columns)
    throw Error("assemble_panel: instance too large for dense panels");
  if (F.cols() != n)
    throw DimensionError("assemble_panel: F must have n columns");
  const Stepper stepper(sys, grid.dt(), scheme);
  OperatorPanel panel;
  panel.B_T.resize(n, N * m);
  panel.D_T.resize(N * p, N * m);
  panel.C_T.resize(N * p, n);
  const Vec zero_state = Vec::Zero(n);
  for (Index k = 0; k < N * m; ++k) {
    Vec e = Vec::Zero(N * m);
    e(k) = 1.0;
    const Run r = stepper.run(zero_state, unvectorize(grid, e, m));
    panel.B_T.col(k) = r.state.final_value();
    panel.D_T.col(k) = vectorize(r.output);
  }
  const IntervalTrajectory no_input(grid, m);
  for (Index j = 0; j < n; ++j) {
    const Run r = stepper.run(Vec::Unit(n, j), no_input);
    panel.C_T.col(j) = vectorize(r.output);
  }
  panel.T_FT = F * panel.B_T;
  return panel;
}

Vec input_to_state(const DescriptorSystem &sys, const IntervalTrajectory &u, Scheme scheme) {
  return Stepper(sys, u.grid.dt(), scheme).final_state(Vec::Zero(sys.n()), u);
}

Vec terminal_map(const DescriptorSystem &sys, const Dense &F, const Vec &x0,
                 const IntervalTrajectory &u, Scheme scheme) {
  if (F.cols() != sys.n())
    throw DimensionError("terminal_map: F must have n columns");
  return F * Stepper(sys, u.grid.dt(), scheme).final_state(x0, u);
}

InputMapValue input_map_apply(const DescriptorSystem &sys, const Dense &F,
                              const IntervalTrajectory &u, Scheme scheme) {
  if (F.cols() != sys.n())
    throw DimensionError("input_map_apply: F must have n columns");
  Run r = simulate_forward(sys, Vec::Zero(sys.n()), u, scheme);
  return {F * r.state.final_value(), std::move(r.output)};
}

IntervalTrajectory output_map_apply(const DescriptorSystem &sys_adj, const Dense &G,
                                    const Vec &z, const IntervalTrajectory &y_d,
                                    Scheme scheme) {
  if (G.rows() != sys_adj.n() || G.cols() != z.size())
    throw DimensionError("output_map_apply: G has wrong shape");
  return simulate_forward(sys_adj, G * z, y_d, scheme).output;
}

Dense input_map_matrix(const DescriptorSystem &sys, const Dense &F,
                       const TimeGrid &grid, Scheme scheme) {
  const OperatorPanel panel = assemble_panel(sys, F, grid, scheme);
  Dense J(F.rows() + panel.D_T.rows(), panel.D_T.cols());
  J << panel.T_FT, panel.D_T;
  return J;
}

Dense reflected_output_map_matrix(const DescriptorSystem &sys, const Dense &F,
                                  const Dense &Wz, const TimeGrid &grid, Scheme scheme) {
  const DescriptorSystem adj = adjoint_system(sys);
  const Dense G = terminal_adjoint(sys, F, Wz);
  const Index nz = F.rows(), p = sys.p(), m = sys.m(), N = grid.steps();
  const Stepper stepper(adj, grid.dt(), scheme);
  Dense K(N * m, nz + N * p);
  for (Index k = 0; k < nz + N * p; ++k) {
    Vec z = Vec::Zero(nz);
    Vec y = Vec::Zero(N * p);
    if (k < nz)
      z(k) = 1.0;
    else
      y(k - nz) = 1.0;
    const IntervalTrajectory y_d = reflect(unvectorize(grid, y, p));
    const Run r = stepper.run(G * z, y_d);
    K.col(k) = vectorize(reflect(r.output));
  }
  return K;
}

namespace {

Dense block_weight(const Dense &W, Index copies, double factor) {
  const Index k = W.rows();
  Dense G = Dense::Zero(copies * k, copies * k);
  for (Index i = 0; i < copies; ++i)
    G.block(i * k, i * k, k, k) = factor * W;
  return G;
}

} // namespace

double adjoint_identity_residual(const DescriptorSystem &sys, const Dense &F,
                                 const Dense &Wz, const TimeGrid &grid, Scheme scheme) {
  const Index N = grid.steps(), nz = F.rows(), p = sys.p();
  const Dense J = input_map_matrix(sys, F, grid, scheme);
  const Dense gram_u = block_weight(sys.Wu, N, grid.dt());
  Dense gram_zy = Dense::Zero(nz + N * p, nz + N * p);
  gram_zy.topLeftCorner(nz, nz) = Wz;
  gram_zy.bottomRightCorner(N * p, N * p) = block_weight(sys.Wy, N, grid.dt());
  const Dense weighted_transpose = gram_u.llt().solve(J.transpose() * gram_zy);
  const Dense K = reflected_output_map_matrix(sys, F, Wz, grid, scheme);
  return (weighted_transpose - K).cwiseAbs().maxCoeff();
}

double adjoint_identity_residual(const DescriptorSystem &sys, const Dense &F,
                                 const TimeGrid &grid, Scheme scheme) {
  return adjoint_identity_residual(sys, F, Dense::Identity(F.rows(), F.rows()), grid, scheme);
}

} // namespace evoctrl
