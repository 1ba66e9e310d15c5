#include "evoctrl/ph.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <iomanip>

namespace evoctrl {

void PHNode::validate() const {
  const Index nn = n();
  if (FG.cols() < nn || M.rows() != nn || M.cols() != nn || H.rows() != nn || H.cols() != nn)
    throw DimensionError("PH node: state dimensions");
  if (KL.rows() != m() || KL.cols() != FG.cols() || Wu.rows() != m() || Wu.cols() != m())
    throw DimensionError("PH node: port dimensions");
  if (RS.size() > 0 && RS.cols() != FG.cols())
    throw DimensionError("PH node: RS must act on (Hx, u)");
  require_spd(M, "M");
  require_spd(Dense(M * H), "M H");
  require_spd(Wu, "Wu");
}

Dense PHNode::quadratic_form() const {
  Dense P(FG.rows() + KL.rows(), FG.cols());
  P.topRows(FG.rows()) = FG;
  P.bottomRows(KL.rows()) = Wu * KL;
  return P;
}

double PHNode::dissipativity_violation() const {
  const Dense P = quadratic_form();
  const Dense S = 0.5 * (P + P.transpose());
  const double top = Eigen::SelfAdjointEigenSolver<Dense>(S, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .maxCoeff();
  const double ref = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
  return top / ref;
}

Dense dissipation_factor(const Dense &P) {
  if (P.rows() != P.cols())
    throw DimensionError("dissipation_factor needs a square matrix");
  const Dense Q = -0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Dense> eig(Q);
  const Vec &lam = eig.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  const double scale = std::max(P.cwiseAbs().maxCoeff(), 1e-300);
  if (lam.size() > 0 && lam.minCoeff() < -1e-12 * scale)
    throw Error("not dissipative: sym part has eigenvalue " + std::to_string(-lam.minCoeff()));
  std::vector<Index> keep;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > 1e-12 * lmax)
      keep.push_back(i);
  Dense RS(static_cast<Index>(keep.size()), P.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Index i = keep[k];
    RS.row(static_cast<Index>(k)) = std::sqrt(lam(i) / 2.0) * eig.eigenvectors().col(i).transpose();
  }
  return RS;
}

PHNode with_dissipation(PHNode ph) {
  ph.RS = dissipation_factor(ph.quadratic_form());
  return ph;
}

namespace {

Dense state_block(const Dense &X, Index n, const Dense &H) { return X.leftCols(n) * H; }
Dense input_block(const Dense &X, Index n) { return X.rightCols(X.cols() - n); }

} // namespace

DescriptorSystem to_descriptor(const PHNode &ph) {
  const Index n = ph.n();
  return make_system(ph.M, to_sparse(state_block(ph.FG, n, ph.H)),
                     to_sparse(input_block(ph.FG, n)), to_sparse(-state_block(ph.KL, n, ph.H)),
                     to_sparse(-input_block(ph.KL, n)), ph.Wu, ph.Wu);
}

DescriptorSystem dissipation_system(const PHNode &ph) {
  if (ph.RS.rows() == 0)
    throw Error("PH node has no dissipation factor");
  const Index n = ph.n();
  return make_system(ph.M, to_sparse(state_block(ph.FG, n, ph.H)),
                     to_sparse(input_block(ph.FG, n)), to_sparse(state_block(ph.RS, n, ph.H)),
                     to_sparse(input_block(ph.RS, n)), ph.Wu,
                     4.0 * Dense::Identity(ph.w(), ph.w()));
}

DescriptorSystem extend_with_input_output(const DescriptorSystem &sys, double alpha) {
  if (!(alpha >= 0.0))
    throw Error("alpha must be nonnegative");
  const Index p = sys.p(), m = sys.m();
  Dense C = Dense::Zero(p + m, sys.n());
  C.topRows(p) = Dense(sys.C);
  Dense D = Dense::Zero(p + m, m);
  D.topRows(p) = Dense(sys.D);
  D.bottomRows(m) = std::sqrt(alpha) * Dense::Identity(m, m);
  Dense Wy = Dense::Zero(p + m, p + m);
  Wy.topLeftCorner(p, p) = sys.Wy;
  Wy.bottomRightCorner(m, m) = sys.Wu;
  return make_system(sys.M, sys.A, sys.B, to_sparse(C), to_sparse(D), sys.Wu, Wy);
}

double EnergyLedger::residual() const {
  return std::abs(supplied.sum() - (stored(stored.size() - 1) - stored(0)) - dissipated.sum());
}

double EnergyLedger::scale() const {
  return std::max({supplied.cwiseAbs().sum(), std::abs(stored(0)),
                   std::abs(stored(stored.size() - 1)), dissipated.cwiseAbs().sum(), 1e-300});
}

double EnergyLedger::relative_residual() const { return residual() / scale(); }

EnergyLedger energy_ledger(const PHNode &ph, const Vec &x0, const IntervalTrajectory &u,
                           Scheme scheme) {
  const DescriptorSystem sys = to_descriptor(ph);
  const Run run = simulate_forward(sys, x0, u, scheme);
  const TimeGrid &g = u.grid;
  const Index N = g.steps(), n = ph.n();
  const double th = theta(scheme), dt = g.dt();
  const Dense MH = Dense(ph.M * ph.H);

  EnergyLedger led{g, Vec(N + 1), Vec(N), Vec::Zero(N)};
  for (Index i = 0; i <= N; ++i) {
    const Vec x = run.state.at(i);
    led.stored(i) = 0.5 * x.dot(MH * x);
  }
  for (Index i = 0; i < N; ++i) {
    const Vec ui = u.at(i);
    led.supplied(i) = dt * weighted_dot(run.output.at(i), ph.Wu, ui);
    if (ph.RS.rows() > 0) {
      const Vec xs = (1.0 - th) * run.state.at(i) + th * run.state.at(i + 1);
      Vec xi(ph.FG.cols());
      xi.head(n) = ph.H * xs;
      xi.tail(ph.m()) = ui;
      led.dissipated(i) = 2.0 * dt * (ph.RS * xi).squaredNorm();
    }
  }
  return led;
}

double energy_balance_residual(const PHNode &ph, const Vec &x0, const IntervalTrajectory &u,
                               Scheme scheme) {
  return energy_ledger(ph, x0, u, scheme).residual();
}

void write_energy_csv(const std::string &path, const EnergyLedger &led) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path);
  os << "t,stored,supplied_cum,dissipated_cum,balance_residual\n" << std::setprecision(17);
  double sup = 0.0, dis = 0.0;
  for (Index i = 0; i < led.stored.size(); ++i) {
    if (i > 0) {
      sup += led.supplied(i - 1);
      dis += led.dissipated(i - 1);
    }
    const double bal = sup - (led.stored(i) - led.stored(0)) - dis;
    os << led.grid.node(i) << ',' << led.stored(i) << ',' << sup << ',' << dis << ',' << bal
       << '\n';
  }
}

Reformulation energy_optimal_reformulate(const PHNode &ph, const TerminalWeight &F,
                                         const TimeGrid &grid, std::optional<Dense> Fc,
                                         std::optional<Vec> z_c) {
  if (ph.RS.rows() == 0)
    throw Error("energy_optimal_reformulate needs a dissipation factor");
  if (Fc.has_value() != z_c.has_value())
    throw Error("Fc and z_c go together");
  F.validate(ph.n());
  DescriptorSystem sys = dissipation_system(ph);
  const Index n = ph.n();
  const TerminalWeight stacked = stack_terminal(F, spd_sqrt(Dense(ph.M * ph.H)),
                                                Vec::Zero(n), Dense::Identity(n, n));
  CostSpec cost{IntervalTrajectory(grid, sys.p()), 0.0, stacked};
  return {std::move(sys), std::move(cost), std::move(Fc), std::move(z_c)};
}

double supplied_energy_cost(const PHNode &ph, const TerminalWeight &F, const Vec &x0,
                            const IntervalTrajectory &u, Scheme scheme) {
  const DescriptorSystem sys = to_descriptor(ph);
  const Run run = simulate_forward(sys, x0, u, scheme);
  double J = l2_inner(run.output, u, ph.Wu);
  if (F.scale > 0.0) {
    const Vec r = F.F * run.state.final_value() - F.z_f;
    J += 0.5 * F.scale * weighted_dot(r, F.Wz, r);
  }
  return J;
}

} // namespace evoctrl
