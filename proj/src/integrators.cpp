#include "evoctrl/integrators.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace evoctrl {

double theta(Scheme s) {
  switch (s) {
  case Scheme::ExplicitEuler:
    return 0.0;
  case Scheme::ImplicitEuler:
    return 1.0;
  case Scheme::ImplicitMidpoint:
    return 0.5;
  }
  return 0.5;
}

std::string to_string(Scheme s) {
  switch (s) {
  case Scheme::ExplicitEuler:
    return "explicit_euler";
  case Scheme::ImplicitEuler:
    return "implicit_euler";
  case Scheme::ImplicitMidpoint:
    return "implicit_midpoint";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string &name) {
  if (name == "explicit_euler")
    return Scheme::ExplicitEuler;
  if (name == "implicit_euler")
    return Scheme::ImplicitEuler;
  if (name == "implicit_midpoint" || name == "midpoint")
    return Scheme::ImplicitMidpoint;
  throw Error("unknown scheme: " + name);
}

Stepper::Stepper(const DescriptorSystem &sys, double dt, Scheme scheme)
    : sys_(sys), dt_(dt), scheme_(scheme), theta_(theta(scheme)) {
  explicit_part_ = sys_.M + ((1.0 - theta_) * dt_) * sys_.A;
  const Eigen::SparseMatrix<double> step = sys_.M - (theta_ * dt_) * sys_.A;
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->analyzePattern(step);
  lu_->factorize(step);
  if (lu_->info() != Eigen::Success)
    throw FactorizationError("step matrix M - theta dt A is singular at step 0: " +
                                 lu_->lastErrorMessage(),
                             0);
  if (scheme_ == Scheme::ExplicitEuler) {
    const double est = step_norm_estimate();
    if (est > 2.0)
      std::cerr << "warning: explicit Euler step norm estimate " << est
                << " exceeds 2; the run is likely unstable\n";
  }
}

double Stepper::step_norm_estimate() const {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Vec v(sys_.n());
  for (Index i = 0; i < v.size(); ++i)
    v(i) = g(rng);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass{Eigen::SparseMatrix<double>(sys_.M)};
  double est = 0.0;
  for (int k = 0; k < 30; ++k) {
    v.normalize();
    Vec w = dt_ * mass.solve(sys_.A * v);
    est = w.norm();
    if (est == 0.0)
      break;
    v = w;
  }
  return est;
}

Vec Stepper::advance(const Vec &x, const Vec &u) const {
  Vec rhs = explicit_part_ * x;
  rhs.noalias() += dt_ * (sys_.B * u);
  Vec next = lu_->solve(rhs);
  return next;
}

Run Stepper::run(const Vec &x0, const IntervalTrajectory &u) const {
  if (x0.size() != sys_.n())
    throw DimensionError("initial state has wrong length");
  if (u.width() != sys_.m())
    throw DimensionError("input trajectory has wrong width");
  const Index N = u.grid.steps();
  Run out{NodeTrajectory(u.grid, sys_.n()), IntervalTrajectory(u.grid, sys_.p())};
  Vec x = x0;
  out.state.values.row(0) = x.transpose();
  for (Index i = 0; i < N; ++i) {
    const Vec ui = u.at(i);
    Vec next = advance(x, ui);
    const Vec stage = (1.0 - theta_) * x + theta_ * next;
    out.output.values.row(i) = (sys_.C * stage + sys_.D * ui).transpose();
    out.state.values.row(i + 1) = next.transpose();
    x = std::move(next);
  }
  return out;
}

Vec Stepper::final_state(const Vec &x0, const IntervalTrajectory &u) const {
  if (x0.size() != sys_.n() || u.width() != sys_.m())
    throw DimensionError("final_state: dimension mismatch");
  Vec x = x0;
  for (Index i = 0; i < u.grid.steps(); ++i)
    x = advance(x, u.at(i));
  return x;
}

Propagator::Propagator(const DescriptorSystem &sys, const TimeGrid &grid, Scheme scheme)
    : grid_(grid), forward_(sys, grid.dt(), scheme),
      adjoint_(adjoint_system(sys), grid.dt(), scheme) {}

Run Propagator::forward(const Vec &x0, const IntervalTrajectory &u) const {
  if (!(u.grid == grid_))
    throw DimensionError("input lives on a different time grid");
  return forward_.run(x0, u);
}

Run Propagator::adjoint_run(const Vec &mu_T, const IntervalTrajectory &y_d) const {
  if (!(y_d.grid == grid_))
    throw DimensionError("adjoint source lives on a different time grid");
  return adjoint_.run(mu_T, y_d);
}

Run simulate_forward(const DescriptorSystem &sys, const Vec &x0,
                     const IntervalTrajectory &u, Scheme scheme) {
  return Stepper(sys, u.grid.dt(), scheme).run(x0, u);
}

Run simulate_adjoint(const DescriptorSystem &sys, const Vec &mu_T,
                     const IntervalTrajectory &source, Scheme scheme) {
  return Stepper(adjoint_system(sys), source.grid.dt(), scheme).run(mu_T, source);
}

double DualityTerms::residual() const {
  return std::abs(terminal + output - initial - input);
}

double DualityTerms::scale() const {
  return std::abs(terminal) + std::abs(output) + std::abs(initial) + std::abs(input);
}

DualityTerms duality_terms(const DescriptorSystem &sys, const Vec &x0,
                           const IntervalTrajectory &u, const Vec &mu_T,
                           const IntervalTrajectory &y_d, Scheme scheme,
                           const DescriptorSystem *adjoint_override) {
  const Run fwd = simulate_forward(sys, x0, u, scheme);
  const Run adj = adjoint_override
                      ? Stepper(*adjoint_override, y_d.grid.dt(), scheme).run(mu_T, y_d)
                      : simulate_adjoint(sys, mu_T, y_d, scheme);
  DualityTerms t{};
  t.terminal = fwd.state.final_value().dot(sys.M * mu_T);
  t.output = l2_inner(fwd.output, reflect(y_d), sys.Wy);
  t.initial = x0.dot(sys.M * adj.state.final_value());
  t.input = l2_inner(u, reflect(adj.output), sys.Wu);
  return t;
}

double duality_residual(const DescriptorSystem &sys, const Vec &x0,
                        const IntervalTrajectory &u, const Vec &mu_T,
                        const IntervalTrajectory &y_d, Scheme scheme) {
  return duality_terms(sys, x0, u, mu_T, y_d, scheme).residual();
}

} // namespace evoctrl
