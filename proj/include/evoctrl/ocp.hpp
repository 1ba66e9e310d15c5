#pragma once

#include "evoctrl/integrators.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace evoctrl {

/// J(u) = 1/2 ||y - y_ref||^2_Wy + alpha/2 ||u||^2_Wu + terminal penalty.
struct CostSpec {
  IntervalTrajectory y_ref;
  double alpha = 0.0;
  TerminalWeight terminal;

  void validate(const DescriptorSystem &sys) const;
};

/// Pointwise control set: all of R^m, or a box [lo, hi].
class AdmissibleSet {
public:
  static AdmissibleSet unconstrained() { return AdmissibleSet(); }
  static AdmissibleSet box(Vec lo, Vec hi);
  static AdmissibleSet box(Index m, double lo, double hi);

  bool is_box() const { return box_; }
  const Vec &lower() const { return lo_; }
  const Vec &upper() const { return hi_; }
  bool contains(const IntervalTrajectory &u) const;

private:
  bool box_ = false;
  Vec lo_, hi_;
};

IntervalTrajectory project(const AdmissibleSet &adm, const IntervalTrajectory &u);

struct IterationRecord {
  Index iter;
  double cost;
  double stationarity;
  double step;
};

struct OptResult {
  IntervalTrajectory u_opt;
  NodeTrajectory x;
  IntervalTrajectory y;
  std::vector<double> cost_history;
  std::vector<IterationRecord> log;
  double stationarity = 0.0;
  std::optional<Vec> multiplier;
  Index iterations = 0;
  bool converged = false;
  double infeasibility = 0.0;
};

/// Convergence log CSV: `iter,cost,stationarity,step`.
void write_convergence_csv(const std::string &path, const OptResult &res);

struct SolverOptions {
  double tol = 1e-8;
  Index max_iter = 500;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  /// Use Barzilai-Borwein trial steps after the first iteration.
  bool spectral_steps = true;
  /// After each projected step, run CG on the free variables of the current face.
  bool face_cg = true;
  double face_cg_reduction = 1e-2;
  int face_cg_steps = 100;
  /// Run the iterations on a dense reduced Hessian when N m is at most
  /// this size (0 disables). The returned iterate is re-evaluated by simulation.
  Index dense_limit = 4000;
  std::optional<IntervalTrajectory> initial;
};

/// Binds a system, cost and initial state on one time grid. Holds the
/// factorized forward and adjoint steppers.
class QuadraticProblem {
public:
  QuadraticProblem(const DescriptorSystem &sys, CostSpec spec, Vec x0, Scheme scheme);

  struct Evaluation {
    double cost;
    IntervalTrajectory gradient; // Riesz representer in the Wu inner product
    Run run;
  };

  const DescriptorSystem &system() const { return prop_.system(); }
  const CostSpec &spec() const { return spec_; }
  const TimeGrid &grid() const { return prop_.grid(); }
  const Vec &initial_state() const { return x0_; }
  const Propagator &propagator() const { return prop_; }

  double cost(const IntervalTrajectory &u) const;
  double cost_of_run(const Run &run, const IntervalTrajectory &u) const;
  Evaluation evaluate(const IntervalTrajectory &u) const;
  /// alpha v + J* J v with the homogeneous data (x0, y_ref, z_f all zero).
  IntervalTrajectory hessian_apply(const IntervalTrajectory &v) const;
  IntervalTrajectory zero_control() const;

  /// Caches the reduced Hessian as a dense (N m) x (N m) matrix, built from
  /// m impulse responses by time shifts. Afterwards cost, evaluate and
  /// hessian_apply use dense algebra (evaluate then returns an empty run).
  void enable_dense_hessian();
  bool dense_hessian() const { return static_cast<bool>(dense_); }
  Index control_size() const { return grid().steps() * system().m(); }

private:
  struct DenseModel {
    Dense Q;       // Gram matrix of J applied to unit impulses
    RowMat g0;     // dual gradient at u = 0, N x m
    double J0;
    Dense Wu_inv;
  };
  IntervalTrajectory adjoint_gradient(const Vec &terminal_residual,
                                      const IntervalTrajectory &output_residual) const;

  CostSpec spec_;
  Vec x0_;
  Propagator prop_;
  Dense terminal_adjoint_; // M^-1 F^T Wz
  std::shared_ptr<const DenseModel> dense_;
};

double cost(const DescriptorSystem &sys, const CostSpec &spec, const Vec &x0,
            const IntervalTrajectory &u, Scheme scheme);
IntervalTrajectory gradient(const DescriptorSystem &sys, const CostSpec &spec, const Vec &x0,
                            const IntervalTrajectory &u, Scheme scheme);

OptResult solve_unconstrained_cg(const QuadraticProblem &prob, const SolverOptions &opts);
OptResult solve_unconstrained_cg(const DescriptorSystem &sys, const CostSpec &spec,
                                 const Vec &x0, Scheme scheme, double tol, Index max_iter);

OptResult solve_projected_gradient(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                   const SolverOptions &opts);
OptResult solve_projected_gradient(const DescriptorSystem &sys, const CostSpec &spec,
                                   const Vec &x0, const AdmissibleSet &adm, Scheme scheme,
                                   double tol, Index max_iter);

/// Projected-gradient stationarity ||u - P(u - s0 g)||_Wu / s0, with g the
/// gradient in the metric the projection is orthogonal in.
double projected_stationarity(const QuadraticProblem &prob, const AdmissibleSet &adm,
                              const IntervalTrajectory &u, const IntervalTrajectory &grad,
                              double s0 = 1.0);

struct StationarityReport {
  double value;
  IntervalTrajectory direction; // u' - u for the minimizing sample
};

/// min over sampled feasible u' of <grad J(u), u' - u>_Wu / max(1, ||u' - u||_Wu).
/// Samples `directions` random feasible points plus the projected steepest
/// descent point. Deterministic in `seed`.
StationarityReport stationarity_residual(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                         const IntervalTrajectory &u, Index directions,
                                         std::uint64_t seed);
StationarityReport stationarity_residual(const DescriptorSystem &sys, const CostSpec &spec,
                                         const Vec &x0, const AdmissibleSet &adm,
                                         const IntervalTrajectory &u, Scheme scheme,
                                         Index directions, std::uint64_t seed = 1);

struct TerminalConstraintOptions {
  double tol = 1e-8;
  Index max_outer = 40;
  SolverOptions inner{1e-11, 2000, 1.0, 0.5, 1e-4, true, true, 1e-2, 100, 4000, std::nullopt};
  double rho0 = 1.0;
  double rho_growth = 10.0;
  double required_shrink = 0.25;
};

/// Augmented Lagrangian for F_c x(T) = z_c; inner solves by CG
/// (unconstrained) or projected gradient (box).
OptResult solve_terminal_constrained(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                     const Dense &Fc, const Vec &z_c,
                                     const TerminalConstraintOptions &opts);
OptResult solve_terminal_constrained(const DescriptorSystem &sys, const CostSpec &spec,
                                     const Vec &x0, const AdmissibleSet &adm, const Dense &Fc,
                                     const Vec &z_c, Scheme scheme, double tol, Index max_iter);

/// Stacks [a; (F2, z2)] into one terminal weight with scale 1 and
/// block-diagonal Z weight diag(a.scale a.Wz, W2). Zero-scale blocks drop.
TerminalWeight stack_terminal(const TerminalWeight &a, const Dense &F2, const Vec &z2,
                              const Dense &W2);

} // namespace evoctrl
