#pragma once

#include "evoctrl/linops.hpp"
#include "evoctrl/timegrid.hpp"

#include <memory>
#include <optional>
#include <string>

namespace evoctrl {

/// One-step theta schemes. Every variant evaluates outputs at its stage
/// state (1-theta) x_i + theta x_{i+1}.
enum class Scheme { ExplicitEuler, ImplicitEuler, ImplicitMidpoint };

double theta(Scheme s);
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string &name);

struct Run {
  NodeTrajectory state;
  IntervalTrajectory output;
};

/// Time stepper for one (system, dt, scheme) triple. The step matrix
/// M - theta dt A is factorized once at construction.
class Stepper {
public:
  Stepper(const DescriptorSystem &sys, double dt, Scheme scheme);

  const DescriptorSystem &system() const { return sys_; }
  Scheme scheme() const { return scheme_; }
  double dt() const { return dt_; }

  Run run(const Vec &x0, const IntervalTrajectory &u) const;
  /// Only x(T); skips output assembly.
  Vec final_state(const Vec &x0, const IntervalTrajectory &u) const;

  /// Power-iteration estimate of ||dt M^-1 A||_2.
  double step_norm_estimate() const;

private:
  Vec advance(const Vec &x, const Vec &u) const;

  DescriptorSystem sys_;
  double dt_;
  Scheme scheme_;
  double theta_;
  Sparse explicit_part_; // M + (1-theta) dt A
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

/// Forward and adjoint steppers sharing one system. The adjoint run is the
/// same scheme on adjoint_system(sys), read in reversed time; this pairing
/// is the exact transpose of the discrete forward map.
class Propagator {
public:
  Propagator(const DescriptorSystem &sys, const TimeGrid &grid, Scheme scheme);

  const DescriptorSystem &system() const { return forward_.system(); }
  const DescriptorSystem &adjoint() const { return adjoint_.system(); }
  const TimeGrid &grid() const { return grid_; }
  Scheme scheme() const { return forward_.scheme(); }

  Run forward(const Vec &x0, const IntervalTrajectory &u) const;
  /// Adjoint node from x_d(0) = mu_T driven by y_d (adjoint time). The
  /// returned state is x_d, the output u_d; both in adjoint time.
  Run adjoint_run(const Vec &mu_T, const IntervalTrajectory &y_d) const;

  const Stepper &forward_stepper() const { return forward_; }
  const Stepper &adjoint_stepper() const { return adjoint_; }

private:
  TimeGrid grid_;
  Stepper forward_;
  Stepper adjoint_;
};

Run simulate_forward(const DescriptorSystem &sys, const Vec &x0,
                     const IntervalTrajectory &u, Scheme scheme);
Run simulate_adjoint(const DescriptorSystem &sys, const Vec &mu_T,
                     const IntervalTrajectory &source, Scheme scheme);

struct DualityTerms {
  double terminal;  // <x(T), x_d(0)>_M
  double output;    // <y, Refl y_d>_Wy
  double initial;   // <x(0), x_d(T)>_M
  double input;     // <u, Refl u_d>_Wu
  double residual() const;
  double scale() const;
};

DualityTerms duality_terms(const DescriptorSystem &sys, const Vec &x0,
                           const IntervalTrajectory &u, const Vec &mu_T,
                           const IntervalTrajectory &y_d, Scheme scheme,
                           const DescriptorSystem *adjoint_override = nullptr);

/// |<x(T),mu_T>_M + <y, Refl y_d>_Wy - <x0, x_d(T)>_M - <u, Refl u_d>_Wu|.
double duality_residual(const DescriptorSystem &sys, const Vec &x0,
                        const IntervalTrajectory &u, const Vec &mu_T,
                        const IntervalTrajectory &y_d, Scheme scheme);

} // namespace evoctrl
