#include "evoctrl/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>

namespace evoctrl {

namespace {

RowMat times_weight(const RowMat &v, const Dense &W) { return v * W; }

IntervalTrajectory dual_to_metric(const AdmissibleSet &adm, const IntervalTrajectory &g,
                                  const Dense &Wu) {
  // Box projections are Euclidean per sample, so they pair with Wu g.
  if (!adm.is_box())
    return g;
  return IntervalTrajectory(g.grid, times_weight(g.values, Wu));
}

// Inner product in which the projection is orthogonal.
double metric_inner(const AdmissibleSet &adm, const IntervalTrajectory &a,
                    const IntervalTrajectory &b, const Dense &Wu) {
  if (!adm.is_box())
    return l2_inner(a, b, Wu);
  return a.grid.dt() * a.values.cwiseProduct(b.values).sum();
}

bool all_zero(const Dense &X) { return X.size() == 0 || X.cwiseAbs().maxCoeff() == 0.0; }

} // namespace

void CostSpec::validate(const DescriptorSystem &sys) const {
  if (y_ref.width() != sys.p())
    throw DimensionError("y_ref width must equal the output dimension");
  if (!(alpha >= 0.0))
    throw Error("alpha must be nonnegative");
  terminal.validate(sys.n());
}

AdmissibleSet AdmissibleSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size())
    throw DimensionError("box bounds differ in length");
  for (Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= hi(i)))
      throw Error("box bounds need lo <= hi");
  AdmissibleSet s;
  s.box_ = true;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

AdmissibleSet AdmissibleSet::box(Index m, double lo, double hi) {
  return box(Vec::Constant(m, lo), Vec::Constant(m, hi));
}

bool AdmissibleSet::contains(const IntervalTrajectory &u) const {
  if (!box_)
    return true;
  for (Index i = 0; i < u.values.rows(); ++i)
    for (Index j = 0; j < u.values.cols(); ++j)
      if (u.values(i, j) < lo_(j) || u.values(i, j) > hi_(j))
        return false;
  return true;
}

IntervalTrajectory project(const AdmissibleSet &adm, const IntervalTrajectory &u) {
  if (!adm.is_box())
    return u;
  if (adm.lower().size() != u.width())
    throw DimensionError("box bounds do not match control width");
  IntervalTrajectory out = u;
  for (Index i = 0; i < out.values.rows(); ++i)
    for (Index j = 0; j < out.values.cols(); ++j)
      out.values(i, j) = std::clamp(out.values(i, j), adm.lower()(j), adm.upper()(j));
  return out;
}

void write_convergence_csv(const std::string &path, const OptResult &res) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path);
  os << "iter,cost,stationarity,step\n" << std::setprecision(17);
  for (const auto &r : res.log)
    os << r.iter << ',' << r.cost << ',' << r.stationarity << ',' << r.step << '\n';
}

TerminalWeight stack_terminal(const TerminalWeight &a, const Dense &F2, const Vec &z2,
                              const Dense &W2) {
  const bool keep_a = a.scale > 0.0 && a.rows() > 0;
  const Index ra = keep_a ? a.rows() : 0;
  const Index r = ra + F2.rows();
  const Index n = keep_a ? a.F.cols() : F2.cols();
  Dense F(r, n);
  Vec z(r);
  Dense W = Dense::Zero(r, r);
  if (keep_a) {
    F.topRows(ra) = a.F;
    z.head(ra) = a.z_f;
    W.topLeftCorner(ra, ra) = a.scale * a.Wz;
  }
  F.bottomRows(F2.rows()) = F2;
  z.tail(F2.rows()) = z2;
  W.bottomRightCorner(F2.rows(), F2.rows()) = W2;
  return TerminalWeight(std::move(F), std::move(z), 1.0, std::move(W));
}

QuadraticProblem::QuadraticProblem(const DescriptorSystem &sys, CostSpec spec, Vec x0,
                                   Scheme scheme)
    : spec_(std::move(spec)), x0_(std::move(x0)), prop_(sys, spec_.y_ref.grid, scheme) {
  spec_.validate(sys);
  if (x0_.size() != sys.n())
    throw DimensionError("x0 has wrong length");
  terminal_adjoint_ = terminal_adjoint(sys, spec_.terminal.F, spec_.terminal.Wz);
}

IntervalTrajectory QuadraticProblem::zero_control() const {
  return IntervalTrajectory(grid(), system().m());
}

double QuadraticProblem::cost_of_run(const Run &run, const IntervalTrajectory &u) const {
  const auto &sys = system();
  const IntervalTrajectory e = run.output - spec_.y_ref;
  double J = 0.5 * l2_inner(e, e, sys.Wy);
  if (spec_.alpha > 0.0)
    J += 0.5 * spec_.alpha * l2_inner(u, u, sys.Wu);
  if (spec_.terminal.scale > 0.0) {
    const Vec r = spec_.terminal.F * run.state.final_value() - spec_.terminal.z_f;
    J += 0.5 * spec_.terminal.scale * weighted_dot(r, spec_.terminal.Wz, r);
  }
  return J;
}

double QuadraticProblem::cost(const IntervalTrajectory &u) const {
  if (dense_)
    return evaluate(u).cost;
  return cost_of_run(prop_.forward(x0_, u), u);
}

void QuadraticProblem::enable_dense_hessian() {
  if (dense_)
    return;
  const auto &sys = system();
  const Index N = grid().steps(), m = sys.m(), p = sys.p(), K = N * m;
  const Dense &F = spec_.terminal.F;
  const double dt = grid().dt();

  // Impulse in interval k is the interval-0 response shifted by k.
  std::vector<Dense> Y(static_cast<std::size_t>(N), Dense(p, m));
  std::vector<Dense> Z(static_cast<std::size_t>(N + 1), Dense(F.rows(), m));
  const Vec zero = Vec::Zero(sys.n());
  for (Index a = 0; a < m; ++a) {
    IntervalTrajectory e(grid(), m);
    e.values(0, a) = 1.0;
    const Run run = prop_.forward(zero, e);
    for (Index j = 0; j < N; ++j)
      Y[static_cast<std::size_t>(j)].col(a) = run.output.values.row(j).transpose();
    for (Index s = 0; s <= N; ++s)
      Z[static_cast<std::size_t>(s)].col(a) = F * run.state.values.row(s).transpose();
  }

  auto model = std::make_shared<DenseModel>();
  model->Q = Dense::Zero(K, K);
  std::vector<Dense> WY(static_cast<std::size_t>(N));
  for (Index j = 0; j < N; ++j)
    WY[static_cast<std::size_t>(j)] = sys.Wy * Y[static_cast<std::size_t>(j)];
  // Block (k, k+d) = dt sum_{j <= N-1-k-d} Y(j+d)^T Wy Y(j); partial sums run
  // over increasing j, i.e. decreasing k.
  for (Index d = 0; d < N; ++d) {
    Dense acc = Dense::Zero(m, m);
    for (Index L = 0; L + d < N; ++L) {
      acc.noalias() += Y[static_cast<std::size_t>(L + d)].transpose() * WY[static_cast<std::size_t>(L)];
      const Index l = N - 1 - L, k = l - d;
      model->Q.block(k * m, l * m, m, m) = dt * acc;
      if (d > 0)
        model->Q.block(l * m, k * m, m, m) = dt * acc.transpose();
    }
  }
  if (spec_.terminal.scale > 0.0) {
    Dense Zk(F.rows(), K);
    for (Index k = 0; k < N; ++k)
      Zk.middleCols(k * m, m) = Z[static_cast<std::size_t>(N - k)];
    model->Q.noalias() += spec_.terminal.scale * (Zk.transpose() * (spec_.terminal.Wz * Zk));
  }

  const Evaluation ev0 = evaluate(zero_control());
  model->g0 = dt * (ev0.gradient.values * sys.Wu);
  model->J0 = ev0.cost;
  model->Wu_inv = sys.Wu.inverse();
  dense_ = std::move(model);
}

IntervalTrajectory
QuadraticProblem::adjoint_gradient(const Vec &terminal_residual,
                                   const IntervalTrajectory &output_residual) const {
  const Vec mu_T = terminal_adjoint_ * (spec_.terminal.scale * terminal_residual);
  const Run adj = prop_.adjoint_run(mu_T, reflect(output_residual));
  return reflect(adj.output);
}

QuadraticProblem::Evaluation QuadraticProblem::evaluate(const IntervalTrajectory &u) const {
  if (dense_) {
    const DenseModel &dm = *dense_;
    const double dt = grid().dt();
    const Index K = control_size();
    const Eigen::Map<const Vec> uv(u.values.data(), K);
    RowMat Hu(u.values.rows(), u.values.cols());
    Eigen::Map<Vec>(Hu.data(), K).noalias() = dm.Q * uv;
    if (spec_.alpha > 0.0)
      Hu += (spec_.alpha * dt) * (u.values * system().Wu);
    const double J = dm.J0 + dm.g0.cwiseProduct(u.values).sum() +
                     0.5 * Hu.cwiseProduct(u.values).sum();
    RowMat g = ((dm.g0 + Hu) * dm.Wu_inv) / dt;
    return {J, IntervalTrajectory(grid(), std::move(g)), Run{}};
  }
  Run run = prop_.forward(x0_, u);
  const double J = cost_of_run(run, u);
  const Vec r = spec_.terminal.F * run.state.final_value() - spec_.terminal.z_f;
  IntervalTrajectory g = adjoint_gradient(r, run.output - spec_.y_ref);
  if (spec_.alpha > 0.0)
    g += spec_.alpha * u;
  return {J, std::move(g), std::move(run)};
}

IntervalTrajectory QuadraticProblem::hessian_apply(const IntervalTrajectory &v) const {
  if (dense_) {
    const DenseModel &dm = *dense_;
    const double dt = grid().dt();
    const Index K = control_size();
    RowMat Hv(v.values.rows(), v.values.cols());
    Eigen::Map<Vec>(Hv.data(), K).noalias() = dm.Q * Eigen::Map<const Vec>(v.values.data(), K);
    RowMat g = (Hv * dm.Wu_inv) / dt;
    if (spec_.alpha > 0.0)
      g += spec_.alpha * v.values;
    return IntervalTrajectory(grid(), std::move(g));
  }
  const Run run = prop_.forward(Vec::Zero(system().n()), v);
  IntervalTrajectory g =
      adjoint_gradient(spec_.terminal.F * run.state.final_value(), run.output);
  if (spec_.alpha > 0.0)
    g += spec_.alpha * v;
  return g;
}

double cost(const DescriptorSystem &sys, const CostSpec &spec, const Vec &x0,
            const IntervalTrajectory &u, Scheme scheme) {
  return QuadraticProblem(sys, spec, x0, scheme).cost(u);
}

IntervalTrajectory gradient(const DescriptorSystem &sys, const CostSpec &spec, const Vec &x0,
                            const IntervalTrajectory &u, Scheme scheme) {
  return QuadraticProblem(sys, spec, x0, scheme).evaluate(u).gradient;
}

namespace {

void finish(const QuadraticProblem &prob, OptResult &res, const IntervalTrajectory &u) {
  Run run = prob.propagator().forward(prob.initial_state(), u);
  res.u_opt = u;
  res.x = std::move(run.state);
  res.y = std::move(run.output);
}

} // namespace

namespace {

bool use_dense(const QuadraticProblem &prob, const SolverOptions &opts) {
  return opts.dense_limit > 0 && !prob.dense_hessian() && prob.control_size() <= opts.dense_limit;
}

// Continue on the simulated problem from the dense result; usually this only
// confirms the tolerance.
SolverOptions continue_from(const SolverOptions &opts, const OptResult &res) {
  SolverOptions next = opts;
  next.initial = res.u_opt;
  next.dense_limit = 0;
  next.max_iter = std::max<Index>(opts.max_iter - res.iterations, 1);
  return next;
}

void append_run(OptResult &first, OptResult second) {
  const Index offset = first.iterations;
  for (std::size_t i = 1; i < second.cost_history.size(); ++i)
    first.cost_history.push_back(second.cost_history[i]);
  for (std::size_t i = 1; i < second.log.size(); ++i) {
    auto rec = second.log[i];
    rec.iter += offset;
    first.log.push_back(rec);
  }
  second.cost_history = std::move(first.cost_history);
  second.log = std::move(first.log);
  second.iterations += offset;
  first = std::move(second);
}

} // namespace

OptResult solve_unconstrained_cg(const QuadraticProblem &prob, const SolverOptions &opts) {
  if (use_dense(prob, opts)) {
    QuadraticProblem fast = prob;
    fast.enable_dense_hessian();
    OptResult res = solve_unconstrained_cg(fast, opts);
    append_run(res, solve_unconstrained_cg(prob, continue_from(opts, res)));
    return res;
  }
  const Dense &Wu = prob.system().Wu;
  const auto &spec = prob.spec();
  if (spec.alpha <= 0.0 && spec.terminal.scale <= 0.0)
    std::cerr << "warning: alpha = 0 and no terminal weight; the problem may lack a unique "
                 "minimizer\n";

  OptResult res;
  const double g0 = l2_norm(prob.evaluate(prob.zero_control()).gradient, Wu);
  const double target = opts.tol * (1.0 + g0);

  IntervalTrajectory u = opts.initial ? *opts.initial : prob.zero_control();
  auto ev = prob.evaluate(u);
  double J = ev.cost;
  IntervalTrajectory r = -1.0 * ev.gradient;
  IntervalTrajectory p = r;
  double rr = l2_inner(r, r, Wu);
  res.cost_history.push_back(J);
  res.log.push_back({0, J, std::sqrt(rr), 0.0});

  Index it = 0;
  while (std::sqrt(rr) > target && it < opts.max_iter) {
    const IntervalTrajectory Hp = prob.hessian_apply(p);
    const double pHp = l2_inner(p, Hp, Wu);
    if (!(pHp > 0.0)) {
      std::cerr << "warning: CG met nonpositive curvature; stopping\n";
      break;
    }
    const double a = rr / pHp;
    const double rp = l2_inner(r, p, Wu);
    u += a * p;
    r -= a * Hp;
    J += -a * rp + 0.5 * a * a * pHp;
    const double rr_new = l2_inner(r, r, Wu);
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++it;
    res.cost_history.push_back(J);
    res.log.push_back({it, J, std::sqrt(rr), a});
  }

  // Recompute the gradient to avoid reporting the recursive residual. The
  // cost history keeps the recursive values, which decrease exactly.
  ev = prob.evaluate(u);
  res.stationarity = l2_norm(ev.gradient, Wu);
  res.log.back().stationarity = res.stationarity;
  res.iterations = it;
  res.converged = res.stationarity <= target;
  finish(prob, res, u);
  return res;
}

OptResult solve_unconstrained_cg(const DescriptorSystem &sys, const CostSpec &spec,
                                 const Vec &x0, Scheme scheme, double tol, Index max_iter) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_unconstrained_cg(QuadraticProblem(sys, spec, x0, scheme), opts);
}

double projected_stationarity(const QuadraticProblem &prob, const AdmissibleSet &adm,
                              const IntervalTrajectory &u, const IntervalTrajectory &grad,
                              double s0) {
  const Dense &Wu = prob.system().Wu;
  const IntervalTrajectory gd = dual_to_metric(adm, grad, Wu);
  const IntervalTrajectory diff = u - project(adm, u - s0 * gd);
  return l2_norm(diff, Wu) / s0;
}

namespace {

// Conjugate gradients on the free variables in coefficient coordinates.
// A step that would cross bounds becomes a projected search along the CG
// direction (backtracking from the full step, never shorter than the
// first bound hit); CG then restarts on the new face. Ends once the face
// residual has dropped by `reduction` or after `max_steps` Hessian
// applications.
void face_cg(const QuadraticProblem &prob, const AdmissibleSet &adm, IntervalTrajectory &u,
             QuadraticProblem::Evaluation &ev, const SolverOptions &opts) {
  const Dense &Wu = prob.system().Wu;
  RowMat gE = ev.gradient.values * Wu;
  double J = ev.cost;
  RowMat mask(gE.rows(), gE.cols());
  auto update_mask = [&] {
    mask.setOnes();
    if (!adm.is_box())
      return;
    for (Index i = 0; i < mask.rows(); ++i)
      for (Index j = 0; j < mask.cols(); ++j) {
        const double v = u.values(i, j);
        if ((v <= adm.lower()(j) && gE(i, j) >= 0.0) || (v >= adm.upper()(j) && gE(i, j) <= 0.0))
          mask(i, j) = 0.0;
      }
  };
  update_mask();
  RowMat r = -gE.cwiseProduct(mask);
  double rr = r.squaredNorm();
  const double r0 = std::sqrt(rr);
  if (rr == 0.0)
    return;
  bool exact = true; // ev matches u
  IntervalTrajectory p(u.grid, r);
  for (int k = 0; k < opts.face_cg_steps; ++k) {
    const RowMat Hp_full = prob.hessian_apply(p).values * Wu;
    const RowMat Hp = Hp_full.cwiseProduct(mask);
    const double pHp = p.values.cwiseProduct(Hp).sum();
    if (!(pHp > 0.0))
      break;
    const double a = rr / pHp;
    double amax = std::numeric_limits<double>::infinity();
    if (adm.is_box())
      for (Index i = 0; i < mask.rows(); ++i)
        for (Index j = 0; j < mask.cols(); ++j) {
          const double pij = p.values(i, j);
          if (pij > 0.0)
            amax = std::min(amax, (adm.upper()(j) - u.values(i, j)) / pij);
          else if (pij < 0.0)
            amax = std::min(amax, (adm.lower()(j) - u.values(i, j)) / pij);
        }
    if (a >= amax) {
      if (!exact)
        ev = prob.evaluate(u), J = ev.cost;
      bool moved = false;
      for (double t = a; t > amax; t *= opts.shrink) {
        IntervalTrajectory trial = project(adm, u + t * p);
        const double slope = (trial.values - u.values).cwiseProduct(gE).sum();
        auto ev_trial = prob.evaluate(trial);
        if (ev_trial.cost <= J + opts.sufficient_decrease * slope) {
          u = std::move(trial);
          ev = std::move(ev_trial);
          moved = true;
          break;
        }
      }
      if (!moved) {
        u = project(adm, u + amax * p);
        ev = prob.evaluate(u);
      }
      J = ev.cost;
      exact = true;
      gE = ev.gradient.values * Wu;
      update_mask();
      r = -gE.cwiseProduct(mask);
      rr = r.squaredNorm();
      if (std::sqrt(rr) <= opts.face_cg_reduction * r0)
        break;
      p.values = r;
      continue;
    }
    u += a * p;
    gE += a * Hp_full;
    J -= 0.5 * a * rr;
    exact = false;
    r -= a * Hp;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= opts.face_cg_reduction * r0)
      break;
    p.values = r + (rr_new / rr) * p.values;
    rr = rr_new;
  }
  if (!exact)
    ev = prob.evaluate(u);
}

} // namespace

namespace {

// Largest eigenvalue of v -> dual_to_metric(H v), self-adjoint in the metric.
double metric_lipschitz(const QuadraticProblem &prob, const AdmissibleSet &adm) {
  const Dense &Wu = prob.system().Wu;
  IntervalTrajectory v(prob.grid(), prob.system().m());
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N;
  for (Index i = 0; i < v.values.size(); ++i)
    v.values.data()[i] = N(rng);
  double lambda = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double len = std::sqrt(metric_inner(adm, v, v, Wu));
    if (len == 0.0)
      return 0.0;
    v *= 1.0 / len;
    IntervalTrajectory hv = dual_to_metric(adm, prob.hessian_apply(v), Wu);
    const double next = metric_inner(adm, v, hv, Wu);
    v = std::move(hv);
    if (k > 20 && std::abs(next - lambda) <= 1e-6 * next)
      return next;
    lambda = next;
  }
  return lambda;
}

// Accelerated projected gradient with fixed step 1/L, adaptive restart and
// a monotone safeguard. Used on the dense model, where one Hessian product
// costs a matrix-vector multiply. The gradient is affine in u, so the
// extrapolated gradient is combined from the two last evaluations.
// J(v) - J(u) for the quadratic J, from the two gradients. Unlike the
// difference of two cost values it carries no cancellation against J, so
// accepted steps never show a rounding-level increase.
double cost_change(const IntervalTrajectory &g_u, const IntervalTrajectory &g_v,
                   const IntervalTrajectory &d, const Dense &Wu) {
  return 0.5 * l2_inner(g_u + g_v, d, Wu);
}

OptResult accelerated_projected_gradient(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                         const SolverOptions &opts) {
  const Dense &Wu = prob.system().Wu;
  OptResult res;
  double s = 1.0 / std::max(1.02 * metric_lipschitz(prob, adm), 1e-300);

  IntervalTrajectory u = project(adm, opts.initial ? *opts.initial : prob.zero_control());
  auto ev = prob.evaluate(u);
  double J = ev.cost;
  res.cost_history.push_back(J);
  IntervalTrajectory y = u, gy = ev.gradient;
  double t = 1.0, last_step = 0.0;
  Index it = 0;
  for (;; ++it) {
    res.stationarity = projected_stationarity(prob, adm, u, ev.gradient, opts.initial_step);
    res.log.push_back({it, J, res.stationarity, last_step});
    if (res.stationarity <= opts.tol) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter)
      break;

    IntervalTrajectory z = project(adm, y - s * dual_to_metric(adm, gy, Wu));
    const bool at_u = t == 1.0;
    if (!at_u && metric_inner(adm, y - z, z - u, Wu) > 0.0) {
      t = 1.0;
      y = u;
      gy = ev.gradient;
      z = project(adm, u - s * dual_to_metric(adm, ev.gradient, Wu));
    }
    auto ev_z = prob.evaluate(z);
    const double dJ = cost_change(ev.gradient, ev_z.gradient, z - u, Wu);
    if (dJ > 0.0) {
      if (t == 1.0)
        s *= 0.5;
      t = 1.0;
      y = u;
      gy = ev.gradient;
      res.cost_history.push_back(J);
      last_step = 0.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = z + beta * (z - u);
    gy = ev_z.gradient + beta * (ev_z.gradient - ev.gradient);
    u = std::move(z);
    ev = std::move(ev_z);
    t = t_next;
    last_step = s;
    J += dJ;
    res.cost_history.push_back(J);
  }
  res.iterations = it;
  finish(prob, res, u);
  return res;
}

} // namespace

OptResult solve_projected_gradient(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                   const SolverOptions &opts) {
  if (prob.dense_hessian())
    return accelerated_projected_gradient(prob, adm, opts);
  if (use_dense(prob, opts)) {
    QuadraticProblem fast = prob;
    fast.enable_dense_hessian();
    OptResult res = solve_projected_gradient(fast, adm, opts);
    append_run(res, solve_projected_gradient(prob, adm, continue_from(opts, res)));
    return res;
  }
  const Dense &Wu = prob.system().Wu;
  const double s0 = opts.initial_step;
  OptResult res;

  IntervalTrajectory u = project(adm, opts.initial ? *opts.initial : prob.zero_control());
  auto ev = prob.evaluate(u);
  double J = ev.cost;
  res.cost_history.push_back(J);

  IntervalTrajectory u_prev, g_prev;
  bool have_prev = false;
  double last_step = 0.0;
  Index it = 0;
  for (;; ++it) {
    res.stationarity = projected_stationarity(prob, adm, u, ev.gradient, s0);
    res.log.push_back({it, J, res.stationarity, last_step});
    if (res.stationarity <= opts.tol) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter)
      break;

    double s = s0;
    if (have_prev && opts.spectral_steps) {
      const IntervalTrajectory du = u - u_prev;
      const IntervalTrajectory dg = ev.gradient - g_prev;
      const double curv = l2_inner(du, dg, Wu);
      if (curv > 0.0)
        s = std::clamp(metric_inner(adm, du, du, Wu) / curv, 1e-10, 1e10);
    }

    // Search along the projected arc u(t) = P(u - t s gd). J is quadratic,
    // so the first trial is the exact minimizer along the chord to u(1),
    // capped at 1. Points on the arc land on the bounds they cross.
    const IntervalTrajectory gd = dual_to_metric(adm, ev.gradient, Wu);
    const IntervalTrajectory dir = project(adm, u - s * gd) - u;
    const double slope = l2_inner(ev.gradient, dir, Wu);
    if (!(slope < 0.0)) {
      std::cerr << "warning: no descent direction at iteration " << it << "\n";
      break;
    }
    const double curv = l2_inner(dir, prob.hessian_apply(dir), Wu);
    double t = curv > 0.0 ? std::min(1.0, -slope / curv) : 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      IntervalTrajectory trial = project(adm, u - (t * s) * gd);
      auto ev_trial = prob.evaluate(trial);
      const IntervalTrajectory d = trial - u;
      const double dJ = cost_change(ev.gradient, ev_trial.gradient, d, Wu);
      if (dJ <= opts.sufficient_decrease * l2_inner(ev.gradient, d, Wu)) {
        u_prev = std::move(u);
        g_prev = std::move(ev.gradient);
        have_prev = true;
        u = std::move(trial);
        ev = std::move(ev_trial);
        J += dJ;
        accepted = true;
        break;
      }
      t *= opts.shrink;
    }
    if (!accepted) {
      std::cerr << "warning: line search failed at iteration " << it << "\n";
      break;
    }
    last_step = t * s;

    if (opts.face_cg) {
      IntervalTrajectory v = u;
      auto ev_face = ev;
      face_cg(prob, adm, v, ev_face, opts);
      const double dJ = cost_change(ev.gradient, ev_face.gradient, v - u, Wu);
      if (dJ <= 0.0) {
        u_prev = u;
        g_prev = ev.gradient;
        u = std::move(v);
        ev = std::move(ev_face);
        J += dJ;
      }
    }
    res.cost_history.push_back(J);
  }
  res.iterations = it;
  finish(prob, res, u);
  return res;
}

OptResult solve_projected_gradient(const DescriptorSystem &sys, const CostSpec &spec,
                                   const Vec &x0, const AdmissibleSet &adm, Scheme scheme,
                                   double tol, Index max_iter) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_projected_gradient(QuadraticProblem(sys, spec, x0, scheme), adm, opts);
}

StationarityReport stationarity_residual(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                         const IntervalTrajectory &u, Index directions,
                                         std::uint64_t seed) {
  const Dense &Wu = prob.system().Wu;
  const IntervalTrajectory g = prob.evaluate(u).gradient;
  std::mt19937_64 rng(seed);

  StationarityReport best{std::numeric_limits<double>::infinity(),
                          IntervalTrajectory(u.grid, u.width())};
  auto consider = [&](const IntervalTrajectory &d) {
    const double len = l2_norm(d, Wu);
    const double v = l2_inner(g, d, Wu) / std::max(1.0, len);
    if (v < best.value) {
      best.value = v;
      best.direction = d;
    }
  };

  consider(project(adm, u - 1.0 * dual_to_metric(adm, g, Wu)) - u);
  for (Index k = 0; k < directions; ++k) {
    IntervalTrajectory cand(u.grid, u.width());
    if (adm.is_box()) {
      for (Index i = 0; i < cand.values.rows(); ++i)
        for (Index j = 0; j < cand.values.cols(); ++j) {
          std::uniform_real_distribution<double> U(adm.lower()(j), adm.upper()(j));
          cand.values(i, j) = U(rng);
        }
      consider(cand - u);
    } else {
      std::normal_distribution<double> N;
      for (Index i = 0; i < cand.values.rows(); ++i)
        for (Index j = 0; j < cand.values.cols(); ++j)
          cand.values(i, j) = N(rng);
      const double len = l2_norm(cand, Wu);
      if (len > 0.0)
        cand *= 1.0 / len;
      consider(cand);
    }
  }
  return best;
}

StationarityReport stationarity_residual(const DescriptorSystem &sys, const CostSpec &spec,
                                         const Vec &x0, const AdmissibleSet &adm,
                                         const IntervalTrajectory &u, Scheme scheme,
                                         Index directions, std::uint64_t seed) {
  return stationarity_residual(QuadraticProblem(sys, spec, x0, scheme), adm, u, directions,
                               seed);
}

namespace {

OptResult inner_solve(const QuadraticProblem &prob, const AdmissibleSet &adm,
                      const SolverOptions &opts) {
  return adm.is_box() ? solve_projected_gradient(prob, adm, opts)
                      : solve_unconstrained_cg(prob, opts);
}

} // namespace

OptResult solve_terminal_constrained(const QuadraticProblem &prob, const AdmissibleSet &adm,
                                     const Dense &Fc, const Vec &z_c,
                                     const TerminalConstraintOptions &opts) {
  const auto &sys = prob.system();
  if (Fc.cols() != sys.n() || z_c.size() != Fc.rows())
    throw DimensionError("terminal constraint dimensions");

  if (all_zero(Fc) && (z_c.size() == 0 || z_c.cwiseAbs().maxCoeff() == 0.0)) {
    OptResult res = inner_solve(prob, adm, opts.inner);
    res.multiplier = Vec::Zero(Fc.rows());
    res.infeasibility = 0.0;
    return res;
  }

  const Index c = Fc.rows();
  Vec lambda = Vec::Zero(c);
  double rho = opts.rho0;
  double prev_infeas = std::numeric_limits<double>::infinity();
  SolverOptions inner = opts.inner;
  if (!inner.initial)
    inner.initial = prob.zero_control();

  OptResult res;
  std::vector<IterationRecord> log;
  std::vector<double> history;
  for (Index outer = 0; outer < opts.max_outer; ++outer) {
    CostSpec aug = prob.spec();
    aug.terminal = stack_terminal(prob.spec().terminal, Fc, z_c - lambda / rho,
                                  rho * Dense::Identity(c, c));
    const QuadraticProblem sub(sys, aug, prob.initial_state(), prob.propagator().scheme());
    res = inner_solve(sub, adm, inner);
    inner.initial = res.u_opt;

    const Vec r = Fc * res.x.final_value() - z_c;
    const double infeas = r.norm();
    const double J = prob.cost(res.u_opt);
    history.push_back(J);
    log.push_back({outer, J, infeas, rho});
    res.infeasibility = infeas;
    res.iterations = outer + 1;
    lambda += rho * r;
    if (infeas <= opts.tol && res.converged) {
      res.cost_history = history;
      res.log = log;
      res.multiplier = lambda;
      return res;
    }
    if (infeas > opts.required_shrink * prev_infeas)
      rho *= opts.rho_growth;
    prev_infeas = infeas;
  }
  std::cerr << "warning: terminal constraint infeasibility " << res.infeasibility
            << " after " << opts.max_outer << " outer iterations\n";
  res.converged = false;
  res.cost_history = history;
  res.log = log;
  res.multiplier = lambda;
  return res;
}

OptResult solve_terminal_constrained(const DescriptorSystem &sys, const CostSpec &spec,
                                     const Vec &x0, const AdmissibleSet &adm, const Dense &Fc,
                                     const Vec &z_c, Scheme scheme, double tol, Index max_iter) {
  TerminalConstraintOptions opts;
  opts.tol = tol;
  opts.inner.max_iter = max_iter;
  return solve_terminal_constrained(QuadraticProblem(sys, spec, x0, scheme), adm, Fc, z_c,
                                    opts);
}

} // namespace evoctrl
