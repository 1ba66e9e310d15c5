// One PASS/FAIL line per acceptance criterion.
//
//   acceptance [--expect-fail 8,9] [--only 1,3]
//
// Exit status is 0 when the set of failing criteria equals the expected set.

#include "support.hpp"

#include "evoctrl/fem2d.hpp"
#include "evoctrl/ph.hpp"

#include <CLI11.hpp>
#include <Eigen/SVD>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace evoctrl;
using namespace evoctrl::testing;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    passed = passed && ok;
    if (!detail.empty())
      detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Dense random_dense(std::mt19937_64 &rng, Index r, Index c) {
  std::normal_distribution<double> N01;
  Dense X(r, c);
  for (Index i = 0; i < X.size(); ++i)
    X.data()[i] = N01(rng);
  return X;
}

bool nonincreasing(const std::vector<double> &h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1])
      return false;
  return true;
}

// Experiment runs shared by several criteria, computed on first use.
struct Runs {
  std::optional<ExperimentReport> heat, heat5, heat_box, wave;

  static ExperimentReport run(const std::string &name, std::vector<std::string> sets) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.set("out=none");
    for (const auto &s : sets)
      cfg.set(s);
    return run_experiment(cfg);
  }
  const ExperimentReport &get_heat() {
    if (!heat)
      heat = run("heat", {});
    return *heat;
  }
  const ExperimentReport &get_heat5() {
    if (!heat5)
      heat5 = run("heat5", {});
    return *heat5;
  }
  const ExperimentReport &get_heat_box() {
    if (!heat_box)
      heat_box = run("heat", {"box_lo=-0.5", "box_hi=0.5"});
    return *heat_box;
  }
  const ExperimentReport &get_wave() {
    if (!wave)
      wave = run("wave", {});
    return *wave;
  }
};

Runs runs;

Outcome duality() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint})
    for (int k = 0; k < 20; ++k) {
      std::uniform_int_distribution<Index> dn(1, 8), dm(1, 2), dN(1, 16);
      const Index n = dn(rng), m = dm(rng), p = dm(rng), N = dN(rng);
      const DescriptorSystem sys = random_system(rng, n, m, p);
      const TimeGrid g(1.0, N);
      const auto t = duality_terms(sys, random_vector(rng, n), random_trajectory(rng, g, m),
                                   random_vector(rng, n), random_trajectory(rng, g, p), sc);
      worst = std::max(worst, std::abs(t.residual()) / t.scale());
    }
  o.require(worst <= 1e-12, "relative residual " + sci(worst) + " <= 1e-12");
  return o;
}

Outcome adjoint_identity() {
  Outcome o;
  double worst = 0.0;
  for (Scheme sc : {Scheme::ImplicitMidpoint, Scheme::ImplicitEuler, Scheme::ExplicitEuler})
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      std::mt19937_64 rng(200 + seed);
      const DescriptorSystem sys = random_system(rng, 4, 2, 2);
      worst = std::max(worst, adjoint_identity_residual(sys, random_dense(rng, 3, 4),
                                                        TimeGrid(1.0, 8), sc));
    }
  o.require(worst <= 1e-10, "residual " + sci(worst) + " <= 1e-10");
  return o;
}

Outcome gradient_exactness() {
  Outcome o;
  const HeatCase hc = heat_case(32, 50, 2.0, 0.1);
  const QuadraticProblem prob(hc.sys, hc.spec, Vec::Zero(32), Scheme::ImplicitEuler);
  std::mt19937_64 rng(301);
  const IntervalTrajectory u = random_trajectory(rng, hc.grid, 1);
  const auto ev = prob.evaluate(u);
  double fd_err = 0.0, exp_err = 0.0;
  for (int k = 0; k < 10; ++k) {
    const IntervalTrajectory v = random_trajectory(rng, hc.grid, 1);
    const double h = 1e-5;
    const double fd = (prob.cost(u + h * v) - prob.cost(u - h * v)) / (2 * h);
    const double ad = l2_inner(ev.gradient, v, hc.sys.Wu);
    fd_err = std::max(fd_err, std::abs(fd - ad) / std::abs(ad));
    const double curv = 0.5 * l2_inner(v, prob.hessian_apply(v), hc.sys.Wu);
    const double lhs = prob.cost(u + v);
    const double rhs = ev.cost + ad + curv;
    exp_err = std::max(exp_err, std::abs(lhs - rhs) / (std::abs(ev.cost) + std::abs(ad) + curv));
  }
  o.require(fd_err <= 1e-6, "finite differences " + sci(fd_err) + " <= 1e-6");
  o.require(exp_err <= 1e-11, "expansion " + sci(exp_err) + " <= 1e-11");
  return o;
}

Outcome convexity() {
  Outcome o;
  const HeatCase hc = heat_case(16, 40, 2.0, 0.1);
  const QuadraticProblem prob(hc.sys, hc.spec, Vec::Zero(16), Scheme::ImplicitEuler);
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto a = random_trajectory(rng, hc.grid, 1), b = random_trajectory(rng, hc.grid, 1);
    const double lam = U(rng);
    const double Ja = prob.cost(a), Jb = prob.cost(b);
    const double viol = prob.cost(lam * a + (1 - lam) * b) - (lam * Ja + (1 - lam) * Jb);
    worst = std::max(worst, viol / std::max({1.0, Ja, Jb}));
  }
  o.require(worst <= 1e-12, "max violation " + sci(std::max(worst, 0.0)) + " <= 1e-12");
  bool mono = true;
  for (const ExperimentReport *r :
       {&runs.get_heat(), &runs.get_heat5(), &runs.get_heat_box(), &runs.get_wave()})
    mono = mono && nonincreasing(r->result.cost_history);
  o.require(mono, "cost histories nonincreasing");
  return o;
}

Outcome certificates() {
  Outcome o;
  for (const ExperimentReport *r :
       {&runs.get_heat(), &runs.get_heat5(), &runs.get_heat_box(), &runs.get_wave()}) {
    const double c = r->metric("certificate");
    const bool conv = r->result.converged;
    o.require(conv && c >= -1e-8, r->experiment + (r == &*runs.heat_box ? "(box)" : "") +
                                      " certificate " + sci(c) + (conv ? "" : " not converged"));
  }
  return o;
}

Outcome energy_balance() {
  Outcome o;
  WaveParams wp;
  wp.n = 4;
  const WaveModel w = assemble_wave(wp);
  std::mt19937_64 rng(601);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  IntervalTrajectory u(TimeGrid(5.0, 100), w.m());
  for (Index i = 0; i < u.values.size(); ++i)
    u.values.data()[i] = U(rng);
  const EnergyLedger led = energy_ledger(w.node, Vec::Zero(w.n()), u, Scheme::ImplicitMidpoint);
  o.require(led.relative_residual() <= 1e-9,
            "relative residual " + sci(led.relative_residual()) + " <= 1e-9");
  o.require(led.dissipated.minCoeff() >= 0.0,
            "min dissipated " + sci(led.dissipated.minCoeff()) + " >= 0");
  return o;
}

Outcome dissipation() {
  Outcome o;
  std::mt19937_64 rng(701);
  double worst = 0.0;
  auto probe = [&](const Dense &P, const Dense &RS) {
    for (int k = 0; k < 100; ++k) {
      const Vec xi = random_vector(rng, P.cols());
      const double v = 2.0 * (RS * xi).squaredNorm() + xi.dot(P * xi);
      worst = std::max(worst, std::abs(v) / (max_abs(P) * xi.squaredNorm()));
    }
  };
  for (int k = 0; k < 5; ++k) {
    const Dense X = random_dense(rng, 6, 6), L = random_dense(rng, 6, 2);
    const Dense P = 0.5 * (X - X.transpose()) - L * L.transpose();
    probe(P, dissipation_factor(P));
  }
  WaveParams wp;
  wp.n = 4;
  const WaveModel w = assemble_wave(wp);
  const Dense P = w.node.quadratic_form();
  probe(P, w.node.RS);
  o.require(worst <= 1e-12, "factor residual " + sci(worst) + " <= 1e-12");
  // ||RS xi||^2 against 1/2 int d |v|^2 on the velocity block.
  double vel = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec xi = random_vector(rng, P.cols());
    const Vec v = xi.head(w.np());
    const double rhs = 0.5 * v.dot(w.Md * v);
    vel = std::max(vel, std::abs((w.node.RS * xi).squaredNorm() - rhs) / rhs);
  }
  o.require(vel <= 1e-12, "velocity form " + sci(vel) + " <= 1e-12");
  return o;
}

Outcome heat_c1() {
  Outcome o;
  const auto &r = runs.get_heat();
  o.require(r.metric("cost") < r.metric("cost_zero"),
            "J " + fix(r.metric("cost")) + " < J(0) " + fix(r.metric("cost_zero")));
  o.require(r.metric("mean_u_first_half") < 0.0,
            "mean u on [0,1] " + fix(r.metric("mean_u_first_half")) + " < 0");
  o.require(r.metric("mean_u_second_half") > 0.0,
            "mean u on [1,2] " + fix(r.metric("mean_u_second_half")) + " > 0");
  o.require(r.metric("tracking_correlation") >= 0.9,
            "corr " + fix(r.metric("tracking_correlation")) + " >= 0.9");
  o.require(r.runtime < 60.0, "runtime " + fix(r.runtime) + " s < 60");
  return o;
}

Outcome heat_c5() {
  Outcome o;
  const double m5 = runs.get_heat5().metric("tracking_misfit");
  const double m1 = runs.get_heat().metric("tracking_misfit");
  o.require(m5 > m1, "misfit c=5 " + fix(m5) + " > c=1 " + fix(m1));
  return o;
}

Outcome wave() {
  Outcome o;
  const auto &r = runs.get_wave();
  const double umax = r.result.u_opt.values.cwiseAbs().maxCoeff();
  o.require(umax <= 1.0, "max |u| " + fix(umax) + " <= 1");
  const double kT = r.metric("kinetic_final"), kmax = r.metric("kinetic_max");
  o.require(kT <= 0.1 * kmax, "kinetic(T) " + sci(kT) + " <= 0.1 max " + sci(kmax));
  const double e = r.metric("displacement_rel_error"), e0 = r.metric("displacement_rel_error_zero");
  o.require(e < e0, "displacement error " + fix(e) + " < zero control " + fix(e0));
  o.require(r.runtime < 600.0, "runtime " + fix(r.runtime) + " s < 600");
  return o;
}

Outcome terminal_constraint() {
  Outcome o;
  const HeatCase hc = heat_case(8, 16, 1.0, 0.1);
  const Vec x0 = Vec::Zero(8);
  Dense Fc = Dense::Zero(2, 8);
  Fc.row(0).head(4).setConstant(0.25);
  Fc.row(1).tail(4).setConstant(0.25);
  const Vec z_c = (Vec(2) << 0.05, -0.02).finished();

  const DenseQuadratic q = dense_quadratic(hc, x0, Scheme::ImplicitEuler);
  const Dense A = input_map_matrix(hc.sys, Fc, hc.grid, Scheme::ImplicitEuler).topRows(2);
  const Index K = q.H.rows();
  Dense KKT = Dense::Zero(K + 2, K + 2);
  KKT.topLeftCorner(K, K) = q.H;
  KKT.topRightCorner(K, 2) = A.transpose();
  KKT.bottomLeftCorner(2, K) = A;
  Vec rhs(K + 2);
  rhs << q.b, z_c;
  const Vec u_star = KKT.fullPivLu().solve(rhs).head(K);

  const OptResult r = solve_terminal_constrained(hc.sys, hc.spec, x0, AdmissibleSet::unconstrained(),
                                                 Fc, z_c, Scheme::ImplicitEuler, 1e-8, 2000);
  const double diff = (vectorize(r.u_opt) - u_star).norm() / u_star.norm();
  const double feas = (Fc * r.x.final_value() - z_c).norm();
  o.require(diff <= 1e-6, "control vs KKT " + sci(diff) + " <= 1e-6");
  o.require(feas <= 1e-8, "feasibility " + sci(feas) + " <= 1e-8");
  return o;
}

Outcome displacement() {
  Outcome o;
  WaveParams wp;
  wp.n = 8;
  const WaveModel w = assemble_wave(wp);
  const DisplacementOperator disp(w);
  std::mt19937_64 rng(1201);
  double rec = 0.0, ker = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vec wd = random_vector(rng, w.np());
    rec = std::max(rec, (disp.apply(disp.gradient(wd)) - wd).norm() / wd.norm());
    const Vec q0 = random_vector(rng, w.nq());
    const Vec q = q0 - disp.gradient(disp.apply(q0));
    ker = std::max(ker, disp.apply(q).norm() / q0.norm());
  }
  o.require(rec <= 1e-10, "gradient recovery " + sci(rec) + " <= 1e-10");
  o.require(ker <= 1e-10, "kernel " + sci(ker) + " <= 1e-10");
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double time_limit; // seconds; 0 for none
  std::function<Outcome()> run;
};

std::set<int> parse_ids(const std::string &list) {
  std::set<int> ids;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty())
      ids.insert(std::stoi(tok));
  return ids;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance criteria"};
  std::string expect, only;
  app.add_option("--expect-fail", expect, "comma-separated criteria expected to fail");
  app.add_option("--only", only, "comma-separated criteria to run");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> expected = parse_ids(expect), selected = parse_ids(only);

  const std::vector<Criterion> criteria = {
      {1, "discrete duality", 5, duality},
      {2, "input map adjoint", 10, adjoint_identity},
      {3, "gradient exactness", 30, gradient_exactness},
      {4, "convexity and descent", 0, convexity},
      {5, "optimality certificates", 0, certificates},
      {6, "energy balance", 30, energy_balance},
      {7, "dissipation factor", 0, dissipation},
      {8, "heat c=1", 0, heat_c1},
      {9, "heat c=5 disparity", 0, heat_c5},
      {10, "wave experiment", 0, wave},
      {11, "terminal constraint", 30, terminal_constraint},
      {12, "displacement reconstruction", 0, displacement},
  };

  std::set<int> failed;
  for (const auto &c : criteria) {
    if (!selected.empty() && !selected.count(c.id))
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0)
      o.require(secs < c.time_limit, "time " + fix(secs) + " s < " + fix(c.time_limit));
    if (!o.passed)
      failed.insert(c.id);
    std::printf("%s %2d %-28s %s%s\n", o.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), !o.passed && expected.count(c.id) ? " (expected)" : "");
    std::fflush(stdout);
  }

  std::set<int> want;
  for (int id : expected)
    if (selected.empty() || selected.count(id))
      want.insert(id);
  std::printf("%zu failed", failed.size());
  if (!want.empty())
    std::printf(", %zu expected", want.size());
  std::printf("\n");
  return failed == want ? 0 : 1;
}
