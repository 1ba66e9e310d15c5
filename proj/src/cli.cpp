#include "evoctrl/cli.hpp"

#include "evoctrl/fem1d.hpp"
#include "evoctrl/fem2d.hpp"
#include "evoctrl/ph.hpp"
#include "evoctrl/solution_maps.hpp"
#include "evoctrl/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace evoctrl {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kExperiments = {"heat", "heat5", "wave", "custom"};

} // namespace

std::vector<std::string> accepted_keys(const std::string &experiment) {
  std::vector<std::string> keys = {"experiment", "n",      "N",      "T",   "tol",
                                   "max_iter",   "seed",   "out",    "svg", "scheme",
                                   "box_lo",     "box_hi", "alpha"};
  if (experiment == "heat" || experiment == "heat5")
    keys.insert(keys.end(), {"c"});
  else if (experiment == "custom")
    keys.insert(keys.end(), {"a", "b", "c", "ref_freq"});
  else if (experiment == "wave")
    keys.insert(keys.end(), {"rho", "T_mod", "d", "alpha_T"});
  return keys;
}

ExperimentConfig ExperimentConfig::from_text(const std::string &text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

void ExperimentConfig::set(const std::string &assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ExperimentConfig::set(const std::string &key, const std::string &value) {
  if (key.empty())
    throw ConfigError("empty key");
  if (key == "experiment")
    experiment = value;
  else
    overrides[key] = value;
}

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  const auto keys = accepted_keys(experiment);
  const std::set<std::string> textual = {"out", "scheme", "svg"};
  for (const auto &[k, v] : overrides) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError("unknown key '" + k + "' for experiment " + experiment);
    if (!textual.count(k))
      number(k, 0.0);
  }
  if (has("scheme")) {
    try {
      scheme_from_string(text("scheme", ""));
    } catch (const Error &e) {
      throw ConfigError(e.what());
    }
  }
  if (has("svg") && text("svg", "") != "true" && text("svg", "") != "false")
    throw ConfigError("svg must be true or false");
  if (has("box_lo") != has("box_hi") && experiment != "wave")
    throw ConfigError("box_lo and box_hi go together");
  for (const char *k : {"n", "N", "max_iter", "seed"})
    if (has(k) && integer(k, 0) < 0)
      throw ConfigError(std::string(k) + " must be nonnegative");
}

double ExperimentConfig::number(const std::string &key, double fallback) const {
  const auto it = overrides.find(key);
  if (it == overrides.end())
    return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size())
      throw ConfigError("");
    return v;
  } catch (const std::exception &) {
    throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
  }
}

Index ExperimentConfig::integer(const std::string &key, Index fallback) const {
  if (!has(key))
    return fallback;
  const double v = number(key, 0.0);
  if (v != std::floor(v))
    throw ConfigError("key '" + key + "': not an integer");
  return static_cast<Index>(v);
}

std::string ExperimentConfig::text(const std::string &key, const std::string &fallback) const {
  const auto it = overrides.find(key);
  return it == overrides.end() ? fallback : it->second;
}

double ExperimentReport::metric(const std::string &name) const {
  for (const auto &[k, v] : metrics)
    if (k == name)
      return v;
  throw Error("no metric " + name);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double correlation(const Vec &a, const Vec &b) {
  const Vec da = a.array() - a.mean();
  const Vec db = b.array() - b.mean();
  const double den = std::sqrt(da.squaredNorm() * db.squaredNorm());
  return den > 0.0 ? da.dot(db) / den : 0.0;
}

Vec interval_midpoints(const TimeGrid &g) {
  Vec t(g.steps());
  for (Index i = 0; i < g.steps(); ++i)
    t(i) = g.midpoint(i);
  return t;
}

Vec grid_nodes(const TimeGrid &g) {
  Vec t(g.steps() + 1);
  for (Index i = 0; i <= g.steps(); ++i)
    t(i) = g.node(i);
  return t;
}

struct Solve {
  OptResult result;
  AdmissibleSet adm;
};

Solve solve(const QuadraticProblem &prob, double lo, double hi, bool boxed, double tol,
            Index max_iter) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  if (boxed) {
    auto adm = AdmissibleSet::box(prob.system().m(), lo, hi);
    return {solve_projected_gradient(prob, adm, opts), adm};
  }
  return {solve_unconstrained_cg(prob, opts), AdmissibleSet::unconstrained()};
}

void write_summary(const std::string &path, const ExperimentReport &rep) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path);
  os << std::setprecision(17);
  os << "experiment = " << rep.experiment << '\n';
  os << "converged = " << (rep.result.converged ? "true" : "false") << '\n';
  os << "iterations = " << rep.result.iterations << '\n';
  for (const auto &[k, v] : rep.metrics)
    os << k << " = " << v << '\n';
  os << std::setprecision(4) << "runtime_seconds = " << rep.runtime << '\n';
}

void run_heat(const ExperimentConfig &cfg, ExperimentReport &rep, bool write,
              const std::string &dir, bool svg) {
  const bool custom = cfg.experiment == "custom";
  HeatParams hp;
  hp.n = cfg.integer("n", 64);
  const double cval = cfg.number("c", cfg.experiment == "heat5" ? 5.0 : custom ? 0.0 : 1.0);
  if (custom) {
    const double a = cfg.number("a", 1.0), b = cfg.number("b", 0.0);
    hp.a = [a](double) { return a; };
    hp.b = [b](double) { return b; };
  } else {
    hp.b = [](double xi) { return -xi; };
  }
  hp.c = [cval](double) { return cval; };
  const DescriptorSystem sys = assemble_heat(hp);

  const TimeGrid grid(cfg.number("T", 2.0), cfg.integer("N", 200));
  const double freq = cfg.number("ref_freq", 1.0);
  IntervalTrajectory y_ref(grid, 1);
  for (Index i = 0; i < grid.steps(); ++i)
    y_ref.values(i, 0) = std::sin(freq * M_PI * grid.midpoint(i));
  const Index n = sys.n();
  CostSpec spec{y_ref, cfg.number("alpha", 0.1),
                TerminalWeight(Dense::Identity(n, n), Vec::Zero(n), 1.0, Dense(sys.M))};
  const Scheme scheme = scheme_from_string(cfg.text("scheme", "implicit_euler"));
  const QuadraticProblem prob(sys, spec, Vec::Zero(n), scheme);

  const bool boxed = cfg.has("box_lo");
  Solve s = solve(prob, cfg.number("box_lo", 0.0), cfg.number("box_hi", 0.0), boxed,
                  cfg.number("tol", 1e-8), cfg.integer("max_iter", 500));
  const OptResult &r = s.result;
  rep.result = r;

  const Index N = grid.steps();
  double m1 = 0, m2 = 0;
  Index c1 = 0, c2 = 0;
  for (Index i = 0; i < N; ++i) {
    if (grid.midpoint(i) < 0.5 * grid.horizon()) {
      m1 += r.u_opt.values(i, 0);
      ++c1;
    } else {
      m2 += r.u_opt.values(i, 0);
      ++c2;
    }
  }
  const Vec y = r.y.values.col(0), yr = y_ref.values.col(0);
  const Sparse &M = sys.M;
  double state_l2 = 0.0;
  for (Index i = 0; i < N; ++i) {
    const Vec a = r.x.at(i), b = r.x.at(i + 1);
    state_l2 += 0.5 * grid.dt() * (a.dot(M * a) + b.dot(M * b));
  }
  const auto cert = stationarity_residual(prob, s.adm, r.u_opt, 100,
                                          static_cast<std::uint64_t>(cfg.integer("seed", 1)));
  rep.metrics = {{"cost_zero", prob.cost(prob.zero_control())},
                 {"cost", prob.cost(r.u_opt)},
                 {"stationarity", r.stationarity},
                 {"certificate", cert.value},
                 {"mean_u_first_half", c1 ? m1 / static_cast<double>(c1) : 0.0},
                 {"mean_u_second_half", c2 ? m2 / static_cast<double>(c2) : 0.0},
                 {"tracking_correlation", correlation(y, yr)},
                 {"tracking_misfit", l2_norm(r.y - y_ref, sys.Wy)},
                 {"state_l2", std::sqrt(state_l2)},
                 {"control_l2", l2_norm(r.u_opt, sys.Wu)}};

  if (!write)
    return;
  write_csv(dir + "/control.csv", r.u_opt, "u");
  write_csv(dir + "/output.csv", r.y, "y");
  write_csv(dir + "/reference.csv", y_ref, "yref");
  write_csv(dir + "/state_snapshots.csv", r.x, "x");
  write_convergence_csv(dir + "/convergence.csv", r);
  if (svg) {
    const Vec t = interval_midpoints(grid);
    svg_line_plot(dir + "/control.svg", "control u", {{"u", t, r.u_opt.values.col(0)}});
    svg_line_plot(dir + "/output.svg", "output and reference",
                  {{"y", t, y}, {"y_ref", t, yr}});
    svg_heatmap(dir + "/state.svg", "state (time upward, space right)", Dense(r.x.values));
  }
}

void run_wave(const ExperimentConfig &cfg, ExperimentReport &rep, bool write,
              const std::string &dir, bool svg) {
  WaveParams wp;
  wp.n = cfg.integer("n", 8);
  wp.rho = cfg.number("rho", 1.0);
  wp.T_mod = cfg.number("T_mod", 1.0);
  const double d = cfg.number("d", 0.05);
  wp.d = [d](double, double) { return d; };
  const WaveModel model = assemble_wave(wp);
  const DisplacementOperator disp(model);
  const Vec wf = model.to_pdofs(distance_to_gamma0(model.mesh));
  const TerminalWeight tw = wave_terminal_weight(model, disp, wf, cfg.number("alpha_T", 10.0));
  const TimeGrid grid(cfg.number("T", 5.0), cfg.integer("N", 100));
  Reformulation ref = energy_optimal_reformulate(model.node, tw, grid);
  ref.cost.alpha = cfg.number("alpha", 0.0);
  const Scheme scheme = scheme_from_string(cfg.text("scheme", "implicit_midpoint"));
  const Vec x0 = Vec::Zero(model.n());
  const QuadraticProblem prob(ref.system, ref.cost, x0, scheme);

  const double lo = cfg.number("box_lo", -1.0), hi = cfg.number("box_hi", 1.0);
  Solve s = solve(prob, lo, hi, true, cfg.number("tol", 1e-6),
                  cfg.integer("max_iter", 100000));
  const OptResult &r = s.result;
  rep.result = r;

  const Index N = grid.steps();
  Vec kinetic(N + 1);
  for (Index i = 0; i <= N; ++i)
    kinetic(i) = model.kinetic_energy(r.x.at(i));
  const Vec xT = r.x.final_value();
  auto rel_error = [&](const Vec &q) {
    const Vec e = disp.apply(q) - wf;
    return std::sqrt(e.dot(model.Mp * e) / wf.dot(model.Mp * wf));
  };
  const Run zero_run = prob.propagator().forward(x0, prob.zero_control());
  double violation = 0.0;
  for (Index i = 0; i < r.u_opt.values.size(); ++i) {
    const double v = r.u_opt.values.data()[i];
    violation = std::max({violation, lo - v, v - hi});
  }
  const EnergyLedger ledger = energy_ledger(model.node, x0, r.u_opt, scheme);
  const auto cert = stationarity_residual(prob, s.adm, r.u_opt, 100,
                                          static_cast<std::uint64_t>(cfg.integer("seed", 1)));
  rep.metrics = {{"cost_zero", prob.cost(prob.zero_control())},
                 {"cost", prob.cost(r.u_opt)},
                 {"stationarity", r.stationarity},
                 {"certificate", cert.value},
                 {"supplied_energy_cost", supplied_energy_cost(model.node, tw, x0, r.u_opt, scheme)},
                 {"kinetic_final", kinetic(N)},
                 {"kinetic_max", kinetic.maxCoeff()},
                 {"displacement_rel_error", rel_error(xT.tail(model.nq()))},
                 {"displacement_rel_error_zero",
                  rel_error(zero_run.state.final_value().tail(model.nq()))},
                 {"control_max_abs", r.u_opt.values.cwiseAbs().maxCoeff()},
                 {"bound_violation", violation},
                 {"energy_relative_residual", ledger.relative_residual()},
                 {"dissipated_min", ledger.dissipated.size() ? ledger.dissipated.minCoeff() : 0.0}};

  if (!write)
    return;
  write_csv(dir + "/control.csv", r.u_opt, "u");
  write_csv(dir + "/output.csv", r.y, "w");
  write_convergence_csv(dir + "/convergence.csv", r);
  write_energy_csv(dir + "/energy.csv", ledger);
  {
    std::ofstream os(dir + "/kinetic.csv");
    os << "t,kinetic\n" << std::setprecision(17);
    for (Index i = 0; i <= N; ++i)
      os << grid.node(i) << ',' << kinetic(i) << '\n';
  }
  std::vector<double> times;
  std::vector<Vec> fields;
  for (double t : {1.5, 2.5, 3.5, 4.5, 5.0}) {
    if (t > grid.horizon() + 1e-12)
      continue;
    const Index i = std::min<Index>(N, std::llround(t / grid.dt()));
    times.push_back(grid.node(i));
    fields.push_back(model.to_vertices(disp.apply(r.x.at(i).tail(model.nq()))));
  }
  write_field_snapshots(dir + "/state_snapshots.csv", model.mesh, times, fields);
  if (svg) {
    const Vec t = interval_midpoints(grid);
    std::vector<Series> series;
    for (Index j = 0; j < model.m(); ++j)
      series.push_back({"u" + std::to_string(j), t, r.u_opt.values.col(j)});
    svg_line_plot(dir + "/control.svg", "boundary controls", series);
    svg_line_plot(dir + "/kinetic.svg", "kinetic energy", {{"kinetic", grid_nodes(grid), kinetic}});
  }
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig &config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = config.experiment;
  const std::string out = config.text("out", "out/" + config.experiment);
  const bool write = out != "none";
  const bool svg = config.text("svg", "true") == "true";
  if (write) {
    std::filesystem::create_directories(out);
    rep.out_dir = out;
  }
  if (config.experiment == "wave")
    run_wave(config, rep, write, out, svg);
  else
    run_heat(config, rep, write, out, svg);
  rep.runtime = seconds_since(t0);
  if (write)
    write_summary(out + "/summary.txt", rep);
  return rep;
}

void write_mesh(Index n, const std::string &dir) {
  std::filesystem::create_directories(dir);
  write_mesh_csv(dir, build_lshape_mesh(n));
}

// ---------------------------------------------------------------------------
// Invariant suite

Vec random_vector(std::mt19937_64 &rng, Index n) {
  std::normal_distribution<double> N;
  Vec v(n);
  for (Index i = 0; i < n; ++i)
    v(i) = N(rng);
  return v;
}

IntervalTrajectory random_trajectory(std::mt19937_64 &rng, const TimeGrid &grid, Index width) {
  IntervalTrajectory u(grid, width);
  std::normal_distribution<double> N;
  for (Index i = 0; i < u.values.size(); ++i)
    u.values.data()[i] = N(rng);
  return u;
}

namespace {

Dense random_dense(std::mt19937_64 &rng, Index r, Index c) {
  std::normal_distribution<double> N;
  Dense X(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i)
      X(i, j) = N(rng);
  return X;
}

Dense random_spd(std::mt19937_64 &rng, Index n) {
  const Dense X = random_dense(rng, n, n);
  return X * X.transpose() / static_cast<double>(n) + Dense::Identity(n, n);
}

} // namespace

DescriptorSystem random_system(std::mt19937_64 &rng, Index n, Index m, Index p) {
  const Dense M = random_spd(rng, n);
  // A = M (S - R) with S skew and R SPD keeps the pencil dissipative.
  const Dense X = random_dense(rng, n, n);
  const Dense S = 0.5 * (X - X.transpose());
  Dense A = M * (S - random_spd(rng, n));
  // Unit spectral norm of M^-1 A keeps explicit Euler stable for dt <= 1.
  A /= (M.llt().solve(A)).operatorNorm();
  return make_system(to_sparse(M), to_sparse(A), to_sparse(random_dense(rng, n, m)),
                     to_sparse(random_dense(rng, p, n)), to_sparse(random_dense(rng, p, m)),
                     random_spd(rng, m), random_spd(rng, p));
}

std::vector<CheckResult> check_suite(const CheckOptions &options) {
  std::vector<CheckResult> out;
  auto record = [&](const std::string &name, double residual, double tol) {
    out.push_back({name, residual, tol, residual <= tol});
  };
  const Scheme schemes[] = {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint};

  {
    std::mt19937_64 rng(options.seed);
    double worst = 0.0;
    for (Scheme sc : schemes)
      for (int k = 0; k < 20; ++k) {
        std::uniform_int_distribution<Index> dn(1, 8), dm(1, 2), dN(1, 16);
        const Index n = dn(rng), m = dm(rng), p = dm(rng), N = dN(rng);
        const DescriptorSystem sys = random_system(rng, n, m, p);
        const TimeGrid g(1.0, N);
        DescriptorSystem adj = adjoint_system(sys);
        if (options.corrupt_adjoint)
          adj.B = -adj.B;
        const auto terms =
            duality_terms(sys, random_vector(rng, n), random_trajectory(rng, g, m),
                          random_vector(rng, n), random_trajectory(rng, g, p), sc, &adj);
        worst = std::max(worst, std::abs(terms.residual()) / terms.scale());
      }
    record("duality", worst, 1e-12);
  }
  {
    std::mt19937_64 rng(options.seed + 1);
    double worst = 0.0;
    for (Scheme sc : {Scheme::ImplicitMidpoint, Scheme::ImplicitEuler, Scheme::ExplicitEuler})
      for (int k = 0; k < 5; ++k) {
        const DescriptorSystem sys = random_system(rng, 4, 2, 2);
        worst = std::max(worst, adjoint_identity_residual(sys, random_dense(rng, 3, 4),
                                                          TimeGrid(1.0, 8), sc));
      }
    record("adjoint_identity", worst, 1e-10);
  }

  HeatParams hp;
  hp.n = 16;
  hp.b = [](double xi) { return -xi; };
  hp.c = [](double) { return 1.0; };
  const DescriptorSystem heat = assemble_heat(hp);
  const TimeGrid hg(1.0, 20);
  IntervalTrajectory y_ref(hg, 1);
  for (Index i = 0; i < hg.steps(); ++i)
    y_ref.values(i, 0) = std::sin(M_PI * hg.midpoint(i));
  const CostSpec hspec{y_ref, 0.1,
                       TerminalWeight(Dense::Identity(16, 16), Vec::Zero(16), 1.0, Dense(heat.M))};
  const QuadraticProblem hprob(heat, hspec, Vec::Zero(16), Scheme::ImplicitEuler);
  {
    std::mt19937_64 rng(options.seed + 2);
    const IntervalTrajectory u = random_trajectory(rng, hg, 1);
    const IntervalTrajectory g = hprob.evaluate(u).gradient;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const IntervalTrajectory v = random_trajectory(rng, hg, 1);
      const double h = 1e-5;
      const double fd = (hprob.cost(u + h * v) - hprob.cost(u - h * v)) / (2 * h);
      const double ad = l2_inner(g, v, heat.Wu);
      worst = std::max(worst, std::abs(fd - ad) / std::max(std::abs(ad), 1e-300));
    }
    record("gradient", worst, 1e-6);
  }
  {
    std::mt19937_64 rng(options.seed + 3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const IntervalTrajectory a = random_trajectory(rng, hg, 1), b = random_trajectory(rng, hg, 1);
      const double lam = U(rng);
      const double Ja = hprob.cost(a), Jb = hprob.cost(b);
      const double Jm = hprob.cost(lam * a + (1.0 - lam) * b);
      const double viol = Jm - (lam * Ja + (1.0 - lam) * Jb);
      worst = std::max(worst, viol / std::max({1.0, std::abs(Ja), std::abs(Jb)}));
    }
    record("convexity", std::max(worst, 0.0), 1e-12);
  }

  WaveParams wp;
  wp.n = 4;
  const WaveModel wave = assemble_wave(wp);
  {
    std::mt19937_64 rng(options.seed + 4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    IntervalTrajectory u(TimeGrid(1.0, 40), wave.m());
    for (Index i = 0; i < u.values.size(); ++i)
      u.values.data()[i] = U(rng);
    const EnergyLedger led = energy_ledger(wave.node, Vec::Zero(wave.n()), u, Scheme::ImplicitMidpoint);
    record("energy_balance", led.relative_residual(), 1e-9);
    record("energy_dissipated_nonnegative", std::max(0.0, -led.dissipated.minCoeff()), 0.0);
  }
  {
    std::mt19937_64 rng(options.seed + 5);
    const Dense P = wave.node.quadratic_form();
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec xi = random_vector(rng, P.cols());
      const double lhs = 2.0 * (wave.node.RS * xi).squaredNorm() + xi.dot(P * xi);
      const double scale = P.cwiseAbs().maxCoeff() * xi.squaredNorm();
      worst = std::max(worst, lhs / scale);
    }
    record("dissipation_factor", worst, 1e-12);
  }
  {
    std::mt19937_64 rng(options.seed + 6);
    const DisplacementOperator disp(wave);
    const Vec w = random_vector(rng, wave.np());
    const double rec = (disp.apply(disp.gradient(w)) - w).norm() / w.norm();
    const Vec q0 = random_vector(rng, wave.nq());
    const Vec q = q0 - disp.gradient(disp.apply(q0));
    const double ker = disp.apply(q).norm() / q0.norm();
    record("displacement_recovery", rec, 1e-10);
    record("displacement_kernel", ker, 1e-10);
  }
  return out;
}

void write_check_report(std::ostream &os, const std::vector<CheckResult> &results) {
  std::size_t failed = 0;
  os << std::scientific << std::setprecision(3);
  for (const auto &r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(30) << r.name
       << " residual " << r.residual << "  tol " << r.tolerance << '\n';
    failed += r.passed ? 0 : 1;
  }
  os << results.size() - failed << '/' << results.size() << " checks passed\n";
}

} // namespace evoctrl
