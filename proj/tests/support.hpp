#pragma once

#include "evoctrl/cli.hpp"
#include "evoctrl/fem1d.hpp"
#include "evoctrl/integrators.hpp"
#include "evoctrl/solution_maps.hpp"

#include <random>

namespace evoctrl::testing {

inline double max_abs(const Dense &X) { return X.size() ? X.cwiseAbs().maxCoeff() : 0.0; }

// Textbook LDL^T without pivoting; solves X z = b.
inline Vec ldlt_solve(const Dense &X, const Vec &b) {
  const Index n = X.rows();
  Dense L = Dense::Identity(n, n);
  Vec d(n);
  for (Index j = 0; j < n; ++j) {
    double s = X(j, j);
    for (Index k = 0; k < j; ++k)
      s -= L(j, k) * L(j, k) * d(k);
    d(j) = s;
    for (Index i = j + 1; i < n; ++i) {
      double t = X(i, j);
      for (Index k = 0; k < j; ++k)
        t -= L(i, k) * L(j, k) * d(k);
      L(i, j) = t / d(j);
    }
  }
  Vec z = b;
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < i; ++k)
      z(i) -= L(i, k) * z(k);
  for (Index i = 0; i < n; ++i)
    z(i) /= d(i);
  for (Index i = n - 1; i >= 0; --i)
    for (Index k = i + 1; k < n; ++k)
      z(i) -= L(k, i) * z(k);
  return z;
}

// Theta scheme written out with dense inverses, one step at a time.
struct NaiveRun {
  std::vector<Vec> x;
  std::vector<Vec> y;
};

inline NaiveRun naive_run(const DescriptorSystem &sys, const Vec &x0, const IntervalTrajectory &u,
                          double th) {
  const Dense M(sys.M), A(sys.A), B(sys.B), C(sys.C), D(sys.D);
  const double dt = u.grid.dt();
  const Dense L = M - th * dt * A, R = M + (1.0 - th) * dt * A;
  const Dense Linv = L.inverse();
  NaiveRun r;
  r.x.push_back(x0);
  for (Index i = 0; i < u.grid.steps(); ++i) {
    const Vec ui = u.at(i);
    const Vec xn = Linv * (R * r.x.back() + dt * B * ui);
    const Vec stage = (1.0 - th) * r.x.back() + th * xn;
    r.y.push_back(C * stage + D * ui);
    r.x.push_back(xn);
  }
  return r;
}

inline double scheme_theta(Scheme s) {
  return s == Scheme::ExplicitEuler ? 0.0 : s == Scheme::ImplicitEuler ? 1.0 : 0.5;
}

// Heat instance with b = -xi, c = 1, sine reference and M-weighted terminal penalty.
struct HeatCase {
  DescriptorSystem sys;
  CostSpec spec;
  TimeGrid grid;
};

inline HeatCase heat_case(Index n, Index N, double T, double alpha) {
  HeatParams hp;
  hp.n = n;
  hp.b = [](double xi) { return -xi; };
  hp.c = [](double) { return 1.0; };
  DescriptorSystem sys = assemble_heat(hp);
  const TimeGrid g(T, N);
  IntervalTrajectory y_ref(g, 1);
  for (Index i = 0; i < N; ++i)
    y_ref.values(i, 0) = std::sin(M_PI * g.midpoint(i));
  CostSpec spec{y_ref, alpha, TerminalWeight(Dense::Identity(n, n), Vec::Zero(n), 1.0, Dense(sys.M))};
  return {std::move(sys), std::move(spec), g};
}

// Dense least-squares data: J(u) = 1/2 u^T H u - b^T u + c in vec(u).
struct DenseQuadratic {
  Dense H;
  Vec b;
};

inline DenseQuadratic dense_quadratic(const HeatCase &hc, const Vec &x0, Scheme sc) {
  const auto &s = hc.sys;
  const Index N = hc.grid.steps(), m = s.m(), p = s.p();
  const Dense &F = hc.spec.terminal.F;
  const Dense T = input_map_matrix(s, F, hc.grid, sc);
  const Dense W = [&] {
    Dense W = Dense::Zero(F.rows() + N * p, F.rows() + N * p);
    W.topLeftCorner(F.rows(), F.rows()) = hc.spec.terminal.scale * hc.spec.terminal.Wz;
    for (Index i = 0; i < N; ++i)
      W.block(F.rows() + i * p, F.rows() + i * p, p, p) = hc.grid.dt() * s.Wy;
    return W;
  }();
  // Free response from x0 subtracted from the targets.
  const Run free = simulate_forward(s, x0, IntervalTrajectory(hc.grid, m), sc);
  Vec target(F.rows() + N * p);
  target.head(F.rows()) = hc.spec.terminal.z_f - F * free.state.final_value();
  target.tail(N * p) = vectorize(hc.spec.y_ref) - vectorize(free.output);
  Dense Wu = Dense::Zero(N * m, N * m);
  for (Index i = 0; i < N; ++i)
    Wu.block(i * m, i * m, m, m) = hc.grid.dt() * s.Wu;
  return {T.transpose() * W * T + hc.spec.alpha * Wu, T.transpose() * W * target};
}


} // namespace evoctrl::testing
