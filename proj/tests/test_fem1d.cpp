#include "support.hpp"

#include "evoctrl/fem1d.hpp"

#include <doctest.h>

using namespace evoctrl;
using namespace evoctrl::testing;

TEST_SUITE("fem1d") {

TEST_CASE("two interior nodes by hand") {
  HeatParams p;
  const double a = 1.5, b = 0.5, c = 2.0;
  p.a = [=](double) { return a; };
  p.b = [=](double) { return b; };
  p.c = [=](double) { return c; };
  p.n = 2;
  const double h = 1.0 / 3.0;
  const DescriptorSystem s = assemble_heat(p);

  Dense M(2, 2), A(2, 2), B(2, 1), C(1, 2);
  M << 4, 1, 1, 4;
  M *= h / 6.0;
  Dense K(2, 2), T(2, 2);
  K << 2, -1, -1, 2;
  T << 0, 0.5, -0.5, 0;
  A = -a / h * K + b * T + c * M;
  B << 0, a / h + b / 2 + c * h / 6;
  C << a / h, 0;
  CHECK(max_abs(Dense(s.M) - M) <= 1e-14);
  CHECK(max_abs(Dense(s.A) - A) <= 1e-13);
  CHECK(max_abs(Dense(s.B) - B) <= 1e-13);
  CHECK(max_abs(Dense(s.C) - C) <= 1e-13);
  CHECK(max_abs(Dense(s.D)) == 0.0);
  CHECK(max_abs(Dense(heat_mass(p)) - M) <= 1e-14);
  CHECK(heat_nodes(p)(1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("unit boundary value drives the flux to one") {
  HeatParams p;
  p.n = 64;
  const DescriptorSystem s = assemble_heat(p);
  const TimeGrid g(10.0, 400);
  IntervalTrajectory u(g, 1);
  u.values.setOnes();
  const Run run = simulate_forward(s, Vec::Zero(p.n), u, Scheme::ImplicitEuler);
  CHECK(std::abs(run.output.values(g.steps() - 1, 0) - 1.0) <= 1e-2);
  // Steady state is the linear profile.
  const Vec xs = heat_nodes(p);
  CHECK((run.state.final_value() - xs).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("direct adjoint discretization matches the transposed node") {
  HeatParams p;
  p.a = [](double x) { return 1.0 + x * x; };
  p.b = [](double x) { return -x; };
  p.c = [](double x) { return 1.0 + std::sin(x); };
  p.n = 12;
  const DescriptorSystem adj = adjoint_system(assemble_heat(p));
  const DescriptorSystem ref = assemble_heat_adjoint_reference(p);
  CHECK(max_abs(Dense(adj.M) - Dense(ref.M)) <= 1e-14);
  CHECK(max_abs(Dense(adj.A) - Dense(ref.A)) <= 1e-12);
  CHECK(max_abs(Dense(adj.B) - Dense(ref.B)) <= 1e-12);
  CHECK(max_abs(Dense(adj.C) - Dense(ref.C)) <= 1e-12);
}

TEST_CASE("non-positive diffusion is rejected") {
  HeatParams p;
  p.a = [](double x) { return x - 0.5; };
  CHECK_THROWS_AS(assemble_heat(p), Error);
  p.a = [](double) { return 1.0; };
  p.n = 1;
  CHECK_THROWS_AS(assemble_heat(p), Error);
}

}
