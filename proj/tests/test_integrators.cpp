#include "support.hpp"

#include <doctest.h>

using namespace evoctrl;
using namespace evoctrl::testing;

TEST_SUITE("integrators") {

TEST_CASE("scalar recurrences") {
  const double lam = -2.0, dt = 0.1;
  const DescriptorSystem s = make_system(identity(1), to_sparse(Dense::Constant(1, 1, lam)),
                                         identity(1), identity(1), to_sparse(Dense::Zero(1, 1)));
  IntervalTrajectory u(TimeGrid(1.0, 10), 1);
  u.values.setConstant(0.5);
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint}) {
    const double th = scheme_theta(sc);
    const Run r = simulate_forward(s, Vec::Constant(1, 1.0), u, sc);
    double x = 1.0;
    for (Index i = 0; i < 10; ++i) {
      const double xn = ((1.0 + (1.0 - th) * dt * lam) * x + dt * 0.5) / (1.0 - th * dt * lam);
      CHECK(r.output.values(i, 0) == doctest::Approx((1.0 - th) * x + th * xn).epsilon(1e-14));
      x = xn;
    }
    CHECK(r.state.final_value()(0) == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("runs match dense step-by-step evaluation") {
  std::mt19937_64 rng(11);
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint}) {
    const DescriptorSystem s = random_system(rng, 5, 2, 3);
    const TimeGrid g(1.0, 12);
    const Vec x0 = random_vector(rng, 5);
    const auto u = random_trajectory(rng, g, 2);
    const Run r = simulate_forward(s, x0, u, sc);
    const NaiveRun ref = naive_run(s, x0, u, scheme_theta(sc));
    for (Index i = 0; i <= 12; ++i)
      CHECK((r.state.at(i) - ref.x[static_cast<std::size_t>(i)]).norm() <= 1e-12);
    for (Index i = 0; i < 12; ++i)
      CHECK((r.output.at(i) - ref.y[static_cast<std::size_t>(i)]).norm() <= 1e-12);
  }
}

TEST_CASE("discrete duality on random systems") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<Index> dn(1, 8), dm(1, 2), dN(1, 16);
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint})
    for (int k = 0; k < 20; ++k) {
      const Index n = dn(rng), m = dm(rng), p = dm(rng);
      const DescriptorSystem s = random_system(rng, n, m, p);
      const TimeGrid g(1.0, dN(rng));
      const auto t = duality_terms(s, random_vector(rng, n), random_trajectory(rng, g, m),
                                   random_vector(rng, n), random_trajectory(rng, g, p), sc);
      CHECK(t.residual() <= 1e-12 * t.scale());
    }
}

TEST_CASE("singular step matrix is reported") {
  // M - dt A = 0 for implicit Euler with A = 1/dt.
  const DescriptorSystem s = make_system(identity(1), to_sparse(Dense::Constant(1, 1, 10.0)),
                                         identity(1), identity(1), to_sparse(Dense::Zero(1, 1)));
  CHECK_THROWS_AS(Stepper(s, 0.1, Scheme::ImplicitEuler), FactorizationError);
}

TEST_CASE("scheme names") {
  CHECK(scheme_from_string("implicit_midpoint") == Scheme::ImplicitMidpoint);
  CHECK(to_string(Scheme::ExplicitEuler) == "explicit_euler");
  CHECK_THROWS(scheme_from_string("rk4"));
}

}
