#include "support.hpp"

#include "evoctrl/solution_maps.hpp"

#include <doctest.h>

using namespace evoctrl;
using namespace evoctrl::testing;

namespace {

// Input-to-(F x(T), y) matrix from dense step-by-step runs of unit impulses.
Dense naive_input_map(const DescriptorSystem &s, const Dense &F, const TimeGrid &g, double th) {
  const Index N = g.steps(), m = s.m(), p = s.p();
  Dense out(F.rows() + N * p, N * m);
  for (Index c = 0; c < N * m; ++c) {
    IntervalTrajectory e(g, m);
    e.values(c / m, c % m) = 1.0;
    const NaiveRun r = naive_run(s, Vec::Zero(s.n()), e, th);
    out.col(c).head(F.rows()) = F * r.x.back();
    for (Index i = 0; i < N; ++i)
      out.col(c).segment(F.rows() + i * p, p) = r.y[static_cast<std::size_t>(i)];
  }
  return out;
}

Dense block_weight(const Dense &Wz, const Dense &W, Index N, double dt) {
  const Index z = Wz.rows(), p = W.rows();
  Dense out = Dense::Zero(z + N * p, z + N * p);
  out.topLeftCorner(z, z) = Wz;
  for (Index i = 0; i < N; ++i)
    out.block(z + i * p, z + i * p, p, p) = dt * W;
  return out;
}

} // namespace

TEST_SUITE("solution_maps") {

TEST_CASE("input map matrix matches dense impulse runs") {
  std::mt19937_64 rng(21);
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint}) {
    const DescriptorSystem s = random_system(rng, 4, 2, 2);
    const Dense F = Dense::Random(3, 4);
    const TimeGrid g(1.0, 6);
    const Dense ref = naive_input_map(s, F, g, scheme_theta(sc));
    CHECK(max_abs(input_map_matrix(s, F, g, sc) - ref) <= 1e-12 * max_abs(ref));
  }
}

TEST_CASE("reflected adjoint output map is the weighted transpose") {
  std::mt19937_64 rng(22);
  for (Scheme sc : {Scheme::ExplicitEuler, Scheme::ImplicitEuler, Scheme::ImplicitMidpoint})
    for (int k = 0; k < 20; ++k) {
      const DescriptorSystem s = random_system(rng, 4, 2, 2);
      const Dense F = Dense::Random(3, 4);
      const Dense Wz = Dense::Identity(3, 3) * 2.0;
      const TimeGrid g(1.0, 8);
      const Index N = g.steps();
      const Dense T = naive_input_map(s, F, g, scheme_theta(sc));
      // <T u, v>_{Wz, Wy} = <u, T* v>_Wu  =>  T* = (dt Wu)^-1 T^T W_out
      const Dense Wout = block_weight(Wz, s.Wy, N, g.dt());
      Dense WuBlock = Dense::Zero(N * 2, N * 2);
      for (Index i = 0; i < N; ++i)
        WuBlock.block(i * 2, i * 2, 2, 2) = g.dt() * s.Wu;
      const Dense Tstar = WuBlock.inverse() * T.transpose() * Wout;
      const Dense R = reflected_output_map_matrix(s, F, Wz, g, sc);
      CHECK(max_abs(R - Tstar) <= 1e-10 * std::max(1.0, max_abs(Tstar)));
      CHECK(adjoint_identity_residual(s, F, Wz, g, sc) <= 1e-10);
    }
}

TEST_CASE("panel pieces compose") {
  std::mt19937_64 rng(23);
  const DescriptorSystem s = random_system(rng, 3, 1, 2);
  const TimeGrid g(1.0, 5);
  const Dense F = Dense::Identity(3, 3);
  const OperatorPanel P = assemble_panel(s, F, g, Scheme::ImplicitMidpoint);
  const Vec x0 = random_vector(rng, 3);
  const auto u = random_trajectory(rng, g, 1);
  const Run r = simulate_forward(s, x0, u, Scheme::ImplicitMidpoint);
  const Vec y = P.C_T * x0 + P.D_T * vectorize(u);
  CHECK((y - vectorize(r.output)).norm() <= 1e-12 * y.norm());
  CHECK((P.B_T * vectorize(u) - input_to_state(s, u, Scheme::ImplicitMidpoint)).norm() <= 1e-12);
  CHECK_THROWS(assemble_panel(s, F, TimeGrid(1.0, 100), Scheme::ImplicitMidpoint, 10));
}

TEST_CASE("vectorize round trip") {
  std::mt19937_64 rng(24);
  const TimeGrid g(1.0, 4);
  const auto u = random_trajectory(rng, g, 3);
  CHECK((unvectorize(g, vectorize(u), 3).values - u.values).norm() == 0.0);
}

}
