#include "support.hpp"

#include "evoctrl/fem2d.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace evoctrl;
using namespace evoctrl::testing;

namespace {

using Pt = std::array<double, 2>;

double seg_dist(Pt p, Pt a, Pt b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  double t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

// Clamped part of the L boundary: everything but y = 2 and x = 2.
double dist_clamped(Pt p) {
  const std::array<std::array<Pt, 2>, 4> segs = {{{{{0, 0}, {2, 0}}},
                                                  {{{0, 0}, {0, 2}}},
                                                  {{{1, 1}, {1, 2}}},
                                                  {{{1, 1}, {2, 1}}}}};
  double best = 1e300;
  for (const auto &s : segs)
    best = std::min(best, seg_dist(p, s[0], s[1]));
  return best;
}

} // namespace

TEST_SUITE("fem2d") {

TEST_CASE("L-shaped mesh counts and area") {
  for (Index n : {1, 2, 5, 8}) {
    const MeshL mesh = build_lshape_mesh(n);
    CHECK(static_cast<Index>(mesh.vertices.size()) == (2 * n + 1) * (2 * n + 1) - n * n);
    CHECK(static_cast<Index>(mesh.triangles.size()) == 6 * n * n);
    double area = 0.0;
    for (Index t = 0; t < static_cast<Index>(mesh.triangles.size()); ++t) {
      CHECK(mesh.triangle_area(t) > 0.0);
      area += mesh.triangle_area(t);
    }
    CHECK(area == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(static_cast<Index>(mesh.gamma1_edges.size()) == 2 * n);
    CHECK(static_cast<Index>(mesh.gamma0_edges.size()) == 6 * n);
  }
}

TEST_CASE("distance to the clamped boundary") {
  const MeshL mesh = build_lshape_mesh(6);
  const Vec d = distance_to_gamma0(mesh);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    CHECK(d(static_cast<Index>(v)) == doctest::Approx(dist_clamped(mesh.vertices[v])).epsilon(1e-14));
    CHECK(mesh.on_gamma0[v] == (dist_clamped(mesh.vertices[v]) == 0.0));
  }
}

TEST_CASE("wave model dimensions") {
  WaveParams wp;
  wp.n = 8;
  const WaveModel w = assemble_wave(wp);
  CHECK(w.np() == 175);
  CHECK(w.nq() == 450);
  CHECK(w.m() == 18);
  CHECK(w.node.M.rows() == 625);
  // Mass matrices integrate constants to the area; p dofs only see the free part.
  const Vec one_q = Vec::Ones(w.nq());
  CHECK(one_q.dot(w.Mq * one_q) == doctest::Approx(6.0).epsilon(1e-12));
  // Boundary trace mass: two Gamma1 segments of length one.
  const Vec one_u = Vec::Ones(w.m());
  CHECK(one_u.dot(w.Wu * one_u) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(w.node.dissipativity_violation() <= 1e-12);
}

TEST_CASE("displacement reconstruction") {
  WaveParams wp;
  wp.n = 4;
  wp.T_mod = 2.0;
  const WaveModel w = assemble_wave(wp);
  const DisplacementOperator disp(w);
  std::mt19937_64 rng(51);
  const Vec wd = random_vector(rng, w.np());
  CHECK((disp.apply(disp.gradient(wd)) - wd).norm() <= 1e-10 * wd.norm());
  // Stresses orthogonal to every discrete gradient give no displacement.
  const Vec q0 = random_vector(rng, w.nq());
  const Vec q = q0 - disp.gradient(disp.apply(q0));
  CHECK(disp.apply(q).norm() <= 1e-10 * q0.norm());
  CHECK(max_abs(disp.matrix() * q0 - disp.apply(q0)) <= 1e-14 * q0.norm() * 10);
  const Vec verts = displacement_reconstruct(w, disp.gradient(wd));
  for (std::size_t v = 0; v < w.mesh.vertices.size(); ++v)
    if (w.mesh.on_gamma0[v])
      CHECK(verts(static_cast<Index>(v)) == 0.0);
  CHECK((w.to_pdofs(verts) - wd).norm() <= 1e-10 * wd.norm());
}

}
