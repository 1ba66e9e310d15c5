#include "evoctrl/fem1d.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace evoctrl {

namespace {

const std::array<double, 2> kGaussPts = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

// Full operator on nodes 0..n+1 (both boundaries included).
struct FullOperator {
  Dense mass, op; // dense is fine at these sizes
};

// forward: op(i,j) = -int a phi_j' phi_i' + int b phi_j' phi_i + int c phi_j phi_i
// adjoint: op(i,j) = -int a phi_j' phi_i' + int b phi_j phi_i' + int c phi_j phi_i
FullOperator assemble_full(const HeatParams &p, bool adjoint) {
  const Index nodes = p.n + 2;
  const double h = p.h();
  FullOperator out{Dense::Zero(nodes, nodes), Dense::Zero(nodes, nodes)};
  for (Index e = 0; e < nodes - 1; ++e) {
    const double x0 = static_cast<double>(e) * h;
    const std::array<double, 2> dphi = {-1.0 / h, 1.0 / h};
    for (double s : kGaussPts) {
      const double x = x0 + s * h;
      const double w = 0.5 * h;
      const std::array<double, 2> phi = {1.0 - s, s};
      const double a = p.a(x), b = p.b(x), c = p.c(x);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double transport = adjoint ? b * phi[j] * dphi[i] : b * dphi[j] * phi[i];
          out.op(e + i, e + j) +=
              w * (-a * dphi[j] * dphi[i] + transport + c * phi[j] * phi[i]);
          out.mass(e + i, e + j) += w * phi[j] * phi[i];
        }
    }
  }
  return out;
}

Sparse single_entry(Index rows, Index cols, Index r, Index c, double v) {
  Sparse S(rows, cols);
  S.insert(r, c) = v;
  S.makeCompressed();
  return S;
}

} // namespace

void HeatParams::validate() const {
  if (n < 2)
    throw Error("heat model needs n >= 2");
  const double hh = h();
  for (Index e = 0; e <= n; ++e)
    for (double s : kGaussPts) {
      const double x = (static_cast<double>(e) + s) * hh;
      if (!(a(x) > 0.0))
        throw Error("diffusion coefficient must be positive; a(" + std::to_string(x) +
                    ") = " + std::to_string(a(x)));
    }
}

Vec heat_nodes(const HeatParams &params) {
  Vec xs(params.n);
  for (Index i = 0; i < params.n; ++i)
    xs(i) = static_cast<double>(i + 1) * params.h();
  return xs;
}

Sparse heat_mass(const HeatParams &params) {
  params.validate();
  const FullOperator full = assemble_full(params, false);
  return to_sparse(full.mass.block(1, 1, params.n, params.n));
}

DescriptorSystem assemble_heat(const HeatParams &params) {
  params.validate();
  const Index n = params.n;
  const FullOperator full = assemble_full(params, false);
  const Sparse M = to_sparse(full.mass.block(1, 1, n, n));
  const Sparse A = to_sparse(full.op.block(1, 1, n, n));
  const Sparse B = to_sparse(full.op.block(1, n + 1, n, 1));
  const double h = params.h();
  const Sparse C = single_entry(1, n, 0, 0, params.a(0.5 * h) / h);
  return make_system(M, A, B, C, Sparse(1, 1));
}

DescriptorSystem assemble_heat_adjoint_reference(const HeatParams &params) {
  params.validate();
  const Index n = params.n;
  const FullOperator full = assemble_full(params, true);
  const Sparse M = to_sparse(full.mass.block(1, 1, n, n));
  const Sparse A = to_sparse(full.op.block(1, 1, n, n));
  const double h = params.h();
  const Sparse B = single_entry(n, 1, 0, 0, params.a(0.5 * h) / h);
  const Sparse C = to_sparse(full.op.block(n + 1, 1, 1, n));
  return make_system(M, A, B, C, Sparse(1, 1));
}

} // namespace evoctrl
