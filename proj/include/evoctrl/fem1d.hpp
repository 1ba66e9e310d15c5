#pragma once

#include "evoctrl/linops.hpp"

#include <functional>

namespace evoctrl {

using Coefficient = std::function<double(double)>;

/// x_t = (a x')' + b x' + c x on [0,1], x(0) = 0, u = x(1), y = a(0) x'(0).
/// P1 elements on n interior nodes, h = 1/(n+1).
struct HeatParams {
  Coefficient a = [](double) { return 1.0; };
  Coefficient b = [](double) { return 0.0; };
  Coefficient c = [](double) { return 0.0; };
  Index n = 32;

  double h() const { return 1.0 / static_cast<double>(n + 1); }
  /// Throws if a <= 0 at a quadrature point.
  void validate() const;
};

/// Descriptor form on the interior nodes. The boundary value at xi=1 is
/// replaced by u; its stiffness/advection/reaction coupling is B.
/// y is a at the first element midpoint times the first-element slope.
DescriptorSystem assemble_heat(const HeatParams &params);

/// Direct discretization of the adjoint node
///   x_d' = (a x_d')' - (b x_d)' + c x_d,  x_d(1) = 0,
/// input entering as the first-element diffusion flux at xi=0 and output
/// the weak-form boundary residual at xi=1 (approximating -(a x_d')(1)).
DescriptorSystem assemble_heat_adjoint_reference(const HeatParams &params);

/// Consistent P1 mass on the interior nodes (the L2 Gram matrix).
Sparse heat_mass(const HeatParams &params);

/// Interior node coordinates.
Vec heat_nodes(const HeatParams &params);

} // namespace evoctrl
