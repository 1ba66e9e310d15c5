#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evoctrl {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Dense = Eigen::MatrixXd;
/// Compressed-sparse-row storage; column indices strictly increase per row.
using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// Raised when a factorization breaks down. `pivot()` is the failing
/// pivot (or time step, for step matrices); -1 when unknown.
class FactorizationError : public Error {
public:
  FactorizationError(const std::string &what, Index pivot)
      : Error(what), pivot_(pivot) {}
  Index pivot() const noexcept { return pivot_; }

private:
  Index pivot_;
};

/// M x' = A x + B u,  y = C x + D u, with inner-product weights Wu (inputs)
/// and Wy (outputs). The state space carries the M-weighted product.
struct DescriptorSystem {
  Sparse M, A, B, C, D;
  Dense Wu, Wy;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }

  /// Throws DimensionError or FactorizationError.
  void validate() const;
};

/// Terminal penalty (scale/2) ||F x - z_f||^2_Wz. Wz defaults to identity.
struct TerminalWeight {
  Dense F;
  Vec z_f;
  double scale = 1.0;
  Dense Wz;

  TerminalWeight() = default;
  TerminalWeight(Dense F_, Vec z_f_, double scale_ = 1.0);
  TerminalWeight(Dense F_, Vec z_f_, double scale_, Dense Wz_);

  Index rows() const { return F.rows(); }
  void validate(Index n) const;
  /// Zero terminal weight on an n-dimensional state.
  static TerminalWeight none(Index n);
};

/// Adjoint of F from the M-weighted state space into (Z, Wz): M^-1 F^T Wz.
Dense terminal_adjoint(const DescriptorSystem &sys, const Dense &F, const Dense &Wz);

/// Builds a system with identity weights, validating it.
DescriptorSystem make_system(Sparse M, Sparse A, Sparse B, Sparse C, Sparse D);
DescriptorSystem make_system(Sparse M, Sparse A, Sparse B, Sparse C, Sparse D,
                             Dense Wu, Dense Wy);

/// Adjoint node with respect to the (M, Wu, Wy) inner products:
/// (M, A^T, C^T Wy, Wu^-1 B^T, Wu^-1 D^T Wy) with weights swapped.
DescriptorSystem adjoint_system(const DescriptorSystem &sys);

/// Rejects matrices failing ||X - X^T||_max <= 1e-12 ||X||_max.
bool is_symmetric(const Dense &X, double rel_tol = 1e-12);
void require_spd(const Dense &X, const std::string &name);
void require_spd(const Sparse &X, const std::string &name);

/// Returns the first pivot at which a dense Cholesky factorization fails,
/// or -1 if the matrix is numerically positive definite.
Index cholesky_failure_pivot(const Dense &X);

Vec solve_spd(const Dense &X, const Vec &rhs);
Vec solve_spd(const Sparse &X, const Vec &rhs);

/// Symmetric square root through the dense eigendecomposition.
Dense spd_sqrt(const Dense &X);

Sparse to_sparse(const Dense &X);
Sparse identity(Index n);

/// x^T W y.
double weighted_dot(const Vec &x, const Dense &W, const Vec &y);

void write_matrix_market(const std::string &path, const Sparse &X);
Sparse read_matrix_market(const std::string &path);

} // namespace evoctrl
