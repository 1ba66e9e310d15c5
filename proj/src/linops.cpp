#include "evoctrl/linops.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <cmath>
#include <sstream>

namespace evoctrl {

namespace {

void require_shape(bool ok, const std::string &what) {
  if (!ok)
    throw DimensionError("dimension mismatch: " + what);
}

} // namespace

bool is_symmetric(const Dense &X, double rel_tol) {
  if (X.rows() != X.cols())
    return false;
  const double scale = X.cwiseAbs().maxCoeff();
  if (scale == 0.0)
    return true;
  return (X - X.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Index cholesky_failure_pivot(const Dense &X) {
  const Index n = X.rows();
  Dense L = Dense::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = X(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d))
      return j;
    L(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i)
      L(i, j) = (X(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return -1;
}

void require_spd(const Dense &X, const std::string &name) {
  require_shape(X.rows() == X.cols() && X.rows() > 0, name + " must be square");
  if (!is_symmetric(X))
    throw FactorizationError(name + " is not symmetric", -1);
  const Index pivot = cholesky_failure_pivot(X);
  if (pivot >= 0) {
    std::ostringstream os;
    os << name << " is not positive definite (Cholesky pivot " << pivot << ")";
    throw FactorizationError(os.str(), pivot);
  }
}

void require_spd(const Sparse &X, const std::string &name) {
  require_shape(X.rows() == X.cols() && X.rows() > 0, name + " must be square");
  const Sparse diff = X - Sparse(X.transpose());
  double scale = 0.0, asym = 0.0;
  for (Index k = 0; k < X.outerSize(); ++k)
    for (Sparse::InnerIterator it(X, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (Sparse::InnerIterator it(diff, k); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  if (asym > 1e-12 * scale)
    throw FactorizationError(name + " is not symmetric", -1);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(X);
  if (llt.info() != Eigen::Success) {
    const Index pivot = cholesky_failure_pivot(Dense(X));
    std::ostringstream os;
    os << name << " is not positive definite (Cholesky pivot " << pivot << ")";
    throw FactorizationError(os.str(), pivot);
  }
}

void DescriptorSystem::validate() const {
  const Index nn = A.rows();
  require_shape(nn > 0 && A.cols() == nn, "A must be square and nonempty");
  require_shape(M.rows() == nn && M.cols() == nn, "M must be n x n");
  require_shape(B.rows() == nn && B.cols() > 0, "B must be n x m");
  require_shape(C.cols() == nn && C.rows() > 0, "C must be p x n");
  require_shape(D.rows() == C.rows() && D.cols() == B.cols(), "D must be p x m");
  require_shape(Wu.rows() == B.cols() && Wu.cols() == B.cols(), "Wu must be m x m");
  require_shape(Wy.rows() == C.rows() && Wy.cols() == C.rows(), "Wy must be p x p");
  require_spd(M, "M");
  require_spd(Wu, "Wu");
  require_spd(Wy, "Wy");
}

DescriptorSystem make_system(Sparse M, Sparse A, Sparse B, Sparse C, Sparse D) {
  const Index m = B.cols(), p = C.rows();
  return make_system(std::move(M), std::move(A), std::move(B), std::move(C),
                     std::move(D), Dense::Identity(m, m), Dense::Identity(p, p));
}

DescriptorSystem make_system(Sparse M, Sparse A, Sparse B, Sparse C, Sparse D,
                             Dense Wu, Dense Wy) {
  DescriptorSystem sys{std::move(M), std::move(A), std::move(B), std::move(C),
                       std::move(D), std::move(Wu), std::move(Wy)};
  sys.validate();
  return sys;
}

DescriptorSystem adjoint_system(const DescriptorSystem &sys) {
  sys.validate();
  const Eigen::LLT<Dense> wu(sys.Wu);
  const Dense Bt = Dense(sys.B).transpose();
  const Dense Dt = Dense(sys.D).transpose();
  DescriptorSystem adj;
  adj.M = Sparse(sys.M.transpose());
  adj.A = Sparse(sys.A.transpose());
  adj.B = to_sparse(Dense(sys.C).transpose() * sys.Wy);
  adj.C = to_sparse(wu.solve(Bt));
  adj.D = to_sparse(wu.solve(Dt * sys.Wy));
  adj.Wu = sys.Wy;
  adj.Wy = sys.Wu;
  return adj;
}

TerminalWeight::TerminalWeight(Dense F_, Vec z_f_, double scale_)
    : F(std::move(F_)), z_f(std::move(z_f_)), scale(scale_),
      Wz(Dense::Identity(F.rows(), F.rows())) {}

TerminalWeight::TerminalWeight(Dense F_, Vec z_f_, double scale_, Dense Wz_)
    : F(std::move(F_)), z_f(std::move(z_f_)), scale(scale_), Wz(std::move(Wz_)) {}

void TerminalWeight::validate(Index n) const {
  require_shape(F.cols() == n, "terminal operator F must have n columns");
  require_shape(z_f.size() == F.rows(), "terminal target has wrong length");
  require_shape(Wz.rows() == F.rows() && Wz.cols() == F.rows(), "Wz must be z x z");
  if (!(scale >= 0.0))
    throw Error("terminal scale must be nonnegative");
  if (F.rows() > 0)
    require_spd(Wz, "Wz");
}

TerminalWeight TerminalWeight::none(Index n) {
  return TerminalWeight(Dense::Zero(1, n), Vec::Zero(1), 0.0);
}

Dense terminal_adjoint(const DescriptorSystem &sys, const Dense &F, const Dense &Wz) {
  require_shape(F.cols() == sys.n() && Wz.rows() == F.rows(), "terminal_adjoint");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass{Eigen::SparseMatrix<double>(sys.M)};
  const Dense rhs = F.transpose() * Wz;
  Dense out(sys.n(), F.rows());
  for (Index j = 0; j < rhs.cols(); ++j)
    out.col(j) = mass.solve(Vec(rhs.col(j)));
  return out;
}

Vec solve_spd(const Dense &X, const Vec &rhs) {
  require_shape(X.rows() == X.cols() && X.rows() == rhs.size(), "solve_spd");
  const Eigen::LLT<Dense> llt(X);
  if (llt.info() != Eigen::Success || !is_symmetric(X)) {
    const Index pivot = cholesky_failure_pivot(X);
    throw FactorizationError("solve_spd: matrix is not SPD (pivot " +
                                 std::to_string(pivot) + ")",
                             pivot);
  }
  return llt.solve(rhs);
}

Vec solve_spd(const Sparse &X, const Vec &rhs) {
  require_shape(X.rows() == X.cols() && X.rows() == rhs.size(), "solve_spd");
  const Eigen::SparseMatrix<double> Xc(X);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Xc);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok)
    ok = (ldlt.vectorD().array() > 0.0).all();
  if (!ok) {
    const Index pivot = cholesky_failure_pivot(Dense(X));
    throw FactorizationError("solve_spd: matrix is not SPD (pivot " +
                                 std::to_string(pivot) + ")",
                             pivot);
  }
  return ldlt.solve(rhs);
}

Dense spd_sqrt(const Dense &X) {
  require_spd(X, "spd_sqrt argument");
  const Eigen::SelfAdjointEigenSolver<Dense> eig(X);
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Sparse to_sparse(const Dense &X) { return X.sparseView(1.0, 0.0); }

Sparse identity(Index n) {
  Sparse I(n, n);
  I.setIdentity();
  return I;
}

double weighted_dot(const Vec &x, const Dense &W, const Vec &y) {
  return x.dot(W * y);
}

void write_matrix_market(const std::string &path, const Sparse &X) {
  const Eigen::SparseMatrix<double> Xc(X);
  if (!Eigen::saveMarket(Xc, path))
    throw Error("cannot write matrix market file: " + path);
}

Sparse read_matrix_market(const std::string &path) {
  Eigen::SparseMatrix<double> Xc;
  if (!Eigen::loadMarket(Xc, path))
    throw Error("cannot read matrix market file: " + path);
  return Sparse(Xc);
}

} // namespace evoctrl
