#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "graphext/types.hpp"

namespace graphext {

/// Indefinite inner product (x|y) = <Hx, y> on C^n, represented by an
/// invertible Hermitian matrix H.
class IndefiniteForm {
 public:
  explicit IndefiniteForm(Matrix H) : H_(std::move(H)) {
    if (H_.rows() != H_.cols())
      throw std::invalid_argument("IndefiniteForm: matrix must be square");
    const Real scale = H_.norm();
    if ((H_ - H_.adjoint()).norm() > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("IndefiniteForm: matrix must be Hermitian");
    Eigen::JacobiSVD<Matrix> svd(H_);
    const Real smin = svd.singularValues().minCoeff();
    const Real smax = svd.singularValues().maxCoeff();
    if (!(smin > 1e-10 * smax))
      throw std::invalid_argument("IndefiniteForm: matrix must be invertible");
    norm2_ = smax;
    lu_.compute(H_);
  }

  explicit IndefiniteForm(const RealMatrix& H) : IndefiniteForm(Matrix(H.cast<Complex>())) {}

  Index dim() const { return H_.rows(); }
  const Matrix& matrix() const { return H_; }
  Real operator_norm() const { return norm2_; }
  Matrix solve(const Matrix& rhs) const { return lu_.solve(rhs); }

  /// (x|y) = <Hx, y>, linear in x, conjugate-linear in y.
  Complex product(const Vector& x, const Vector& y) const {
    return y.dot(H_ * x);  // Eigen's dot conjugates the first argument
  }

 private:
  Matrix H_;
  Real norm2_ = 0;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// A matrix together with the Krein forms of its domain and codomain.
struct FramedOperator {
  Matrix L;
  IndefiniteForm domain_form;
  IndefiniteForm codomain_form;

  FramedOperator(Matrix Lmat, IndefiniteForm dom, IndefiniteForm cod)
      : L(std::move(Lmat)), domain_form(std::move(dom)), codomain_form(std::move(cod)) {
    if (L.cols() != domain_form.dim() || L.rows() != codomain_form.dim())
      throw std::invalid_argument("FramedOperator: dimensions do not match the forms");
  }
};

/// Krein adjoint L^# = H_dom^{-1} L^* H_cod, framed from codomain to domain.
inline FramedOperator krein_adjoint(const FramedOperator& op) {
  Matrix sharp = op.domain_form.solve(op.L.adjoint() * op.codomain_form.matrix());
  return FramedOperator(std::move(sharp), op.codomain_form, op.domain_form);
}

struct UnitaryCheck {
  bool unitary = false;
  Real residual = 0;  // ||L* H_cod L - H_dom||_F / ||H_dom||_F
};

/// Gram test L* H_cod L = H_dom together with invertibility of L.
inline UnitaryCheck is_krein_unitary(const FramedOperator& op, Real tol = 1e-12) {
  if (op.L.rows() != op.L.cols())
    throw std::invalid_argument("is_krein_unitary: operator must be square");
  const Matrix gram = op.L.adjoint() * op.codomain_form.matrix() * op.L;
  UnitaryCheck r;
  r.residual = (gram - op.domain_form.matrix()).norm() / op.domain_form.matrix().norm();
  Eigen::JacobiSVD<Matrix> svd(op.L);
  const bool invertible =
      svd.singularValues().minCoeff() > 1e-12 * std::max(1.0, svd.singularValues().maxCoeff());
  r.unitary = invertible && r.residual <= tol;
  return r;
}

struct ContractionCheck {
  bool contraction = false;
  Real max_eigenvalue = 0;  // largest eigenvalue of Herm(L* H_cod L - H_dom)
};

/// (Lx|Lx)_cod <= (x|x)_dom for all x, i.e. L* H_cod L - H_dom
/// negative semidefinite up to tol*(1 + ||H_dom||).
inline ContractionCheck is_krein_contraction(const FramedOperator& op, Real tol = 1e-10) {
  Matrix diff = op.L.adjoint() * op.codomain_form.matrix() * op.L - op.domain_form.matrix();
  diff = Matrix(0.5 * (diff + diff.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  ContractionCheck r;
  r.max_eigenvalue = es.eigenvalues().maxCoeff();
  r.contraction = r.max_eigenvalue <= tol * (1.0 + op.domain_form.operator_norm());
  return r;
}

/// Largest eigenvalue of the Hermitian form v* A v restricted to the column
/// span of `subspace` (orthonormalized internally). Empty subspace gives 0.
inline Real restricted_max_eigenvalue(const Matrix& A, const Matrix& subspace) {
  if (subspace.cols() == 0) return 0.0;
  Eigen::HouseholderQR<Matrix> qr(subspace);
  Matrix Q = qr.householderQ() * Matrix::Identity(subspace.rows(), subspace.cols());
  Matrix Ar = Q.adjoint() * A * Q;
  Ar = Matrix(0.5 * (Ar + Ar.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ar, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Orthonormal basis of the null space of A (columns), by SVD.
inline Matrix null_space(const Matrix& A, Real tol = 1e-10) {
  if (A.rows() == 0) return Matrix::Identity(A.cols(), A.cols());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Real cut = tol * std::max<Real>(1.0, s.size() ? s(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

struct SelfOrthogonalCheck {
  bool self_orthogonal = false;
  Real defect = 0;  // subspace distance ||P_X - P_{X^perp_w}||
  Index dim_x = 0;
  Index dim_x_perp = 0;
};

/// X = X^{perp_w} for w((x,y),(x~,y~)) = (x|x~)_+ - (y|y~)_- on K_+ (+) K_-.
/// `basis` holds spanning columns of X in the stacked coordinates.
inline SelfOrthogonalCheck is_w_self_orthogonal(const Matrix& basis,
                                                const IndefiniteForm& h_plus,
                                                const IndefiniteForm& h_minus,
                                                Real tol = 1e-10) {
  const Index np = h_plus.dim(), nm = h_minus.dim();
  if (basis.rows() != np + nm)
    throw std::invalid_argument("is_w_self_orthogonal: basis rows must be dim K_+ + dim K_-");
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const Index rank = (s.array() > 1e-10 * std::max<Real>(1.0, s(0))).count();
  if (rank < basis.cols()) throw std::invalid_argument("degenerate basis");

  Matrix hw = Matrix::Zero(np + nm, np + nm);
  hw.topLeftCorner(np, np) = h_plus.matrix();
  hw.bottomRightCorner(nm, nm) = -h_minus.matrix();
  // v in X^{perp_w}  <=>  basis^* Hw v = 0
  Matrix perp = null_space(Matrix(basis.adjoint() * hw));

  SelfOrthogonalCheck r;
  r.dim_x = basis.cols();
  r.dim_x_perp = perp.cols();
  Matrix qx = svd.matrixU().leftCols(rank);
  Matrix px = qx * qx.adjoint();
  Matrix pperp = perp * perp.adjoint();
  r.defect = (px - pperp).norm();
  r.self_orthogonal = (r.dim_x == r.dim_x_perp) && r.defect <= tol * Real(np + nm);
  return r;
}

}  // namespace graphext
