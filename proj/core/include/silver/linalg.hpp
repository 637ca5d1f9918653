#pragma once

// Dense symmetric / SPD matrix kernels.
//
// Every constructor symmetrizes its input as (M + M^T) / 2. SpdMatrix carries
// its eigendecomposition so that square roots, inverses and log-determinants
// reuse one factorization. All types are immutable values.

#include <Eigen/Dense>

#include <cmath>
#include <memory>

namespace silver {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SymMatrix {
 public:
  SymMatrix() = default;
  /// Symmetrizes `m`. Throws ContractViolation if non-square or non-finite.
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double max_abs() const { return m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns

  Matrix reconstruct() const;
};

/// Symmetric eigensolver (tridiagonalization + implicit QR).
/// Throws NumericalFailure naming the Frobenius norm on non-convergence.
EigenDecomposition sym_eigen(const SymMatrix& m);
/// Ascending eigenvalues only; cheaper when vectors are not needed.
Vector sym_eigenvalues(const SymMatrix& m);

/// Relative eigenvalue floor 1e-12 * (1 + trace / dim).
double spd_floor(const SymMatrix& m);

/// Rebuilds V f(diag) V^T from a decomposition.
template <class F>
SymMatrix spectral_map(const EigenDecomposition& e, F&& f) {
  Vector mapped = e.values.unaryExpr(std::forward<F>(f));
  return SymMatrix(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

class SpdMatrix {
 public:
  /// Throws DegenerateMatrix if the smallest eigenvalue is <= spd_floor.
  explicit SpdMatrix(SymMatrix m);
  explicit SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}

  static SpdMatrix identity(Eigen::Index dim);
  /// V diag(values) V^T; `values` must be ascending and above the floor.
  static SpdMatrix from_spectrum(const Vector& values, const Matrix& vectors);

  Eigen::Index dim() const noexcept { return base_.dim(); }
  const SymMatrix& sym() const noexcept { return base_; }
  const Matrix& matrix() const noexcept { return base_.matrix(); }
  const EigenDecomposition& eigen() const noexcept { return *eig_; }
  double min_eigenvalue() const { return eig_->values(0); }
  double max_eigenvalue() const { return eig_->values(eig_->values.size() - 1); }
  double condition_number() const { return max_eigenvalue() / min_eigenvalue(); }

 private:
  SpdMatrix(SymMatrix m, std::shared_ptr<const EigenDecomposition> e);
  void check_floor() const;

  SymMatrix base_;
  std::shared_ptr<const EigenDecomposition> eig_;
};

/// Principal square root.
SpdMatrix spd_sqrt(const SpdMatrix& m);
/// Inverse of the principal square root.
SpdMatrix spd_inv_sqrt(const SpdMatrix& m);
SpdMatrix spd_inverse(const SpdMatrix& m);
/// Sum of log eigenvalues.
double log_det(const SpdMatrix& m);

/// Matrix exponential of a symmetric matrix.
SymMatrix sym_exp(const SymMatrix& m);
/// Principal matrix logarithm of an SPD matrix.
SymMatrix spd_log(const SpdMatrix& m);

/// Square root of a PSD matrix with negative round-off eigenvalues clamped to 0.
SymMatrix psd_sqrt(const SymMatrix& m);

/// Relative Frobenius distance ||a - b|| / (1 + ||b||).
inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

}  // namespace silver
