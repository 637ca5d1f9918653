#include "silver/linalg.hpp"

#include "silver/error.hpp"

#include <sstream>

namespace silver {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "SymMatrix: expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw ContractViolation(os.str());
  }
  if (!m.allFinite()) throw ContractViolation("SymMatrix: non-finite entry");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

Matrix EigenDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

EigenDecomposition sym_eigen(const SymMatrix& m) {
  if (m.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sym_eigen: no convergence for matrix with Frobenius norm " << m.matrix().norm();
    throw NumericalFailure(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector sym_eigenvalues(const SymMatrix& m) {
  if (m.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sym_eigenvalues: no convergence for matrix with Frobenius norm " << m.matrix().norm();
    throw NumericalFailure(os.str());
  }
  return solver.eigenvalues();
}

double spd_floor(const SymMatrix& m) {
  if (m.dim() == 0) return 0.0;
  return 1e-12 * (1.0 + m.trace() / static_cast<double>(m.dim()));
}

SpdMatrix::SpdMatrix(SymMatrix m)
    : base_(std::move(m)), eig_(std::make_shared<EigenDecomposition>(sym_eigen(base_))) {
  check_floor();
}

SpdMatrix::SpdMatrix(SymMatrix m, std::shared_ptr<const EigenDecomposition> e)
    : base_(std::move(m)), eig_(std::move(e)) {
  check_floor();
}

void SpdMatrix::check_floor() const {
  if (dim() == 0) throw ContractViolation("SpdMatrix: empty matrix");
  const double floor = spd_floor(base_);
  if (!(eig_->values(0) > floor)) {
    std::ostringstream os;
    os << "SpdMatrix: smallest eigenvalue " << eig_->values(0) << " is not above floor " << floor;
    throw DegenerateMatrix(os.str(), eig_->values(0));
  }
}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) {
  return from_spectrum(Vector::Ones(dim), Matrix::Identity(dim, dim));
}

SpdMatrix SpdMatrix::from_spectrum(const Vector& values, const Matrix& vectors) {
  auto e = std::make_shared<EigenDecomposition>(EigenDecomposition{values, vectors});
  SymMatrix m(e->reconstruct());  // before e is moved from
  return SpdMatrix(std::move(m), std::move(e));
}

SpdMatrix spd_sqrt(const SpdMatrix& m) {
  const auto& e = m.eigen();
  return SpdMatrix::from_spectrum(e.values.cwiseSqrt(), e.vectors);
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& m) {
  const auto& e = m.eigen();
  // Reverse so the spectrum stays ascending.
  Vector v = e.values.cwiseSqrt().cwiseInverse().reverse();
  Matrix q = e.vectors.rowwise().reverse();
  return SpdMatrix::from_spectrum(v, q);
}

SpdMatrix spd_inverse(const SpdMatrix& m) {
  const auto& e = m.eigen();
  Vector v = e.values.cwiseInverse().reverse();
  Matrix q = e.vectors.rowwise().reverse();
  return SpdMatrix::from_spectrum(v, q);
}

double log_det(const SpdMatrix& m) { return m.eigen().values.array().log().sum(); }

SymMatrix sym_exp(const SymMatrix& m) {
  return spectral_map(sym_eigen(m), [](double x) { return std::exp(x); });
}

SymMatrix spd_log(const SpdMatrix& m) {
  return spectral_map(m.eigen(), [](double x) { return std::log(x); });
}

SymMatrix psd_sqrt(const SymMatrix& m) {
  return spectral_map(sym_eigen(m), [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

}  // namespace silver
