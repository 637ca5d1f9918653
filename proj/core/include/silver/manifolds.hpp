#pragma once

// Manifold points, tangent vectors, and the three geometry backends:
// Euclidean space, the unit sphere, and Bures-Wasserstein Gaussian space.
//
// Bures-Wasserstein conventions. A point is N(m, Sigma). A tangent (a, S)
// at that point is the affine vector field u -> a + S (u - m); S is usually
// symmetric, but transported tangents are not. The metric is the L2(mu)
// pairing <a0, a1> + tr(S0^T S1 Sigma), which is tr(S0 Sigma S1) for
// symmetric parts. Covariances of points may be PSD (degenerate Gaussians
// produced by collapsing dynamics); operations that need Sigma^{+-1/2}
// require an SPD covariance and throw DegenerateMatrix otherwise.

#include "silver/linalg.hpp"

#include <cstdint>
#include <string_view>

namespace silver {

enum class ManifoldKind { euclidean, sphere, bures_wasserstein };

std::string_view to_string(ManifoldKind kind) noexcept;

class Point {
 public:
  static Point euclidean(Vector x);
  /// Normalizes `x` to unit length. Throws ContractViolation on zero input.
  static Point sphere(Vector x);
  /// Covariance must be finite, PSD and non-zero.
  static Point gaussian(Vector mean, SymMatrix cov);

  ManifoldKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return x_.size(); }
  /// Coordinates (Euclidean / sphere) or the mean (Bures-Wasserstein).
  const Vector& coords() const noexcept { return x_; }
  const Vector& mean() const noexcept { return x_; }
  const SymMatrix& cov() const noexcept { return cov_; }
  /// SPD view of the covariance; throws DegenerateMatrix below the floor.
  SpdMatrix spd_cov() const { return SpdMatrix(cov_); }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  friend class BuresWasserstein;
  Point(ManifoldKind kind, Vector x, SymMatrix cov);

  ManifoldKind kind_;
  Vector x_;
  SymMatrix cov_;
  std::uint64_t fingerprint_;
};

class Tangent {
 public:
  /// Binds a tangent to `base`. Sphere tangents must satisfy
  /// |<base, v>| <= 1e-10 (1 + |v|); BW tangents need a d x d matrix part.
  static Tangent at(const Point& base, Vector v, Matrix s = Matrix());
  static Tangent zero(const Point& base);

  ManifoldKind kind() const noexcept { return kind_; }
  const Vector& vec() const noexcept { return v_; }
  const Matrix& mat() const noexcept { return s_; }
  std::uint64_t base_fingerprint() const noexcept { return base_; }
  bool based_at(const Point& p) const noexcept { return p.fingerprint() == base_; }

  Tangent operator+(const Tangent& o) const;
  Tangent operator-(const Tangent& o) const;
  Tangent operator-() const;
  Tangent operator*(double s) const;
  friend Tangent operator*(double s, const Tangent& t) { return t * s; }

 private:
  Tangent(ManifoldKind kind, std::uint64_t base, Vector v, Matrix s);
  void require_same_base(const Tangent& o) const;

  ManifoldKind kind_;
  std::uint64_t base_;
  Vector v_;
  Matrix s_;
};

/// Euclidean gradient in the manifold's coordinate layout. For
/// Bures-Wasserstein, `vec` is grad_m F and `mat` is grad_Sigma F.
struct AmbientGradient {
  Vector vec;
  Matrix mat;
};

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const noexcept = 0;
  virtual double inner(const Point& x, const Tangent& u, const Tangent& v) const = 0;
  virtual Point exp(const Point& x, const Tangent& v) const = 0;
  virtual Tangent log(const Point& x, const Point& y) const = 0;
  /// Parallel transport of v from T_x to T_y along the connecting geodesic.
  virtual Tangent transport(const Point& x, const Point& y, const Tangent& v) const = 0;
  virtual double dist(const Point& x, const Point& y) const = 0;
  virtual Tangent riemannian_grad(const Point& x, const AmbientGradient& g) const = 0;

  double norm_sq(const Point& x, const Tangent& v) const { return inner(x, v, v); }
  double norm(const Point& x, const Tangent& v) const;

 protected:
  void require_kind(const Point& x) const;
  void require_base(const Point& x, const Tangent& v) const;
};

class EuclideanSpace final : public Manifold {
 public:
  ManifoldKind kind() const noexcept override { return ManifoldKind::euclidean; }
  double inner(const Point& x, const Tangent& u, const Tangent& v) const override;
  Point exp(const Point& x, const Tangent& v) const override;
  Tangent log(const Point& x, const Point& y) const override;
  Tangent transport(const Point& x, const Point& y, const Tangent& v) const override;
  double dist(const Point& x, const Point& y) const override;
  Tangent riemannian_grad(const Point& x, const AmbientGradient& g) const override;
};

/// Unit sphere S^{d-1} in R^d with the round metric.
class Sphere final : public Manifold {
 public:
  /// log is undefined once the angle exceeds pi - kAntipodalMargin.
  static constexpr double kAntipodalMargin = 1e-6;
  /// Below this tangent norm, sin/cos ratios switch to Taylor expansions.
  static constexpr double kSmallAngle = 1e-9;

  ManifoldKind kind() const noexcept override { return ManifoldKind::sphere; }
  double inner(const Point& x, const Tangent& u, const Tangent& v) const override;
  /// cos|v| x + sin|v| v/|v|, renormalized.
  Point exp(const Point& x, const Tangent& v) const override;
  Tangent log(const Point& x, const Point& y) const override;
  /// Rotation in span{x, log_x y}; fixes the orthogonal complement.
  Tangent transport(const Point& x, const Point& y, const Tangent& v) const override;
  double dist(const Point& x, const Point& y) const override;
  /// (I - x x^T) g.
  Tangent riemannian_grad(const Point& x, const AmbientGradient& g) const override;

  /// Projects an arbitrary ambient vector onto T_x S.
  Tangent project(const Point& x, const Vector& v) const;
};

class BuresWasserstein final : public Manifold {
 public:
  /// exp reports a collapse when the trace of the pushed-forward covariance
  /// falls to this fraction of the input trace.
  static constexpr double kCollapseRatio = 1e-12;

  ManifoldKind kind() const noexcept override { return ManifoldKind::bures_wasserstein; }
  double inner(const Point& x, const Tangent& u, const Tangent& v) const override;
  /// N(m + a, (S + I) Sigma (S + I)^T).
  Point exp(const Point& x, const Tangent& v) const override;
  /// (m1 - m0, B(Sigma0 -> Sigma1) - I).
  Tangent log(const Point& x, const Point& y) const override;
  /// (a, S) -> (a, S B(Sigma_y -> Sigma_x)), i.e. v composed with T_{y,x}.
  Tangent transport(const Point& x, const Point& y, const Tangent& v) const override;
  /// Closed-form W2 distance. Needs an SPD covariance at x only.
  double dist(const Point& x, const Point& y) const override;
  /// (grad_m, 2 grad_Sigma), matrix part symmetrized.
  Tangent riemannian_grad(const Point& x, const AmbientGradient& g) const override;
};

/// Matrix of the optimal transport map N(., sigma0) -> N(., sigma1):
/// sigma0^{-1/2} (sigma0^{1/2} sigma1 sigma0^{1/2})^{1/2} sigma0^{-1/2}.
SymMatrix ot_map_matrix(const SpdMatrix& sigma0, const SpdMatrix& sigma1);

/// Squared W2 distance between N(m0, c0) and N(m1, c1) for PSD covariances:
/// |m0 - m1|^2 + tr c0 + tr c1 - 2 tr (c0^{1/2} c1 c0^{1/2})^{1/2}.
double gaussian_w2_sq(const Vector& m0, const SymMatrix& c0, const Vector& m1, const SymMatrix& c1);

/// Shared stateless backends.
const Manifold& manifold_for(ManifoldKind kind);
const EuclideanSpace& euclidean_space();
const Sphere& unit_sphere();
const BuresWasserstein& bures_wasserstein();

}  // namespace silver
