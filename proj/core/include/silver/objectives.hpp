#pragma once

// Objective functions with Riemannian gradients, declared smoothness /
// strong-convexity constants, and reference optima; plus the seeded problem
// generators used by the experiments.

#include "silver/linalg.hpp"
#include "silver/manifolds.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>

namespace silver {

/// Optimal value, and the minimizer when it is a point of the manifold.
struct ReferenceOptimum {
  double value = 0.0;
  std::optional<Point> point;
};

class Objective {
 public:
  virtual ~Objective() = default;

  virtual ManifoldKind manifold_kind() const noexcept = 0;
  const Manifold& manifold() const { return manifold_for(manifold_kind()); }

  virtual double value(const Point& x) const = 0;
  virtual AmbientGradient ambient_grad(const Point& x) const = 0;
  /// Riemannian gradient; tangent at x.
  virtual Tangent grad(const Point& x) const;

  virtual double smoothness() const noexcept = 0;
  /// 0 when merely convex (or not convex at all).
  virtual double strong_convexity() const noexcept { return 0.0; }
  virtual std::optional<ReferenceOptimum> reference() const { return std::nullopt; }
  /// Squared distance from x to the reference minimizer. The default uses
  /// manifold().dist; throws ContractViolation without a reference point.
  virtual double dist_sq_to_reference(const Point& x) const;
  virtual std::string name() const = 0;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// mu -> E_{X ~ mu} V(X) over Gaussians. Subclasses provide the Gaussian
/// expectations of V, grad V and hess V; the Riemannian gradient is
/// (E grad V, E hess V).
class PotentialFunctional : public Objective {
 public:
  ManifoldKind manifold_kind() const noexcept override { return ManifoldKind::bures_wasserstein; }
  AmbientGradient ambient_grad(const Point& x) const override;

  virtual Vector expected_grad(const Vector& mean, const SymMatrix& cov) const = 0;
  virtual SymMatrix expected_hessian(const Vector& mean, const SymMatrix& cov) const = 0;
};

/// V(x) = 1/2 (x - m*)^T Sigma*^{-1} (x - m*). L = 1/lambda_min(Sigma*),
/// alpha = 1/lambda_max(Sigma*). The infimum 0 is approached at the degenerate
/// Gaussian (m*, 0), so dist_sq_to_reference is |m - m*|^2 + tr Sigma.
class QuadraticPotentialBW final : public PotentialFunctional {
 public:
  QuadraticPotentialBW(Vector m_star, SpdMatrix sigma_star);

  double value(const Point& x) const override;
  Vector expected_grad(const Vector& mean, const SymMatrix& cov) const override;
  SymMatrix expected_hessian(const Vector& mean, const SymMatrix& cov) const override;
  double smoothness() const noexcept override { return L_; }
  double strong_convexity() const noexcept override { return alpha_; }
  std::optional<ReferenceOptimum> reference() const override;
  double dist_sq_to_reference(const Point& x) const override;
  std::string name() const override { return "bw_quadratic_potential"; }

  const Vector& m_star() const noexcept { return m_star_; }
  const SpdMatrix& sigma_star() const noexcept { return sigma_star_; }
  const SpdMatrix& precision() const noexcept { return precision_; }
  /// (m*, eps I), an SPD stand-in for the degenerate minimizer.
  Point surrogate_optimum(double eps) const;

 private:
  Vector m_star_;
  SpdMatrix sigma_star_;
  SpdMatrix precision_;
  double L_;
  double alpha_;
};

/// f(x) = -1/2 x^T H x on the unit sphere; L = lambda_max - lambda_min.
class RayleighSphere final : public Objective {
 public:
  explicit RayleighSphere(SymMatrix h);

  ManifoldKind manifold_kind() const noexcept override { return ManifoldKind::sphere; }
  double value(const Point& x) const override;
  AmbientGradient ambient_grad(const Point& x) const override;
  double smoothness() const noexcept override { return L_; }
  /// -1/2 lambda_max at the top eigenvector.
  std::optional<ReferenceOptimum> reference() const override;
  /// Squared angle to the nearer of +-(top eigenvector).
  double dist_sq_to_reference(const Point& x) const override;
  std::string name() const override { return "rayleigh_sphere"; }

  const SymMatrix& h() const noexcept { return h_; }
  double lambda_max() const noexcept { return lambda_max_; }
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  SymMatrix h_;
  Vector top_;
  double lambda_max_;
  double lambda_min_;
  double L_;
};

/// H(Sigma) = -1/2 log det Sigma on Bures-Wasserstein space (mean ignored).
/// Not globally smooth: smoothness() is +infinity.
class GaussianEntropy final : public Objective {
 public:
  ManifoldKind manifold_kind() const noexcept override { return ManifoldKind::bures_wasserstein; }
  double value(const Point& x) const override;
  AmbientGradient ambient_grad(const Point& x) const override;
  double smoothness() const noexcept override { return std::numeric_limits<double>::infinity(); }
  std::string name() const override { return "gaussian_entropy"; }
};

/// f(x) = 1/2 (x - c)^T A (x - c) on R^d with A SPD.
class EuclideanQuadratic final : public Objective {
 public:
  EuclideanQuadratic(SpdMatrix a, Vector center);

  ManifoldKind manifold_kind() const noexcept override { return ManifoldKind::euclidean; }
  double value(const Point& x) const override;
  AmbientGradient ambient_grad(const Point& x) const override;
  double smoothness() const noexcept override { return L_; }
  double strong_convexity() const noexcept override { return alpha_; }
  std::optional<ReferenceOptimum> reference() const override;
  std::string name() const override { return "euclidean_quadratic"; }

  const SpdMatrix& a() const noexcept { return a_; }
  const Vector& center() const noexcept { return center_; }

 private:
  SpdMatrix a_;
  Vector center_;
  double L_;
  double alpha_;
};

/// s * f. Constants and the reference value scale with s; the minimizer does not.
class ScaledObjective final : public Objective {
 public:
  ScaledObjective(ObjectivePtr base, double scale);

  ManifoldKind manifold_kind() const noexcept override { return base_->manifold_kind(); }
  double value(const Point& x) const override { return scale_ * base_->value(x); }
  AmbientGradient ambient_grad(const Point& x) const override;
  Tangent grad(const Point& x) const override { return base_->grad(x) * scale_; }
  double smoothness() const noexcept override { return scale_ * base_->smoothness(); }
  double strong_convexity() const noexcept override { return scale_ * base_->strong_convexity(); }
  std::optional<ReferenceOptimum> reference() const override;
  double dist_sq_to_reference(const Point& x) const override { return base_->dist_sq_to_reference(x); }
  std::string name() const override { return base_->name() + "_scaled"; }

 private:
  ObjectivePtr base_;
  double scale_;
};

/// Univariate regression data.
struct Dataset {
  Vector inputs;
  Vector targets;
};

/// Two-layer ReLU network in the mean-field scaling,
///   f(x) = (1/m) sum_i a_i relu(w_i x + b_i),
/// trained by mean squared error. Parameters are a Euclidean point of
/// dimension 3m laid out per particle as (a_i, w_i, b_i). The gradient is the
/// plain Euclidean gradient of the MSE; relu'(0) is taken as 0.
class MeanFieldNet final : public Objective {
 public:
  MeanFieldNet(std::size_t width, Dataset train, double declared_L);

  ManifoldKind manifold_kind() const noexcept override { return ManifoldKind::euclidean; }
  double value(const Point& x) const override { return mse(x.coords(), train_); }
  AmbientGradient ambient_grad(const Point& x) const override;
  double smoothness() const noexcept override { return L_; }
  /// Infimum 0 (not attained in general).
  std::optional<ReferenceOptimum> reference() const override;
  std::string name() const override { return "meanfield_net"; }

  std::size_t width() const noexcept { return width_; }
  const Dataset& train() const noexcept { return train_; }
  double predict(const Vector& params, double input) const;
  double mse(const Vector& params, const Dataset& data) const;

 private:
  std::size_t width_;
  Dataset train_;
  double L_;
};

// Generators. All are deterministic functions of their seed.

/// Eigenvalues log-spaced on [1/L, 1/alpha] (endpoints exact) in a Haar basis.
SpdMatrix make_sigma_star(Eigen::Index d, double L, double alpha, std::uint64_t seed);

enum class RayleighKind { wigner, spread };

/// wigner: (A + A^T)/2 with A_ij ~ N(0, 1/d).
/// spread: Haar conjugation of floor(d/2) eigenvalues log-spaced on [-d, -1]
/// and the remaining ones log-spaced on [1, d].
SymMatrix make_rayleigh_h(Eigen::Index d, RayleighKind kind, std::uint64_t seed);

/// Uniform on [0, 1]^d.
Vector make_m_star(Eigen::Index d, std::uint64_t seed);

/// n points log-spaced from lo to hi (both > 0), endpoints exact.
Vector log_spaced(double lo, double hi, Eigen::Index n);

enum class MeanFieldTarget { sin, teacher };

struct MeanFieldProblem {
  Dataset train;
  Dataset test;
};

/// N inputs uniform on [-1, 1], split train/test by train_fraction after a
/// seeded shuffle. Teacher targets come from a width-30 network with N(0, 1)
/// particles.
MeanFieldProblem make_meanfield_problem(MeanFieldTarget target, std::size_t samples,
                                        double train_fraction, std::uint64_t seed);

/// Particles drawn i.i.d. N(0, 1), 3 * width coordinates.
Vector make_meanfield_init(std::size_t width, std::uint64_t seed);

}  // namespace silver
