#pragma once

// Numerical certificates for the inequalities behind the silver-step
// analysis: interpolation (Q) certificates, generalized convexity,
// co-coercivity, the descent lemma, the lambda-coefficient recursion, the
// trajectory inequalities, the Bures-Wasserstein curvature table and the
// Gaussian entropy curves.
//
// Every gap is signed: >= 0 means the inequality holds.

#include "silver/linalg.hpp"
#include "silver/manifolds.hpp"
#include "silver/objectives.hpp"
#include "silver/optimizer.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace silver {

struct CertificateReport {
  std::string name;
  std::uint64_t samples = 0;
  double worst_gap = 0.0;
  double tolerance = 1e-8;
  bool pass = true;
  /// Failure here is expected on objectives outside the theory's hypotheses.
  bool informative = false;
  std::string witness;
};

/// Accumulates a worst gap and its witness.
class GapTracker {
 public:
  GapTracker(std::string name, double tolerance, bool informative = false);
  /// Records one sample; `witness` is only rendered when the gap is a new worst.
  template <class W>
  void add(double gap, W&& witness) {
    ++samples_;
    if (std::isnan(gap) || samples_ == 1 || gap < worst_) {
      worst_ = gap;
      witness_ = witness();
    }
  }
  void add_count(std::uint64_t n) { samples_ += n; }
  CertificateReport report() const;

 private:
  std::string name_;
  double tolerance_;
  bool informative_;
  std::uint64_t samples_ = 0;
  double worst_ = 0.0;
  std::string witness_;
};

/// `name, samples, worst_gap, tolerance, pass` then an indented witness block.
void write_report(std::ostream& os, const CertificateReport& r);
std::string serialize_reports(const std::vector<CertificateReport>& reports);

/// Iterate data for certificate sums: point, value and Riemannian gradient.
struct IterateSample {
  Point x;
  double value;
  Tangent grad;
};

IterateSample sample_at(const Objective& f, const Point& x);
/// A stationary reference: gradient hard-set to zero.
IterateSample stationary_sample(const Point& x, double value);

/// Q_ij = 2L(f_i - f_j) - 2L<g_j, log_{x_j} x_i> - |Gamma_{i->j} g_i - g_j|^2,
/// expanded so that zero gradients need no log or transport.
double q_value(const Manifold& m, const IterateSample& i, const IterateSample& j, double L);
double q_value(const Objective& f, const Point& xi, const Point& xj, double L);

/// f(y) - f(x) - <Gamma_x^z grad f(x), log_z y - log_z x>_z.
double gen_convexity_gap(const Objective& f, const Point& x, const Point& y, const Point& z);
/// <Gamma_y^x g_y - g_x, log_x y> - (1/L) |Gamma_y^x g_y - g_x|^2.
double cocoercivity_gap(const Objective& f, const Point& x, const Point& y, double L);
/// f(x) + <g_x, log_x y> + (L/2) d^2(x, y) - f(y).
double descent_gap(const Objective& f, const Point& x, const Point& y, double L);
/// |log_x z|^2 + |log_x y|^2 - 2 <log_x y, log_x z> - |log_y z|^2.
double triangle_comparison_gap(const Manifold& m, const Point& x, const Point& y, const Point& z);

/// Coefficients lambda_ij over indices {0, ..., n, *}, n = 2^k - 1. The star
/// index is stored last.
class LambdaMatrix {
 public:
  explicit LambdaMatrix(int level);

  int level() const noexcept { return level_; }
  std::uint64_t n() const noexcept { return n_; }
  Eigen::Index star() const noexcept { return static_cast<Eigen::Index>(n_ + 1); }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(n_ + 2); }
  double& operator()(Eigen::Index i, Eigen::Index j) { return m_(i, j); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  double min_entry() const { return m_.minCoeff(); }

 private:
  int level_;
  std::uint64_t n_;
  Matrix m_;
};

inline constexpr int kMaxLambdaLevel = 12;

/// Level-k coefficients built from the 3x3 base case by block doubling.
/// Throws InvalidArgument unless 1 <= k <= 12.
LambdaMatrix lambda_recursion(int k);

/// Trajectory quantities for the level-k inequalities, evaluated at unit
/// smoothness: pass an objective already divided by L and the trajectory of
/// silver steps eta_i (unscaled) on it.
struct Lemma51Sides {
  double lhs;  // A_n
  double rhs;  // |log_{x_n} x_* + (2 r_k)^{-1} g_n|^2 - d^2(x_0, x_*)
};

Lemma51Sides lemma51_sides(const Trajectory& traj, const Objective& unit_f, int k, const Point& x_star);

/// [r_k^{-1}(f_* - f_n) - A_n] - sum lambda_ij Q_ij with g_* = 0 and f_* = f(x_star).
double lemma52_gap(const Trajectory& traj, const Objective& unit_f, int k, const LambdaMatrix& lambda,
                   const Point& x_star);

/// Sectional curvature planes of Bures-Wasserstein space at N(0, diag(lambda)).
enum class CurvaturePlane { e_plus_f, e_f_shared, e_f_same, f_f, other };

/// Closed-form curvature; indices are 0-based.
///   e_plus_f  (e_+, f_ij), requires i < j and (i = 0 or j = d-1)
///   e_f_shared (e_ik, f_ij), requires i, j, k distinct
///   e_f_same  (e_ij, f_ij), requires i != j
///   f_f       (f_ij, f_ik), requires i, j, k distinct
///   other     0
/// Throws InvalidArgument on nonpositive eigenvalues or bad indices.
double bw_sectional_curvature(const Vector& lambdas, CurvaturePlane plane, int i = 0, int j = 1, int k = 2);

struct CurvatureEntry {
  CurvaturePlane plane;
  int i, j, k;  // k unused (-1) for two-index planes
  double value;
};

/// Every nonzero curvature for the spectrum (empty for d = 1).
std::vector<CurvatureEntry> curvature_table(const Vector& lambdas);
std::string curvature_label(const CurvatureEntry& e);

enum class EntropyGeometry { bures_wasserstein, affine_invariant };

struct EntropyCurveResult {
  /// Smallest second difference on the grid.
  double min_second_difference = 0.0;
  /// Largest |second difference| (used for the affine-invariant check).
  double max_abs_second_difference = 0.0;
  /// Largest |finite difference - analytic second derivative| (BW only).
  double max_analytic_error = 0.0;
};

/// H(M(t)) = -1/2 log det M(t) sampled at `grid` + 1 equally spaced points
/// of [0, 1]; second differences use the grid spacing. The analytic
/// comparison uses a centred stencil of width 1e-4 at each interior node,
/// so it stays accurate on coarse grids. BW curve: A_t = (1 - t) I + t C with C = T_{N->M1} T_{M0->N},
/// M(t) = A_t M0 A_t^T, analytic H'' = tr((A_t^{-1} (C - I))^2). AI curve:
/// N^{1/2} exp((1-t) log(N^{-1/2} M0 N^{-1/2}) + t log(N^{-1/2} M1 N^{-1/2})) N^{1/2}.
/// Throws DegenerateMatrix if A_t becomes singular inside the interval.
EntropyCurveResult entropy_curve(const SpdMatrix& m0, const SpdMatrix& m1, const SpdMatrix& n,
                                 EntropyGeometry geometry, int grid = 200);

/// Checks one triple: BW second differences >= -tol and analytic match, or
/// AI |second differences| <= tol.
CertificateReport entropy_curve_check(const SpdMatrix& m0, const SpdMatrix& m1, const SpdMatrix& n,
                                      EntropyGeometry geometry, int grid = 200);

struct SuiteOptions {
  /// Restrict the geometry suite to one manifold.
  std::optional<ManifoldKind> manifold;
  /// Objective for convexity / lemma suites: "bw_quadratic" (default),
  /// "rayleigh" or "euclidean_quadratic".
  std::string objective;
  /// Tangent sampling scale.
  double scale = 1.0;
};

/// Suite names: schedule, lambda, geometry, convexity, lemma51, lemma52,
/// curvature, entropy, all. Throws InvalidArgument on unknown names.
std::vector<CertificateReport> run_suite(const std::vector<std::string>& names, std::uint64_t seed,
                                         std::uint64_t samples, const SuiteOptions& options = {});

const std::vector<std::string>& suite_names();

}  // namespace silver
