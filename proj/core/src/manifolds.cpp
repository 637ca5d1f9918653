#include "silver/manifolds.hpp"

#include "silver/error.hpp"
#include "silver/rng.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

namespace silver {

namespace {

// Word-wise mix; byte-wise hashing showed up in BW step profiles.
std::uint64_t mix_words(std::uint64_t h, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t w;
    std::memcpy(&w, data + i, sizeof w);
    h = splitmix64_mix(h ^ w);
  }
  return h;
}

std::uint64_t fingerprint_of(ManifoldKind kind, const Vector& x, const Matrix& cov) {
  std::uint64_t h = splitmix64_mix(0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(kind));
  h = splitmix64_mix(h ^ static_cast<std::uint64_t>(x.size()));
  h = mix_words(h, x.data(), static_cast<std::size_t>(x.size()));
  return mix_words(h, cov.data(), static_cast<std::size_t>(cov.size()));
}

std::string dims(Eigen::Index a, Eigen::Index b) {
  std::ostringstream os;
  os << a << " vs " << b;
  return os.str();
}

// Square root of c0^{1/2} c1 c0^{1/2} for PSD inputs, plus the c0 root.
struct CrossRoot {
  SymMatrix c0_half;
  SymMatrix cross_half;
};

CrossRoot cross_root(const SymMatrix& c0, const SymMatrix& c1) {
  SymMatrix h = psd_sqrt(c0);
  SymMatrix mid(h.matrix() * c1.matrix() * h.matrix());
  return {std::move(h), psd_sqrt(mid)};
}

// OT matrix from an SPD source to a PSD target.
Matrix ot_matrix(const SpdMatrix& s0, const SymMatrix& s1) {
  const SpdMatrix h = spd_sqrt(s0);
  const SpdMatrix hi = spd_inv_sqrt(s0);
  const SymMatrix mid(h.matrix() * s1.matrix() * h.matrix());
  const SymMatrix root = psd_sqrt(mid);
  return SymMatrix(hi.matrix() * root.matrix() * hi.matrix()).matrix();
}

}  // namespace

std::string_view to_string(ManifoldKind kind) noexcept {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::bures_wasserstein: return "bures_wasserstein";
  }
  return "unknown";
}

Point::Point(ManifoldKind kind, Vector x, SymMatrix cov)
    : kind_(kind), x_(std::move(x)), cov_(std::move(cov)),
      fingerprint_(fingerprint_of(kind_, x_, cov_.matrix())) {}

Point Point::euclidean(Vector x) {
  if (!x.allFinite()) throw ContractViolation("Point::euclidean: non-finite coordinate");
  return Point(ManifoldKind::euclidean, std::move(x), SymMatrix());
}

Point Point::sphere(Vector x) {
  if (!x.allFinite()) throw ContractViolation("Point::sphere: non-finite coordinate");
  const double n = x.norm();
  if (!(n > 0.0)) throw ContractViolation("Point::sphere: zero vector has no direction");
  x /= n;
  return Point(ManifoldKind::sphere, std::move(x), SymMatrix());
}

Point Point::gaussian(Vector mean, SymMatrix cov) {
  if (!mean.allFinite()) throw ContractViolation("Point::gaussian: non-finite mean");
  if (cov.dim() != mean.size())
    throw ContractViolation("Point::gaussian: covariance/mean size mismatch " +
                            dims(cov.dim(), mean.size()));
  const Vector e = sym_eigenvalues(cov);
  const double top = e(e.size() - 1);
  if (!(top > 0.0)) throw DegenerateMatrix("Point::gaussian: covariance is zero", e(0));
  if (e(0) < -1e-10 * top) {
    std::ostringstream os;
    os << "Point::gaussian: covariance is not PSD (smallest eigenvalue " << e(0) << ")";
    throw DegenerateMatrix(os.str(), e(0));
  }
  return Point(ManifoldKind::bures_wasserstein, std::move(mean), std::move(cov));
}

Tangent::Tangent(ManifoldKind kind, std::uint64_t base, Vector v, Matrix s)
    : kind_(kind), base_(base), v_(std::move(v)), s_(std::move(s)) {}

Tangent Tangent::at(const Point& base, Vector v, Matrix s) {
  if (v.size() != base.dim())
    throw ContractViolation("Tangent::at: vector size mismatch " + dims(v.size(), base.dim()));
  if (!v.allFinite()) throw ContractViolation("Tangent::at: non-finite vector part");
  switch (base.kind()) {
    case ManifoldKind::euclidean:
      s = Matrix();
      break;
    case ManifoldKind::sphere: {
      const double radial = base.coords().dot(v);
      if (std::abs(radial) > 1e-10 * (1.0 + v.norm())) {
        std::ostringstream os;
        os << "Tangent::at: sphere vector not tangent, <x, v> = " << radial;
        throw ContractViolation(os.str());
      }
      s = Matrix();
      break;
    }
    case ManifoldKind::bures_wasserstein:
      if (s.size() == 0) s = Matrix::Zero(base.dim(), base.dim());
      if (s.rows() != base.dim() || s.cols() != base.dim())
        throw ContractViolation("Tangent::at: matrix part must be d x d");
      if (!s.allFinite()) throw ContractViolation("Tangent::at: non-finite matrix part");
      break;
  }
  return Tangent(base.kind(), base.fingerprint(), std::move(v), std::move(s));
}

Tangent Tangent::zero(const Point& base) {
  return at(base, Vector::Zero(base.dim()));
}

void Tangent::require_same_base(const Tangent& o) const {
  if (o.base_ != base_ || o.kind_ != kind_)
    throw ContractViolation("Tangent: operands live in different tangent spaces");
}

Tangent Tangent::operator+(const Tangent& o) const {
  require_same_base(o);
  return Tangent(kind_, base_, v_ + o.v_, s_ + o.s_);
}

Tangent Tangent::operator-(const Tangent& o) const {
  require_same_base(o);
  return Tangent(kind_, base_, v_ - o.v_, s_ - o.s_);
}

Tangent Tangent::operator-() const { return Tangent(kind_, base_, -v_, -s_); }

Tangent Tangent::operator*(double s) const { return Tangent(kind_, base_, v_ * s, s_ * s); }

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(std::max(0.0, norm_sq(x, v)));
}

void Manifold::require_kind(const Point& x) const {
  if (x.kind() != kind())
    throw ContractViolation(std::string("point belongs to ") + std::string(to_string(x.kind())) +
                            ", expected " + std::string(to_string(kind())));
}

void Manifold::require_base(const Point& x, const Tangent& v) const {
  require_kind(x);
  if (!v.based_at(x)) throw ContractViolation("tangent vector is not based at this point");
}

// Euclidean

double EuclideanSpace::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  require_base(x, u);
  require_base(x, v);
  return u.vec().dot(v.vec());
}

Point EuclideanSpace::exp(const Point& x, const Tangent& v) const {
  require_base(x, v);
  return Point::euclidean(x.coords() + v.vec());
}

Tangent EuclideanSpace::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  return Tangent::at(x, y.coords() - x.coords());
}

Tangent EuclideanSpace::transport(const Point& x, const Point& y, const Tangent& v) const {
  require_base(x, v);
  require_kind(y);
  return Tangent::at(y, v.vec());
}

double EuclideanSpace::dist(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  return (x.coords() - y.coords()).norm();
}

Tangent EuclideanSpace::riemannian_grad(const Point& x, const AmbientGradient& g) const {
  require_kind(x);
  return Tangent::at(x, g.vec);
}

// Sphere

double Sphere::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  require_base(x, u);
  require_base(x, v);
  return u.vec().dot(v.vec());
}

Point Sphere::exp(const Point& x, const Tangent& v) const {
  require_base(x, v);
  const double t = v.vec().norm();
  Vector y;
  if (t < kSmallAngle) {
    y = (1.0 - 0.5 * t * t) * x.coords() + (1.0 - t * t / 6.0) * v.vec();
  } else {
    y = std::cos(t) * x.coords() + (std::sin(t) / t) * v.vec();
  }
  return Point::sphere(std::move(y));
}

Tangent Sphere::project(const Point& x, const Vector& v) const {
  require_kind(x);
  return Tangent::at(x, v - x.coords().dot(v) * x.coords());
}

Tangent Sphere::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  if (x.coords() == y.coords()) return Tangent::zero(x);
  const double c = x.coords().dot(y.coords());
  Vector w = y.coords() - c * x.coords();
  const double s = w.norm();
  const double theta = std::atan2(s, c);
  if (theta > std::numbers::pi - kAntipodalMargin) {
    std::ostringstream os;
    os << "Sphere::log: points are (nearly) antipodal, angle " << theta;
    throw UndefinedLog(os.str());
  }
  if (s == 0.0) return Tangent::zero(x);
  return project(x, (theta / s) * w);
}

Tangent Sphere::transport(const Point& x, const Point& y, const Tangent& v) const {
  require_base(x, v);
  const Tangent u = log(x, y);
  const double theta = u.vec().norm();
  if (theta == 0.0) return project(y, v.vec());
  const Vector e = u.vec() / theta;
  const double ve = v.vec().dot(e);
  Vector r = v.vec() + (std::cos(theta) - 1.0) * ve * e - std::sin(theta) * ve * x.coords();
  return project(y, r);
}

double Sphere::dist(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  const double c = x.coords().dot(y.coords());
  const double s = (y.coords() - c * x.coords()).norm();
  return std::atan2(s, c);
}

Tangent Sphere::riemannian_grad(const Point& x, const AmbientGradient& g) const {
  return project(x, g.vec);
}

// Bures-Wasserstein

double BuresWasserstein::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  require_base(x, u);
  require_base(x, v);
  const Matrix s1_sigma = v.mat() * x.cov().matrix();
  return u.vec().dot(v.vec()) + u.mat().cwiseProduct(s1_sigma).sum();
}

Point BuresWasserstein::exp(const Point& x, const Tangent& v) const {
  require_base(x, v);
  const Eigen::Index d = x.dim();
  const Matrix factor = v.mat() + Matrix::Identity(d, d);
  const auto factor_min = [&] {
    return sym_eigenvalues(SymMatrix(factor))(0);
  };
  const Matrix pushed = factor * x.cov().matrix() * factor.transpose();
  const Vector mean = x.mean() + v.vec();
  if (!pushed.allFinite() || !mean.allFinite())
    throw NumericalFailure("BuresWasserstein::exp: non-finite result");
  SymMatrix cov(pushed);
  // Trace stands in for the spectral scale: within a factor d of lambda_max.
  const double in_scale = x.cov().trace();
  const double out_scale = cov.trace();
  if (!(out_scale > kCollapseRatio * in_scale)) {
    std::ostringstream os;
    os << "BuresWasserstein::exp: covariance annihilated (trace " << out_scale << " from " << in_scale << ")";
    throw DegenerateCovariance(os.str(), factor_min());
  }
  // A nonnegative pivoted LDLT settles most cases; only borderline ones pay for eigenvalues.
  const Eigen::LDLT<Matrix> ldlt(cov.matrix());
  // With A = P^T L D L^T P, lambda_min >= min(D) |L|_F^2, and the first pivot
  // (largest diagonal) is at most lambda_max, so this bound implies the eigenvalue test.
  const auto psd_by_pivots = [&] {
    const Vector dv = ldlt.vectorD();
    const double lower = std::min(0.0, dv.minCoeff()) * Matrix(ldlt.matrixL()).squaredNorm();
    return dv(0) > 0.0 && lower >= -1e-10 * dv(0);
  };
  if (ldlt.info() != Eigen::Success || (!ldlt.isPositive() && !psd_by_pivots())) {
    const Vector e = sym_eigenvalues(cov);
    if (e(0) < -1e-10 * e(d - 1))
      throw DegenerateCovariance("BuresWasserstein::exp: pushed covariance is not PSD", factor_min());
  }
  return Point(ManifoldKind::bures_wasserstein, mean, std::move(cov));
}

Tangent BuresWasserstein::log(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  const SpdMatrix s0 = x.spd_cov();
  Matrix b = ot_matrix(s0, y.cov());
  b.diagonal().array() -= 1.0;
  return Tangent::at(x, y.mean() - x.mean(), std::move(b));
}

Tangent BuresWasserstein::transport(const Point& x, const Point& y, const Tangent& v) const {
  require_base(x, v);
  require_kind(y);
  const Matrix back = ot_matrix(y.spd_cov(), x.cov());
  return Tangent::at(y, v.vec(), v.mat() * back);
}

double BuresWasserstein::dist(const Point& x, const Point& y) const {
  require_kind(x);
  require_kind(y);
  return std::sqrt(gaussian_w2_sq(x.mean(), x.cov(), y.mean(), y.cov()));
}

Tangent BuresWasserstein::riemannian_grad(const Point& x, const AmbientGradient& g) const {
  require_kind(x);
  if (g.mat.rows() != x.dim() || g.mat.cols() != x.dim())
    throw ContractViolation("BuresWasserstein::riemannian_grad: matrix part must be d x d");
  return Tangent::at(x, g.vec, g.mat + g.mat.transpose());
}

SymMatrix ot_map_matrix(const SpdMatrix& sigma0, const SpdMatrix& sigma1) {
  if (sigma0.dim() != sigma1.dim())
    throw ContractViolation("ot_map_matrix: size mismatch " + dims(sigma0.dim(), sigma1.dim()));
  return SymMatrix(ot_matrix(sigma0, sigma1.sym()));
}

double gaussian_w2_sq(const Vector& m0, const SymMatrix& c0, const Vector& m1, const SymMatrix& c1) {
  if (m0.size() != m1.size() || c0.dim() != c1.dim() || c0.dim() != m0.size())
    throw ContractViolation("gaussian_w2_sq: size mismatch");
  const CrossRoot r = cross_root(c0, c1);
  const double v = (m0 - m1).squaredNorm() + c0.trace() + c1.trace() - 2.0 * r.cross_half.trace();
  return std::max(0.0, v);
}

const EuclideanSpace& euclidean_space() {
  static const EuclideanSpace m;
  return m;
}

const Sphere& unit_sphere() {
  static const Sphere m;
  return m;
}

const BuresWasserstein& bures_wasserstein() {
  static const BuresWasserstein m;
  return m;
}

const Manifold& manifold_for(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return euclidean_space();
    case ManifoldKind::sphere: return unit_sphere();
    case ManifoldKind::bures_wasserstein: return bures_wasserstein();
  }
  throw ContractViolation("manifold_for: unknown kind");
}

}  // namespace silver
