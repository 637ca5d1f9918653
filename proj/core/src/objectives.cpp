#include "silver/objectives.hpp"

#include "silver/error.hpp"
#include "silver/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace silver {

namespace {

// Stream ids keep generators independent when they share a seed.
constexpr std::uint64_t kSigmaBasisStream = 11;
constexpr std::uint64_t kMStarStream = 12;
constexpr std::uint64_t kRayleighStream = 13;
constexpr std::uint64_t kDataStream = 21;
constexpr std::uint64_t kTeacherStream = 22;
constexpr std::uint64_t kParticleStream = 23;

void require_dim(const Point& x, Eigen::Index d, const char* who) {
  if (x.dim() != d) {
    std::ostringstream os;
    os << who << ": point has dimension " << x.dim() << ", objective expects " << d;
    throw ContractViolation(os.str());
  }
}

double relu(double z) { return z > 0.0 ? z : 0.0; }

}  // namespace

Tangent Objective::grad(const Point& x) const {
  return manifold().riemannian_grad(x, ambient_grad(x));
}

double Objective::dist_sq_to_reference(const Point& x) const {
  const auto ref = reference();
  if (!ref || !ref->point)
    throw ContractViolation(name() + ": no reference minimizer to measure distance to");
  const double d = manifold().dist(x, *ref->point);
  return d * d;
}

AmbientGradient PotentialFunctional::ambient_grad(const Point& x) const {
  // Riemannian matrix part is 2 * grad_Sigma = E hess V.
  return {expected_grad(x.mean(), x.cov()), 0.5 * expected_hessian(x.mean(), x.cov()).matrix()};
}

QuadraticPotentialBW::QuadraticPotentialBW(Vector m_star, SpdMatrix sigma_star)
    : m_star_(std::move(m_star)),
      sigma_star_(std::move(sigma_star)),
      precision_(spd_inverse(sigma_star_)),
      L_(1.0 / sigma_star_.min_eigenvalue()),
      alpha_(1.0 / sigma_star_.max_eigenvalue()) {
  if (m_star_.size() != sigma_star_.dim())
    throw ContractViolation("QuadraticPotentialBW: m_star and sigma_star sizes differ");
}

double QuadraticPotentialBW::value(const Point& x) const {
  require_dim(x, m_star_.size(), "QuadraticPotentialBW");
  const Vector dm = x.mean() - m_star_;
  const Matrix& p = precision_.matrix();
  return 0.5 * dm.dot(p * dm) + 0.5 * p.cwiseProduct(x.cov().matrix()).sum();
}

Vector QuadraticPotentialBW::expected_grad(const Vector& mean, const SymMatrix&) const {
  return precision_.matrix() * (mean - m_star_);
}

SymMatrix QuadraticPotentialBW::expected_hessian(const Vector&, const SymMatrix&) const {
  return precision_.sym();
}

std::optional<ReferenceOptimum> QuadraticPotentialBW::reference() const {
  return ReferenceOptimum{0.0, std::nullopt};
}

double QuadraticPotentialBW::dist_sq_to_reference(const Point& x) const {
  require_dim(x, m_star_.size(), "QuadraticPotentialBW");
  return (x.mean() - m_star_).squaredNorm() + x.cov().trace();
}

Point QuadraticPotentialBW::surrogate_optimum(double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("surrogate_optimum: eps must be positive");
  return Point::gaussian(m_star_, SymMatrix::identity(m_star_.size()) * eps);
}

RayleighSphere::RayleighSphere(SymMatrix h) : h_(std::move(h)) {
  if (h_.dim() < 2) throw InvalidArgument("RayleighSphere: dimension must be at least 2");
  const auto e = sym_eigen(h_);
  lambda_min_ = e.values(0);
  lambda_max_ = e.values(e.values.size() - 1);
  top_ = e.vectors.col(e.vectors.cols() - 1);
  L_ = lambda_max_ - lambda_min_;
}

double RayleighSphere::value(const Point& x) const {
  require_dim(x, h_.dim(), "RayleighSphere");
  return -0.5 * x.coords().dot(h_.matrix() * x.coords());
}

AmbientGradient RayleighSphere::ambient_grad(const Point& x) const {
  require_dim(x, h_.dim(), "RayleighSphere");
  return {-(h_.matrix() * x.coords()), Matrix()};
}

std::optional<ReferenceOptimum> RayleighSphere::reference() const {
  return ReferenceOptimum{-0.5 * lambda_max_, Point::sphere(top_)};
}

double RayleighSphere::dist_sq_to_reference(const Point& x) const {
  require_dim(x, h_.dim(), "RayleighSphere");
  const Sphere& s = unit_sphere();
  const double a = s.dist(x, Point::sphere(top_));
  const double b = s.dist(x, Point::sphere(-top_));
  const double m = std::min(a, b);
  return m * m;
}

double GaussianEntropy::value(const Point& x) const { return -0.5 * log_det(x.spd_cov()); }

AmbientGradient GaussianEntropy::ambient_grad(const Point& x) const {
  const SpdMatrix inv = spd_inverse(x.spd_cov());
  return {Vector::Zero(x.dim()), -0.5 * inv.matrix()};
}

EuclideanQuadratic::EuclideanQuadratic(SpdMatrix a, Vector center)
    : a_(std::move(a)), center_(std::move(center)), L_(a_.max_eigenvalue()), alpha_(a_.min_eigenvalue()) {
  if (center_.size() != a_.dim()) throw ContractViolation("EuclideanQuadratic: size mismatch");
}

double EuclideanQuadratic::value(const Point& x) const {
  require_dim(x, center_.size(), "EuclideanQuadratic");
  const Vector r = x.coords() - center_;
  return 0.5 * r.dot(a_.matrix() * r);
}

AmbientGradient EuclideanQuadratic::ambient_grad(const Point& x) const {
  require_dim(x, center_.size(), "EuclideanQuadratic");
  return {a_.matrix() * (x.coords() - center_), Matrix()};
}

std::optional<ReferenceOptimum> EuclideanQuadratic::reference() const {
  return ReferenceOptimum{0.0, Point::euclidean(center_)};
}

ScaledObjective::ScaledObjective(ObjectivePtr base, double scale) : base_(std::move(base)), scale_(scale) {
  if (!base_) throw ContractViolation("ScaledObjective: null base");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("ScaledObjective: scale must be positive");
}

AmbientGradient ScaledObjective::ambient_grad(const Point& x) const {
  AmbientGradient g = base_->ambient_grad(x);
  g.vec *= scale_;
  g.mat *= scale_;
  return g;
}

std::optional<ReferenceOptimum> ScaledObjective::reference() const {
  auto r = base_->reference();
  if (r) r->value *= scale_;
  return r;
}

MeanFieldNet::MeanFieldNet(std::size_t width, Dataset train, double declared_L)
    : width_(width), train_(std::move(train)), L_(declared_L) {
  if (width_ == 0) throw InvalidArgument("MeanFieldNet: width must be positive");
  if (train_.inputs.size() == 0 || train_.inputs.size() != train_.targets.size())
    throw InvalidArgument("MeanFieldNet: dataset must be non-empty with matching targets");
  if (!(L_ > 0.0)) throw InvalidArgument("MeanFieldNet: declared smoothness must be positive");
}

double MeanFieldNet::predict(const Vector& params, double input) const {
  double s = 0.0;
  for (std::size_t i = 0; i < width_; ++i) {
    const auto k = static_cast<Eigen::Index>(3 * i);
    s += params(k) * relu(params(k + 1) * input + params(k + 2));
  }
  return s / static_cast<double>(width_);
}

double MeanFieldNet::mse(const Vector& params, const Dataset& data) const {
  if (params.size() != static_cast<Eigen::Index>(3 * width_))
    throw ContractViolation("MeanFieldNet: parameter vector must have 3 * width entries");
  double s = 0.0;
  for (Eigen::Index n = 0; n < data.inputs.size(); ++n) {
    const double r = predict(params, data.inputs(n)) - data.targets(n);
    s += r * r;
  }
  return s / static_cast<double>(data.inputs.size());
}

AmbientGradient MeanFieldNet::ambient_grad(const Point& x) const {
  const Vector& p = x.coords();
  if (p.size() != static_cast<Eigen::Index>(3 * width_))
    throw ContractViolation("MeanFieldNet: parameter vector must have 3 * width entries");
  const auto samples = train_.inputs.size();
  const double m = static_cast<double>(width_);
  Vector g = Vector::Zero(p.size());
  for (Eigen::Index n = 0; n < samples; ++n) {
    const double u = train_.inputs(n);
    const double c = 2.0 * (predict(p, u) - train_.targets(n)) / (static_cast<double>(samples) * m);
    for (std::size_t i = 0; i < width_; ++i) {
      const auto k = static_cast<Eigen::Index>(3 * i);
      const double z = p(k + 1) * u + p(k + 2);
      if (z <= 0.0) continue;
      g(k) += c * z;
      g(k + 1) += c * p(k) * u;
      g(k + 2) += c * p(k);
    }
  }
  return {std::move(g), Matrix()};
}

std::optional<ReferenceOptimum> MeanFieldNet::reference() const {
  return ReferenceOptimum{0.0, std::nullopt};
}

Vector log_spaced(double lo, double hi, Eigen::Index n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("log_spaced: endpoints must be positive");
  if (n < 1) throw InvalidArgument("log_spaced: need at least one point");
  Vector v(n);
  if (n == 1) {
    v(0) = lo;
    return v;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  v(0) = lo;
  v(n - 1) = hi;
  return v;
}

SpdMatrix make_sigma_star(Eigen::Index d, double L, double alpha, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("make_sigma_star: dimension must be positive");
  if (!(alpha > 0.0) || !(alpha <= L)) throw InvalidArgument("make_sigma_star: need 0 < alpha <= L");
  Vector values = log_spaced(1.0 / L, 1.0 / alpha, d);
  CounterRng rng(seed, kSigmaBasisStream);
  return SpdMatrix::from_spectrum(values, haar_orthogonal(rng, d));
}

SymMatrix make_rayleigh_h(Eigen::Index d, RayleighKind kind, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("make_rayleigh_h: dimension must be at least 2");
  CounterRng rng(seed, kRayleighStream);
  if (kind == RayleighKind::wigner) {
    const Matrix a = normal_matrix(rng, d, d, 1.0 / std::sqrt(static_cast<double>(d)));
    return SymMatrix(0.5 * (a + a.transpose()));
  }
  const Eigen::Index neg = d / 2;
  const Eigen::Index pos = d - neg;
  const double top = static_cast<double>(d);
  Vector values(d);
  // Ascending: -d .. -1, then 1 .. d.
  const Vector n = log_spaced(1.0, top, neg);
  for (Eigen::Index i = 0; i < neg; ++i) values(i) = -n(neg - 1 - i);
  if (neg == 1) values(0) = -top;
  Vector p = log_spaced(1.0, top, pos);
  if (pos == 1) p(0) = top;
  values.tail(pos) = p;
  const Matrix q = haar_orthogonal(rng, d);
  return SymMatrix(q * values.asDiagonal() * q.transpose());
}

Vector make_m_star(Eigen::Index d, std::uint64_t seed) {
  CounterRng rng(seed, kMStarStream);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.uniform();
  return v;
}

MeanFieldProblem make_meanfield_problem(MeanFieldTarget target, std::size_t samples,
                                        double train_fraction, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("make_meanfield_problem: need at least two samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("make_meanfield_problem: train fraction must lie in (0, 1)");
  CounterRng rng(seed, kDataStream);
  std::vector<double> xs(samples);
  for (auto& x : xs) x = rng.uniform(-1.0, 1.0);
  // Fisher-Yates with the same stream.
  for (std::size_t i = samples - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
    std::swap(xs[i], xs[j]);
  }

  constexpr std::size_t kTeacherWidth = 30;
  Vector teacher;
  if (target == MeanFieldTarget::teacher) {
    CounterRng trng(seed, kTeacherStream);
    teacher = normal_vector(trng, 3 * kTeacherWidth);
  }
  auto label = [&](double x) {
    if (target == MeanFieldTarget::sin) return std::sin(2.0 * std::numbers::pi * x);
    double s = 0.0;
    for (std::size_t i = 0; i < kTeacherWidth; ++i) {
      const auto k = static_cast<Eigen::Index>(3 * i);
      s += teacher(k) * relu(teacher(k + 1) * x + teacher(k + 2));
    }
    return s / static_cast<double>(kTeacherWidth);
  };

  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(samples)));
  n_train = std::clamp<std::size_t>(n_train, 1, samples - 1);
  MeanFieldProblem out;
  auto fill = [&](Dataset& ds, std::size_t begin, std::size_t end) {
    const auto n = static_cast<Eigen::Index>(end - begin);
    ds.inputs.resize(n);
    ds.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      ds.inputs(i) = xs[begin + static_cast<std::size_t>(i)];
      ds.targets(i) = label(ds.inputs(i));
    }
  };
  fill(out.train, 0, n_train);
  fill(out.test, n_train, samples);
  return out;
}

Vector make_meanfield_init(std::size_t width, std::uint64_t seed) {
  CounterRng rng(seed, kParticleStream);
  return normal_vector(rng, static_cast<Eigen::Index>(3 * width));
}

}  // namespace silver
