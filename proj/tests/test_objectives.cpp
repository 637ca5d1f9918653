#include "silver/error.hpp"
#include "silver/objectives.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <memory>
#include <numbers>

using namespace silver;

namespace {

Point gaussian(const Vector& m, const Matrix& s) { return Point::gaussian(m, SymMatrix(s)); }

QuadraticPotentialBW unit_potential(Eigen::Index d) {
  return QuadraticPotentialBW(Vector::Zero(d), SpdMatrix::identity(d));
}

// d/dt f(exp_x(t v)) at t = 0 against <grad f(x), v>.
double fd_gap(const Objective& f, const Point& x, const Tangent& v, double h = 1e-6) {
  const Manifold& m = f.manifold();
  const double fd = oracle::central_diff([&](double t) { return f.value(m.exp(x, v * t)); }, h);
  const double an = m.inner(x, f.grad(x), v);
  return std::abs(fd - an) / (1.0 + std::abs(an));
}

}  // namespace

TEST_CASE("potential_value examples") {
  for (int d = 1; d <= 5; ++d)
    CHECK(unit_potential(d).value(gaussian(Vector::Zero(d), Matrix::Identity(d, d))) ==
          doctest::Approx(0.5 * d));
  CHECK(unit_potential(2).value(gaussian(Vector::Unit(2, 0), Matrix::Identity(2, 2))) == doctest::Approx(1.5));

  oracle::Gen g(31);
  const Matrix sigma_star = g.spd(3);
  const Vector m_star = g.normal_vec(3);
  const QuadraticPotentialBW f(m_star, SpdMatrix(sigma_star));
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const double v = f.value(gaussian(m_star, eps * Matrix::Identity(3, 3)));
    CHECK(v == doctest::Approx(0.5 * eps * sigma_star.inverse().trace()).epsilon(1e-10));
  }
  CHECK(f.reference()->value == 0.0);
}

TEST_CASE("potential value against the Gaussian expectation formula") {
  oracle::Gen g(32);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s_star = g.spd(4), sigma = g.spd(4);
    const Vector m_star = g.normal_vec(4), m = g.normal_vec(4);
    const Matrix p = s_star.inverse();
    const double expect = 0.5 * ((m - m_star).dot(p * (m - m_star)) + (p * sigma).trace());
    const QuadraticPotentialBW f(m_star, SpdMatrix(s_star));
    CHECK(f.value(gaussian(m, sigma)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("potential_grad examples") {
  oracle::Gen g(33);
  const Vector m_star = g.normal_vec(3);
  const QuadraticPotentialBW f(m_star, SpdMatrix(g.spd(3)));
  CHECK(f.grad(gaussian(m_star, g.spd(3))).vec().norm() == 0.0);

  const auto& bw = bures_wasserstein();
  const QuadraticPotentialBW u = unit_potential(3);
  const Point x0 = gaussian(Vector::Zero(3), Matrix::Identity(3, 3));
  const Point half = bw.exp(x0, u.grad(x0) * -0.5);
  CHECK(rel_diff(half.cov().matrix(), 0.25 * Matrix::Identity(3, 3)) < 1e-15);
  CHECK_THROWS_AS(bw.exp(x0, u.grad(x0) * -1.0), DegenerateCovariance);
}

TEST_CASE("rayleigh examples") {
  const RayleighSphere f(SymMatrix::diagonal(Vector{{2.0, 1.0}}));
  CHECK(f.value(Point::sphere(Vector::Unit(2, 0))) == doctest::Approx(-1.0));
  CHECK(f.reference()->value == doctest::Approx(-1.0));
  const Point mid = Point::sphere(Vector{{1.0, 1.0}});
  CHECK(f.value(mid) == doctest::Approx(-0.75));
  const Vector g = f.grad(mid).vec();
  const double c = oracle::frozen(-(2.0 - 1.5) / std::sqrt(2.0), -0.35355339059327373);
  CHECK(g(0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(g(1) == doctest::Approx(-c).epsilon(1e-14));
  CHECK(f.grad(Point::sphere(Vector::Unit(2, 1))).vec().norm() == 0.0);
  CHECK(f.smoothness() == doctest::Approx(1.0));
}

TEST_CASE("rayleigh optimum and tangency") {
  oracle::Gen g(34);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix h = g.sym(6);
    const RayleighSphere f{SymMatrix(h)};
    const oracle::Eig e = oracle::jacobi(h);
    CHECK(f.reference()->value == doctest::Approx(-0.5 * e.values(5)).epsilon(1e-12));
    const Point top = Point::sphere(e.vectors.col(5));
    CHECK(f.value(top) == doctest::Approx(-0.5 * e.values(5)).epsilon(1e-12));
    CHECK(f.grad(top).vec().norm() < 1e-10);
    const Point x = Point::sphere(g.unit(6));
    CHECK(std::abs(x.coords().dot(f.grad(x).vec())) < 1e-12);
    CHECK(f.smoothness() == doctest::Approx(e.values(5) - e.values(0)).epsilon(1e-12));
  }
}

TEST_CASE("entropy examples") {
  const GaussianEntropy h;
  CHECK(h.value(gaussian(Vector::Zero(3), Matrix::Identity(3, 3))) == 0.0);
  const double e = std::numbers::e;
  CHECK(h.value(gaussian(Vector::Zero(2), e * Matrix::Identity(2, 2))) == doctest::Approx(-1.0));
}

TEST_CASE("finite-difference consistency of every objective's gradient") {
  oracle::Gen g(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = g.integer(1, 5);
    const Point x = gaussian(g.normal_vec(d), g.spd(d));
    const Tangent v = Tangent::at(x, g.normal_vec(d), g.sym(d, 0.3));
    const QuadraticPotentialBW f(g.normal_vec(d), SpdMatrix(g.spd(d)));
    CHECK(fd_gap(f, x, v) < 1e-5);
    CHECK(fd_gap(GaussianEntropy(), x, v) < 1e-5);

    const Point s = Point::sphere(g.unit(d + 1));
    const RayleighSphere r{SymMatrix(g.sym(d + 1))};
    CHECK(fd_gap(r, s, Tangent::at(s, g.sphere_tangent(s.coords()))) < 1e-5);

    const Point p = Point::euclidean(g.normal_vec(d));
    const EuclideanQuadratic q(SpdMatrix(g.spd(d)), g.normal_vec(d));
    CHECK(fd_gap(q, p, Tangent::at(p, g.normal_vec(d))) < 1e-5);
  }
}

TEST_CASE("meanfield examples") {
  Dataset data{Vector{{-0.5, 0.2, 0.9}}, Vector{{1.0, -2.0, 0.5}}};
  const MeanFieldNet net(2, data, 100.0);
  // Dead network: all output weights zero.
  Vector dead(6);
  dead << 0.0, 1.0, 0.1, 0.0, -0.7, 0.3;
  CHECK(net.value(Point::euclidean(dead)) == doctest::Approx((1.0 + 4.0 + 0.25) / 3.0));
  const Vector gd = net.grad(Point::euclidean(dead)).vec();
  for (int i : {1, 2, 4, 5}) CHECK(gd(i) == 0.0);

  // One particle, one sample, exact fit: a relu(w x + b) = y.
  const MeanFieldNet one(1, Dataset{Vector{{0.5}}, Vector{{2.0}}}, 1.0);
  const Vector exact{{4.0, 1.0, 0.0}};
  CHECK(one.value(Point::euclidean(exact)) == 0.0);
  CHECK(one.grad(Point::euclidean(exact)).vec().norm() == 0.0);
  CHECK(one.predict(exact, 0.5) == 2.0);
}

TEST_CASE("meanfield gradient matches finite differences away from kinks") {
  MeanFieldProblem p = make_meanfield_problem(MeanFieldTarget::sin, 40, 0.7, 3);
  const Dataset train = p.train;
  const MeanFieldNet net(8, std::move(p.train), 100.0);
  oracle::Gen g(36);
  int checked = 0;
  while (checked < 10) {
    const Vector theta = g.normal_vec(24);
    bool near_kink = false;
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index s = 0; s < train.inputs.size(); ++s)
        if (std::abs(theta(3 * i + 1) * train.inputs(s) + theta(3 * i + 2)) < 1e-4) near_kink = true;
    if (near_kink) continue;
    const Point x = Point::euclidean(theta);
    CHECK(fd_gap(net, x, Tangent::at(x, g.normal_vec(24)), 1e-7) < 1e-5);
    ++checked;
  }
}

TEST_CASE("make_sigma_star examples") {
  CHECK(make_sigma_star(1, 4.0, 0.5, 7).matrix()(0, 0) == doctest::Approx(0.25));
  const SpdMatrix s = make_sigma_star(2, 1.0, 0.01, 7);
  CHECK(s.min_eigenvalue() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s.max_eigenvalue() == doctest::Approx(100.0).epsilon(1e-13));
  for (double kappa : {10.0, 1e3, 1e7}) {
    const SpdMatrix m = make_sigma_star(10, 1.0, 1.0 / kappa, 3);
    const oracle::Eig e = oracle::jacobi(m.matrix());
    CHECK(e.values(9) / e.values(0) == doctest::Approx(kappa).epsilon(1e-9));
  }
}

TEST_CASE("make_rayleigh_h examples") {
  const SymMatrix s = make_rayleigh_h(4, RayleighKind::spread, 5);
  const oracle::Eig e = oracle::jacobi(s.matrix());
  const Vector expect{{-4.0, -1.0, 1.0, 4.0}};
  CHECK((e.values - expect).cwiseAbs().maxCoeff() < 1e-12);

  const SymMatrix w = make_rayleigh_h(6, RayleighKind::wigner, 5);
  CHECK(w.matrix() == w.matrix().transpose());
  CHECK(make_rayleigh_h(6, RayleighKind::wigner, 5).matrix() == w.matrix());
  CHECK(make_rayleigh_h(6, RayleighKind::wigner, 6).matrix() != w.matrix());
}

TEST_CASE("generators are deterministic") {
  CHECK(make_m_star(5, 1) == make_m_star(5, 1));
  CHECK(make_m_star(5, 1) != make_m_star(5, 2));
  CHECK(make_m_star(5, 1).minCoeff() >= 0.0);
  CHECK(make_m_star(5, 1).maxCoeff() < 1.0);
  CHECK(make_meanfield_init(10, 4) == make_meanfield_init(10, 4));
  const auto a = make_meanfield_problem(MeanFieldTarget::teacher, 50, 0.7, 9);
  const auto b = make_meanfield_problem(MeanFieldTarget::teacher, 50, 0.7, 9);
  CHECK(a.train.inputs == b.train.inputs);
  CHECK(a.test.targets == b.test.targets);
  CHECK(a.train.inputs.size() == 35);
  CHECK(a.test.inputs.size() == 15);
  const Vector l = log_spaced(1.0, 100.0, 3);
  CHECK(l(0) == 1.0);
  CHECK(l(1) == doctest::Approx(10.0));
  CHECK(l(2) == 100.0);
}

TEST_CASE("ScaledObjective scales values, gradients and constants") {
  auto base = std::make_shared<QuadraticPotentialBW>(Vector::Zero(2), make_sigma_star(2, 4.0, 1.0, 1));
  const ScaledObjective s(base, 0.25);
  const Point x = gaussian(Vector::Ones(2), Matrix::Identity(2, 2));
  CHECK(s.value(x) == doctest::Approx(0.25 * base->value(x)));
  CHECK(s.smoothness() == doctest::Approx(1.0));
  CHECK(s.strong_convexity() == doctest::Approx(0.25));
  CHECK(rel_diff(s.grad(x).mat(), 0.25 * base->grad(x).mat()) < 1e-15);
  CHECK(s.dist_sq_to_reference(x) == base->dist_sq_to_reference(x));
}

TEST_CASE("extended distance to the degenerate optimum") {
  oracle::Gen g(37);
  const Vector m_star = g.normal_vec(3);
  const QuadraticPotentialBW f(m_star, SpdMatrix(g.spd(3)));
  const Matrix sigma = g.spd(3);
  const Vector m = g.normal_vec(3);
  CHECK(f.dist_sq_to_reference(gaussian(m, sigma)) ==
        doctest::Approx((m - m_star).squaredNorm() + sigma.trace()).epsilon(1e-14));
}
