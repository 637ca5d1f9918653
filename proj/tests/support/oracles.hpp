#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical kernels: eigenvalues come from cyclic Jacobi, square
// roots from the Denman-Beavers iteration, schedules from literal
// concatenation, and randomness from std::mt19937_64.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline const double kRho = 1.0 + std::sqrt(2.0);

/// A frozen literal must agree with the oracle that produced it.
inline double frozen(double oracle_value, double literal, double tol = 1e-12) {
  CHECK(std::abs(oracle_value - literal) <= tol * (1.0 + std::abs(literal)));
  return literal;
}

// ---- randomness -----------------------------------------------------------

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Vec normal_vec(Eigen::Index n, double scale = 1.0) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * normal();
    return v;
  }
  Mat normal_mat(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * normal();
    return m;
  }
  Mat sym(Eigen::Index n, double scale = 1.0) {
    const Mat a = normal_mat(n, n, scale);
    return 0.5 * (a + a.transpose());
  }
  /// Orthogonal matrix by modified Gram-Schmidt on Gaussian columns.
  Mat orthogonal(Eigen::Index n) {
    Mat q = normal_mat(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      q.col(j) /= q.col(j).norm();
    }
    return q;
  }
  /// SPD with eigenvalues log-uniform on [lo, hi].
  Mat spd(Eigen::Index n, double lo = 0.2, double hi = 5.0) {
    const Mat q = orthogonal(n);
    Vec e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = log_uniform(lo, hi);
    const Mat m = q * e.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }
  Vec unit(Eigen::Index n) {
    const Vec v = normal_vec(n);
    return v / v.norm();
  }
  /// Tangent to the unit sphere at x.
  Vec sphere_tangent(const Vec& x, double scale = 1.0) {
    Vec v = normal_vec(x.size(), scale);
    return v - x.dot(v) * x;
  }

 private:
  std::mt19937_64 eng_;
};

// ---- linear algebra --------------------------------------------------------

struct Eig {
  Vec values;  // ascending
  Mat vectors;
};

/// Cyclic Jacobi rotations; slow and simple.
inline Eig jacobi(const Mat& input) {
  const Eigen::Index n = input.rows();
  Mat a = 0.5 * (input + input.transpose());
  Mat v = Mat::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * (1.0 + a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  Eig e{Vec(n), Mat(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    e.values(i) = a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)]);
    e.vectors.col(i) = v.col(idx[static_cast<std::size_t>(i)]);
  }
  return e;
}

/// Principal square root by the Denman-Beavers iteration.
inline Mat sqrtm(const Mat& a) {
  Mat y = a, z = Mat::Identity(a.rows(), a.cols());
  for (int it = 0; it < 100; ++it) {
    const Mat yi = y.inverse(), zi = z.inverse();
    const Mat ny = 0.5 * (y + zi), nz = 0.5 * (z + yi);
    const double change = (ny - y).norm();
    y = ny;
    z = nz;
    if (change <= 1e-15 * (1.0 + y.norm())) break;
  }
  return 0.5 * (y + y.transpose());
}

inline double log_det(const Mat& a) {
  const Vec e = jacobi(a).values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) s += std::log(e(i));
  return s;
}

/// Optimal transport matrix sigma0 -> sigma1.
inline Mat ot_map(const Mat& s0, const Mat& s1) {
  const Mat r = sqrtm(s0);
  const Mat ri = r.inverse();
  const Mat b = ri * sqrtm(r * s1 * r) * ri;
  return 0.5 * (b + b.transpose());
}

inline double w2_sq(const Vec& m0, const Mat& s0, const Vec& m1, const Mat& s1) {
  const Mat r = sqrtm(s0);
  return (m0 - m1).squaredNorm() + s0.trace() + s1.trace() - 2.0 * sqrtm(r * s1 * r).trace();
}

// ---- schedules --------------------------------------------------------------

/// eta(k+1) = [eta(k), 1 + rho^{k-1}, eta(k)], eta(1) = [sqrt 2], built literally.
inline std::vector<double> silver_concat(int k) {
  std::vector<double> s{std::sqrt(2.0)};
  for (int level = 1; level < k; ++level) {
    std::vector<double> next = s;
    next.push_back(1.0 + std::pow(kRho, level - 1));
    next.insert(next.end(), s.begin(), s.end());
    s = std::move(next);
  }
  return s;
}

inline double rate(int k) { return 1.0 / (1.0 + std::sqrt(4.0 * std::pow(kRho, 2 * k) - 3.0)); }

// ---- sphere -----------------------------------------------------------------

inline Vec sphere_exp(const Vec& x, const Vec& v) {
  const double t = v.norm();
  if (t == 0.0) return x;
  return std::cos(t) * x + std::sin(t) * v / t;
}

inline double sphere_dist(const Vec& x, const Vec& y) { return std::acos(std::clamp(x.dot(y), -1.0, 1.0)); }

// ---- calculus ---------------------------------------------------------------

/// Central difference of a scalar function of t at 0.
template <class F>
double central_diff(F&& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

}  // namespace oracle
