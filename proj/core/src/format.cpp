#include "silver/format.hpp"

#include <charconv>
#include <cmath>

namespace silver {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += "; ";
    s += format_double(v(i));
  }
  return s + ")";
}

std::string format_matrix(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += " | ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ' ';
      s += format_double(m(i, j));
    }
  }
  return s;
}

}  // namespace silver
