#pragma once

// Locale-independent, round-trippable number formatting for reports and CSV.

#include "silver/linalg.hpp"

#include <string>

namespace silver {

/// Shortest representation that parses back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double v);
/// "(a; b; c)"
std::string format_vector(const Vector& v);
/// Rows separated by " | ".
std::string format_matrix(const Matrix& m);

}  // namespace silver
