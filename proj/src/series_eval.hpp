#pragma once

// Power-series evaluation shared by the eigenfunction builders.

#include <cmath>
#include <vector>

namespace conncoef::detail {

// Sum of coef[k] x^k, stopped once three consecutive terms fall below
// double rounding of the running sum, so samples stay smooth under differencing.
inline double eval_series(const std::vector<double>& coef, double x) {
  double sum = 0.0, power = 1.0;
  int small = 0;
  for (double a : coef) {
    const double term = a * power;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
    power *= x;
  }
  return sum;
}

inline double eval_series_derivative(const std::vector<double>& coef, double x) {
  double sum = 0.0, power = 1.0;
  int small = 0;
  for (std::size_t k = 1; k < coef.size(); ++k) {
    const double term = static_cast<double>(k) * coef[k] * power;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      if (++small >= 3) break;
    } else {
      small = 0;
    }
    power *= x;
  }
  return sum;
}

}  // namespace conncoef::detail
