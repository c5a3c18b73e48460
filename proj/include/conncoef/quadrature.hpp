#pragma once

#include <vector>

namespace conncoef::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Same rule mapped affinely to [a, b].
Rule gauss_legendre(int n, double a, double b);

}  // namespace conncoef::quadrature
