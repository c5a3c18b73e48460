#include <doctest.h>

#include <cmath>

#include "conncoef/quadrature.hpp"

using conncoef::quadrature::gauss_legendre;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 64, 128}) {
    const auto r = gauss_legendre(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int deg = 0; deg <= 2 * n - 1 && deg <= 40; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("mapped rule") {
  const auto r = gauss_legendre(64, 0.0, M_PI / 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] > 0.0);
    CHECK(r.nodes[i] < M_PI / 2.0);
    s += r.weights[i] * std::cos(r.nodes[i]);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(gauss_legendre(0));
}
