#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace conncoef {

using Index = std::ptrdiff_t;
using Complex = std::complex<double>;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Vector2c = Vector2<Complex>;
using Matrix2c = Matrix2<Complex>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

// Unconjugated pairing x^T y.
template <typename Derived1, typename Derived2>
auto bilinear(const Eigen::MatrixBase<Derived1>& x, const Eigen::MatrixBase<Derived2>& y) {
  return x(0) * y(0) + x(1) * y(1);
}

// det(x, y) of the matrix with columns x, y; equals bilinear(J*y, x).
template <typename Derived1, typename Derived2>
auto det2(const Eigen::MatrixBase<Derived1>& x, const Eigen::MatrixBase<Derived2>& y) {
  return x(0) * y(1) - x(1) * y(0);
}

// J = [[0, 1], [-1, 0]] applied to v.
template <typename Derived>
auto apply_j(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  return Vector2<Scalar>(v(1), -v(0));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index i = 0; i < m.size(); ++i) {
    const auto& x = m.derived().coeff(i);
    if (!std::isfinite(std::real(x)) || !std::isfinite(std::imag(x))) return false;
  }
  return true;
}

}  // namespace conncoef
