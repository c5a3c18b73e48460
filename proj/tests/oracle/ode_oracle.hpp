#pragma once

// Reference connection coefficients by direct numerical integration.
//
// Independent of the library: Frobenius series for y itself (not eta) at 0 and
// at 1, continued to z = 1/2 by an adaptive Runge-Kutta-Fehlberg 7(8)
// integrator, then Theta from the Wronskian
//   det(y0, y2) = Theta det(y1, y2) = Theta det(b1, b2) z^trA (1-z)^trB exp(int_1^z trG).

#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

namespace oracle {

using Mat = Eigen::Matrix2d;
using Vec = Eigen::Vector2d;

struct System {
  Mat a, b;
  std::function<Mat(double)> g;          // G(z)
  std::function<Mat(int)> g_taylor0;     // coefficients of G(z) in z^j
  std::function<Mat(int)> g_taylor1;     // coefficients of -G(1 - w) in w^j
  std::function<double(double)> abel;    // exp(int_1^z tr G)
  double alpha0;
  Vec a0;
  double beta2;
  Vec b1, b2;
};

// y(x) = x^alpha sum y_k x^k for y' = (P/x + Q/(x-1) + H(x)) y.
inline Vec frobenius(const Mat& p, const Mat& q, const std::function<Mat(int)>& h, double alpha,
                     const Vec& start, double x) {
  std::vector<Vec> y{start};
  Vec partial = start;  // y_0 + ... + y_{k-1}
  Vec sum = start;
  double power = 1.0;
  int quiet = 0;
  for (int k = 1; k < 4000 && quiet < 4; ++k) {
    Vec rhs = -q * partial;
    for (int j = 0; j < k; ++j) rhs += h(k - 1 - j) * y[static_cast<std::size_t>(j)];
    const Mat lhs = (alpha + k) * Mat::Identity() - p;
    const Vec yk = lhs.fullPivLu().solve(rhs);
    y.push_back(yk);
    partial += yk;
    power *= x;
    const Vec term = power * yk;
    sum += term;
    quiet = term.norm() <= 1e-18 * sum.norm() ? quiet + 1 : 0;
  }
  return std::pow(x, alpha) * sum;
}

inline double det(const Vec& x, const Vec& y) { return x(0) * y(1) - x(1) * y(0); }

inline double theta(const System& s, double z_left = 0.25, double z_right = 0.75,
                    double z_mid = 0.5) {
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  auto rhs = [&s](const State& y, State& dy, double z) {
    const Mat m = s.a / z + s.b / (z - 1.0) + s.g(z);
    dy[0] = m(0, 0) * y[0] + m(0, 1) * y[1];
    dy[1] = m(1, 0) * y[0] + m(1, 1) * y[1];
  };
  auto carry = [&](Vec v, double from, double to) {
    State y{v(0), v(1)};
    auto stepper = ode::make_controlled(1e-15, 1e-15, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_adaptive(stepper, rhs, y, from, to, (to - from) / 200.0);
    return Vec(y[0], y[1]);
  };
  const Vec y0 = carry(frobenius(s.a, s.b, s.g_taylor0, s.alpha0, s.a0, z_left), z_left, z_mid);
  // Y(w) = y(1 - w) solves Y' = (B/w + A/(w-1) - G(1-w)) Y.
  const Vec y2 =
      carry(frobenius(s.b, s.a, s.g_taylor1, s.beta2, s.b2, 1.0 - z_right), z_right, z_mid);
  const double wronsk = std::pow(z_mid, s.a.trace()) * std::pow(1.0 - z_mid, s.b.trace()) *
                        s.abel(z_mid);
  return det(y0, y2) / (det(s.b1, s.b2) * wronsk);
}

// Ellipsoidal system with entries (a12, b12, r12), pole c, exponent flags.
inline System ellipsoidal(double a12, double b12, double r12, double c, int rho, int sigma) {
  System s;
  s.a << -0.5, a12, 0.0, 0.0;
  s.b << -0.5, b12, 0.0, 0.0;
  Mat r, sm;
  r << -0.5, r12, 0.0, 0.0;
  sm << 0.0, 0.0, 1.0, 0.0;
  s.g = [r, sm, c](double z) -> Mat { return r / (z - c) - sm / c; };
  s.g_taylor0 = [r, sm, c](int j) -> Mat {
    Mat m = -r / std::pow(c, j + 1);
    if (j == 0) m -= sm / c;
    return m;
  };
  s.g_taylor1 = [r, sm, c](int j) -> Mat {
    Mat m = r * (j % 2 == 0 ? 1.0 : -1.0) / std::pow(c - 1.0, j + 1);
    if (j == 0) m += sm / c;
    return m;
  };
  s.abel = [c](double z) { return std::pow((c - z) / (c - 1.0), -0.5); };
  // Theta depends on the scaling of a0 and b1; these are the conventional ones.
  s.alpha0 = -rho / 2.0;
  s.a0 = rho == 0 ? Vec(2.0 * a12, 1.0) : Vec(0.5, 0.0);
  const Vec null_b(2.0 * b12, 1.0), sing_b(0.5, 0.0);
  s.beta2 = -sigma / 2.0;
  s.b1 = sigma == 0 ? sing_b : null_b;
  s.b2 = sigma == 0 ? null_b : sing_b;
  return s;
}

inline System spheroidal(double t, double mu, double gamma2) {
  System s;
  s.a << -mu / 2.0 - 1.0, -t, 0.0, mu / 2.0;
  s.b << -mu / 2.0 - 1.0, t, 0.0, mu / 2.0;
  Mat g0;
  g0 << 0.0, -4.0 * gamma2, 1.0, 0.0;
  s.g = [g0](double) { return g0; };
  s.g_taylor0 = [g0](int j) -> Mat { return j == 0 ? g0 : Mat::Zero(); };
  s.g_taylor1 = [g0](int j) -> Mat { return j == 0 ? Mat(-g0) : Mat::Zero(); };
  s.abel = [](double) { return 1.0; };
  s.alpha0 = mu / 2.0;
  s.a0 = Vec(-t / (mu + 1.0), 1.0);
  s.beta2 = mu / 2.0;
  s.b2 = Vec(t / (mu + 1.0), 1.0);
  s.b1 = Vec(1.0, 0.0);
  return s;
}

}  // namespace oracle
