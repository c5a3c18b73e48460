#include <cmath>

#include "conncoef/ellipsoidal.hpp"
#include "conncoef/errors.hpp"

namespace conncoef::ellipsoidal {

namespace {

struct HeunEntries {
  Complex a12, b12, r12;
};

HeunEntries heun_entries(const HeunParameters& p) {
  const Complex c = p.c;
  if (c == Complex(0.0) || c == Complex(1.0)) throw InvalidSystem("Heun system requires c != 0, 1");
  return {p.lambda, c * (p.lambda + p.mu + p.gamma) / (1.0 - c),
          (p.lambda + c * p.mu + c * c * p.gamma) / (c - 1.0)};
}

void check_exponent(Complex nu, const char* name) {
  if (nu == Complex(1.0) || !(nu.real() > 0.0)) {
    throw InvalidExponent(std::string(name) + " must satisfy nu != 1 and Re(nu) > 0");
  }
}

}  // namespace

TwoPointSystem<Complex> build_heun_system(const HeunParameters& p) {
  const HeunEntries e = heun_entries(p);
  Matrix2c a, b, r, k;
  a << p.nu0 - 1.0, e.a12, 0.0, 0.0;
  b << p.nu1 - 1.0, e.b12, 0.0, 0.0;
  r << p.nu2 - 1.0, e.r12, 0.0, 0.0;
  k << p.kappa * p.c, 0.0, 1.0, 0.0;
  RationalTail<Complex> tail;
  tail.poles.push_back({p.c, r});
  tail.constant = -k / p.c;
  return TwoPointSystem<Complex>::rational(a, b, std::move(tail));
}

SpectralFrame<Complex> heun_frame(const HeunParameters& p, bool at_zero, bool at_one) {
  check_exponent(p.nu0, "nu0");
  check_exponent(p.nu1, "nu1");
  check_exponent(p.nu2, "nu2");
  const HeunEntries e = heun_entries(p);
  // Eigenvalue nu - 1 has eigenvector (1 - nu) e1; eigenvalue 0 has (x12 / (1 - nu), 1).
  const Vector2c null0(e.a12 / (1.0 - p.nu0), 1.0), sing0(1.0 - p.nu0, 0.0);
  const Vector2c null1(e.b12 / (1.0 - p.nu1), 1.0), sing1(1.0 - p.nu1, 0.0);
  const Complex alpha0 = at_zero ? p.nu0 - 1.0 : Complex(0.0);
  const Vector2c a0 = at_zero ? sing0 : null0;
  if (at_one) {
    return SpectralFrame<Complex>::make(alpha0, a0, 0.0, null1, p.nu1 - 1.0, sing1);
  }
  const Complex delta = 1.0 - p.nu1;
  if (!(delta.real() > -1.0)) throw InvalidExponent("nu1 gives Re(delta) <= -1");
  return SpectralFrame<Complex>::make(alpha0, a0, p.nu1 - 1.0, sing1, 0.0, null1);
}

Result heun_theta(const HeunParameters& p, bool at_zero, bool at_one, const Options& opts) {
  return theta_iterate(build_heun_system(p), heun_frame(p, at_zero, at_one), opts);
}

}  // namespace conncoef::ellipsoidal
