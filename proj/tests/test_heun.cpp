#include <doctest.h>

#include "conncoef/ellipsoidal.hpp"
#include "conncoef/errors.hpp"

using namespace conncoef;
using namespace conncoef::ellipsoidal;

TEST_CASE("Heun form with nu = 1/2 and kappa = 0 is the ellipsoidal system") {
  HeunParameters h;
  h.c = 1.6;
  h.gamma = 4.0;
  h.lambda = 3.2;
  h.mu = -5.0;
  const Problem p{4.0, 1.6, 1, 0, 1};
  const auto sys = build_heun_system(h);
  const auto ell = build_system(entries(3.2, -5.0, p), 1.6);
  CHECK((sys.a() - ell.a()).norm() < 1e-15);
  CHECK((sys.b() - ell.b()).norm() < 1e-15);
  for (Index k = 0; k < 5; ++k) CHECK((sys.g_at_zero(k) - ell.g_at_zero(k)).norm() < 1e-14);

  // rho = 1 selects z^(1/2), sigma = 0 the (z-1)^0 solution at 1.
  Options o;
  o.n = 3;
  const auto a = heun_theta(h, true, false, o);
  const auto b = theta(3.2, -5.0, p, o);
  CHECK(a.status == ThetaStatus::converged);
  // Same exponents, eigenvectors scaled differently: the ratio is fixed by the frames.
  const auto fh = heun_frame(h, true, false);
  const auto fe = spectral_frame(1, 0, entries(3.2, -5.0, p));
  const Complex scale = (fh.a0(0) / fe.a0(0)) / (fh.b1(0) / fe.b1(0));
  CHECK(std::abs(a.theta - scale * b.theta) < 1e-9);
}

TEST_CASE("Heun exponent restrictions") {
  HeunParameters h;
  h.nu0 = 1.0;
  CHECK_THROWS_AS(heun_frame(h, false, false), InvalidExponent);
  h.nu0 = -0.5;
  CHECK_THROWS_AS(heun_frame(h, false, false), InvalidExponent);
  h.nu0 = 0.5;
  h.nu1 = 2.5;
  CHECK_THROWS_AS(heun_frame(h, false, false), InvalidExponent);  // Re(delta) = -1.5
  CHECK_NOTHROW(heun_frame(h, false, true));
}

TEST_CASE("Heun with kappa converges") {
  HeunParameters h;
  h.nu0 = 0.3;
  h.nu1 = 0.7;
  h.nu2 = 0.4;
  h.kappa = 0.8;
  h.c = 2.5;
  h.gamma = 1.0;
  h.lambda = 0.4;
  h.mu = -1.0;
  for (bool z0 : {false, true}) {
    for (bool z1 : {false, true}) {
      const auto r = heun_theta(h, z0, z1);
      CHECK(r.status == ThetaStatus::converged);
      CHECK(std::isfinite(r.theta.real()));
    }
  }
}
