#include <doctest.h>

#include <random>

#include "conncoef/conncore.hpp"
#include "conncoef/ellipsoidal.hpp"
#include "conncoef/spheroidal.hpp"

using namespace conncoef;
namespace ell = conncoef::ellipsoidal;
namespace sph = conncoef::spheroidal;

namespace {

TwoPointSystem<Complex> reference_system(ell::SystemEntries* out = nullptr) {
  const ell::Problem p{4.0, 1.6, 1, 0, 1};
  const auto e = ell::entries(3.2, -5.0, p);
  if (out) *out = e;
  return ell::build_system(e, 1.6);
}

Matrix2c diag(Complex a, Complex b) {
  Matrix2c m;
  m << a, 0.0, 0.0, b;
  return m;
}

}  // namespace

TEST_CASE("weight vector pairs to one with b1 and zero with p") {
  std::mt19937 rng(20240601);
  std::normal_distribution<double> nd;
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector2c b1(Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng)));
    const Vector2c p(Complex(nd(rng), nd(rng)), Complex(nd(rng), nd(rng)));
    const auto w = try_weight_vector<Complex>(b1, p);
    if (!w) continue;
    ++checked;
    CHECK(std::abs(bilinear(b1, *w) - 1.0) < 1e-10);
    CHECK(std::abs(bilinear(p, *w)) < 1e-10 * p.norm() * w->norm());
  }
  CHECK(checked > 990);
}

TEST_CASE("weight vector rejects parallel vectors") {
  const Vector2c b1(1.0, 2.0);
  CHECK_THROWS_AS(weight_vector<Complex>(b1, Complex(3.0) * b1), DegenerateFrame);
  CHECK_FALSE(try_weight_vector<Complex>(b1, Vector2c(2.0, 4.0)).has_value());
}

TEST_CASE("frame construction validates its assumptions") {
  const Vector2c e1(1.0, 0.0), e2(0.0, 1.0);
  CHECK_THROWS_AS(SpectralFrame<Complex>::make(0.0, e1, 0.5, e1, 0.5, e2), FrameMismatch);
  CHECK_THROWS_AS(SpectralFrame<Complex>::make(0.0, e1, 1.0, e1, -0.5, e2), FrameMismatch);
  CHECK_THROWS_AS(SpectralFrame<Complex>::make(0.0, Vector2c::Zero(), 0.0, e1, 0.5, e2), FrameMismatch);
  CHECK_THROWS_AS(SpectralFrame<Complex>::make(0.0, e1, 0.0, e1, 0.5, Complex(2.0) * e1), FrameMismatch);
  const auto f = SpectralFrame<Complex>::make(0.0, e1, 0.0, e1, 0.5, e2);
  CHECK(f.delta == Complex(0.5));

  // Eigenvectors that do not belong to (A, B).
  const auto sys = TwoPointSystem<Complex>::rational(diag(0.0, 2.0), diag(0.0, 0.5), {});
  CHECK_NOTHROW(f.check_against(sys));
  const auto wrong = SpectralFrame<Complex>::make(0.0, e2, 0.0, e1, 0.5, e2);
  CHECK_THROWS_AS(wrong.check_against(sys), FrameMismatch);
}

TEST_CASE("rational tail poles must leave the unit disk") {
  RationalTail<Complex> tail;
  tail.poles.push_back({Complex(0.5), Matrix2c::Identity()});
  CHECK_THROWS_AS(TwoPointSystem<Complex>::rational(diag(0, 1), diag(0, 1), tail), InvalidSystem);
  tail.poles[0].pole = Complex(0.0, 1.0);
  CHECK_THROWS_AS(TwoPointSystem<Complex>::rational(diag(0, 1), diag(0, 1), tail), InvalidSystem);
  tail.poles[0].pole = Complex(1.5);
  CHECK_NOTHROW(TwoPointSystem<Complex>::rational(diag(0, 1), diag(0, 1), tail));
}

TEST_CASE("rational coefficients match the geometric expansion") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  const double c = 1.6;
  Matrix2c r, s;
  r << -0.5, e.r12, 0.0, 0.0;
  s << 0.0, 0.0, 1.0, 0.0;
  for (Index k = 0; k < 6; ++k) {
    Matrix2c expect = -r / std::pow(c, k + 1.0);
    if (k == 0) expect -= s / c;
    CHECK((sys.g_at_zero(k) - expect).norm() < 1e-14 * (1.0 + expect.norm()));
    // G = R/(z - c) - S/c = -R/((c - 1) + (1 - z)) - S/c
    Matrix2c at_one = -r * std::pow(-1.0, double(k)) / std::pow(c - 1.0, k + 1.0);
    if (k == 0) at_one -= s / c;
    CHECK((sys.g_at_one(k) - at_one).norm() < 1e-13 * (1.0 + at_one.norm()));
  }
}

TEST_CASE("rational and generic drivers agree") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  const auto frame = ell::spectral_frame(1, 0, e);
  const auto a = FrobeniusSeries<Complex>::coefficients(build_shifted(sys, frame), frame.a0, 300);
  const auto b =
      FrobeniusSeries<Complex>::coefficients(build_shifted(sys.as_generic(), frame), frame.a0, 300);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK((a[k] - b[k]).norm() <= 1e-11 * (1.0 + a[k].norm()));
  }
  ThetaOptions<Complex> o;
  o.n = 3;
  const auto ta = theta_iterate(sys, frame, o);
  const auto tb = theta_iterate(sys.as_generic(), frame, o);
  CHECK(ta.k_final == tb.k_final);
  CHECK(std::abs(ta.theta - tb.theta) < 1e-12);
}

TEST_CASE("explicit spheroidal recurrence equals the generic one") {
  for (double mu : {0.0, 1.0, 2.5}) {
    const sph::Problem p{mu, 4.0};
    const Complex t = 1.5;
    const auto sys = sph::build_system(t, p);
    const auto frame = sph::spectral_frame(t, p);
    const auto generic = FrobeniusSeries<Complex>::coefficients(build_shifted(sys, frame), frame.a0, 200);
    sph::ExplicitSeries ex(t, p);
    for (std::size_t k = 1; k < generic.size(); ++k) {
      const auto& d = ex.step();
      CHECK((d - generic[k]).norm() <= 1e-12 * (1.0 + d.norm()));
    }
    const auto tilde = FrobeniusSeries<Complex>::coefficients(mirrored_shifted(sys, frame), frame.b2, 6);
    const auto companion = sph::tilde_recurrence(t, p, 6);
    for (std::size_t k = 0; k < tilde.size(); ++k) {
      CHECK((tilde[k] - companion[k]).norm() <= 1e-12 * (1.0 + tilde[k].norm()));
    }
  }
}

TEST_CASE("mu = 0 mirror identity is exact") {
  const sph::Problem p{0.0, 4.0};
  for (double t : {-3.0, 0.5, 1.5, 17.25}) {
    const auto companion = sph::tilde_recurrence(t, p, 40);
    const auto prefix = sph::tilde_prefix(t, p, 40);
    sph::ExplicitSeries ex(t, p);
    Matrix2c k;
    k << -1.0, 0.0, 0.0, 1.0;
    for (std::size_t i = 0; i < companion.size(); ++i) {
      const Vector2c kd = k * (i == 0 ? ex.d() : ex.step());
      CHECK(kd == companion[i]);
      CHECK(prefix[i] == companion[i]);
    }
  }
}

TEST_CASE("d_k is the running sum of u_k") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  const auto frame = ell::spectral_frame(1, 0, e);
  FrobeniusSeries<Complex> s(build_shifted(sys, frame), frame.a0);
  Vector2c sum = s.state().u;
  for (int k = 1; k <= 500; ++k) {
    s.step();
    sum += s.state().u;
    CHECK((sum - s.state().d).norm() <= 1e-12 * (1.0 + sum.norm()));
  }
  // The value form of one step agrees with the in-place form.
  const auto shifted = build_shifted(sys, frame);
  auto st = start_series(shifted, frame.a0);
  for (int k = 0; k < 10; ++k) st = frobenius_step(st, shifted);
  const auto direct = FrobeniusSeries<Complex>::coefficients(shifted, frame.a0, 10);
  CHECK((st.d - direct.back()).norm() < 1e-14 * direct.back().norm());
}

TEST_CASE("holomorphic series solves the shifted system") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  const auto frame = ell::spectral_frame(1, 0, e);
  const auto shifted = build_shifted(sys, frame);
  const auto d = FrobeniusSeries<Complex>::coefficients(shifted, frame.a0, 400);
  // eta = sum z^k d_k
  for (double z : {0.1, 0.3, 0.5}) {
    Vector2c eta = Vector2c::Zero(), deta = Vector2c::Zero();
    double pw = 1.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      eta += pw * d[k];
      if (k + 1 < d.size()) deta += double(k + 1) * pw * d[k + 1];
      pw *= z;
    }
    const auto& tail = sys.tail();
    Matrix2c g = tail.constant;
    for (const auto& pole : tail.poles) g += pole.residue / (Complex(z) - pole.pole);
    const Vector2c rhs = (shifted.a0 / z + shifted.a1 / (z - 1.0) + g) * eta;
    CHECK((deta - rhs).norm() <= 1e-10 * (deta.norm() + rhs.norm()));
  }
}

TEST_CASE("singular Frobenius step is reported") {
  // A0 - k I singular at k = 3.
  const auto sys = TwoPointSystem<Complex>::rational(diag(0.0, 3.0), diag(0.0, 0.5), {});
  const auto frame =
      SpectralFrame<Complex>::make(0.0, Vector2c(1.0, 0.0), 0.0, Vector2c(1.0, 0.0), 0.5, Vector2c(0.0, 1.0));
  FrobeniusSeries<Complex> s(build_shifted(sys, frame), frame.a0);
  s.step();
  s.step();
  try {
    s.step();
    FAIL("expected SingularStep");
  } catch (const SingularStep& e) {
    CHECK(e.step() == 3);
  }
}

TEST_CASE("p vector domain and prefix length") {
  const std::vector<Vector2c> prefix(4, Vector2c(1.0, 1.0));
  const std::span<const Vector2c> sp(prefix);
  CHECK_THROWS_AS(p_vector<Complex>(Vector2c(1, 0), sp, Complex(0.5), 2, 3), std::invalid_argument);
  CHECK_NOTHROW(p_vector<Complex>(Vector2c(1, 0), sp, Complex(0.5), 3, 3));
  CHECK_THROWS_AS(p_vector<Complex>(Vector2c(1, 0), sp, Complex(0.5), 10, 5), std::invalid_argument);
  // n = 0 gives b2.
  CHECK(p_vector<Complex>(Vector2c(1, 2), sp, Complex(0.5), 5, 0) == Vector2c(1, 2));
  // One factor: delta / (delta - k).
  const Vector2c p1 = p_vector<Complex>(Vector2c(0, 0), sp, Complex(0.5), 4, 1);
  CHECK(std::abs(p1(0) - 0.5 / (0.5 - 4.0)) < 1e-15);
}

TEST_CASE("iteration cap yields k_max status") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  ThetaOptions<Complex> o;
  o.n = 0;
  o.k_max = 500;
  const auto r = theta_iterate(sys, ell::spectral_frame(1, 0, e), o);
  CHECK(r.status == ThetaStatus::k_max_reached);
  CHECK(r.k_final == 500);
  CHECK(std::isfinite(r.theta.real()));
}

TEST_CASE("observer sees every accepted step") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  ThetaOptions<Complex> o;
  o.n = 5;
  Index count = 0, last = 4;  // first Theta_k at k > Re(delta) + n - 1 = 4.5
  o.observer = [&](const ThetaStep<Complex>& s) {
    ++count;
    CHECK(s.k == last + 1);
    last = s.k;
    CHECK(std::abs(bilinear(s.p, s.weight)) < 1e-10 * s.p.norm() * s.weight.norm());
  };
  const auto r = theta_iterate(sys, ell::spectral_frame(1, 0, e), o);
  CHECK(r.status == ThetaStatus::converged);
  CHECK(last == r.k_final);
  CHECK(count == r.k_final - 4);
}

TEST_CASE("error bound is safety times estimate") {
  ell::SystemEntries e;
  const auto sys = reference_system(&e);
  ThetaOptions<Complex> o;
  o.n = 4;
  const auto r = theta_iterate(sys, ell::spectral_frame(1, 0, e), o);
  CHECK(r.error_bound == doctest::Approx(2.0 * r.estimate));
  CHECK(r.estimate <= o.tol);
  CHECK(r.n == 4);
}
