#pragma once

// Connection coefficient between the holomorphic Frobenius solution at z = 0
// and the Floquet solutions at z = 1 of a 2x2 system
//
//   y'(z) = (A / z + B / (z - 1) + G(z)) y(z).
//
// The header is templated on the complex scalar type; the library itself is
// instantiated with std::complex<double>.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conncoef/errors.hpp"
#include "conncoef/linalg.hpp"

namespace conncoef {

// ---------------------------------------------------------------------------
// System data
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PoleTerm {
  Scalar pole;
  Matrix2<Scalar> residue;
};

// G(z) = constant + sum_j residue_j / (z - pole_j).
template <typename Scalar>
struct RationalTail {
  std::vector<PoleTerm<Scalar>> poles;
  Matrix2<Scalar> constant = Matrix2<Scalar>::Zero();

  // Taylor coefficient G_k of G(z) = sum z^k G_k.
  Matrix2<Scalar> coefficient_at_zero(Index k) const {
    Matrix2<Scalar> g = k == 0 ? constant : Matrix2<Scalar>::Zero();
    for (const auto& p : poles) g -= p.residue / std::pow(p.pole, static_cast<double>(k + 1));
    return g;
  }

  // Coefficient of G(z) = sum (1 - z)^k G~_k.
  Matrix2<Scalar> coefficient_at_one(Index k) const {
    Matrix2<Scalar> g = k == 0 ? constant : Matrix2<Scalar>::Zero();
    for (const auto& p : poles) {
      g += p.residue / std::pow(Scalar(1) - p.pole, static_cast<double>(k + 1));
    }
    return g;
  }

  // -G(1 - z), again a rational tail: poles 1 - c_j, same residues, constant negated.
  RationalTail mirrored() const {
    RationalTail m;
    m.constant = -constant;
    m.poles.reserve(poles.size());
    for (const auto& p : poles) m.poles.push_back({Scalar(1) - p.pole, p.residue});
    return m;
  }
};

enum class Structure { generic, rational };

template <typename Scalar>
class TwoPointSystem {
 public:
  using Matrix = Matrix2<Scalar>;
  using Stream = std::function<Matrix(Index)>;

  // Arbitrary holomorphic G given through both coefficient streams.
  static TwoPointSystem generic(const Matrix& a, const Matrix& b, Stream at_zero, Stream at_one) {
    if (!at_zero || !at_one) throw InvalidSystem("generic system needs both coefficient streams");
    TwoPointSystem s(a, b);
    s.structure_ = Structure::generic;
    s.at_zero_ = std::move(at_zero);
    s.at_one_ = std::move(at_one);
    return s;
  }

  // Rational G. Every pole must lie outside the closed unit disk.
  static TwoPointSystem rational(const Matrix& a, const Matrix& b, RationalTail<Scalar> tail) {
    for (const auto& p : tail.poles) {
      if (!(std::abs(p.pole) > 1.0)) {
        throw InvalidSystem("rational tail pole inside the closed unit disk");
      }
    }
    TwoPointSystem s(a, b);
    s.structure_ = Structure::rational;
    s.tail_ = std::move(tail);
    return s;
  }

  const Matrix& a() const noexcept { return a_; }
  const Matrix& b() const noexcept { return b_; }
  Structure structure() const noexcept { return structure_; }
  const RationalTail<Scalar>& tail() const {
    if (structure_ != Structure::rational) throw std::logic_error("system has no rational tail");
    return tail_;
  }

  Matrix g_at_zero(Index k) const {
    return structure_ == Structure::rational ? tail_.coefficient_at_zero(k) : at_zero_(k);
  }
  Matrix g_at_one(Index k) const {
    return structure_ == Structure::rational ? tail_.coefficient_at_one(k) : at_one_(k);
  }

  // Same A and B, G replaced by its coefficient streams.
  TwoPointSystem as_generic() const {
    return generic(
        a_, b_, [s = *this](Index k) { return s.g_at_zero(k); },
        [s = *this](Index k) { return s.g_at_one(k); });
  }

 private:
  TwoPointSystem(const Matrix& a, const Matrix& b) : a_(a), b_(b) {
    if (!all_finite(a) || !all_finite(b)) throw InvalidSystem("non-finite system matrix");
  }

  Matrix a_, b_;
  Structure structure_ = Structure::generic;
  Stream at_zero_, at_one_;
  RationalTail<Scalar> tail_;
};

// Exponents and eigenvectors: A a0 = alpha0 a0, B b_j = beta_j b_j.
template <typename Scalar>
struct SpectralFrame {
  using Vector = Vector2<Scalar>;

  Scalar alpha0;
  Vector a0;
  Scalar beta1, beta2;
  Vector b1, b2;
  Scalar delta;

  static SpectralFrame make(Scalar alpha0, const Vector& a0, Scalar beta1, const Vector& b1,
                            Scalar beta2, const Vector& b2) {
    if (beta1 == beta2) throw FrameMismatch("beta1 == beta2");
    const Scalar delta = beta2 - beta1;
    if (!(std::real(delta) > -1.0)) throw FrameMismatch("Re(delta) <= -1");
    if (!all_finite(a0) || !all_finite(b1) || !all_finite(b2)) {
      throw FrameMismatch("non-finite frame vector");
    }
    if (a0.norm() == 0.0) throw FrameMismatch("a0 is the zero vector");
    if (!(std::abs(det2(b1, b2)) > 1e-14 * b1.norm() * b2.norm())) {
      throw FrameMismatch("b1 and b2 are linearly dependent");
    }
    return SpectralFrame{alpha0, a0, beta1, beta2, b1, b2, delta};
  }

  // Largest relative eigen-residual against (A, B).
  RealOf<Scalar> residual(const Matrix2<Scalar>& a, const Matrix2<Scalar>& b) const {
    auto rel = [](const Matrix2<Scalar>& m, Scalar ev, const Vector& v) {
      const double scale = (m.norm() + std::abs(ev)) * v.norm();
      const double r = (m * v - ev * v).norm();
      return scale > 0.0 ? r / scale : r;
    };
    return std::max({rel(a, alpha0, a0), rel(b, beta1, b1), rel(b, beta2, b2)});
  }

  void check_against(const TwoPointSystem<Scalar>& system, double tolerance = 1e-10) const {
    const double r = residual(system.a(), system.b());
    if (!(r <= tolerance)) {
      throw FrameMismatch("frame eigen-residual " + std::to_string(r) + " exceeds tolerance");
    }
  }
};

// ---------------------------------------------------------------------------
// Shifted system and Frobenius recurrence
// ---------------------------------------------------------------------------

// eta' = (A0 / z + A1 / (z - 1) + G(z)) eta, obtained from
// y = z^alpha0 (1 - z)^(beta1 + 1) eta.
template <typename Scalar>
struct ShiftedSystem {
  Matrix2<Scalar> a0;
  Matrix2<Scalar> a1;
  Structure structure = Structure::generic;
  std::function<Matrix2<Scalar>(Index)> g;  // generic structure
  RationalTail<Scalar> tail;                // rational structure

  Matrix2<Scalar> g_coefficient(Index k) const {
    return structure == Structure::rational ? tail.coefficient_at_zero(k) : g(k);
  }
};

template <typename Scalar>
ShiftedSystem<Scalar> build_shifted(const TwoPointSystem<Scalar>& system,
                                    const SpectralFrame<Scalar>& frame) {
  frame.check_against(system);
  const Matrix2<Scalar> id = Matrix2<Scalar>::Identity();
  ShiftedSystem<Scalar> s;
  s.a0 = system.a() - frame.alpha0 * id;
  s.a1 = system.b() - (frame.beta1 + Scalar(1)) * id;
  s.structure = system.structure();
  if (s.structure == Structure::rational) {
    s.tail = system.tail();
  } else {
    s.g = [system](Index k) { return system.g_at_zero(k); };
  }
  return s;
}

// System for eta~(z) = z^(1 + beta1 - beta2) eta(1 - z); its holomorphic
// solution started at b2 carries the coefficients d~_k of the Floquet solution
// at z = 1.
template <typename Scalar>
ShiftedSystem<Scalar> mirrored_shifted(const TwoPointSystem<Scalar>& system,
                                       const SpectralFrame<Scalar>& frame) {
  frame.check_against(system);
  const Matrix2<Scalar> id = Matrix2<Scalar>::Identity();
  ShiftedSystem<Scalar> s;
  s.a0 = system.b() - frame.beta2 * id;
  s.a1 = system.a() - frame.alpha0 * id;
  s.structure = system.structure();
  if (s.structure == Structure::rational) {
    s.tail = system.tail().mirrored();
  } else {
    s.g = [system](Index k) -> Matrix2<Scalar> { return -system.g_at_one(k); };
  }
  return s;
}

template <typename Scalar>
struct SeriesState {
  Index k = 0;
  Vector2<Scalar> u;  // d_k - d_{k-1}
  Vector2<Scalar> d;
  std::vector<Vector2<Scalar>> history;      // u_0..u_k, generic structure only
  std::vector<Vector2<Scalar>> accumulators;  // one per pole, rational structure only
  std::vector<Matrix2<Scalar>> g_cache;       // G_0, G_1, ... for the generic convolution
};

template <typename Scalar>
SeriesState<Scalar> start_series(const ShiftedSystem<Scalar>& shifted, const Vector2<Scalar>& d0) {
  SeriesState<Scalar> st;
  st.k = 0;
  st.u = d0;
  st.d = d0;
  if (shifted.structure == Structure::rational) {
    st.accumulators.assign(shifted.tail.poles.size(), d0);
  } else {
    st.history.push_back(d0);
  }
  return st;
}

// In-place form of frobenius_step; the generic branch reuses the stored history.
template <typename Scalar>
void advance(SeriesState<Scalar>& st, const ShiftedSystem<Scalar>& shifted) {
  using Matrix = Matrix2<Scalar>;
  using Vector = Vector2<Scalar>;
  const Index k = st.k + 1;
  const Scalar kk(static_cast<double>(k));

  // rhs = (A1 + I) d_{k-1} - sum_{l<k} G_{k-1-l} u_l
  Vector rhs = shifted.a1 * st.d + st.d;
  if (shifted.structure == Structure::rational) {
    rhs -= shifted.tail.constant * st.u;
    for (std::size_t j = 0; j < shifted.tail.poles.size(); ++j) {
      const auto& p = shifted.tail.poles[j];
      rhs += p.residue * st.accumulators[j] / p.pole;
    }
  } else {
    while (static_cast<Index>(st.g_cache.size()) < k) {
      st.g_cache.push_back(shifted.g(static_cast<Index>(st.g_cache.size())));
    }
    for (Index l = 0; l < k; ++l) rhs -= st.g_cache[k - 1 - l] * st.history[l];
  }

  const Matrix m = shifted.a0 - kk * Matrix::Identity();
  const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(std::abs(det) >= 1e-30)) {
    throw SingularStep("A0 - k I is singular at k = " + std::to_string(k), static_cast<long>(k));
  }
  const Vector u((m(1, 1) * rhs(0) - m(0, 1) * rhs(1)) / det,
                 (m(0, 0) * rhs(1) - m(1, 0) * rhs(0)) / det);

  st.k = k;
  st.u = u;
  st.d += u;
  if (shifted.structure == Structure::rational) {
    for (std::size_t j = 0; j < shifted.tail.poles.size(); ++j) {
      st.accumulators[j] = st.accumulators[j] / shifted.tail.poles[j].pole + u;
    }
  } else {
    st.history.push_back(u);
  }
}

template <typename Scalar>
SeriesState<Scalar> frobenius_step(SeriesState<Scalar> state, const ShiftedSystem<Scalar>& shifted) {
  advance(state, shifted);
  return state;
}

// Holomorphic solution sum z^k d_k of a shifted system, produced term by term.
template <typename Scalar>
class FrobeniusSeries {
 public:
  FrobeniusSeries(ShiftedSystem<Scalar> shifted, const Vector2<Scalar>& d0)
      : shifted_(std::move(shifted)), state_(start_series(shifted_, d0)) {}

  const Vector2<Scalar>& step() {
    advance(state_, shifted_);
    return state_.d;
  }
  const SeriesState<Scalar>& state() const noexcept { return state_; }
  const ShiftedSystem<Scalar>& shifted() const noexcept { return shifted_; }

  // d_0..d_count from a fresh start.
  static std::vector<Vector2<Scalar>> coefficients(const ShiftedSystem<Scalar>& shifted,
                                                   const Vector2<Scalar>& d0, Index count) {
    FrobeniusSeries s(shifted, d0);
    std::vector<Vector2<Scalar>> out;
    out.reserve(static_cast<std::size_t>(count + 1));
    out.push_back(d0);
    for (Index k = 1; k <= count; ++k) out.push_back(s.step());
    return out;
  }

 private:
  ShiftedSystem<Scalar> shifted_;
  SeriesState<Scalar> state_;
};

// ---------------------------------------------------------------------------
// Accelerated connection-coefficient sequence
// ---------------------------------------------------------------------------

// p_k = b2 + sum_{l=1}^n (prod_{m<l} (m + delta) / (m + delta - k)) d~_l.
template <typename Scalar>
Vector2<Scalar> p_vector(const Vector2<Scalar>& b2, std::span<const Vector2<Scalar>> tilde_prefix,
                         Scalar delta, Index k, Index n) {
  if (n < 0) throw std::invalid_argument("acceleration order must be nonnegative");
  if (!(static_cast<double>(k) > std::real(delta) + static_cast<double>(n) - 1.0)) {
    throw std::invalid_argument("p_vector requires k > Re(delta) + n - 1");
  }
  if (static_cast<Index>(tilde_prefix.size()) < n + 1) {
    throw std::invalid_argument("p_vector needs d~_0..d~_n");
  }
  Vector2<Scalar> p = b2;
  Scalar factor(1);
  const Scalar kk(static_cast<double>(k));
  for (Index l = 1; l <= n; ++l) {
    const Scalar m(static_cast<double>(l - 1));
    factor *= (m + delta) / (m + delta - kk);
    p += factor * tilde_prefix[static_cast<std::size_t>(l)];
  }
  return p;
}

// Threshold below which b1 and p count as parallel.
inline constexpr double kDegenerateFrameThreshold = 1e-12;

template <typename Scalar>
std::optional<Vector2<Scalar>> try_weight_vector(const Vector2<Scalar>& b1,
                                                 const Vector2<Scalar>& p) {
  const Scalar det = det2(b1, p);
  if (!(std::abs(det) > kDegenerateFrameThreshold * b1.norm() * p.norm())) return std::nullopt;
  // <J p, b1> = det(b1, p)
  return Vector2<Scalar>(apply_j(p) / det);
}

// theta = J p / <J p, b1>, so that <b1, theta> = 1 and <p, theta> = 0.
template <typename Scalar>
Vector2<Scalar> weight_vector(const Vector2<Scalar>& b1, const Vector2<Scalar>& p) {
  auto w = try_weight_vector(b1, p);
  if (!w) throw DegenerateFrame("b1 and p are linearly dependent");
  return *w;
}

enum class ThetaStatus { converged, k_max_reached, frame_degenerate };

inline const char* to_string(ThetaStatus s) {
  switch (s) {
    case ThetaStatus::converged: return "converged";
    case ThetaStatus::k_max_reached: return "k_max_reached";
    case ThetaStatus::frame_degenerate: return "frame_degenerate";
  }
  return "unknown";
}

template <typename Scalar>
struct ThetaStep {
  Index k;
  Vector2<Scalar> p;
  Vector2<Scalar> weight;
  Scalar theta;
};

template <typename Scalar>
struct ThetaOptions {
  Index n = 5;
  double tol = 1e-10;
  Index k_max = 1'000'000;
  // Multiplier turning the a posteriori estimate into the reported error bound.
  double safety = 2.0;
  // Consecutive non-increasing (or already sub-tolerance) estimates required
  // before termination.
  Index monotone_window = 5;
  std::function<void(const ThetaStep<Scalar>&)> observer;
};

template <typename Scalar>
struct ThetaResult {
  Scalar theta = Scalar(std::numeric_limits<double>::quiet_NaN());
  // k |Theta_k - Theta_{k-1}| / (Re(delta) + n + 1)
  double estimate = std::numeric_limits<double>::infinity();
  // safety * estimate
  double error_bound = std::numeric_limits<double>::infinity();
  Index k_final = 0;
  Index n = 0;
  Scalar tau_estimate = Scalar(0);
  ThetaStatus status = ThetaStatus::frame_degenerate;
};

// Runs Theta_k = <d_k, theta_k> over the coefficients produced by next_d
// (called once per k = 1, 2, ...) and stops on the a posteriori estimate.
template <typename Scalar, typename NextD>
ThetaResult<Scalar> accelerate_theta(NextD&& next_d, const SpectralFrame<Scalar>& frame,
                                     std::span<const Vector2<Scalar>> tilde_prefix,
                                     const ThetaOptions<Scalar>& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (opts.n < 0) throw std::invalid_argument("acceleration order must be nonnegative");
  const Index n = opts.n;
  const double re_delta = std::real(frame.delta);
  const double rate = re_delta + static_cast<double>(n) + 1.0;
  Index k_start = 1;
  while (!(static_cast<double>(k_start) > re_delta + static_cast<double>(n) - 1.0)) ++k_start;

  ThetaResult<Scalar> result;
  result.n = n;
  bool have_prev = false;
  Scalar prev(0);
  double prev_estimate = std::numeric_limits<double>::infinity();
  Index streak = 0;
  bool any_weight = false;

  for (Index k = 1; k <= opts.k_max; ++k) {
    const Vector2<Scalar>& d = next_d();
    if (k < k_start) continue;
    const Vector2<Scalar> p = p_vector<Scalar>(frame.b2, tilde_prefix, frame.delta, k, n);
    const auto w = try_weight_vector<Scalar>(frame.b1, p);
    if (!w) {
      have_prev = false;
      streak = 0;
      continue;
    }
    any_weight = true;
    const Scalar theta = bilinear(d, *w);
    if (!std::isfinite(std::real(theta)) || !std::isfinite(std::imag(theta))) {
      throw Error("non-finite Theta_k at k = " + std::to_string(k));
    }
    if (opts.observer) opts.observer(ThetaStep<Scalar>{k, p, *w, theta});

    result.theta = theta;
    result.k_final = k;
    if (have_prev) {
      const Scalar diff = theta - prev;
      const double kd = static_cast<double>(k);
      const double est = kd * std::abs(diff) / rate;
      // Below tol, rounding noise may break strict monotonicity; it still counts.
      streak = (est <= prev_estimate || est <= opts.tol) ? streak + 1 : 0;
      prev_estimate = est;
      // Increments below one ulp of Theta_k read as zero, so the reported bound never drops
      // under the tail those lost increments could add.
      const double floor = kd * std::numeric_limits<double>::epsilon() * std::abs(theta) / rate;
      result.estimate = std::max(est, floor);
      result.error_bound = opts.safety * result.estimate;
      result.tau_estimate = std::exp((frame.delta + Scalar(static_cast<double>(n) + 2.0)) *
                                     std::log(kd)) * diff;
      if (est <= opts.tol && streak >= opts.monotone_window) {
        result.status = ThetaStatus::converged;
        return result;
      }
    }
    prev = theta;
    have_prev = true;
  }
  result.status = any_weight ? ThetaStatus::k_max_reached : ThetaStatus::frame_degenerate;
  return result;
}

// d~_0..d~_n of the Floquet solution at z = 1.
template <typename Scalar>
std::vector<Vector2<Scalar>> mirrored_prefix(const TwoPointSystem<Scalar>& system,
                                             const SpectralFrame<Scalar>& frame, Index n) {
  return FrobeniusSeries<Scalar>::coefficients(mirrored_shifted(system, frame), frame.b2, n);
}

template <typename Scalar>
ThetaResult<Scalar> theta_iterate(const TwoPointSystem<Scalar>& system,
                                  const SpectralFrame<Scalar>& frame,
                                  const ThetaOptions<Scalar>& opts) {
  const auto prefix = mirrored_prefix(system, frame, opts.n);
  FrobeniusSeries<Scalar> series(build_shifted(system, frame), frame.a0);
  return accelerate_theta<Scalar>([&series]() -> const Vector2<Scalar>& { return series.step(); },
                                  frame, std::span<const Vector2<Scalar>>(prefix), opts);
}

}  // namespace conncoef
