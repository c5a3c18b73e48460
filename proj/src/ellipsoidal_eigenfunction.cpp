#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conncoef/ellipsoidal.hpp"
#include "conncoef/errors.hpp"
#include "conncoef/quadrature.hpp"
#include "series_eval.hpp"

namespace conncoef::ellipsoidal {

namespace {

constexpr double kCoefficientLimit = 1e250;

// Second components of d_offset, d_offset+1, ... from the series started at d0.
std::vector<double> second_components(const ShiftedSystem<Complex>& shifted, const Vector2c& d0,
                                      int offset, Index count) {
  FrobeniusSeries<Complex> series(shifted, d0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  Vector2c d = d0;
  for (Index k = 0; k < count + offset; ++k) {
    if (k > 0) d = series.step();
    const double v = d(1).real();
    if (!std::isfinite(v) || std::abs(v) > kCoefficientLimit) break;
    if (k >= offset) out.push_back(v);
  }
  return out;
}

bool is_real(Complex z) { return z.imag() == 0.0 && std::isfinite(z.real()); }

}  // namespace

double Eigenfunction::radius(Piece piece) const {
  switch (piece) {
    case Piece::at_zero: return 1.0;
    case Piece::at_one: return r1_;
    case Piece::at_c: return c_ - 1.0;
  }
  return 0.0;
}

double Eigenfunction::constant(Piece piece) const {
  switch (piece) {
    case Piece::at_zero: return c0_;
    case Piece::at_one: return c1_;
    case Piece::at_c: return c2_;
  }
  return 0.0;
}

const std::vector<double>& Eigenfunction::coefficients(Piece piece) const {
  switch (piece) {
    case Piece::at_zero: return coef0_;
    case Piece::at_one: return coef1_;
    case Piece::at_c: break;
  }
  return coef2_;
}

Piece Eigenfunction::piece_for(double z) const {
  if (z <= 1.0 - r1_ / 2.0) return Piece::at_zero;
  if (z < 1.0 + r1_ / 2.0) return Piece::at_one;
  return Piece::at_c;
}

double Eigenfunction::raw_piece(Piece piece, double z) const {
  switch (piece) {
    case Piece::at_zero:
      return std::pow(z, rho_ / 2.0) * std::pow(1.0 - z, (1.0 + sigma_) / 2.0) *
             detail::eval_series(coef0_, z);
    case Piece::at_one:
      return std::pow(z, -rho_ / 2.0) * std::pow(std::abs(1.0 - z), sigma_ / 2.0) *
             detail::eval_series(coef1_, 1.0 - z);
    case Piece::at_c: {
      const double zh = (c_ - z) / (c_ - 1.0);
      return std::pow(zh, tau_ / 2.0) * std::pow((z - 1.0) / (c_ - 1.0), (1.0 + sigma_) / 2.0) *
             detail::eval_series(coef2_, zh);
    }
  }
  return 0.0;
}

double Eigenfunction::piece_value(Piece piece, double z) const {
  return scale_ * constant(piece) * raw_piece(piece, z);
}

double Eigenfunction::value(double z) const {
  if (!(z >= 0.0 && z <= c_)) throw std::out_of_range("eigenfunction evaluated outside [0, c]");
  return piece_value(piece_for(z), z);
}

Eigenfunction eigenfunction(const EigenPair& pair, const Problem& problem, Index n_terms) {
  problem.validate();
  if (!is_real(pair.lambda) || !is_real(pair.mu) || !is_real(problem.gamma)) {
    throw InvalidProblem("eigenfunctions are built for real parameters only");
  }
  if (n_terms < 8) throw std::invalid_argument("eigenfunction needs at least 8 series terms");
  Options check;
  check.tol = 1e-12;
  const double r0 = std::abs(theta(pair.lambda, pair.mu, problem, check).theta);
  const double r1 = std::abs(theta_hat(pair.lambda, pair.mu, problem, check).theta);
  if (!(std::max(r0, r1) <= 1e-6)) {
    throw InvalidProblem("(lambda, mu) is not an eigenpair: residual " +
                         std::to_string(std::max(r0, r1)));
  }

  const double c = problem.c;
  const SystemEntries e = entries(pair.lambda, pair.mu, problem);
  const auto system = build_system(e, c);
  const auto frame = spectral_frame(problem.rho, problem.sigma, e);
  const auto [he, hc] = hat_entries(e, c);
  const auto hsystem = build_system(he, hc);
  const auto hframe = spectral_frame(problem.tau, problem.sigma, he);

  Eigenfunction fn;
  fn.c_ = c;
  fn.rho_ = problem.rho;
  fn.sigma_ = problem.sigma;
  fn.tau_ = problem.tau;
  fn.r1_ = std::min(1.0, c - 1.0);
  fn.coef0_ = second_components(build_shifted(system, frame), frame.a0, problem.rho, n_terms);
  fn.coef1_ =
      second_components(mirrored_shifted(system, frame), frame.b2, problem.sigma, n_terms);
  fn.coef2_ = second_components(build_shifted(hsystem, hframe), hframe.a0, problem.tau, n_terms);
  if (fn.coef0_.empty() || fn.coef1_.empty() || fn.coef2_.empty()) {
    throw MatchFailure("local series could not be generated");
  }

  fn.z01_ = 0.5 < fn.r1_ ? 0.5 : 1.0 - fn.r1_ / 2.0;
  fn.z12_ = (c - 1.0) / 2.0 < fn.r1_ ? (1.0 + c) / 2.0 : 1.0 + fn.r1_ / 2.0;

  auto match = [&](Piece other, double z) {
    const double target = fn.raw_piece(Piece::at_one, z);
    const double here = fn.raw_piece(other, z);
    if (std::isfinite(here) && std::isfinite(target) &&
        std::abs(here) > 1e-10 * std::abs(target) && here != 0.0) {
      return target / here;
    }
    // Least squares over a few nearby points of the overlap.
    const double h = 0.05 * fn.r1_;
    double num = 0.0, den = 0.0;
    for (int t = -4; t <= 4; ++t) {
      const double zt = z + t * h;
      const double a = fn.raw_piece(other, zt), b = fn.raw_piece(Piece::at_one, zt);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      num += a * b;
      den += a * a;
    }
    if (!(den > 0.0)) throw MatchFailure("pieces cannot be matched on their overlap");
    return num / den;
  };
  fn.c0_ = match(Piece::at_zero, fn.z01_);
  fn.c2_ = match(Piece::at_c, fn.z12_);
  if (!std::isfinite(fn.c0_) || !std::isfinite(fn.c2_)) {
    throw MatchFailure("non-finite matching constant");
  }
  return fn;
}

double norm_integral(const Eigenfunction& fn, int points) {
  const double c = fn.c();
  const auto rule = quadrature::gauss_legendre(points, 0.0, M_PI / 2.0);
  double i0 = 0.0, i1 = 0.0, j0 = 0.0, j1 = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double s2 = std::pow(std::sin(rule.nodes[q]), 2);
    const double x = s2;
    const double wx = fn.value(x);
    const double fx = 2.0 * rule.weights[q] * wx * wx / std::sqrt(c - x);
    i0 += fx;
    i1 += x * fx;
    const double y = 1.0 + (c - 1.0) * s2;
    const double wy = fn.value(y);
    const double fy = 2.0 * rule.weights[q] * wy * wy / std::sqrt(y);
    j0 += fy;
    j1 += y * fy;
  }
  return i0 * j1 - i1 * j0;
}

std::vector<double> sup_grid(double c, int samples) {
  std::vector<double> z(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) z[static_cast<std::size_t>(i)] = c * (i + 1) / (samples + 1.0);
  return z;
}

Eigenfunction normalize(Eigenfunction fn, Normalization mode) {
  if (mode == Normalization::sup) {
    double best = 0.0, signed_best = 0.0;
    for (double z : sup_grid(fn.c())) {
      const double v = fn.value(z);
      if (std::abs(v) > best) {
        best = std::abs(v);
        signed_best = v;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) throw MatchFailure("eigenfunction vanishes on grid");
    fn.rescale(1.0 / signed_best);
    return fn;
  }
  const double coarse = norm_integral(fn, 64);
  const double fine = norm_integral(fn, 128);
  if (!(std::abs(coarse - fine) <= 1e-5 * std::abs(fine))) {
    throw QuadratureNotConverged("norm integral changes between 64 and 128 points");
  }
  if (!(fine > 0.0)) throw QuadratureNotConverged("norm integral is not positive");
  // The integral is quartic in w.
  fn.rescale(std::pow(fine, -0.25));
  return fn;
}

ZeroCounts zero_counts(const Eigenfunction& fn, int samples) {
  auto count = [&](double lo, double hi) {
    int zeros = 0;
    double prev = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double z = lo + (hi - lo) * (i + 1) / (samples + 1.0);
      const double v = fn.value(z);
      if (v == 0.0) continue;
      if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++zeros;
      prev = v;
    }
    return zeros;
  };
  return {count(0.0, 1.0), count(1.0, fn.c())};
}

}  // namespace conncoef::ellipsoidal
