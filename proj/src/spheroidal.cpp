#include "conncoef/spheroidal.hpp"

#include <algorithm>
#include <cmath>

#include "conncoef/errors.hpp"
#include "series_eval.hpp"

namespace conncoef::spheroidal {

namespace {

const Matrix2c kK = (Matrix2c() << -1.0, 0.0, 0.0, 1.0).finished();

bool is_real(Complex z) { return z.imag() == 0.0 && std::isfinite(z.real()); }

}  // namespace

void Problem::validate() const {
  if (!(mu == Complex(0.0) || mu.real() > 0.0)) {
    throw InvalidProblem("spheroidal problem requires Re(mu) > 0 or mu = 0");
  }
  if (!std::isfinite(gamma2.real()) || !std::isfinite(gamma2.imag())) {
    throw InvalidProblem("gamma^2 must be finite");
  }
}

TwoPointSystem<Complex> build_system(Complex t, const Problem& problem) {
  problem.validate();
  const Complex m = problem.mu;
  Matrix2c a, b, g0;
  a << -m / 2.0 - 1.0, -t, 0.0, m / 2.0;
  b << -m / 2.0 - 1.0, t, 0.0, m / 2.0;
  g0 << 0.0, -4.0 * problem.gamma2, 1.0, 0.0;
  auto constant = [g0](Index k) -> Matrix2c { return k == 0 ? g0 : Matrix2c::Zero(); };
  return TwoPointSystem<Complex>::generic(a, b, constant, constant);
}

SpectralFrame<Complex> spectral_frame(Complex t, const Problem& problem) {
  problem.validate();
  const Complex m = problem.mu;
  const Vector2c a0(-t / (m + 1.0), 1.0);
  // +e1 rather than -e1: the sign of Theta is tied to det(b1, b2).
  const Vector2c b1(1.0, 0.0);
  return SpectralFrame<Complex>::make(m / 2.0, a0, -m / 2.0 - 1.0, b1, m / 2.0, kK * a0);
}

ExplicitSeries::ExplicitSeries(Complex t, const Problem& problem)
    : t_(t), mu_(problem.mu), g4_(Wide(4.0L) * Wide(problem.gamma2)) {
  problem.validate();
  dw_ = Vector2w(-t_ / (mu_ + 1.0L), 1.0L);
  u_ = dw_;
  d_ = dw_.cast<Complex>();
}

const Vector2c& ExplicitSeries::step() {
  ++k_;
  const long double k = static_cast<long double>(k_);
  const Wide q = mu_ + 1.0L + k;
  // u_k = M1 d_{k-1} - M2 u_{k-1}
  const Wide m01 = t_ * (mu_ + 1.0L - k) / (k * q);
  const Wide m11 = -(mu_ + 1.0L) / k;
  const Wide n00 = t_ / (k * q), n01 = g4_ / q, n10 = -1.0L / k;
  const Vector2w u(m01 * dw_(1) - (n00 * u_(0) + n01 * u_(1)), m11 * dw_(1) - n10 * u_(0));
  u_ = u;
  dw_ += u_;
  d_ = dw_.cast<Complex>();
  return d_;
}

std::vector<Vector2c> tilde_recurrence(Complex t, const Problem& problem, Index n) {
  problem.validate();
  // Same precision as ExplicitSeries, so mu = 0 reproduces K d_k bit for bit.
  using Wide = std::complex<long double>;
  using Vector2w = Eigen::Matrix<Wide, 2, 1>;
  const Wide tw = t, mu = problem.mu, g4 = Wide(4.0L) * Wide(problem.gamma2);
  Vector2w d(tw / (mu + 1.0L), 1.0L), u = d;
  std::vector<Vector2c> out{d.cast<Complex>()};
  for (Index kk = 1; kk <= n; ++kk) {
    const long double k = static_cast<long double>(kk);
    const Wide q = mu + 1.0L + k;
    const Wide m00 = mu / q, m01 = tw * (k - 1.0L) / (k * q), m11 = -1.0L / k;
    const Wide n00 = -tw / (k * q), n01 = g4 / q, n10 = -1.0L / k;
    u = Vector2w(m00 * d(0) + m01 * d(1) + (n00 * u(0) + n01 * u(1)), m11 * d(1) + n10 * u(0));
    d += u;
    out.push_back(d.cast<Complex>());
  }
  return out;
}

std::vector<Vector2c> tilde_prefix(Complex t, const Problem& problem, Index n) {
  if (problem.mu != Complex(0.0)) return tilde_recurrence(t, problem, n);
  ExplicitSeries series(t, problem);
  std::vector<Vector2c> out{kK * series.d()};
  for (Index k = 1; k <= n; ++k) out.push_back(kK * series.step());
  return out;
}

Result theta_t(Complex t, const Problem& problem, const Options& opts) {
  const auto frame = spectral_frame(t, problem);
  const auto prefix = tilde_prefix(t, problem, opts.n);
  ExplicitSeries series(t, problem);
  return accelerate_theta<Complex>([&series]() -> const Vector2c& { return series.step(); },
                                   frame, std::span<const Vector2c>(prefix), opts);
}

std::vector<Eigenvalue> eigenvalues(const Problem& problem, int count,
                                    const EigenvalueOptions& opts) {
  problem.validate();
  if (count < 1) throw std::invalid_argument("eigenvalues: count must be at least 1");
  if (!(opts.step > 0.0) || !(opts.tol > 0.0)) {
    throw std::invalid_argument("eigenvalues: step and tol must be positive");
  }
  Options topts;
  topts.n = opts.n;
  topts.tol = std::max(1e-14, 0.01 * opts.tol);
  auto f = [&](double t) {
    const Result r = theta_t(t, problem, topts);
    return r.status == ThetaStatus::frame_degenerate ? std::nan("") : r.theta.real();
  };

  const double g = std::abs(problem.gamma2), m = std::abs(problem.mu);
  const double lower = opts.lower.value_or(-2.0 * g - 2.0);
  const double upper = opts.upper.value_or((count + m) * (count + m + 1.0) + 2.0 * g + 2.0);
  if (!(lower < upper)) throw std::invalid_argument("eigenvalues: empty scan range");

  std::vector<rootfind::Bracket> brackets = rootfind::bracket_scan(f, lower, upper, opts.step).brackets;
  if (static_cast<int>(brackets.size()) < count) {
    const double extended = lower + 2.0 * (upper - lower);
    const auto more = rootfind::bracket_scan(f, upper, extended, opts.step).brackets;
    for (const auto& b : more) {
      if (!brackets.empty() && b.lo == b.hi && brackets.back().hi == b.lo) continue;
      brackets.push_back(b);
    }
  }
  if (static_cast<int>(brackets.size()) < count) {
    throw ScanExhausted("found " + std::to_string(brackets.size()) + " of " +
                        std::to_string(count) + " sign changes of Theta(t)");
  }

  std::vector<Eigenvalue> out;
  for (int i = 0; i < count; ++i) {
    double lo = brackets[static_cast<std::size_t>(i)].lo, hi = brackets[static_cast<std::size_t>(i)].hi;
    double root = lo;
    if (lo != hi) {
      double flo = f(lo);
      for (int b = 0; b < 3; ++b) {
        const double mid = 0.5 * (lo + hi), fm = f(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (std::signbit(fm) == std::signbit(flo)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      root = lo;
      if (lo != hi) {
        rootfind::SolverOptions sopts{opts.tol, 1e-13, 60, rootfind::Damping::none};
        bool ok = false;
        try {
          const auto r = rootfind::secant(f, lo, hi, sopts);
          ok = r.root >= lo && r.root <= hi;
          root = r.root;
        } catch (const NoConvergence&) {
        }
        if (!ok) {
          // Secant left the bracket; bisect instead.
          for (int b = 0; b < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++b) {
            const double mid = 0.5 * (lo + hi), fm = f(mid);
            if (fm == 0.0) { lo = hi = mid; break; }
            if (std::signbit(fm) == std::signbit(flo)) { lo = mid; flo = fm; } else { hi = mid; }
          }
          root = 0.5 * (lo + hi);
        }
      }
    }
    Eigenvalue e;
    e.index = i;
    e.t_root = root;
    e.lambda = Complex(root) + problem.mu * (problem.mu + 1.0);
    e.residual = std::abs(theta_t(root, problem, topts).theta);
    out.push_back(e);
  }
  return out;
}

double Eigenfunction::raw(double x) const {
  return std::pow((1.0 + x) / (1.0 - x), mu_ / 2.0) * detail::eval_series(coef_, 1.0 + x);
}

double Eigenfunction::value(double x) const {
  if (!(x > -1.0 && x < 1.0)) throw std::out_of_range("spheroidal eigenfunction needs -1 < x < 1");
  return x <= 0.0 ? raw(x) : parity_ * raw(-x);
}

Eigenfunction eigenfunction(const Eigenvalue& eig, const Problem& problem, Index n_terms) {
  problem.validate();
  if (!is_real(problem.mu) || !is_real(problem.gamma2) || !is_real(eig.t_root)) {
    throw InvalidProblem("spheroidal eigenfunctions are built for real parameters only");
  }
  if (!(eig.residual <= 1e-8)) throw InvalidProblem("eigenvalue residual exceeds 1e-8");
  Eigenfunction fn;
  fn.mu_ = problem.mu.real();
  fn.lambda_ = eig.lambda.real();
  ExplicitSeries series(eig.t_root, problem);
  double scale = 1.0;
  fn.coef_.push_back(series.d()(1).real());
  for (Index k = 1; k < n_terms; ++k) {
    scale *= 0.5;
    const double v = series.step()(1).real() * scale;
    if (!std::isfinite(v)) break;
    fn.coef_.push_back(v);
  }
  for (double x0 : {0.3, 0.55}) {
    const double a = fn.raw(x0), b = fn.raw(-x0);
    if (std::abs(a) < 1e-10 && std::abs(b) < 1e-10) continue;
    const double ratio = a / b;
    fn.parity_ = ratio >= 0.0 ? 1 : -1;
    fn.parity_deviation_ = std::abs(ratio - fn.parity_);
    return fn;
  }
  throw ParityAmbiguous("eigenfunction vanishes at both parity probes");
}

}  // namespace conncoef::spheroidal
