#include "conncoef/rootfind.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "conncoef/errors.hpp"

namespace conncoef::rootfind {

void SolverOptions::validate() const {
  if (!(tol_residual > 0.0) || !(tol_step > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

SecantResult secant(const std::function<double(double)>& f, double t0, double t1,
                    const SolverOptions& opts) {
  opts.validate();
  double f0 = f(t0);
  double f1 = f(t1);
  if (!std::isfinite(f0) || !std::isfinite(f1)) {
    throw std::invalid_argument("secant: f not finite at the starting points");
  }
  if (std::abs(f0) < std::abs(f1)) {
    std::swap(t0, t1);
    std::swap(f0, f1);
  }
  double best = t1, best_f = std::abs(f1);
  std::vector<double> trace{std::abs(f1)};
  for (int it = 1; it <= opts.max_iter; ++it) {
    if (std::abs(f1) <= opts.tol_residual) return {t1, f1, it - 1};
    const double denom = f1 - f0;
    if (denom == 0.0) break;
    const double t2 = t1 - f1 * (t1 - t0) / denom;
    if (!std::isfinite(t2)) break;
    const double f2 = f(t2);
    if (!std::isfinite(f2)) break;
    trace.push_back(std::abs(f2));
    if (std::abs(f2) < best_f) {
      best = t2;
      best_f = std::abs(f2);
    }
    const double step = std::abs(t2 - t1);
    t0 = t1;
    f0 = f1;
    t1 = t2;
    f1 = f2;
    if (std::abs(f1) <= opts.tol_residual || step <= opts.tol_step * (1.0 + std::abs(t1))) {
      return {t1, f1, it};
    }
  }
  throw NoConvergence("secant did not converge", {best}, best_f, std::move(trace));
}

BracketScan bracket_scan(const std::function<double(double)>& f, double lo, double hi,
                         double step) {
  if (!(step > 0.0)) throw std::invalid_argument("bracket_scan: step must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("bracket_scan: empty range");
  BracketScan out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  bool have_prev = false;
  double t_prev = 0.0, f_prev = 0.0;
  for (long i = 0; i <= count; ++i) {
    const double t = lo + static_cast<double>(i) * step;
    const double ft = f(t);
    if (std::isnan(ft)) {
      ++out.nan_samples;
      have_prev = false;
      continue;
    }
    if (ft == 0.0) {
      out.brackets.push_back({t, t});
    } else if (have_prev && f_prev != 0.0 && std::signbit(ft) != std::signbit(f_prev)) {
      out.brackets.push_back({t_prev, t});
    }
    t_prev = t;
    f_prev = ft;
    have_prev = true;
  }
  return out;
}

namespace {

double max_norm(const Eigen::Vector2d& v) { return v.cwiseAbs().maxCoeff(); }

Eigen::Matrix2d forward_jacobian(const Function2& f, const Eigen::Vector2d& x,
                                 const Eigen::Vector2d& fx, int& evaluations) {
  Eigen::Matrix2d jac;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d xh = x;
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    xh(i) += h;
    jac.col(i) = (f(xh) - fx) / h;
    ++evaluations;
  }
  return jac;
}

void require_nonsingular(const Eigen::Matrix2d& jac) {
  const double scale = jac.cwiseAbs().maxCoeff();
  if (!(std::abs(jac.determinant()) > 1e-14 * scale * scale)) {
    throw SingularJacobian("broyden2: Jacobian is singular");
  }
}

}  // namespace

Broyden2Result broyden2(const Function2& f, const Eigen::Vector2d& seed,
                        const SolverOptions& opts) {
  opts.validate();
  Broyden2Result r;
  r.evaluations = 1;
  Eigen::Vector2d x = seed;
  Eigen::Vector2d fx = f(x);
  if (!fx.allFinite()) throw std::invalid_argument("broyden2: F not finite at the seed");
  double res = max_norm(fx);
  r.residual_trace.push_back(res);

  Eigen::Matrix2d jac = forward_jacobian(f, x, fx, r.evaluations);
  require_nonsingular(jac);
  bool fresh_jacobian = true;

  for (int it = 1; it <= opts.max_iter; ++it) {
    if (res <= opts.tol_residual) {
      r.root = x;
      r.residual = fx;
      r.iterations = it - 1;
      return r;
    }
    const Eigen::Vector2d full = -jac.partialPivLu().solve(fx);
    if (!full.allFinite()) break;

    Eigen::Vector2d step = full;
    Eigen::Vector2d xn = x + step;
    Eigen::Vector2d fn = f(xn);
    ++r.evaluations;
    if (opts.damping == Damping::halving) {
      int halvings = 0;
      while ((!fn.allFinite() || max_norm(fn) > res) && halvings < 8) {
        step *= 0.5;
        xn = x + step;
        fn = f(xn);
        ++r.evaluations;
        ++halvings;
      }
      if (!fn.allFinite() || max_norm(fn) > res) {
        // Secant model is stale; rebuild it once before giving up.
        if (fresh_jacobian) break;
        jac = forward_jacobian(f, x, fx, r.evaluations);
        require_nonsingular(jac);
        fresh_jacobian = true;
        continue;
      }
    } else if (!fn.allFinite()) {
      break;
    }

    const Eigen::Vector2d df = fn - fx;
    const double ss = step.squaredNorm();
    if (ss > 0.0) jac += (df - jac * step) * step.transpose() / ss;
    fresh_jacobian = false;

    x = xn;
    fx = fn;
    res = max_norm(fx);
    r.residual_trace.push_back(res);
    if (res <= opts.tol_residual) {
      r.root = x;
      r.residual = fx;
      r.iterations = it;
      return r;
    }
    if (step.cwiseAbs().maxCoeff() <= opts.tol_step * (1.0 + x.cwiseAbs().maxCoeff())) break;
  }
  throw NoConvergence("broyden2 did not converge", {x(0), x(1)}, res, r.residual_trace);
}

}  // namespace conncoef::rootfind
