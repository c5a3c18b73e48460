#include "conncoef/ellipsoidal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "conncoef/errors.hpp"

namespace conncoef::ellipsoidal {

namespace {

bool is_bit(int v) { return v == 0 || v == 1; }

Matrix2c residue(Complex entry) {
  Matrix2c m;
  m << -0.5, entry, 0.0, 0.0;
  return m;
}

}  // namespace

void Problem::validate() const {
  if (!(c > 1.0)) throw InvalidProblem("ellipsoidal problem requires c > 1");
  if (!is_bit(rho) || !is_bit(sigma) || !is_bit(tau)) {
    throw InvalidProblem("exponent flags rho, sigma, tau must be 0 or 1");
  }
  if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag())) {
    throw InvalidProblem("gamma must be finite");
  }
}

SystemEntries entries(Complex lambda, Complex mu, const Problem& problem) {
  const double c = problem.c;
  if (c == 1.0) throw InvalidProblem("c must differ from 1");
  const Complex g = problem.gamma;
  return {lambda, c * (lambda + mu + g) / (1.0 - c), (lambda + c * mu + c * c * g) / (c - 1.0)};
}

Parameters recover_parameters(const SystemEntries& e, double c) {
  return {e.a12, -(c * (e.a12 + e.b12) + e.a12 + e.r12) / c, (e.a12 + e.b12 + e.r12) / c};
}

std::pair<SystemEntries, double> hat_entries(const SystemEntries& e, double c) {
  if (!(c > 1.0)) throw InvalidProblem("hat transform requires c > 1");
  return {SystemEntries{-e.r12, -e.b12, -e.a12}, c / (c - 1.0)};
}

TwoPointSystem<Complex> build_system(const SystemEntries& e, double c) {
  if (!(c > 1.0)) throw InvalidProblem("ellipsoidal system requires c > 1");
  RationalTail<Complex> tail;
  tail.poles.push_back({Complex(c), residue(e.r12)});
  Matrix2c s;
  s << 0.0, 0.0, 1.0, 0.0;
  tail.constant = -s / c;
  return TwoPointSystem<Complex>::rational(residue(e.a12), residue(e.b12), std::move(tail));
}

SpectralFrame<Complex> spectral_frame(int rho, int sigma, const SystemEntries& e) {
  if (!is_bit(rho) || !is_bit(sigma)) throw InvalidProblem("exponent flags must be 0 or 1");
  const double r = rho, s = sigma;
  const Vector2c a0(2.0 * e.a12 * (1.0 - r) + r / 2.0, 1.0 - r);
  const Vector2c b1(2.0 * e.b12 * s + (1.0 - s) / 2.0, s);
  const Vector2c b2(2.0 * e.b12 * (1.0 - s) + s / 2.0, 1.0 - s);
  return SpectralFrame<Complex>::make(-r / 2.0, a0, (s - 1.0) / 2.0, b1, -s / 2.0, b2);
}

Result theta_from_entries(const SystemEntries& e, double c, int rho, int sigma,
                          const Options& opts) {
  return theta_iterate(build_system(e, c), spectral_frame(rho, sigma, e), opts);
}

Result theta(Complex lambda, Complex mu, const Problem& problem, const Options& opts) {
  problem.validate();
  return theta_from_entries(entries(lambda, mu, problem), problem.c, problem.rho, problem.sigma,
                            opts);
}

Result theta_hat(Complex lambda, Complex mu, const Problem& problem, const Options& opts) {
  problem.validate();
  const auto [he, hc] = hat_entries(entries(lambda, mu, problem), problem.c);
  return theta_from_entries(he, hc, problem.tau, problem.sigma, opts);
}

double real_value(const Result& r) {
  const double re = r.theta.real(), im = r.theta.imag();
  if (!(std::abs(im) <= 1e-10 * std::abs(r.theta))) {
    throw Error("Theta has a non-negligible imaginary part for real data");
  }
  return re;
}

EigenPair solve_pair(double seed_lambda, double seed_mu, const Problem& problem,
                     const SolveOptions& opts) {
  problem.validate();
  if (problem.gamma.imag() != 0.0) throw InvalidProblem("solve_pair requires real gamma");
  Options topts;
  topts.n = opts.n;
  topts.tol = opts.theta_tol;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto f = [&](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    try {
      const Result t = theta(x(0), x(1), problem, topts);
      const Result th = theta_hat(x(0), x(1), problem, topts);
      if (t.status != ThetaStatus::converged || th.status != ThetaStatus::converged) {
        return {nan, nan};
      }
      return {real_value(t), real_value(th)};
    } catch (const Error&) {
      return {nan, nan};
    }
  };
  EigenPair p;
  try {
    const auto r = rootfind::broyden2(f, Eigen::Vector2d(seed_lambda, seed_mu), opts.solver);
    p.lambda = r.root(0);
    p.mu = r.root(1);
    p.residual_theta = std::abs(r.residual(0));
    p.residual_theta_hat = std::abs(r.residual(1));
    p.iterations = r.iterations;
  } catch (const NoConvergence& e) {
    // Near large-parameter roots |dTheta/dlambda| reaches 1e12, so an absolute residual of
    // 1e-9 is far below Theta's rounding. A stalled iterate is accepted when the Newton
    // correction it still asks for is below tol in parameter space.
    const Eigen::Vector2d x(e.best_iterate()[0], e.best_iterate()[1]);
    const Eigen::Vector2d fx = f(x);
    if (!fx.allFinite()) throw;
    Eigen::Matrix2d jac;
    for (int i = 0; i < 2; ++i) {
      Eigen::Vector2d xh = x;
      const double h = 1e-6 * (1.0 + std::abs(x(i)));
      xh(i) += h;
      jac.col(i) = (f(xh) - fx) / h;
    }
    const Eigen::Vector2d step = jac.partialPivLu().solve(fx);
    if (!jac.allFinite() || !step.allFinite() ||
        !(step.cwiseAbs().maxCoeff() <= opts.solver.tol_residual * (1.0 + x.cwiseAbs().maxCoeff()))) {
      throw;
    }
    p.lambda = x(0);
    p.mu = x(1);
    p.residual_theta = std::abs(fx(0));
    p.residual_theta_hat = std::abs(fx(1));
    p.iterations = static_cast<int>(e.residual_trace().size()) - 1;
  }
  return p;
}

ScanGrid scan_grid(const Problem& problem, Range lambda, Range mu, int resolution_lambda,
                   int resolution_mu, const Options& opts) {
  problem.validate();
  if (resolution_lambda < 2 || resolution_mu < 2) {
    throw std::invalid_argument("scan_grid: resolution must be at least 2 per axis");
  }
  if (!std::isfinite(lambda.lo) || !std::isfinite(lambda.hi) || !std::isfinite(mu.lo) ||
      !std::isfinite(mu.hi)) {
    throw std::invalid_argument("scan_grid: ranges must be finite");
  }
  ScanGrid g;
  auto axis = [](Range r, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = r.lo + (r.hi - r.lo) * i / (n - 1);
    return v;
  };
  g.lambdas = axis(lambda, resolution_lambda);
  g.mus = axis(mu, resolution_mu);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  g.nodes.reserve(g.lambdas.size() * g.mus.size());
  for (double l : g.lambdas) {
    for (double m : g.mus) {
      ScanNode node{l, m, nan, nan, false, {}};
      try {
        const Result t = theta(l, m, problem, opts);
        const Result th = theta_hat(l, m, problem, opts);
        node.theta = real_value(t);
        node.theta_hat = real_value(th);
        node.converged =
            t.status == ThetaStatus::converged && th.status == ThetaStatus::converged;
      } catch (const Error& e) {
        node.error = e.what();
      }
      g.all_converged = g.all_converged && node.converged;
      g.nodes.push_back(std::move(node));
    }
  }

  auto straddles = [](double a, double b, double c, double d) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
      return false;
    }
    return std::min({a, b, c, d}) <= 0.0 && std::max({a, b, c, d}) >= 0.0;
  };
  for (std::size_t i = 0; i + 1 < g.lambdas.size(); ++i) {
    for (std::size_t j = 0; j + 1 < g.mus.size(); ++j) {
      const auto &n00 = g.at(i, j), &n10 = g.at(i + 1, j), &n01 = g.at(i, j + 1),
                 &n11 = g.at(i + 1, j + 1);
      if (straddles(n00.theta, n10.theta, n01.theta, n11.theta) &&
          straddles(n00.theta_hat, n10.theta_hat, n01.theta_hat, n11.theta_hat)) {
        g.seeds.push_back(
            {0.5 * (g.lambdas[i] + g.lambdas[i + 1]), 0.5 * (g.mus[j] + g.mus[j + 1])});
      }
    }
  }
  return g;
}

std::vector<EigenPair> solve_seeds(const std::vector<Seed>& seeds, const Problem& problem,
                                   const SolveOptions& opts, double merge_distance) {
  std::vector<EigenPair> pairs;
  for (const Seed& s : seeds) {
    EigenPair p;
    try {
      p = solve_pair(s.lambda, s.mu, problem, opts);
    } catch (const Error&) {
      continue;
    }
    auto same = std::find_if(pairs.begin(), pairs.end(), [&](const EigenPair& q) {
      return std::abs(q.lambda - p.lambda) <= merge_distance &&
             std::abs(q.mu - p.mu) <= merge_distance;
    });
    if (same == pairs.end()) {
      pairs.push_back(p);
    } else if (std::max(p.residual_theta, p.residual_theta_hat) <
               std::max(same->residual_theta, same->residual_theta_hat)) {
      *same = p;
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.mu.real() < b.mu.real();
  });
  return pairs;
}

NativeParameters from_abramov(const AbramovParameters& a) {
  if (!(a.k2 > 0.0 && a.k2 < 1.0)) throw InvalidProblem("Abramov form requires 0 < k^2 < 1");
  const double c = 1.0 / a.k2;
  return {c, a.omega2 / 4.0, a.h * c / 4.0, -a.l * c / 4.0};
}

AbramovParameters to_abramov(const NativeParameters& n) {
  if (!(n.c > 1.0)) throw InvalidProblem("Abramov form requires c > 1");
  return {1.0 / n.c, 4.0 * n.gamma, 4.0 * n.lambda / n.c, -4.0 * n.mu / n.c};
}

}  // namespace conncoef::ellipsoidal
