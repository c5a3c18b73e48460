#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace conncoef::rootfind {

enum class Damping { none, halving };

struct SolverOptions {
  double tol_residual = 1e-12;
  double tol_step = 1e-13;
  int max_iter = 60;
  Damping damping = Damping::halving;

  void validate() const;
};

struct Bracket {
  double lo;
  double hi;
};

struct BracketScan {
  std::vector<Bracket> brackets;
  int nan_samples = 0;
};

struct SecantResult {
  double root;
  double residual;
  int iterations;
};

// Plain secant iteration from (t0, t1). Stops when |f| <= tol_residual or the
// step falls below tol_step * (1 + |t|); throws NoConvergence otherwise.
SecantResult secant(const std::function<double(double)>& f, double t0, double t1,
                    const SolverOptions& opts = {});

// Sign-change intervals of f sampled on [lo, hi] at the given step. Exact
// zeros are reported as degenerate intervals [t, t].
BracketScan bracket_scan(const std::function<double(double)>& f, double lo, double hi,
                         double step);

using Function2 = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

struct Broyden2Result {
  Eigen::Vector2d root;
  Eigen::Vector2d residual;
  int iterations;
  int evaluations;
  std::vector<double> residual_trace;  // max-norm residual per accepted iterate
};

// Broyden's good method with a forward-difference starting Jacobian
// (step 1e-6 (1 + |x_i|)) and optional step halving on residual increase.
Broyden2Result broyden2(const Function2& f, const Eigen::Vector2d& seed,
                        const SolverOptions& opts = {1e-9, 1e-14, 50, Damping::halving});

}  // namespace conncoef::rootfind
