#pragma once

// Angular spheroidal wave equation
//
//   ((1 - x^2) w')' + (lambda + gamma^2 (1 - x^2) - mu^2 / (1 - x^2)) w = 0,  -1 < x < 1,
//
// mapped to z = (1 + x) / 2. Eigenvalues are lambda = t + mu (mu + 1) at the
// zeros t of the connection coefficient Theta(t).

#include <optional>
#include <vector>

#include "conncoef/conncore.hpp"
#include "conncoef/linalg.hpp"
#include "conncoef/rootfind.hpp"

namespace conncoef::spheroidal {

using Options = ThetaOptions<Complex>;
using Result = ThetaResult<Complex>;

struct Problem {
  Complex mu{0.0};
  Complex gamma2{0.0};

  // Re(mu) > 0 or mu == 0.
  void validate() const;
};

TwoPointSystem<Complex> build_system(Complex t, const Problem& problem);
SpectralFrame<Complex> spectral_frame(Complex t, const Problem& problem);

// Closed-form recurrence for d_k at z = 0, equal to the generic Frobenius
// recurrence for this system.
// Runs in long double: at Legendre-type eigenvalues the series should terminate, and the
// rounding left in the vanishing u_k otherwise sets Theta's floor near 1e-11.
class ExplicitSeries {
 public:
  ExplicitSeries(Complex t, const Problem& problem);
  const Vector2c& step();
  const Vector2c& d() const noexcept { return d_; }
  Index k() const noexcept { return k_; }

 private:
  using Wide = std::complex<long double>;
  using Vector2w = Eigen::Matrix<Wide, 2, 1>;
  Wide t_, mu_, g4_;
  Index k_ = 0;
  Vector2w u_, dw_;
  Vector2c d_;
};

// d~_0..d~_n at z = 1. For mu = 0 these are K d_k; otherwise the companion
// recurrence is run.
std::vector<Vector2c> tilde_prefix(Complex t, const Problem& problem, Index n);
// Companion recurrence only, regardless of mu.
std::vector<Vector2c> tilde_recurrence(Complex t, const Problem& problem, Index n);

Result theta_t(Complex t, const Problem& problem, const Options& opts = {});

struct Eigenvalue {
  int index = 0;
  Complex t_root;
  Complex lambda;
  int parity = 0;  // filled by eigenfunction(); 0 until then
  double residual = 0.0;
};

struct EigenvalueOptions {
  Index n = 5;
  double tol = 1e-12;  // on |Theta(t_N)|
  double step = 0.5;
  std::optional<double> lower, upper;
};

// The first `count` eigenvalues in increasing order of t.
std::vector<Eigenvalue> eigenvalues(const Problem& problem, int count,
                                    const EigenvalueOptions& opts = {});

class Eigenfunction {
 public:
  // Series at -1 for x <= 0; the parity carries it to x > 0.
  double value(double x) const;
  int parity() const noexcept { return parity_; }
  double parity_deviation() const noexcept { return parity_deviation_; }
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  double lambda() const noexcept { return lambda_; }

 private:
  friend Eigenfunction eigenfunction(const Eigenvalue&, const Problem&, Index);
  double raw(double x) const;

  std::vector<double> coef_;  // <d_k, e2> / 2^k
  double mu_ = 0.0;
  double lambda_ = 0.0;
  int parity_ = 1;
  double parity_deviation_ = 0.0;
};

// Real problems only. The parity is fixed by comparing w(x0) with w(-x0).
Eigenfunction eigenfunction(const Eigenvalue& eig, const Problem& problem, Index n_terms = 4000);

}  // namespace conncoef::spheroidal
