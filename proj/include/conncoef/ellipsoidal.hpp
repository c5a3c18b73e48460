#pragma once

// Angular ellipsoidal (Lame) wave equation in algebraic form
//
//   z(z-1)(z-c) w'' + (3z^2 - 2(1+c)z + c)/2 w' + (lambda + mu z + gamma z^2) w = 0,
//
// with c > 1. An eigenpair (lambda, mu) for exponent choices (rho, sigma, tau)
// makes the Floquet solutions at 0, 1 and c match, i.e. Theta = Theta^ = 0.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conncoef/conncore.hpp"
#include "conncoef/linalg.hpp"
#include "conncoef/rootfind.hpp"

namespace conncoef::ellipsoidal {

using Options = ThetaOptions<Complex>;
using Result = ThetaResult<Complex>;

struct Problem {
  Complex gamma{0.0};
  double c = 2.0;
  int rho = 0;
  int sigma = 0;
  int tau = 0;

  void validate() const;
};

// Upper-right entries of the residue matrices at 0, 1 and c.
struct SystemEntries {
  Complex a12, b12, r12;
};

struct Parameters {
  Complex lambda, mu, gamma;
};

SystemEntries entries(Complex lambda, Complex mu, const Problem& problem);

// Inverse of entries(): recovers (lambda, mu, gamma) for the given c.
Parameters recover_parameters(const SystemEntries& e, double c);

// Entries and c of the system obtained by z = c + (1 - c) z^, which swaps the
// roles of the singular points c and 0.
std::pair<SystemEntries, double> hat_entries(const SystemEntries& e, double c);

TwoPointSystem<Complex> build_system(const SystemEntries& e, double c);

// Frame for exponents z^(rho/2) at 0 and (z-1)^(sigma/2) at 1.
SpectralFrame<Complex> spectral_frame(int rho, int sigma, const SystemEntries& e);
inline SpectralFrame<Complex> spectral_frame(const Problem& p, const SystemEntries& e) {
  return spectral_frame(p.rho, p.sigma, e);
}

Result theta_from_entries(const SystemEntries& e, double c, int rho, int sigma,
                          const Options& opts = {});
Result theta(Complex lambda, Complex mu, const Problem& problem, const Options& opts = {});
Result theta_hat(Complex lambda, Complex mu, const Problem& problem, const Options& opts = {});

// Real value of Theta for real data; throws if the imaginary part is not negligible.
double real_value(const Result& r);

struct EigenPair {
  Complex lambda, mu;
  double residual_theta = 0.0;
  double residual_theta_hat = 0.0;
  int iterations = 0;
};

struct SolveOptions {
  Index n = 5;
  double theta_tol = 1e-13;
  rootfind::SolverOptions solver{1e-9, 1e-14, 50, rootfind::Damping::halving};
};

// Broyden iteration on (Theta, Theta^) from a real seed.
EigenPair solve_pair(double seed_lambda, double seed_mu, const Problem& problem,
                     const SolveOptions& opts = {});

struct Range {
  double lo, hi;
};

struct ScanNode {
  double lambda, mu;
  double theta, theta_hat;  // NaN where the evaluation failed
  bool converged;
  std::string error;
};

struct Seed {
  double lambda, mu;
};

struct ScanGrid {
  std::vector<double> lambdas, mus;
  std::vector<ScanNode> nodes;  // row-major: index = i_lambda * mus.size() + i_mu
  std::vector<Seed> seeds;      // centres of cells where both Theta and Theta^ change sign
  bool all_converged = true;

  const ScanNode& at(std::size_t i_lambda, std::size_t i_mu) const {
    return nodes[i_lambda * mus.size() + i_mu];
  }
};

ScanGrid scan_grid(const Problem& problem, Range lambda, Range mu, int resolution_lambda,
                   int resolution_mu, const Options& opts = {});

// Solves from every seed and merges coincident pairs; failed seeds are dropped.
std::vector<EigenPair> solve_seeds(const std::vector<Seed>& seeds, const Problem& problem,
                                   const SolveOptions& opts = {}, double merge_distance = 1e-6);

// Notation of the form with (k^2, omega^2, H, L).
struct AbramovParameters {
  double k2, omega2, h, l;
};

struct NativeParameters {
  double c;
  double gamma;
  double lambda, mu;
};

NativeParameters from_abramov(const AbramovParameters& a);
AbramovParameters to_abramov(const NativeParameters& n);

// Generalized Heun equation
//   w'' + ((1-nu0)/z + (1-nu1)/(z-1) + (1-nu2)/(z-c) + kappa) w'
//       + (lambda + mu z + gamma z^2) / (z (z-1) (z-c)) w = 0
// as a first-order system in y = (-c w', w).
struct HeunParameters {
  Complex nu0{0.5}, nu1{0.5}, nu2{0.5};
  Complex kappa{0.0};
  Complex c{2.0};
  Complex gamma{0.0};
  Complex lambda{0.0}, mu{0.0};
};

TwoPointSystem<Complex> build_heun_system(const HeunParameters& p);

// Frame selecting w ~ z^nu0 (at_zero = true) or z^0 at 0, and likewise at 1.
SpectralFrame<Complex> heun_frame(const HeunParameters& p, bool at_zero, bool at_one);

Result heun_theta(const HeunParameters& p, bool at_zero, bool at_one, const Options& opts = {});

// ---------------------------------------------------------------------------
// Eigenfunctions
// ---------------------------------------------------------------------------

enum class Piece { at_zero, at_one, at_c };

// Piecewise representation of an eigenfunction on (0, c) from the three
// local series at 0, 1 and c. Coefficients are real (real problems only).
class Eigenfunction {
 public:
  // Value of the matched, scaled eigenfunction; the piece is chosen by z.
  double value(double z) const;
  // Scaled value of one local piece (valid inside its disk).
  double piece_value(Piece piece, double z) const;
  Piece piece_for(double z) const;

  double c() const noexcept { return c_; }
  double radius(Piece piece) const;
  double match_point_01() const noexcept { return z01_; }
  double match_point_12() const noexcept { return z12_; }
  double constant(Piece piece) const;
  double scale() const noexcept { return scale_; }
  int rho() const noexcept { return rho_; }
  int sigma() const noexcept { return sigma_; }
  int tau() const noexcept { return tau_; }
  const std::vector<double>& coefficients(Piece piece) const;

  // Multiplies the whole function by s.
  void rescale(double s) { scale_ *= s; }

 private:
  friend Eigenfunction eigenfunction(const EigenPair&, const Problem&, Index);
  double raw_piece(Piece piece, double z) const;

  double c_ = 2.0;
  int rho_ = 0, sigma_ = 0, tau_ = 0;
  std::vector<double> coef0_, coef1_, coef2_;
  double c0_ = 1.0, c1_ = 1.0, c2_ = 1.0;
  double scale_ = 1.0;
  double r1_ = 1.0;
  double z01_ = 0.5, z12_ = 1.5;
};

// Builds and matches the three pieces for a (refined) eigenpair; C1 = 1.
Eigenfunction eigenfunction(const EigenPair& pair, const Problem& problem, Index n_terms = 2000);

enum class Normalization { sup, integral };

// Double integral over (0,1) x (1,c) of (y - x) w(x)^2 w(y)^2 / |phi(x) phi(y)|^(1/2),
// phi(z) = z (1 - z) (c - z), by a sin^2 substitution and Gauss-Legendre.
double norm_integral(const Eigenfunction& fn, int points = 64);

Eigenfunction normalize(Eigenfunction fn, Normalization mode);

struct ZeroCounts {
  int in_zero_one;
  int in_one_c;
};

ZeroCounts zero_counts(const Eigenfunction& fn, int samples = 2001);

// Sample abscissae used by the sup normalization: 2001 interior points of (0, c).
std::vector<double> sup_grid(double c, int samples = 2001);

}  // namespace conncoef::ellipsoidal
