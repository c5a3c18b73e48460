#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conncoef {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigen data of the frame do not match the system, or assumption (b) fails.
class FrameMismatch : public Error {
 public:
  using Error::Error;
};

// A0 - k I is numerically singular at some step.
class SingularStep : public Error {
 public:
  SingularStep(std::string what, long k) : Error(std::move(what)), k_(k) {}
  long step() const noexcept { return k_; }

 private:
  long k_;
};

// b1 and p_k are (numerically) parallel; no weight vector exists for this k.
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

class InvalidSystem : public Error {
 public:
  using Error::Error;
};

class InvalidExponent : public Error {
 public:
  using Error::Error;
};

class InvalidProblem : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

// Iteration limit hit. Carries the best iterate seen and the residual history.
class NoConvergence : public Error {
 public:
  NoConvergence(std::string what, std::vector<double> best, double best_residual,
                std::vector<double> trace)
      : Error(std::move(what)),
        best_(std::move(best)),
        best_residual_(best_residual),
        trace_(std::move(trace)) {}

  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double best_residual() const noexcept { return best_residual_; }
  const std::vector<double>& residual_trace() const noexcept { return trace_; }

 private:
  std::vector<double> best_;
  double best_residual_;
  std::vector<double> trace_;
};

class MatchFailure : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class ScanExhausted : public Error {
 public:
  using Error::Error;
};

class ParityAmbiguous : public Error {
 public:
  using Error::Error;
};

}  // namespace conncoef
