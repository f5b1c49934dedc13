#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vexp/error.hpp"
#include "vexp/functional.hpp"
#include "vexp/grid.hpp"

namespace vexp {

enum class Direction {
  /// Riesz gradient in the metric -Delta + (mu + |x|^k), lagged by the current |grad u|^{p-2}.
  sobolev,
  /// Plain quadrature-L2 gradient.
  l2,
};

std::string to_string(Direction d);

struct SolveConfig {
  double c = 0.05;
  double sigma = 1.0;
  int max_iters = 5000;
  double step0 = 1.0;
  /// Backtracking factor.
  double armijo_beta = 0.5;
  /// Sufficient-decrease constant.
  double armijo_tau = 1e-4;
  double tol_kkt = 1e-8;
  Direction direction = Direction::sobolev;
  /// Shift of the preconditioner.
  double precond_shift = 1.0;
  /// Start field; the trial function when empty.
  std::optional<ScalarField> init;
  bool record_trace = true;
};

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double mass_error = 0.0;
  double step = 0.0;
  double kkt = 0.0;
  double norm_X = 0.0;
};

struct SolveResult {
  ScalarField u;
  double lambda = 0.0;
  double gamma = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  bool converged = false;
  bool on_ball_boundary = false;
  int ball_rejections = 0;
  double norm_X = 0.0;
  double mass_error = 0.0;
  std::string stop_reason;
  std::vector<TraceRow> trace;
};

/// Raised when the energy stops being finite; carries the iterations done so far.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::vector<TraceRow> trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

/// t u with mass(t u) = c.
ScalarField project_to_mass(const ScalarField& u, double c, const SampledExponent& p);
ScalarField project_to_mass(const ScalarField& u, double c, const ExponentField& p);

struct Multiplier {
  double lambda = 0.0;
  /// grad E - lambda g
  ScalarField residual;
};

/// Least-squares multiplier <grad E, g> / <g, g> in the quadrature inner product.
Multiplier recover_multiplier(const ScalarField& u, const Problem& prob);
Multiplier recover_multiplier(const ScalarField& u, const ExponentField& p, const ExponentField& q,
                              double k);

/// ||grad E - lambda g|| / ||grad E||; +inf when grad E = 0 but the residual is not.
double kkt_residual(const ScalarField& u, double lambda, const Problem& prob);
double kkt_residual(const ScalarField& u, double lambda, const ExponentField& p, const ExponentField& q,
                    double k);

/// Projected descent on S(c) with Armijo backtracking; steps leaving B_sigma
/// are rejected. Throws DivergenceError if the energy stops being finite.
SolveResult minimize(const Problem& prob, const SolveConfig& cfg);

}  // namespace vexp
