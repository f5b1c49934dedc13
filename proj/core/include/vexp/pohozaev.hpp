#pragma once

#include <vector>

#include "vexp/functional.hpp"
#include "vexp/grid.hpp"

namespace vexp {

inline constexpr double kLogClamp = 1e-14;

struct Remainder {
  double R = 0.0;
  /// int (ln|u| - 1/p) |u|^p (x.grad p)/p
  double R1 = 0.0;
  /// int (ln|u| - 1/q) |u|^q (x.grad q)/q
  double R2 = 0.0;
  /// int (ln|u| - 1/p) |u|^p |x|^k (x.grad p)/p
  double R3 = 0.0;
  /// int (ln|grad u| - 1/p) |grad u|^p (x.grad p)/p
  double R4 = 0.0;
};

/// Terms of the variable-exponent Pohozaev identity
///   lhs_grad + lhs_confine - lhs_mass
///     = rhs_q_log + rhs_q_vol - rhs_p_log_grad - rhs_p_log_confine + rhs_p_log_mass
/// with R = lambda R1 + R2 - R4 - R3 collecting every drift term.
struct PohozaevReport {
  double lambda = 0.0;
  double lhs_grad = 0.0;     ///< int (N-p)/p |grad u|^p
  double lhs_confine = 0.0;  ///< int (N+k)/p |x|^k |u|^p
  double lhs_mass = 0.0;     ///< N lambda int |u|^p / p
  double rhs_q_log = 0.0;    ///< R2
  double rhs_q_vol = 0.0;    ///< N int |u|^q / q
  double rhs_p_log_grad = 0.0;
  double rhs_p_log_confine = 0.0;
  double rhs_p_log_mass = 0.0;  ///< lambda R1
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< lhs - rhs
  double relative_residual = 0.0;  ///< |lhs - rhs| / largest term magnitude
  Remainder remainder;
  /// int |grad u|^p - lambda int |u|^p - int |u|^q + int |x|^k |u|^p, and relative to the largest term.
  double weak_form_residual = 0.0;
  double weak_form_relative = 0.0;
  double log_clamp = kLogClamp;
};

PohozaevReport pohozaev_terms(const ScalarField& u, double lambda, const Problem& prob,
                              double log_clamp = kLogClamp);
PohozaevReport pohozaev_terms(const ScalarField& u, double lambda, const ExponentField& p,
                              const ExponentField& q, double k, double log_clamp = kLogClamp);

Remainder remainder_R(const ScalarField& u, double lambda, const Problem& prob, double log_clamp = kLogClamp);
Remainder remainder_R(const ScalarField& u, double lambda, const ExponentField& p, const ExponentField& q,
                      double k, double log_clamp = kLogClamp);

/// Lower bound on E(u_c) from the identity:
///   E >= bracket rho_X - |R| p- / (N (q- - p-)),
///   bracket = 1/p+ - (N(p+ - p-) + p+ p-)/(N p+ (q- - p-)) - (p+ - p-)/(p+ (q- - p-)).
struct PositivityCheck {
  double bracket = 0.0;
  double rho_X = 0.0;
  double remainder_term = 0.0;
  double bound = 0.0;
  double energy = 0.0;
  double margin = 0.0;  ///< energy - bound
};

PositivityCheck positivity_check(double energy, double rho_X, double R, double p_minus, double p_plus,
                                 double q_minus, int dimension);

struct AnnulusSup {
  double r_inner = 0.0;
  double r_outer = 0.0;
  double sup_abs = 0.0;
};

struct RegularityReport {
  std::vector<AnnulusSup> annuli;
  /// Fitted exponent in sup |grad u(x) - grad u(y)| ~ H |x - y|^alpha.
  double alpha_hat = 0.0;
  double holder_constant = 0.0;
  double r_squared = 0.0;
  int pairs = 0;
  std::vector<double> distances;
  std::vector<double> sup_differences;
  /// All gradient differences vanish; alpha_hat is meaningless.
  bool degenerate = false;
};

/// Sup norms on 8 concentric annuli and a log-log Holder fit of the
/// staggered derivative over pairs m h apart (m = 2..8) inside |x| <= L/2.
RegularityReport regularity_diagnostics(const ScalarField& u, int annuli = 8);

}  // namespace vexp
