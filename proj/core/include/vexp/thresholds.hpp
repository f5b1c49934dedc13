#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vexp/exponents.hpp"
#include "vexp/grid.hpp"

namespace vexp {

/// G(a) = int a^{p}/p e^{-pi p |x|^2 / p+} dx on the grid.
double trial_mass(double a, const ExponentField& p, const Grid& grid);

struct TrialFunction {
  double a = 0.0;
  ScalarField phi;
};

/// phi_c = a(c) e^{-pi |x|^2 / p+} with G(a(c)) = c.
TrialFunction trial_function(double c, const ExponentField& p, const GridPtr& grid);

/// The unique t > 0 with mass(t u) = c.
double mass_scale_root(const ScalarField& u, double c, const SampledExponent& p);
double mass_scale_root(const ScalarField& u, double c, const ExponentField& p);

struct GaussianConstants {
  double p_minus = 0.0;
  double p_plus = 0.0;
  int dimension = 0;
  double k = 0.0;
  /// Printed closed form (2pi/p+)^{p+} w_N pi^{-(N+p+)/2} (p+/p-)^{-(N+p+)/2} Gamma((N+p+)/2).
  double closed_form = 0.0;
  /// int |x|^{p+} e^{-pi p- |x|^2 / p+} dx by quadrature.
  double moment_p_plus = 0.0;
  /// (2pi/p+)^{p+} * moment_p_plus: what the gradient bound actually needs.
  double direct_c1 = 0.0;
  /// int |x|^k e^{-pi p- |x|^2 / p+} dx by quadrature: what the weighted bound needs.
  double direct_c2 = 0.0;
  /// Constants used downstream: the larger of the printed and direct values.
  double const_c1 = 0.0;
  double const_c2 = 0.0;
  /// True when the printed constant does not dominate the k-moment.
  bool c2_bound_warning = false;
};

GaussianConstants gaussian_bound_constants(double p_minus, double p_plus, int dimension, double k);
GaussianConstants gaussian_bound_constants(const ExponentField& p, const Grid& grid, double k);

/// min{1/p+, (1/p+)(s^{p+}/(c1+c2))^{p+/p-}, (1/p+)(s^{p-}/(c1+c2))^{p+/p-}}
double threshold_c1(double sigma, double p_minus, double p_plus, double c1_plus_c2);

struct SeparationRadii {
  double a1 = 0.0;
  double a2 = 0.0;
  /// (a2 s)^{p-}/p+ - (a1 s)^{p+}/p-
  double bracket_c3 = 0.0;
  /// (a2 s)^{p+}/p+ - (a1 s)^{p-}/p-
  double bracket_c4 = 0.0;
};

SeparationRadii choose_a1_a2(double sigma, double p_minus, double p_plus);

struct GNConstants {
  double alpha = 0.0;
  /// Max GN ratio over the probe family.
  double k_alpha = 0.0;
  double min_ratio = 0.0;
  /// max(K^{q+}, K^{q-}), used for both K' and K''.
  double k_prime = 0.0;
  double k_double_prime = 0.0;
  int members = 0;
};

/// Largest GN ratio over a seeded family of Gaussian mixtures.
GNConstants estimate_gn_constant(const ExponentField& p, const ExponentField& q, const GridPtr& grid,
                                 std::uint64_t seed, int members = 200);

struct ThresholdReport {
  GaussianConstants constants;
  double sigma = 0.0;
  double p_minus = 0.0, p_plus = 0.0, q_minus = 0.0, q_plus = 0.0;
  double alpha_used = 0.0;
  double k_prime = 0.0;
  double k_double_prime = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double bracket_c3 = 0.0, bracket_c4 = 0.0;
  double c1_sigma = 0.0, c2_sigma = 0.0, c3_sigma = 0.0, c4_sigma = 0.0, c0 = 0.0;
  std::vector<std::string> notes;
};

/// c0 = 0.99 min{c2, c3, c4}. Throws ConfigError when a separation bracket is
/// not positive or alpha leaves (0, 1).
ThresholdReport threshold_c0(double sigma, const ExponentField& p, const ExponentField& q,
                             const Grid& grid, double k, double k_prime, double k_double_prime);

/// Energy envelopes E(phi_c) <= ... used to bound rho_X(u_c) as c -> 0.
struct DecayEnvelopes {
  double printed = 0.0;  ///< (c p+)^{p-} (c1 + c2)
  double chain = 0.0;    ///< (c p+)^{p-/p+} (c1 + c2)
  double looser() const noexcept { return printed > chain ? printed : chain; }
};

DecayEnvelopes decay_envelopes(double c, double p_minus, double p_plus, double c1_plus_c2);

}  // namespace vexp
