#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

namespace vexp {

class Grid;

/// A point of R^N stored in three slots; unused trailing coordinates are zero.
using Point = std::array<double, 3>;

inline double radius(const Point& x) noexcept {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

enum class ExponentKind { constant, radial, class_p, custom };

std::string to_string(ExponentKind kind);

/// Open interval an exponent must stay inside. The (p_H) range is (1, N);
/// the nonlinearity exponent q only needs to exceed 1.
struct ExponentRange {
  double lower = 1.0;
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double v) const noexcept { return v > lower && v < upper; }
};

inline ExponentRange sobolev_range(int dimension) {
  return {1.0, static_cast<double>(dimension)};
}

/// Radial profile r -> value with derivative, used as the building block of
/// radial and class-P exponents.
struct RadialProfile {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lipschitz = 0.0;
  /// Radius beyond which the profile is constant (drift vanishes).
  double support_radius = 0.0;
};

/// p(x) == value.
RadialProfile constant_profile(double value);
/// base for r <= r_inner, base + amp for r >= r_outer, quintic smoothstep in between.
RadialProfile plateau_profile(double base, double amp, double r_inner, double r_outer);
/// base + amp * (1 - (r/width)^2)^3 for r < width, base beyond.
RadialProfile bump_profile(double base, double amp, double width);

/// Parameters recorded for an exponent of the cutoff class P(r0).
struct ClassPData {
  double p0 = 0.0;
  double r0 = 0.0;
  /// sup |eta'| * r0 for the quintic cutoff.
  double cutoff_constant = 0.0;
  /// Sampled sup |x . grad p| over the annulus r0 < |x| < 2 r0.
  double drift_bound = 0.0;
};

/// A variable exponent p(x) together with its radial drift x . grad p(x).
/// Immutable after construction and cheap to copy.
class ExponentField {
 public:
  using PointFn = std::function<double(const Point&)>;

  ExponentField(ExponentKind kind, PointFn value, PointFn radial_drift, double lipschitz_bound,
                bool is_radial, std::optional<ClassPData> class_p = std::nullopt);

  double operator()(const Point& x) const { return value_(x); }
  double evaluate(const Point& x) const { return value_(x); }
  double radial_drift(const Point& x) const { return drift_(x); }

  double lipschitz_bound() const noexcept { return lipschitz_; }
  ExponentKind kind() const noexcept { return kind_; }
  bool is_radial() const noexcept { return radial_; }
  const std::optional<ClassPData>& class_p() const noexcept { return class_p_; }

 private:
  ExponentKind kind_;
  PointFn value_;
  PointFn drift_;
  double lipschitz_;
  bool radial_;
  std::optional<ClassPData> class_p_;
};

ExponentField make_constant_exponent(double p0, ExponentRange range = {});

ExponentField make_radial_exponent(const RadialProfile& profile, ExponentRange range = {});

/// Blend p~(x) = (1 - eta(|x|)) p0 + eta(|x|) inner(x) with the quintic cutoff
/// eta = 0 on [0, r0], eta = 1 on [2 r0, inf). The inner exponent must have
/// zero radial drift for |x| >= 2 r0.
ExponentField make_class_P_exponent(double p0, const ExponentField& inner, double r0,
                                    ExponentRange range = {});

/// Arbitrary exponent; the caller supplies the drift. Used for piecewise and
/// non-radial exponents in tests.
ExponentField make_custom_exponent(ExponentField::PointFn value, ExponentField::PointFn drift,
                                   double lipschitz_bound, bool is_radial);

/// Quintic smoothstep cutoff on [r0, 2 r0] and its derivative.
double cutoff(double r, double r0) noexcept;
double cutoff_derivative(double r, double r0) noexcept;
inline constexpr double kCutoffConstant = 1.875;

/// Extrema and hypothesis flags of an exponent pair on a grid.
struct AdmissibilityReport {
  int dimension = 0;
  double k = 0.0;
  double p_minus = 0.0;
  double p_plus = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  /// inf over nodes of p*(x) - q(x); +inf when p(x) >= N at every node.
  double sobolev_gap = 0.0;
  bool k_positive = false;
  bool q_above_p = false;
  bool cond_pH = false;
  bool cond_qH = false;
  bool cond_q1 = false;
  bool cond_q2 = false;
  double threshold_q1 = 0.0;  // p+ + (p+)^2 / N
  double threshold_q2 = 0.0;  // 2p+ - p- + p+ p- / N
};

AdmissibilityReport check_admissibility(const ExponentField& p, const ExponentField& q, int dimension,
                                        double k, const Grid& grid);

}  // namespace vexp
