#include "vexp/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vexp/error.hpp"
#include "vexp/grid.hpp"

namespace vexp {

namespace {

double smoothstep5(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_derivative(double s) noexcept {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double t = s * (1.0 - s);
  return 30.0 * t * t;
}

void require_in_range(double v, const ExponentRange& range, const char* what) {
  if (!std::isfinite(v) || !range.contains(v)) {
    std::ostringstream msg;
    msg << what << " value " << v << " outside (" << range.lower << ", " << range.upper << ")";
    throw DomainError(msg.str());
  }
}

// Radii used to probe profiles and blended exponents for range and drift checks.
std::vector<double> probe_radii(double r_max, int count) {
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) r[i] = r_max * (i + 0.5) / count;
  return r;
}

}  // namespace

std::string to_string(ExponentKind kind) {
  switch (kind) {
    case ExponentKind::constant: return "constant";
    case ExponentKind::radial: return "radial";
    case ExponentKind::class_p: return "class_P";
    case ExponentKind::custom: return "custom";
  }
  return "unknown";
}

double cutoff(double r, double r0) noexcept { return smoothstep5((r - r0) / r0); }

double cutoff_derivative(double r, double r0) noexcept {
  return smoothstep5_derivative((r - r0) / r0) / r0;
}

RadialProfile constant_profile(double value) {
  return {"constant", [value](double) { return value; }, [](double) { return 0.0; }, 0.0, 0.0};
}

RadialProfile plateau_profile(double base, double amp, double r_inner, double r_outer) {
  if (!(r_inner >= 0.0 && r_outer > r_inner)) {
    throw DomainError("plateau profile needs 0 <= r_inner < r_outer");
  }
  const double width = r_outer - r_inner;
  RadialProfile p;
  p.name = "plateau";
  p.value = [=](double r) { return base + amp * smoothstep5((r - r_inner) / width); };
  p.derivative = [=](double r) { return amp * smoothstep5_derivative((r - r_inner) / width) / width; };
  p.lipschitz = std::abs(amp) * kCutoffConstant / width;
  p.support_radius = r_outer;
  return p;
}

RadialProfile bump_profile(double base, double amp, double width) {
  if (!(width > 0.0)) throw DomainError("bump profile needs width > 0");
  RadialProfile p;
  p.name = "radial-bump";
  p.value = [=](double r) {
    const double s = r / width;
    if (s >= 1.0) return base;
    const double t = 1.0 - s * s;
    return base + amp * t * t * t;
  };
  p.derivative = [=](double r) {
    const double s = r / width;
    if (s >= 1.0) return 0.0;
    const double t = 1.0 - s * s;
    return amp * 3.0 * t * t * (-2.0 * s) / width;
  };
  // max of |6 s (1 - s^2)^2| on [0,1] is at s = 1/sqrt(5)
  const double s = 1.0 / std::sqrt(5.0);
  p.lipschitz = std::abs(amp) * 6.0 * s * (1.0 - s * s) * (1.0 - s * s) / width;
  p.support_radius = width;
  return p;
}

ExponentField::ExponentField(ExponentKind kind, PointFn value, PointFn radial_drift,
                             double lipschitz_bound, bool is_radial,
                             std::optional<ClassPData> class_p)
    : kind_(kind),
      value_(std::move(value)),
      drift_(std::move(radial_drift)),
      lipschitz_(lipschitz_bound),
      radial_(is_radial),
      class_p_(class_p) {}

ExponentField make_constant_exponent(double p0, ExponentRange range) {
  require_in_range(p0, range, "constant exponent");
  return ExponentField(
      ExponentKind::constant, [p0](const Point&) { return p0; }, [](const Point&) { return 0.0; },
      0.0, true);
}

ExponentField make_radial_exponent(const RadialProfile& profile, ExponentRange range) {
  const double r_max = std::max(1.0, 2.0 * profile.support_radius);
  for (double r : probe_radii(r_max, 512)) require_in_range(profile.value(r), range, "radial exponent");
  auto value = profile.value;
  auto derivative = profile.derivative;
  return ExponentField(
      ExponentKind::radial, [value](const Point& x) { return value(radius(x)); },
      [derivative](const Point& x) {
        const double r = radius(x);
        return r * derivative(r);
      },
      profile.lipschitz, true);
}

ExponentField make_class_P_exponent(double p0, const ExponentField& inner, double r0,
                                    ExponentRange range) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("class P exponent needs r0 > 0");
  require_in_range(p0, range, "class P base exponent");

  // The inner exponent must be radially constant beyond 2 r0. Probe along the
  // coordinate axes and the diagonal.
  const std::array<Point, 4> directions = {Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1},
                                           Point{1 / std::sqrt(3.0), 1 / std::sqrt(3.0), 1 / std::sqrt(3.0)}};
  for (const auto& d : directions) {
    for (double r : probe_radii(8.0 * r0 + 4.0, 256)) {
      const double rr = 2.0 * r0 + r;
      const Point x{rr * d[0], rr * d[1], rr * d[2]};
      if (std::abs(inner.radial_drift(x)) > 1e-12) {
        throw DomainError("inner exponent has nonzero radial drift beyond 2 r0");
      }
    }
  }

  auto value = [p0, inner, r0](const Point& x) {
    const double eta = cutoff(radius(x), r0);
    if (eta == 0.0) return p0;
    if (eta == 1.0) return inner(x);
    return (1.0 - eta) * p0 + eta * inner(x);
  };
  auto drift = [p0, inner, r0](const Point& x) {
    const double r = radius(x);
    const double eta = cutoff(r, r0);
    if (eta == 0.0) return 0.0;
    const double blend = r * cutoff_derivative(r, r0) * (inner(x) - p0);
    return blend + eta * inner.radial_drift(x);
  };

  ClassPData data{p0, r0, kCutoffConstant, 0.0};
  double max_gap = 0.0;
  for (const auto& d : directions) {
    for (double r : probe_radii(r0, 256)) {
      const double rr = r0 + r;
      const Point x{rr * d[0], rr * d[1], rr * d[2]};
      data.drift_bound = std::max(data.drift_bound, std::abs(drift(x)));
      max_gap = std::max(max_gap, std::abs(inner(x) - p0));
    }
    for (double r : probe_radii(8.0 * r0 + 4.0, 512)) {
      const Point x{r * d[0], r * d[1], r * d[2]};
      require_in_range(value(x), range, "class P exponent");
    }
  }
  const double lipschitz = kCutoffConstant / r0 * max_gap + inner.lipschitz_bound();
  return ExponentField(ExponentKind::class_p, value, drift, lipschitz, inner.is_radial(), data);
}

ExponentField make_custom_exponent(ExponentField::PointFn value, ExponentField::PointFn drift,
                                   double lipschitz_bound, bool is_radial) {
  return ExponentField(ExponentKind::custom, std::move(value), std::move(drift), lipschitz_bound,
                       is_radial);
}

AdmissibilityReport check_admissibility(const ExponentField& p, const ExponentField& q, int dimension,
                                        double k, const Grid& grid) {
  if (grid.size() == 0) throw DomainError("admissibility check on an empty grid");
  AdmissibilityReport rep;
  rep.dimension = dimension;
  rep.k = k;
  rep.k_positive = k > 0.0;
  rep.p_minus = rep.q_minus = std::numeric_limits<double>::infinity();
  rep.p_plus = rep.q_plus = -std::numeric_limits<double>::infinity();
  rep.sobolev_gap = std::numeric_limits<double>::infinity();
  rep.q_above_p = true;

  const double n = static_cast<double>(dimension);
  for (const Point& x : grid.nodes()) {
    const double pv = p(x);
    const double qv = q(x);
    if (!std::isfinite(pv) || !std::isfinite(qv)) throw NumericError("non-finite exponent value on grid");
    rep.p_minus = std::min(rep.p_minus, pv);
    rep.p_plus = std::max(rep.p_plus, pv);
    rep.q_minus = std::min(rep.q_minus, qv);
    rep.q_plus = std::max(rep.q_plus, qv);
    if (!(qv > pv)) rep.q_above_p = false;
    if (pv < n) rep.sobolev_gap = std::min(rep.sobolev_gap, n * pv / (n - pv) - qv);
  }

  const double pp = rep.p_plus;
  const double pm = rep.p_minus;
  rep.threshold_q1 = pp + pp * pp / n;
  rep.threshold_q2 = 2.0 * pp - pm + pp * pm / n;
  rep.cond_pH = pm > 1.0 && pp < n;
  rep.cond_qH = rep.q_above_p && rep.sobolev_gap > 0.0;
  rep.cond_q1 = rep.q_minus > rep.threshold_q1 && rep.sobolev_gap > 0.0;
  rep.cond_q2 = rep.q_minus > rep.threshold_q2 && rep.sobolev_gap > 0.0;
  return rep;
}

}  // namespace vexp
