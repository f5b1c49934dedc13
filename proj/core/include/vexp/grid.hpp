#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vexp/exponents.hpp"

namespace vexp {

enum class GridMode { radial, tensor };

std::string to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& name);

/// Points where the discrete gradient lives. Each sample has up to two
/// components; component c of sample s is (u[plus] - u[minus]) / h with the
/// convention that index -1 reads the zero exterior value.
///
/// Tensor N=1 and radial grids use staggered (edge midpoint) differences;
/// tensor N=2 splits every dual cell into two P1 triangles. With p == 2 the
/// resulting stiffness is the usual 3-point / 5-point Laplacian.
struct GradientSamples {
  int components = 1;
  std::vector<Point> positions;
  std::vector<double> weights;
  /// taps[s * components + c] = {plus, minus}
  std::vector<std::array<int, 2>> taps;
  double inv_h = 0.0;

  std::size_t size() const noexcept { return positions.size(); }
};

/// Truncated quadrature grid. Radial grids store radii along the first axis
/// with measure omega_N r^{N-1} h; tensor grids are uniform cell-centred
/// lattices on a box. Exterior values are zero.
class Grid {
 public:
  int dimension() const noexcept { return dimension_; }
  GridMode mode() const noexcept { return mode_; }
  /// Half-width of the box (tensor) or outer radius (radial).
  double truncation() const noexcept { return truncation_; }
  double spacing() const noexcept { return spacing_; }
  /// Surface measure of S^{N-1}.
  double omega() const noexcept { return omega_; }
  /// Cells per axis.
  int cells() const noexcept { return cells_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const Point> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// |x| per node.
  std::span<const double> radii() const noexcept { return radii_; }
  const GradientSamples& gradient_samples() const noexcept { return samples_; }

  /// Lower corner of the box along each axis (tensor mode).
  double origin() const noexcept { return origin_; }

  friend std::shared_ptr<const Grid> build_grid(int, GridMode, double, int);
  friend std::shared_ptr<const Grid> build_interval_grid(double, double, int);

 private:
  Grid() = default;
  void finish();

  int dimension_ = 0;
  GridMode mode_ = GridMode::tensor;
  double truncation_ = 0.0;
  double spacing_ = 0.0;
  double omega_ = 0.0;
  double origin_ = 0.0;
  int cells_ = 0;
  std::vector<Point> nodes_;
  std::vector<double> weights_;
  std::vector<double> radii_;
  GradientSamples samples_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Surface measure of the unit sphere 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_measure(int dimension);

/// N in {1,2,3}; tensor requires N <= 2; L > 0; n >= 16.
GridPtr build_grid(int dimension, GridMode mode, double truncation, int cells);

/// One-dimensional tensor grid on (a, b).
GridPtr build_interval_grid(double a, double b, int cells);

/// Node values of a function on a grid.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);
  static ScalarField zeros(GridPtr grid);
  static ScalarField sample(GridPtr grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool is_zero() const noexcept;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s) noexcept;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Quadrature sum of weights times values.
double integrate(const ScalarField& f);

/// Quadrature inner product sum w_i a_i b_i.
double inner(const ScalarField& a, const ScalarField& b);

/// Quadrature L2 norm.
double l2_norm(const ScalarField& f);

/// Central-difference gradient at every node. Radial grids return (U'(r), 0, 0)
/// with the mirror condition at the origin; tensor grids fall back to one-sided
/// differences against the zero exterior at the truncation boundary.
std::vector<Point> gradient(const ScalarField& u);

/// Discrete gradient at the grid's gradient samples (the one the energy uses).
std::vector<std::array<double, 2>> sample_gradient(const ScalarField& u);

/// Exponent values and drifts cached at nodes and gradient samples.
struct SampledExponent {
  std::vector<double> at_nodes;
  std::vector<double> drift_at_nodes;
  std::vector<double> at_samples;
  std::vector<double> drift_at_samples;
  double minus = 0.0;
  double plus = 0.0;
};

SampledExponent sample_exponent(const ExponentField& p, const Grid& grid);

/// Writes "coordinate(s),value" rows, one per node.
void write_field_csv(const ScalarField& f, const std::string& path);

}  // namespace vexp
