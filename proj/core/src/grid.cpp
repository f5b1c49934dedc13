#include "vexp/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "vexp/error.hpp"

namespace vexp {

std::string to_string(GridMode mode) { return mode == GridMode::radial ? "radial" : "tensor"; }

GridMode grid_mode_from_string(const std::string& name) {
  if (name == "radial") return GridMode::radial;
  if (name == "tensor") return GridMode::tensor;
  throw DomainError("unknown grid mode '" + name + "'");
}

double unit_sphere_measure(int dimension) {
  const double n = static_cast<double>(dimension);
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

void Grid::finish() {
  radii_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) radii_[i] = radius(nodes_[i]);
}

namespace {

void build_line_samples(GradientSamples& s, int n, double origin, double h) {
  // Edges between consecutive nodes, including the two edges to the exterior.
  s.components = 1;
  s.inv_h = 1.0 / h;
  for (int e = 0; e <= n; ++e) {
    s.positions.push_back(Point{origin + e * h, 0.0, 0.0});
    s.weights.push_back(h);
    s.taps.push_back({e < n ? e : -1, e > 0 ? e - 1 : -1});
  }
}

}  // namespace

GridPtr build_grid(int dimension, GridMode mode, double truncation, int cells) {
  if (dimension < 1 || dimension > 3) throw DomainError("grid dimension must be 1, 2 or 3");
  if (mode == GridMode::tensor && dimension > 2) {
    throw DomainError("tensor grids support N <= 2 only; use radial mode for N = 3");
  }
  if (!(truncation > 0.0) || !std::isfinite(truncation)) throw DomainError("grid truncation must be > 0");
  if (cells < 16) throw DomainError("grid needs at least 16 cells per axis");

  std::shared_ptr<Grid> g(new Grid());
  g->dimension_ = dimension;
  g->mode_ = mode;
  g->truncation_ = truncation;
  g->cells_ = cells;
  g->omega_ = unit_sphere_measure(dimension);
  const int n = cells;

  if (mode == GridMode::radial) {
    const double h = truncation / n;
    g->spacing_ = h;
    g->origin_ = 0.0;
    const double omega = g->omega_;
    for (int i = 0; i < n; ++i) {
      const double r = (i + 0.5) * h;
      g->nodes_.push_back(Point{r, 0.0, 0.0});
      g->weights_.push_back(omega * std::pow(r, dimension - 1) * h);
    }
    // Edges at r = (i+1) h; the symmetry condition at the origin needs no edge.
    auto& s = g->samples_;
    s.components = 1;
    s.inv_h = 1.0 / h;
    for (int i = 0; i < n; ++i) {
      const double r = (i + 1) * h;
      s.positions.push_back(Point{r, 0.0, 0.0});
      s.weights.push_back(omega * std::pow(r, dimension - 1) * h);
      s.taps.push_back({i + 1 < n ? i + 1 : -1, i});
    }
  } else if (dimension == 1) {
    const double h = 2.0 * truncation / n;
    g->spacing_ = h;
    g->origin_ = -truncation;
    for (int i = 0; i < n; ++i) {
      g->nodes_.push_back(Point{-truncation + (i + 0.5) * h, 0.0, 0.0});
      g->weights_.push_back(h);
    }
    build_line_samples(g->samples_, n, -truncation, h);
  } else {
    const double h = 2.0 * truncation / n;
    g->spacing_ = h;
    g->origin_ = -truncation;
    const double w = h * h;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        g->nodes_.push_back(Point{-truncation + (i + 0.5) * h, -truncation + (j + 0.5) * h, 0.0});
        g->weights_.push_back(w);
      }
    }
    auto idx = [n](int i, int j) { return (i < 0 || j < 0 || i >= n || j >= n) ? -1 : i + n * j; };
    auto& s = g->samples_;
    s.components = 2;
    s.inv_h = 1.0 / h;
    for (int j = -1; j < n; ++j) {
      for (int i = -1; i < n; ++i) {
        const double x0 = -truncation + (i + 0.5) * h;
        const double y0 = -truncation + (j + 0.5) * h;
        const int a = idx(i, j), b = idx(i + 1, j), c = idx(i, j + 1), d = idx(i + 1, j + 1);
        // lower-left triangle (a, b, c)
        if (a >= 0 || b >= 0 || c >= 0) {
          s.positions.push_back(Point{x0 + h / 3.0, y0 + h / 3.0, 0.0});
          s.weights.push_back(w / 2.0);
          s.taps.push_back({b, a});
          s.taps.push_back({c, a});
        }
        // upper-right triangle (d, c, b)
        if (b >= 0 || c >= 0 || d >= 0) {
          s.positions.push_back(Point{x0 + 2.0 * h / 3.0, y0 + 2.0 * h / 3.0, 0.0});
          s.weights.push_back(w / 2.0);
          s.taps.push_back({d, c});
          s.taps.push_back({d, b});
        }
      }
    }
  }
  g->finish();
  return g;
}

GridPtr build_interval_grid(double a, double b, int cells) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("interval grid needs a < b");
  if (cells < 16) throw DomainError("grid needs at least 16 cells per axis");
  std::shared_ptr<Grid> g(new Grid());
  g->dimension_ = 1;
  g->mode_ = GridMode::tensor;
  g->truncation_ = 0.5 * (b - a);
  g->cells_ = cells;
  g->omega_ = unit_sphere_measure(1);
  const double h = (b - a) / cells;
  g->spacing_ = h;
  g->origin_ = a;
  for (int i = 0; i < cells; ++i) {
    g->nodes_.push_back(Point{a + (i + 0.5) * h, 0.0, 0.0});
    g->weights_.push_back(h);
  }
  build_line_samples(g->samples_, cells, a, h);
  g->finish();
  return g;
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("scalar field without a grid");
  if (values_.size() != grid_->size()) throw DomainError("scalar field size does not match grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in scalar field");
  }
}

ScalarField ScalarField::zeros(GridPtr grid) {
  const auto n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, 0.0));
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v;
  v.reserve(grid->size());
  for (const Point& x : grid->nodes()) v.push_back(fn(x));
  return ScalarField(std::move(grid), std::move(v));
}

bool ScalarField::is_zero() const noexcept {
  for (double v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (other.grid_ != grid_) throw DomainError("fields live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (other.grid_ != grid_) throw DomainError("fields live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double integrate(const ScalarField& f) {
  const auto w = f.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * f[i];
  return sum;
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (&a.grid() != &b.grid()) throw DomainError("fields live on different grids");
  const auto w = a.grid().weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

std::vector<Point> gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  const int n = g.cells();
  if (n < 3) throw DomainError("gradient needs at least 3 cells");
  const double h = g.spacing();
  std::vector<Point> out(g.size(), Point{0.0, 0.0, 0.0});

  // Central difference along a line of nodes at stride `stride`; `mirror_low`
  // reflects the first node across the origin (radial symmetry).
  auto line = [&](int base, int stride, int component, bool mirror_low) {
    for (int i = 0; i < n; ++i) {
      const double ui = u[base + i * stride];
      double d;
      if (i == 0) {
        const double right = u[base + stride];
        d = mirror_low ? (right - ui) / (2.0 * h) : (ui - 0.0) / h;
      } else if (i == n - 1) {
        d = (0.0 - ui) / h;
      } else {
        d = (u[base + (i + 1) * stride] - u[base + (i - 1) * stride]) / (2.0 * h);
      }
      out[base + i * stride][component] = d;
    }
  };

  if (g.mode() == GridMode::radial) {
    line(0, 1, 0, true);
  } else if (g.dimension() == 1) {
    line(0, 1, 0, false);
  } else {
    for (int j = 0; j < n; ++j) line(j * n, 1, 0, false);
    for (int i = 0; i < n; ++i) line(i, n, 1, false);
  }
  return out;
}

std::vector<std::array<double, 2>> sample_gradient(const ScalarField& u) {
  const auto& s = u.grid().gradient_samples();
  std::vector<std::array<double, 2>> out(s.size(), {0.0, 0.0});
  const auto vals = u.values();
  for (std::size_t k = 0; k < s.size(); ++k) {
    for (int c = 0; c < s.components; ++c) {
      const auto& t = s.taps[k * s.components + c];
      const double plus = t[0] >= 0 ? vals[t[0]] : 0.0;
      const double minus = t[1] >= 0 ? vals[t[1]] : 0.0;
      out[k][c] = (plus - minus) * s.inv_h;
    }
  }
  return out;
}

SampledExponent sample_exponent(const ExponentField& p, const Grid& grid) {
  if (grid.mode() == GridMode::radial && !p.is_radial()) {
    throw DomainError("radial grids need radially symmetric exponents");
  }
  SampledExponent s;
  const auto nodes = grid.nodes();
  s.at_nodes.reserve(nodes.size());
  s.drift_at_nodes.reserve(nodes.size());
  s.minus = std::numeric_limits<double>::infinity();
  s.plus = -std::numeric_limits<double>::infinity();
  for (const Point& x : nodes) {
    const double v = p(x);
    if (!std::isfinite(v)) throw NumericError("non-finite exponent value on grid");
    s.at_nodes.push_back(v);
    s.drift_at_nodes.push_back(p.radial_drift(x));
    s.minus = std::min(s.minus, v);
    s.plus = std::max(s.plus, v);
  }
  const auto& gs = grid.gradient_samples();
  s.at_samples.reserve(gs.size());
  s.drift_at_samples.reserve(gs.size());
  for (const Point& x : gs.positions) {
    s.at_samples.push_back(p(x));
    s.drift_at_samples.push_back(p.radial_drift(x));
  }
  return s;
}

void write_field_csv(const ScalarField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const Grid& g = f.grid();
  const bool two_d = g.mode() == GridMode::tensor && g.dimension() == 2;
  out << (two_d ? "x,y,value\n" : (g.mode() == GridMode::radial ? "r,value\n" : "x,value\n"));
  char buf[96];
  const auto nodes = g.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (two_d) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", nodes[i][0], nodes[i][1], f[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", nodes[i][0], f[i]);
    }
    out << buf;
  }
}

}  // namespace vexp
