#include "ifsm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace ifsm {

std::string_view to_string(Interpolation mode) noexcept {
  return mode == Interpolation::nearest ? "nearest" : "multilinear";
}

Interpolation parse_interpolation(std::string_view text) {
  if (text == "nearest") return Interpolation::nearest;
  if (text == "multilinear") return Interpolation::multilinear;
  throw Error(ErrorCode::InvalidArgument, "unknown interpolation mode '" + std::string(text) + "'");
}

Grid::Grid(DomainBox box, std::array<int, 2> nodes_per_axis) : box_(box) {
  size_ = 1;
  for (int a = 0; a < 2; ++a) {
    if (a < box_.dimension) {
      if (nodes_per_axis[a] < 2) throw Error(ErrorCode::InvalidArgument, "a grid axis needs at least 2 nodes");
      counts_[a] = nodes_per_axis[a];
    } else {
      counts_[a] = 1;
    }
    size_ *= static_cast<std::size_t>(counts_[a]);
  }
}

Grid::Grid(DomainBox box, int nodes_per_axis) : Grid(box, {nodes_per_axis, nodes_per_axis}) {}

double Grid::spacing(int axis) const { return box_.extent(axis) / static_cast<double>(counts_[axis] - 1); }

double Grid::coordinate(int axis, int k) const {
  if (k + 1 == counts_[axis]) return box_.upper[axis];
  return box_.lower[axis] + box_.extent(axis) * static_cast<double>(k) / static_cast<double>(counts_[axis] - 1);
}

Point Grid::node(std::size_t index) const {
  const int nx = counts_[0];
  const int ix = static_cast<int>(index % static_cast<std::size_t>(nx));
  const int iy = static_cast<int>(index / static_cast<std::size_t>(nx));
  return {coordinate(0, ix), box_.dimension == 2 ? coordinate(1, iy) : 0.0};
}

namespace {

struct AxisStencil {
  int node[2] = {0, 0};
  double weight[2] = {1.0, 0.0};
  int count = 1;
};

AxisStencil axis_stencil(double coord, double lower, double extent, int n, Interpolation mode) {
  double t = (coord - lower) / extent * static_cast<double>(n - 1);
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  AxisStencil s;
  if (mode == Interpolation::nearest) {
    // ties go to the lower node
    const double c = std::ceil(t - 0.5);
    s.node[0] = std::clamp(static_cast<int>(c), 0, n - 1);
    return s;
  }
  int k = static_cast<int>(std::floor(t));
  if (k >= n - 1) k = n - 2;
  const double f = t - static_cast<double>(k);
  if (f == 0.0) {
    s.node[0] = k;
    return s;
  }
  if (f == 1.0) {
    s.node[0] = k + 1;
    return s;
  }
  s.node[0] = k;
  s.node[1] = k + 1;
  s.weight[0] = 1.0 - f;
  s.weight[1] = f;
  s.count = 2;
  return s;
}

}  // namespace

Stencil Grid::stencil(const Point& p, Interpolation mode) const {
  const AxisStencil sx = axis_stencil(p[0], box_.lower[0], box_.extent(0), counts_[0], mode);
  Stencil out;
  if (box_.dimension == 1) {
    for (int i = 0; i < sx.count; ++i) {
      out.node[out.count] = static_cast<std::size_t>(sx.node[i]);
      out.weight[out.count] = sx.weight[i];
      ++out.count;
    }
    return out;
  }
  const AxisStencil sy = axis_stencil(p[1], box_.lower[1], box_.extent(1), counts_[1], mode);
  const std::size_t nx = static_cast<std::size_t>(counts_[0]);
  for (int j = 0; j < sy.count; ++j) {
    for (int i = 0; i < sx.count; ++i) {
      out.node[out.count] = static_cast<std::size_t>(sx.node[i]) + nx * static_cast<std::size_t>(sy.node[j]);
      out.weight[out.count] = sx.weight[i] * sy.weight[j];
      ++out.count;
    }
  }
  return out;
}

double interpolate(const Grid& grid, std::span<const double> values, const Point& p, Interpolation mode) {
  const Stencil s = grid.stencil(p, mode);
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) v += s.weight[k] * values[s.node[k]];
  return v;
}

DiscreteFunction::DiscreteFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "value count differs from node count");
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite function value");
  }
}

DiscreteFunction DiscreteFunction::constant(const Grid& g, double c) {
  return DiscreteFunction(g, std::vector<double>(g.size(), c));
}

double DiscreteFunction::sup_norm() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double DiscreteFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double DiscreteFunction::max() const { return *std::max_element(values.begin(), values.end()); }

DiscreteMeasure::DiscreteMeasure(Grid g, std::vector<double> w) : grid(std::move(g)), weights(std::move(w)) {
  if (weights.size() != grid.size()) throw Error(ErrorCode::GridMismatch, "weight count differs from node count");
  for (double x : weights) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "measure weights must be >= 0");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(const Grid& g) {
  return DiscreteMeasure(g, std::vector<double>(g.size(), 1.0 / static_cast<double>(g.size())));
}

DiscreteMeasure DiscreteMeasure::point_mass(const Grid& g, std::size_t node) {
  std::vector<double> w(g.size(), 0.0);
  w.at(node) = 1.0;
  return DiscreteMeasure(g, std::move(w));
}

double DiscreteMeasure::mass() const {
  double m = 0.0;
  for (double x : weights) m += x;
  return m;
}

DiscreteMeasure DiscreteMeasure::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero measure");
  std::vector<double> w(weights);
  for (double& x : w) x /= m;
  return DiscreteMeasure(grid, std::move(w));
}

double DiscreteMeasure::integrate(const DiscreteFunction& f) const {
  require_same_grid(grid, f.grid, "integrate");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * f.values[i];
  return s;
}

void require_same_grid(const Grid& a, const Grid& b, std::string_view what) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, std::string(what) + ": grids differ");
}

Potential log_tabulated_potential(const DiscreteFunction& log_values, Interpolation mode) {
  auto data = std::make_shared<const DiscreteFunction>(log_values);
  return Potential::from_function(
      [data, mode](const Point& x) { return std::exp(interpolate(data->grid, data->values, x, mode)); },
      "exp(tabulated)");
}

}  // namespace ifsm
