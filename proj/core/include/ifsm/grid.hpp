#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ifsm/model.hpp"

namespace ifsm {

enum class Interpolation { nearest, multilinear };

std::string_view to_string(Interpolation mode) noexcept;
/// Accepts "nearest" and "multilinear". Throws Error{InvalidArgument}.
Interpolation parse_interpolation(std::string_view text);

/// Interpolation coefficients of one point: up to 2^d (node, weight) pairs
/// with nonnegative weights summing to one. Zero weights are dropped.
struct Stencil {
  std::array<std::size_t, 4> node{};
  std::array<double, 4> weight{};
  int count = 0;
};

/// Tensor product of uniform subdivisions of the box, endpoints included.
/// Node (ix, iy) has flat index ix + nx * iy.
class Grid {
 public:
  /// Throws Error{InvalidArgument} for fewer than two nodes on an axis.
  Grid(DomainBox box, std::array<int, 2> nodes_per_axis);
  /// Same node count on every axis of the box.
  Grid(DomainBox box, int nodes_per_axis);

  const DomainBox& box() const { return box_; }
  int dimension() const { return box_.dimension; }
  int nodes(int axis) const { return counts_[axis]; }
  std::size_t size() const { return size_; }
  double spacing(int axis) const;

  Point node(std::size_t index) const;
  double coordinate(int axis, int k) const;

  /// Nearest mode breaks ties toward the lower node. Points are clamped to
  /// the box first.
  Stencil stencil(const Point& p, Interpolation mode) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.box_ == b.box_ && a.counts_ == b.counts_; }

 private:
  DomainBox box_;
  std::array<int, 2> counts_{1, 1};
  std::size_t size_ = 0;
};

/// Value of the piecewise interpolant of nodal `values` at `p`.
double interpolate(const Grid& grid, std::span<const double> values, const Point& p, Interpolation mode);

/// A function sampled at the grid nodes.
struct DiscreteFunction {
  Grid grid;
  std::vector<double> values;

  DiscreteFunction(Grid g, std::vector<double> v);
  static DiscreteFunction constant(const Grid& g, double c);
  template <class F>
  static DiscreteFunction sample(const Grid& g, F&& f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.node(i));
    return DiscreteFunction(g, std::move(v));
  }

  double sup_norm() const;
  double min() const;
  double max() const;
};

/// Nonnegative weights on the grid nodes.
struct DiscreteMeasure {
  Grid grid;
  std::vector<double> weights;

  /// Throws Error{InvalidArgument} for negative or non-finite weights.
  DiscreteMeasure(Grid g, std::vector<double> w);
  static DiscreteMeasure uniform(const Grid& g);
  static DiscreteMeasure point_mass(const Grid& g, std::size_t node);

  double mass() const;
  bool is_probability(double tol = 1e-12) const { return std::abs(mass() - 1.0) <= tol; }
  DiscreteMeasure normalized() const;
  /// Σ_i f(x_i) w_i. Throws Error{GridMismatch}.
  double integrate(const DiscreteFunction& f) const;
};

/// Throws Error{GridMismatch} unless the grids are identical.
void require_same_grid(const Grid& a, const Grid& b, std::string_view what);

/// ψ(x) = exp(φ̃(x)) where φ̃ interpolates the nodal log-values.
Potential log_tabulated_potential(const DiscreteFunction& log_values, Interpolation mode);

}  // namespace ifsm
