#pragma once

// Measures on Ω = X × Θ. A holonomic measure integrates every
// Δf(x, θ) = f(τ_θ x) − f(x) to zero.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ifsm/chaos.hpp"
#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"

namespace ifsm {

/// An exact point mass at (x, θ).
struct Atom {
  Point x{0.0, 0.0};
  std::size_t branch = 0;
  double weight = 0.0;
};

/// Weights w(i, θ) on nodes × Θ, stored at i * |Θ| + θ. Measures built from
/// orbits also keep their atoms; the node weights are then the atoms spread
/// by the interpolation stencils.
struct HolonomicMeasure {
  Grid grid;
  std::size_t branches = 0;
  Interpolation interpolation = Interpolation::multilinear;
  std::vector<double> weights;
  std::vector<Atom> atoms;

  double weight(std::size_t node, std::size_t branch) const { return weights[node * branches + branch]; }
  double total_mass() const;
  DiscreteMeasure marginal() const;

  static HolonomicMeasure point_mass(const Grid& grid, std::size_t branches, std::size_t node, std::size_t branch,
                                     Interpolation mode = Interpolation::multilinear);
  /// (1 − t) a + t b. Throws Error{GridMismatch} or Error{InvalidArgument}.
  static HolonomicMeasure mix(const HolonomicMeasure& a, const HolonomicMeasure& b, double t);
};

struct LiftResult {
  HolonomicMeasure measure;
  double invariance_residual = 0.0;  ///< ‖Bᵀν − ν‖₁ for the operator of `spec`
  bool invariant = false;            ///< residual within the supplied tolerance
};

/// w(i, θ) = ν(i) μ(θ) J(x_i, θ). Throws Error{NotNormalized} when q_mass
/// differs from one by more than 1e-8 at some node, Error{InvalidArgument}
/// unless ν is a probability.
LiftResult holonomic_lift(const SystemSpec& spec, const DiscreteMeasure& nu,
                          Interpolation mode = Interpolation::multilinear, double invariance_tol = 1e-8);

/// max_f |∫ Δf dμ̂| with f̃(τ_θ x) interpolated. Atoms are used when present,
/// node weights otherwise. Throws Error{GridMismatch}.
double holonomy_residual(const HolonomicMeasure& m, const SystemSpec& spec,
                         std::span<const DiscreteFunction> test_functions);

/// (1/N) Σ_j δ_(Z_j, θ_j). Throws Error{EmptyOrbit}.
HolonomicMeasure empirical_holonomic(const OrbitRecord& orbit, const Grid& grid, std::size_t branches,
                                     Interpolation mode = Interpolation::multilinear);

struct Disintegration {
  DiscreteMeasure marginal;
  std::size_t branches = 0;
  std::vector<double> conditional;  ///< ν_{x_i}(θ) at i * |Θ| + θ
  std::vector<double> correction;   ///< low-order part: w / ν ≈ conditional + correction
  std::vector<bool> defined;        ///< false where ν(i) = 0

  std::span<const double> at(std::size_t node) const { return {conditional.data() + node * branches, branches}; }
  /// ν(i) ν_{x_i}(θ), zero at undefined nodes.
  std::vector<double> recombine() const;
};

/// Conditionals carry a low-order correction term; recombine() returns the
/// original weights bit for bit.
Disintegration disintegrate(const HolonomicMeasure& m);

}  // namespace ifsm
