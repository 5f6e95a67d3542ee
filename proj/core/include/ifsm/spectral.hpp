#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"
#include "ifsm/transfer.hpp"

namespace ifsm {

/// One row of the Gelfand table for B^N(1).
struct GelfandPoint {
  int n = 0;
  double estimate = 0.0;  ///< (1/N) ln max_i B^N(1)(x_i)
  double spread = 0.0;    ///< (1/N) (ln max_i − ln min_i) B^N(1)(x_i)
};

/// Iterates B on the constant function with renormalization at every step. Throws Error{Overflow} if an
/// iterate acquires a zero entry (some node with q_mass = 0).
std::vector<GelfandPoint> spectral_radius_gelfand(const TransferMatrix& B, int n_max);

struct SpectralResult {
  double rho = 0.0;
  double log_rho = 0.0;
  DiscreteFunction eigenfunction;  ///< strictly positive, sup-normalized to 1
  Interpolation interpolation = Interpolation::multilinear;
  int iterations = 0;
  double residual = 0.0;  ///< ‖B h − ρ h‖∞
};

/// Power iteration with sup-norm renormalization. Stops once
/// ‖B h − ρ h‖∞ ≤ tol·ρ. Throws ConvergenceError when max_iter is reached
/// (for instance when the peripheral spectrum makes the iterates oscillate)
/// and Error{DegenerateOperator} when B·1 has a zero entry. An optional
/// positive starting vector replaces the constant function.
SpectralResult power_iteration(const TransferMatrix& B, double tol = 1e-12, int max_iter = 100000,
                               std::span<const double> start = {});

struct EigenmeasureResult {
  double rho_star = 0.0;    ///< mass of Bᵀν before renormalization
  DiscreteMeasure measure;  ///< probability
  double residual = 0.0;    ///< ‖Bᵀν − ρ*ν‖₁
  int iterations = 0;
};

/// Fixed point of γ ↦ Bᵀγ / (Bᵀγ)(X), started from the uniform measure.
/// Stops once the residual is at most tol·ρ*. Throws ConvergenceError.
EigenmeasureResult eigenmeasure(const TransferMatrix& B, double tol = 1e-12, int max_iter = 100000);

/// Nodes in closed communicating classes of the positive pattern of B. An
/// invariant measure of a stochastic B vanishes everywhere else.
std::vector<bool> recurrent_nodes(const TransferMatrix& B);

/// The measure with its mass off recurrent_nodes(B) removed, renormalized.
/// Throws Error{DegenerateOperator} when no mass is left.
DiscreteMeasure drop_transient_mass(const TransferMatrix& B, const DiscreteMeasure& m);

/// J'(x, θ) = J(x, θ) h(τ_θ x) / (ρ h(x)), with h interpolated in the mode
/// used to compute it. Throws Error{NonPositiveEigenfunction}.
SystemSpec normalize_system(const SystemSpec& spec, const SpectralResult& s);

/// Runs power iteration from the constant function and from a seeded random
/// positive start and compares the limits.
struct SeedAgreement {
  SpectralResult from_constant;
  SpectralResult from_random;
  double rho_gap = 0.0;
  double eigenfunction_gap = 0.0;  ///< sup-norm distance of the two h
  bool consistent = false;
};

SeedAgreement eigenfunction_seed_check(const TransferMatrix& B, double tol, int max_iter, std::uint64_t seed,
                                       double agreement_tol = 1e-6);

}  // namespace ifsm
