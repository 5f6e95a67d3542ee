#pragma once

// Entropy, topological pressure and equilibrium states on a fixed grid.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifsm/grid.hpp"
#include "ifsm/holonomy.hpp"
#include "ifsm/model.hpp"
#include "ifsm/spectral.hpp"
#include "ifsm/transfer.hpp"

namespace ifsm {

/// h_a = −Σ_i ν(i) Σ_θ ν_{x_i}(θ) ln(ν_{x_i}(θ) / μ(θ)). Throws
/// Error{AbsoluteContinuityViolated}.
double entropy_average(const Disintegration& dis, const ParameterSet& apriori);

struct OptimizerParams {
  int max_iter = 5000;
  double rel_tol = 1e-10;  ///< stop once the decrease is below rel_tol * max(1, |F|)
  int max_backtracks = 60;
  /// Nodes with ν below support_floor·ν(X) are outside the support: their
  /// terms are dropped and u keeps its start value there.
  double support_floor = 1e-13;
};

/// Minimizer of F(u) = Σ ν ln(B e^u) − Σ ν u.
struct LogRatioMinimum {
  double value = 0.0;
  std::vector<double> u;
  int iterations = 0;
  std::size_t start_index = 0;  ///< 0 is u = 0, k > 0 the k-th warm start
  std::vector<double> trace;    ///< F after every accepted step of the winning run
};

/// Preconditioned gradient descent with backtracking, run from u = 0 and from
/// every warm start; the lowest value wins. Throws Error{OptimizerDiverged}
/// on a non-finite objective and Error{GridMismatch}.
LogRatioMinimum minimize_log_ratio(const TransferMatrix& B, const DiscreteMeasure& nu, const OptimizerParams& opt = {},
                                   std::span<const std::vector<double>> warm_starts = {});

struct EntropyReport {
  double h_v = 0.0;
  double h_a = 0.0;
  double gap = 0.0;  ///< h_v − h_a
  bool optimal_function_used = false;
  int iterations = 0;
  std::vector<double> trace;
};

/// h_v by minimizing F over grid functions with B_μ (J ≡ 1 against the a-priori
/// measure of `spec`), together with h_a of the same measure. Warm starts
/// are nodal values of ln g.
EntropyReport entropy_variational(const HolonomicMeasure& m, const SystemSpec& spec, const OptimizerParams& opt = {},
                                  std::span<const std::vector<double>> warm_starts = {});

/// ∫ ln(B_μ φ / φ) dν. Throws Error{NonPositiveFunction}.
double entropy_closed_form(const DiscreteFunction& phi, const DiscreteMeasure& nu, const TransferMatrix& B_mu);

struct ThermoReport {
  double rho = 0.0;
  double log_rho = 0.0;
  double pressure = 0.0;
  /// inf_g ∫ ln(B_q g / g) dν at the equilibrium marginal.
  double variational_lower_bound = 0.0;
  /// |h_v + ∫ ln ψ dν − ln ρ| for a potential, |variational_lower_bound − ln ρ|
  /// for a density.
  double equilibrium_defect = 0.0;
  /// |h_v + ∫ ln ψ dν − variational_lower_bound|; zero for a density.
  double form_gap = 0.0;
  double h_v = 0.0;              ///< potential weighting only
  double integral_log_psi = 0.0; ///< potential weighting only
  double h_a = 0.0;
  double rho_star = 0.0;
  double invariance_residual = 0.0;
  int power_iterations = 0;
  int optimizer_iterations = 0;
  DiscreteMeasure marginal;
  DiscreteFunction eigenfunction;
};

struct ThermoOptions {
  Interpolation interpolation = Interpolation::multilinear;
  double tol = 1e-12;
  int max_iter = 100000;
  OptimizerParams optimizer{};
};

/// eigenfunction → normalize_system → eigenmeasure of the normalized adjoint
/// (transient mass dropped) → holonomic lift. A ConvergenceError carries the failing stage.
std::pair<HolonomicMeasure, ThermoReport> equilibrium_state(const SystemSpec& spec, const Grid& grid,
                                                            const ThermoOptions& options = {});

/// P = ln ρ(B_q), certified from below by the equilibrium lift.
ThermoReport pressure(const SystemSpec& spec, const Grid& grid, const ThermoOptions& options = {});

/// inf_g ∫ ln(B_q g / g) dν for the system's operator: the quantity that
/// never exceeds ln ρ. `nu` need not be invariant.
double variational_value(const SystemSpec& spec, const DiscreteMeasure& nu, const ThermoOptions& options = {});

/// p(φ) = ln ρ for ψ = exp(φ̃) over the maps and a-priori measure of `base`.
double pressure_functional(const SystemSpec& base, const DiscreteFunction& phi, const ThermoOptions& options = {});

struct MidpointCheck {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_mid = 0.0;
  double gap = 0.0;  ///< p_mid − (p_a + p_b)/2, nonpositive for a convex p
};

MidpointCheck convexity_midpoint(const SystemSpec& base, const DiscreteFunction& a, const DiscreteFunction& b,
                                 const ThermoOptions& options = {});

struct DirectionProbe {
  std::vector<double> t;
  std::vector<double> values;      ///< p(φ + t η)
  std::vector<double> quotients;   ///< (p(φ + t η) − p(φ)) / t
  std::vector<double> richardson;  ///< extrapolations of consecutive quotients
  bool monotone = false;           ///< quotients nonincreasing as t shrinks
  MidpointCheck midpoint;          ///< on the segment [φ, φ + η]
  std::optional<double> nu_eta;    ///< ν(η) when a measure is supplied
  std::optional<double> subgradient_slack;  ///< p(φ + η) − p(φ) − ν(η)
};

struct PressureFunctionalProbe {
  double base_value = 0.0;
  std::vector<DirectionProbe> directions;
  double worst_midpoint_gap = 0.0;
  std::optional<double> worst_subgradient_slack;
  bool convex = false;
};

/// Default stencil {1e-2, 1e-3, 1e-4}. Throws Error{InvalidArgument} unless
/// the stencil is positive and decreasing.
PressureFunctionalProbe pressure_functional_probe(const SystemSpec& base, const DiscreteFunction& phi,
                                                  std::span<const DiscreteFunction> directions,
                                                  std::span<const double> t_stencil = {},
                                                  const DiscreteMeasure* nu = nullptr,
                                                  const ThermoOptions& options = {});

}  // namespace ifsm
