#pragma once

// IFSm data model: a domain box X, a finite parameter set Θ with an
// a-priori probability μ, a family of maps τ_θ : X → X, and a weighting that
// defines the measures q_x on Θ, either through a density
// J(x, θ) = dq_x/dμ(θ) or through a potential ψ with dq_x(θ) = ψ(τ_θ x) dμ(θ).

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ifsm/error.hpp"
#include "ifsm/expression.hpp"

namespace ifsm {

/// A point of X. Only the first `dimension` coordinates are meaningful; the
/// rest are kept at zero.
using Point = std::array<double, 2>;

/// Slack allowed when checking that a map image stays inside the box.
inline constexpr double kMapSlack = 1e-9;

struct DomainBox {
  int dimension = 1;
  Point lower{0.0, 0.0};
  Point upper{1.0, 0.0};

  /// Throws Error{InvalidDomain} unless 1 <= dimension <= 2, the bound
  /// arrays match the dimension and lower < upper on every axis.
  static DomainBox make(std::span<const double> lower, std::span<const double> upper);
  static DomainBox unit(int dimension);

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  bool contains(const Point& p, double slack = 0.0) const;
  Point clamp(const Point& p) const;

  friend bool operator==(const DomainBox&, const DomainBox&) = default;
};

/// Finite Θ with its a-priori probability μ.
class ParameterSet {
 public:
  /// Throws Error{EmptyParameterSet} for no labels and
  /// Error{InvalidParameterSet} for negative weights, duplicate labels, a
  /// size mismatch or weights not summing to one within 1e-9.
  ParameterSet(std::vector<std::string> labels, std::vector<double> weights);

  static ParameterSet uniform(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Throws Error{UnknownParameter}.
  std::size_t index_of(std::string_view label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

/// x ↦ A x + b with A stored row-major.
struct AffineMap {
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};
  Point offset{0.0, 0.0};
};

/// One expression per coordinate, in x and y.
struct ExpressionMap {
  std::vector<Expression> coords;
};

using BranchMap = std::variant<AffineMap, ExpressionMap>;

/// Image of `p` under a single branch, without any domain handling.
Point apply_branch(const BranchMap& map, const Point& p, int dimension);

/// J(x, θ) = dq_x/dμ(θ).
class DensityFamily {
 public:
  using Fn = std::function<double(const Point&, std::size_t)>;

  /// One expression per θ, in label order.
  static DensityFamily from_expressions(std::vector<Expression> per_branch);
  static DensityFamily from_function(Fn fn, std::string description);

  double operator()(const Point& x, std::size_t branch) const { return fn_(x, branch); }

  /// Non-null when the family is expression-backed (and thus serializable).
  const std::vector<Expression>* expressions() const { return exprs_ ? &*exprs_ : nullptr; }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::optional<std::vector<Expression>> exprs_;
  std::string description_;
};

/// ψ : X → (0, ∞).
class Potential {
 public:
  using Fn = std::function<double(const Point&)>;

  static Potential from_expression(Expression expr);
  static Potential from_function(Fn fn, std::string description);
  static Potential constant(double value);

  double operator()(const Point& x) const { return fn_(x); }

  const Expression* expression() const { return expr_ ? &*expr_ : nullptr; }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::optional<Expression> expr_;
  std::string description_;
};

using Weighting = std::variant<DensityFamily, Potential>;

/// The IFSm triple (X, τ, q). Immutable after construction; every accessor
/// is safe to call concurrently.
class SystemSpec {
 public:
  /// Structural checks only (counts and dimensions); throws
  /// Error{ValidationError}. Numeric hypotheses are checked by
  /// validate_system.
  SystemSpec(DomainBox domain, ParameterSet params, std::vector<BranchMap> maps, Weighting weighting,
             std::string name = {});

  const DomainBox& domain() const { return domain_; }
  int dimension() const { return domain_.dimension; }
  const ParameterSet& params() const { return params_; }
  const std::vector<BranchMap>& maps() const { return maps_; }
  const Weighting& weighting() const { return weighting_; }
  std::size_t branch_count() const { return maps_.size(); }
  const std::string& name() const { return name_; }

  const Potential* potential() const { return std::get_if<Potential>(&weighting_); }
  const DensityFamily* density() const { return std::get_if<DensityFamily>(&weighting_); }

  /// τ_θ(x) clamped to the box. Throws Error{MapEscapesDomain} when the raw
  /// image leaves the box by more than kMapSlack, Error{OutOfDomain} when x
  /// itself is outside.
  Point map_image(std::size_t branch, const Point& x) const;

  /// J(x, θ): the density, or ψ(τ_θ x) for a potential weighting.
  double branch_weight(const Point& x, std::size_t branch) const;

  /// q_x(Θ) = Σ_θ μ(θ) J(x, θ).
  double q_mass(const Point& x) const;

  /// Same maps and a-priori measure, with a new weighting.
  SystemSpec with_weighting(Weighting weighting, std::string name = {}) const;
  /// Same maps, a new a-priori measure and weighting.
  SystemSpec with_params(ParameterSet params, Weighting weighting, std::string name = {}) const;

 private:
  DomainBox domain_;
  ParameterSet params_;
  std::vector<BranchMap> maps_;
  Weighting weighting_;
  std::string name_;
};

/// q_x(Θ). Throws Error{OutOfDomain}.
double q_mass(const SystemSpec& spec, const Point& x);

/// τ_θ(x) by label. Throws Error{UnknownParameter} or Error{OutOfDomain}.
Point evaluate_map(const SystemSpec& spec, std::string_view label, const Point& x);

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

struct ValidationReport {
  std::size_t nodes_checked = 0;
  double sup_q = 0.0;
  double inf_q = 0.0;
  double max_escape = 0.0;  ///< largest distance of a raw map image outside the box
  bool maps_contained = true;
  bool normalized = false;
  bool passes = false;
  std::vector<ValidationIssue> issues;

  /// Throws the first recorded issue as an Error.
  void raise_if_failed() const;
};

/// Checks that q_mass is bounded and bounded away from zero and that the maps
/// stay in the box, on a tensor grid with `grid_resolution` nodes per axis. `normalized` is set when every sampled
/// q_mass is within `normalization_tol` of one.
ValidationReport validate_system(const SystemSpec& spec, int grid_resolution,
                                 double normalization_tol = 1e-12);

}  // namespace ifsm
