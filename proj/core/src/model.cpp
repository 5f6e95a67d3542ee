#include "ifsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace ifsm {

DomainBox DomainBox::make(std::span<const double> lower, std::span<const double> upper) {
  if (lower.size() != upper.size()) {
    throw Error(ErrorCode::InvalidDomain, "lower and upper bounds differ in length");
  }
  if (lower.empty() || lower.size() > 2) {
    throw Error(ErrorCode::InvalidDomain, "dimension must be 1 or 2");
  }
  DomainBox box;
  box.dimension = static_cast<int>(lower.size());
  box.lower = {0.0, 0.0};
  box.upper = {0.0, 0.0};
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (!(std::isfinite(lower[a]) && std::isfinite(upper[a]) && lower[a] < upper[a])) {
      throw Error(ErrorCode::InvalidDomain, "need lower < upper on axis " + std::to_string(a));
    }
    box.lower[a] = lower[a];
    box.upper[a] = upper[a];
  }
  return box;
}

DomainBox DomainBox::unit(int dimension) {
  const std::array<double, 2> lo{0.0, 0.0};
  const std::array<double, 2> hi{1.0, 1.0};
  if (dimension < 1 || dimension > 2) throw Error(ErrorCode::InvalidDomain, "dimension must be 1 or 2");
  return make(std::span(lo).first(dimension), std::span(hi).first(dimension));
}

bool DomainBox::contains(const Point& p, double slack) const {
  for (int a = 0; a < dimension; ++a) {
    if (!(p[a] >= lower[a] - slack && p[a] <= upper[a] + slack)) return false;
  }
  return true;
}

Point DomainBox::clamp(const Point& p) const {
  Point out{0.0, 0.0};
  for (int a = 0; a < dimension; ++a) out[a] = std::clamp(p[a], lower[a], upper[a]);
  return out;
}

ParameterSet::ParameterSet(std::vector<std::string> labels, std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (labels_.empty()) throw Error(ErrorCode::EmptyParameterSet, "no parameters");
  if (labels_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidParameterSet, "label and weight counts differ");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidParameterSet, "duplicate label " + l);
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidParameterSet, "a-priori weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidParameterSet, "a-priori weights sum to " + std::to_string(total));
  }
}

ParameterSet ParameterSet::uniform(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  std::vector<double> w(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  return ParameterSet(std::move(labels), std::move(w));
}

std::size_t ParameterSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw Error(ErrorCode::UnknownParameter, std::string(label));
}

Point apply_branch(const BranchMap& map, const Point& p, int dimension) {
  if (const auto* affine = std::get_if<AffineMap>(&map)) {
    const auto& m = affine->matrix;
    if (dimension == 1) return {m[0] * p[0] + affine->offset[0], 0.0};
    return {m[0] * p[0] + m[1] * p[1] + affine->offset[0], m[2] * p[0] + m[3] * p[1] + affine->offset[1]};
  }
  const auto& coords = std::get<ExpressionMap>(map).coords;
  Point out{0.0, 0.0};
  for (int a = 0; a < dimension; ++a) out[a] = coords[a].evaluate(p[0], p[1]);
  return out;
}

DensityFamily DensityFamily::from_expressions(std::vector<Expression> per_branch) {
  DensityFamily d;
  auto shared = std::make_shared<const std::vector<Expression>>(per_branch);
  d.fn_ = [shared](const Point& x, std::size_t b) { return (*shared)[b].evaluate(x[0], x[1]); };
  d.description_ = "expressions";
  d.exprs_ = std::move(per_branch);
  return d;
}

DensityFamily DensityFamily::from_function(Fn fn, std::string description) {
  DensityFamily d;
  d.fn_ = std::move(fn);
  d.description_ = std::move(description);
  return d;
}

Potential Potential::from_expression(Expression expr) {
  Potential p;
  p.fn_ = [expr](const Point& x) { return expr.evaluate(x[0], x[1]); };
  p.description_ = expr.to_string();
  p.expr_ = std::move(expr);
  return p;
}

Potential Potential::from_function(Fn fn, std::string description) {
  Potential p;
  p.fn_ = std::move(fn);
  p.description_ = std::move(description);
  return p;
}

Potential Potential::constant(double value) { return from_expression(Expression::constant(value)); }

SystemSpec::SystemSpec(DomainBox domain, ParameterSet params, std::vector<BranchMap> maps, Weighting weighting,
                       std::string name)
    : domain_(domain),
      params_(std::move(params)),
      maps_(std::move(maps)),
      weighting_(std::move(weighting)),
      name_(std::move(name)) {
  if (maps_.size() != params_.size()) {
    throw Error(ErrorCode::ValidationError, "map count " + std::to_string(maps_.size()) +
                                                " differs from parameter count " + std::to_string(params_.size()));
  }
  for (std::size_t b = 0; b < maps_.size(); ++b) {
    if (const auto* em = std::get_if<ExpressionMap>(&maps_[b])) {
      if (em->coords.size() != static_cast<std::size_t>(domain_.dimension)) {
        throw Error(ErrorCode::ValidationError, "map " + params_.label(b) + " has wrong coordinate count");
      }
      if (domain_.dimension == 1) {
        for (const auto& c : em->coords) {
          if (c.uses_y()) throw Error(ErrorCode::ValidationError, "1D map " + params_.label(b) + " uses y");
        }
      }
    }
  }
  if (const auto* d = std::get_if<DensityFamily>(&weighting_)) {
    if (d->expressions() && d->expressions()->size() != maps_.size()) {
      throw Error(ErrorCode::ValidationError, "density needs one expression per parameter");
    }
  }
}

Point SystemSpec::map_image(std::size_t branch, const Point& x) const {
  if (!domain_.contains(x, kMapSlack)) throw Error(ErrorCode::OutOfDomain, "point outside the domain box");
  const Point raw = apply_branch(maps_.at(branch), x, domain_.dimension);
  if (!domain_.contains(raw, kMapSlack)) {
    throw Error(ErrorCode::MapEscapesDomain, "map " + params_.label(branch) + " leaves the domain box");
  }
  return domain_.clamp(raw);
}

double SystemSpec::branch_weight(const Point& x, std::size_t branch) const {
  if (const auto* d = std::get_if<DensityFamily>(&weighting_)) return (*d)(x, branch);
  return std::get<Potential>(weighting_)(map_image(branch, x));
}

double SystemSpec::q_mass(const Point& x) const {
  if (!domain_.contains(x, kMapSlack)) throw Error(ErrorCode::OutOfDomain, "point outside the domain box");
  double total = 0.0;
  for (std::size_t b = 0; b < maps_.size(); ++b) {
    const double mu = params_.weight(b);
    if (mu == 0.0) continue;
    total += mu * branch_weight(x, b);
  }
  return total;
}

SystemSpec SystemSpec::with_weighting(Weighting weighting, std::string name) const {
  return SystemSpec(domain_, params_, maps_, std::move(weighting), name.empty() ? name_ : std::move(name));
}

SystemSpec SystemSpec::with_params(ParameterSet params, Weighting weighting, std::string name) const {
  return SystemSpec(domain_, std::move(params), maps_, std::move(weighting), name.empty() ? name_ : std::move(name));
}

double q_mass(const SystemSpec& spec, const Point& x) { return spec.q_mass(x); }

Point evaluate_map(const SystemSpec& spec, std::string_view label, const Point& x) {
  return spec.map_image(spec.params().index_of(label), x);
}

void ValidationReport::raise_if_failed() const {
  if (!issues.empty()) throw Error(issues.front().code, issues.front().message);
}

ValidationReport validate_system(const SystemSpec& spec, int grid_resolution, double normalization_tol) {
  if (grid_resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
  const DomainBox& box = spec.domain();
  const int dim = box.dimension;
  const std::size_t nx = static_cast<std::size_t>(grid_resolution);
  const std::size_t ny = dim == 2 ? nx : 1;

  ValidationReport report;
  report.sup_q = -std::numeric_limits<double>::infinity();
  report.inf_q = std::numeric_limits<double>::infinity();
  bool all_normalized = true;
  bool density_ok = true;

  auto coord = [&](int axis, std::size_t k) {
    if (k + 1 == nx) return box.upper[axis];
    return box.lower[axis] + box.extent(axis) * static_cast<double>(k) / static_cast<double>(nx - 1);
  };

  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const Point x{coord(0, ix), dim == 2 ? coord(1, iy) : 0.0};
      ++report.nodes_checked;
      bool images_ok = true;
      for (std::size_t b = 0; b < spec.branch_count(); ++b) {
        Point raw;
        try {
          raw = apply_branch(spec.maps()[b], x, dim);
        } catch (const Error& e) {
          report.issues.push_back({ErrorCode::MapEscapesDomain, "map " + spec.params().label(b) + ": " + e.what()});
          report.maps_contained = false;
          images_ok = false;
          continue;
        }
        double escape = 0.0;
        for (int a = 0; a < dim; ++a) {
          escape = std::max({escape, box.lower[a] - raw[a], raw[a] - box.upper[a]});
        }
        report.max_escape = std::max(report.max_escape, escape);
        if (escape > kMapSlack) {
          if (report.maps_contained) {
            report.issues.push_back({ErrorCode::MapEscapesDomain,
                                     "map " + spec.params().label(b) + " leaves the domain box by " +
                                         std::to_string(escape)});
          }
          report.maps_contained = false;
          images_ok = false;
        }
      }
      if (!images_ok) continue;

      double q = 0.0;
      for (std::size_t b = 0; b < spec.branch_count(); ++b) {
        double w = 0.0;
        try {
          w = spec.branch_weight(x, b);
        } catch (const Error& e) {
          report.issues.push_back({ErrorCode::NonPositiveDensity, e.what()});
          density_ok = false;
          continue;
        }
        if (!(w > 0.0) || !std::isfinite(w)) {
          if (density_ok) {
            report.issues.push_back({ErrorCode::NonPositiveDensity,
                                     "weight of " + spec.params().label(b) + " is " + std::to_string(w)});
          }
          density_ok = false;
        }
        q += spec.params().weight(b) * w;
      }
      report.sup_q = std::max(report.sup_q, q);
      report.inf_q = std::min(report.inf_q, q);
      if (std::abs(q - 1.0) > normalization_tol) all_normalized = false;
    }
  }
  report.normalized = all_normalized && report.issues.empty();
  report.passes = report.issues.empty() && report.inf_q > 0.0 && report.maps_contained;
  if (report.issues.empty() && !(report.inf_q > 0.0)) {
    report.issues.push_back({ErrorCode::NonPositiveDensity, "inf q is not positive"});
    report.passes = false;
  }
  return report;
}

}  // namespace ifsm
