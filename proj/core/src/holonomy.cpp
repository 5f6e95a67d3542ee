#include "ifsm/holonomy.hpp"

#include <cmath>

#include "ifsm/transfer.hpp"

namespace ifsm {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

double HolonomicMeasure::total_mass() const {
  CompensatedSum s;
  for (double w : weights) s.add(w);
  return s.value();
}

DiscreteMeasure HolonomicMeasure::marginal() const {
  std::vector<double> nu(grid.size(), 0.0);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    for (std::size_t b = 0; b < branches; ++b) nu[i] += weights[i * branches + b];
  }
  return DiscreteMeasure(grid, std::move(nu));
}

HolonomicMeasure HolonomicMeasure::point_mass(const Grid& grid, std::size_t branches, std::size_t node,
                                              std::size_t branch, Interpolation mode) {
  if (node >= grid.size() || branch >= branches) throw Error(ErrorCode::InvalidArgument, "point mass out of range");
  HolonomicMeasure m{grid, branches, mode, std::vector<double>(grid.size() * branches, 0.0), {}};
  m.weights[node * branches + branch] = 1.0;
  return m;
}

HolonomicMeasure HolonomicMeasure::mix(const HolonomicMeasure& a, const HolonomicMeasure& b, double t) {
  require_same_grid(a.grid, b.grid, "HolonomicMeasure::mix");
  if (a.branches != b.branches) throw Error(ErrorCode::GridMismatch, "parameter sets differ");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "mixing weight must lie in [0, 1]");
  HolonomicMeasure m{a.grid, a.branches, a.interpolation, std::vector<double>(a.weights.size()), {}};
  for (std::size_t k = 0; k < m.weights.size(); ++k) m.weights[k] = (1.0 - t) * a.weights[k] + t * b.weights[k];
  // Mixed atom lists only make sense when both sides carry them.
  if (!a.atoms.empty() && !b.atoms.empty()) {
    m.atoms.reserve(a.atoms.size() + b.atoms.size());
    for (Atom at : a.atoms) {
      at.weight *= 1.0 - t;
      m.atoms.push_back(at);
    }
    for (Atom at : b.atoms) {
      at.weight *= t;
      m.atoms.push_back(at);
    }
  }
  return m;
}

LiftResult holonomic_lift(const SystemSpec& spec, const DiscreteMeasure& nu, Interpolation mode,
                          double invariance_tol) {
  if (!(nu.grid.box() == spec.domain())) throw Error(ErrorCode::GridMismatch, "measure grid is not on the domain box");
  if (!nu.is_probability(1e-9)) throw Error(ErrorCode::InvalidArgument, "marginal must be a probability");
  const std::size_t n = spec.branch_count();
  const Grid& grid = nu.grid;
  HolonomicMeasure m{grid, n, mode, std::vector<double>(grid.size() * n, 0.0), {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.node(i);
    const double mass = spec.q_mass(x);
    if (std::abs(mass - 1.0) > 1e-8) {
      throw Error(ErrorCode::NotNormalized, "q_mass = " + std::to_string(mass) + " at node " + std::to_string(i));
    }
    for (std::size_t b = 0; b < n; ++b) {
      const double mu = spec.params().weight(b);
      if (mu == 0.0) continue;
      m.weights[i * n + b] = nu.weights[i] * mu * spec.branch_weight(x, b);
    }
  }
  const TransferMatrix B = assemble_transfer(spec, grid, mode);
  const double residual = invariance_residual(B, nu);
  return {std::move(m), residual, residual <= invariance_tol};
}

double holonomy_residual(const HolonomicMeasure& m, const SystemSpec& spec,
                         std::span<const DiscreteFunction> test_functions) {
  double worst = 0.0;
  for (const DiscreteFunction& f : test_functions) {
    require_same_grid(f.grid, m.grid, "holonomy_residual");
    CompensatedSum s;
    if (!m.atoms.empty()) {
      for (const Atom& a : m.atoms) {
        const Point image = orbit_step(spec, a.branch, a.x);
        s.add(a.weight * interpolate(f.grid, f.values, image, m.interpolation));
        s.add(-a.weight * interpolate(f.grid, f.values, a.x, m.interpolation));
      }
    } else {
      for (std::size_t i = 0; i < m.grid.size(); ++i) {
        const Point x = m.grid.node(i);
        for (std::size_t b = 0; b < m.branches; ++b) {
          const double w = m.weights[i * m.branches + b];
          if (w == 0.0) continue;
          const Point image = orbit_step(spec, b, x);
          s.add(w * interpolate(f.grid, f.values, image, m.interpolation));
          s.add(-w * f.values[i]);
        }
      }
    }
    worst = std::max(worst, std::abs(s.value()));
  }
  return worst;
}

HolonomicMeasure empirical_holonomic(const OrbitRecord& orbit, const Grid& grid, std::size_t branches,
                                     Interpolation mode) {
  const std::size_t n = orbit.length();
  if (n == 0) throw Error(ErrorCode::EmptyOrbit, "orbit has no steps");
  HolonomicMeasure m{grid, branches, mode, std::vector<double>(grid.size() * branches, 0.0), {}};
  m.atoms.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t b = orbit.labels[j];
    if (b >= branches) throw Error(ErrorCode::InvalidArgument, "orbit label outside the parameter set");
    m.atoms.push_back({orbit.points[j], b, w});
    const Stencil st = grid.stencil(orbit.points[j], mode);
    for (int k = 0; k < st.count; ++k) m.weights[st.node[k] * branches + b] += w * st.weight[k];
  }
  return m;
}

std::vector<double> Disintegration::recombine() const {
  std::vector<double> w(conditional.size(), 0.0);
  for (std::size_t i = 0; i < defined.size(); ++i) {
    if (!defined[i]) continue;
    const double nu = marginal.weights[i];
    for (std::size_t b = 0; b < branches; ++b) {
      const std::size_t k = i * branches + b;
      const double p = nu * conditional[k];
      const double e = std::fma(nu, conditional[k], -p);
      w[k] = p + (e + nu * correction[k]);
    }
  }
  return w;
}

Disintegration disintegrate(const HolonomicMeasure& m) {
  DiscreteMeasure nu = m.marginal();
  const std::size_t n = m.branches;
  std::vector<double> cond(m.weights.size(), 0.0);
  std::vector<double> corr(m.weights.size(), 0.0);
  std::vector<bool> defined(m.grid.size(), false);
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    const double mass = nu.weights[i];
    if (mass <= 0.0) continue;
    defined[i] = true;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t k = i * n + b;
      cond[k] = m.weights[k] / mass;
      corr[k] = std::fma(-mass, cond[k], m.weights[k]) / mass;
    }
  }
  return {std::move(nu), n, std::move(cond), std::move(corr), std::move(defined)};
}

}  // namespace ifsm
