#include "ifsm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ifsm {

double entropy_average(const Disintegration& dis, const ParameterSet& apriori) {
  if (apriori.size() != dis.branches) throw Error(ErrorCode::GridMismatch, "parameter set size differs");
  double total = 0.0;
  for (std::size_t i = 0; i < dis.defined.size(); ++i) {
    if (!dis.defined[i]) continue;
    const double nu = dis.marginal.weights[i];
    double inner = 0.0;
    for (std::size_t b = 0; b < dis.branches; ++b) {
      const double c = dis.conditional[i * dis.branches + b];
      if (c <= 0.0) continue;
      const double mu = apriori.weight(b);
      if (mu <= 0.0) {
        throw Error(ErrorCode::AbsoluteContinuityViolated,
                    "conditional charges " + apriori.label(b) + " at node " + std::to_string(i));
      }
      inner += c * std::log(c / mu);
    }
    total -= nu * inner;
  }
  return total;
}

namespace {

class LogRatioObjective {
 public:
  LogRatioObjective(const TransferMatrix& B, const DiscreteMeasure& nu, double floor)
      : B_(B), nu_(nu.weights), e_(B.size()), s_(B.size()), r_(B.size()), t_(B.size()) {
    const double cut = floor * nu.mass();
    for (auto& w : nu_) {
      if (w <= cut) w = 0.0;
    }
  }

  // F(u); also leaves e^{u − max u} and B e^{u − max u} in the scratch buffers.
  double value(std::span<const double> u) {
    const double top = *std::max_element(u.begin(), u.end());
    for (std::size_t k = 0; k < u.size(); ++k) e_[k] = std::exp(u[k] - top);
    B_.multiply(e_, s_);
    double f = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (nu_[i] == 0.0) continue;
      if (s_[i] <= 0.0) return std::numeric_limits<double>::infinity();
      f += nu_[i] * (std::log(s_[i]) + top - u[i]);
    }
    return f;
  }

  // Gradient at the point of the last value() call: π − ν.
  void gradient(std::vector<double>& pushed, std::vector<double>& grad) {
    for (std::size_t i = 0; i < r_.size(); ++i) r_[i] = nu_[i] == 0.0 ? 0.0 : nu_[i] / s_[i];
    B_.multiply_transpose(r_, t_);
    for (std::size_t k = 0; k < t_.size(); ++k) {
      pushed[k] = e_[k] * t_[k];
      grad[k] = pushed[k] - nu_[k];
    }
  }

  double nu(std::size_t k) const { return nu_[k]; }

 private:
  const TransferMatrix& B_;
  std::vector<double> nu_;
  std::vector<double> e_, s_, r_, t_;
};

LogRatioMinimum descend(const TransferMatrix& B, const DiscreteMeasure& nu, const OptimizerParams& opt,
                        std::vector<double> u) {
  LogRatioObjective obj(B, nu, opt.support_floor);
  const std::size_t n = u.size();
  LogRatioMinimum out;
  double f = obj.value(u);
  if (!std::isfinite(f)) throw Error(ErrorCode::OptimizerDiverged, "objective is not finite at the start point");
  out.trace.push_back(f);

  std::vector<double> pushed(n), grad(n), dir(n), trial(n);
  double step = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    obj.value(u);
    obj.gradient(pushed, grad);
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double scale = std::max(obj.nu(k), pushed[k]);
      dir[k] = obj.nu(k) > 0.0 ? -grad[k] / scale : 0.0;
      slope += grad[k] * dir[k];
    }
    if (!std::isfinite(slope)) {
      throw Error(ErrorCode::OptimizerDiverged, "gradient is not finite (objective unbounded below?) after " +
                                                     std::to_string(it) + " iterations");
    }
    if (slope >= 0.0) break;

    step = std::min(2.0 * step, 64.0);
    bool accepted = false;
    double f_new = f;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, step *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + step * dir[k];
      f_new = obj.value(trial);
      if (std::isnan(f_new)) throw Error(ErrorCode::OptimizerDiverged, "objective became NaN");
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    u.swap(trial);
    const double decrease = f - f_new;
    f = f_new;
    out.trace.push_back(f);
    if (decrease < opt.rel_tol * std::max(1.0, std::abs(f))) {
      ++it;
      break;
    }
  }
  out.value = f;
  out.u = std::move(u);
  out.iterations = it;
  return out;
}

}  // namespace

LogRatioMinimum minimize_log_ratio(const TransferMatrix& B, const DiscreteMeasure& nu, const OptimizerParams& opt,
                                   std::span<const std::vector<double>> warm_starts) {
  require_same_grid(B.grid(), nu.grid, "minimize_log_ratio");
  LogRatioMinimum best = descend(B, nu, opt, std::vector<double>(B.size(), 0.0));
  for (std::size_t k = 0; k < warm_starts.size(); ++k) {
    if (warm_starts[k].size() != B.size()) throw Error(ErrorCode::GridMismatch, "warm start has the wrong size");
    LogRatioMinimum run = descend(B, nu, opt, warm_starts[k]);
    if (run.value < best.value) {
      best = std::move(run);
      best.start_index = k + 1;
    }
  }
  return best;
}

EntropyReport entropy_variational(const HolonomicMeasure& m, const SystemSpec& spec, const OptimizerParams& opt,
                                  std::span<const std::vector<double>> warm_starts) {
  const Disintegration dis = disintegrate(m);
  const TransferMatrix B_mu = assemble_apriori_transfer(spec, spec.params(), m.grid, m.interpolation);
  const DiscreteMeasure nu = dis.marginal.normalized();
  LogRatioMinimum min = minimize_log_ratio(B_mu, nu, opt, warm_starts);
  EntropyReport rep;
  rep.h_v = min.value;
  rep.h_a = entropy_average(dis, spec.params());
  rep.gap = rep.h_v - rep.h_a;
  rep.optimal_function_used = min.start_index > 0;
  rep.iterations = min.iterations;
  rep.trace = std::move(min.trace);
  return rep;
}

double entropy_closed_form(const DiscreteFunction& phi, const DiscreteMeasure& nu, const TransferMatrix& B_mu) {
  require_same_grid(phi.grid, nu.grid, "entropy_closed_form");
  require_same_grid(phi.grid, B_mu.grid(), "entropy_closed_form");
  for (double v : phi.values) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveFunction, "φ must be strictly positive");
  }
  std::vector<double> b(phi.values.size());
  B_mu.multiply(phi.values, b);
  double total = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (nu.weights[i] == 0.0) continue;
    total += nu.weights[i] * std::log(b[i] / phi.values[i]);
  }
  return total;
}

namespace {

struct CandidateValue {
  double value = 0.0;  ///< inf_u Σ ν ln(B_q e^u / e^u)
  double h_v = 0.0;
  double integral_log_psi = 0.0;
  double entropy_form = 0.0;  ///< h_v + ∫ ln ψ dν, or value for a density
  int iterations = 0;
};

// Inner infimum with B_q from ln h; for a potential also h_v with B_μ from
// ln(hψ).
CandidateValue candidate_value(const SystemSpec& spec, const Grid& grid, const DiscreteMeasure& nu,
                               const TransferMatrix& B_q, const DiscreteFunction& h, const ThermoOptions& o) {
  CandidateValue out;
  std::vector<double> log_h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) log_h[i] = std::log(h.values[i]);
  const std::vector<std::vector<double>> direct_starts{log_h};
  const LogRatioMinimum direct = minimize_log_ratio(B_q, nu, o.optimizer, direct_starts);
  out.value = direct.value;
  out.entropy_form = direct.value;
  out.iterations = direct.iterations;

  if (const Potential* psi = spec.potential()) {
    std::vector<double> log_psi(grid.size());
    std::vector<double> warm(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      log_psi[i] = std::log((*psi)(grid.node(i)));
      warm[i] = log_h[i] + log_psi[i];
    }
    const TransferMatrix B_mu = assemble_apriori_transfer(spec, spec.params(), grid, o.interpolation);
    const std::vector<std::vector<double>> starts{warm};
    const LogRatioMinimum min = minimize_log_ratio(B_mu, nu, o.optimizer, starts);
    for (std::size_t i = 0; i < grid.size(); ++i) out.integral_log_psi += nu.weights[i] * log_psi[i];
    out.h_v = min.value;
    out.entropy_form = min.value + out.integral_log_psi;
    out.iterations += min.iterations;
  }
  return out;
}

}  // namespace

std::pair<HolonomicMeasure, ThermoReport> equilibrium_state(const SystemSpec& spec, const Grid& grid,
                                                            const ThermoOptions& o) {
  const TransferMatrix B = assemble_transfer(spec, grid, o.interpolation);
  const SpectralResult s = power_iteration(B, o.tol, o.max_iter);
  const SystemSpec normalized = normalize_system(spec, s);
  const TransferMatrix Bn = assemble_transfer(normalized, grid, o.interpolation);
  const EigenmeasureResult em = eigenmeasure(Bn, o.tol, o.max_iter);
  const DiscreteMeasure nu = drop_transient_mass(Bn, em.measure);
  LiftResult lift = holonomic_lift(normalized, nu, o.interpolation);

  const CandidateValue cv = candidate_value(spec, grid, nu, B, s.eigenfunction, o);

  ThermoReport rep{.marginal = nu, .eigenfunction = s.eigenfunction};
  rep.rho = s.rho;
  rep.log_rho = s.log_rho;
  rep.pressure = s.log_rho;
  rep.variational_lower_bound = cv.value;
  rep.equilibrium_defect = std::abs(cv.entropy_form - s.log_rho);
  rep.form_gap = std::abs(cv.entropy_form - cv.value);
  rep.h_v = cv.h_v;
  rep.integral_log_psi = cv.integral_log_psi;
  rep.h_a = entropy_average(disintegrate(lift.measure), spec.params());
  rep.rho_star = em.rho_star;
  rep.invariance_residual = lift.invariance_residual;
  rep.power_iterations = s.iterations;
  rep.optimizer_iterations = cv.iterations;
  return {std::move(lift.measure), std::move(rep)};
}

ThermoReport pressure(const SystemSpec& spec, const Grid& grid, const ThermoOptions& o) {
  return equilibrium_state(spec, grid, o).second;
}

double variational_value(const SystemSpec& spec, const DiscreteMeasure& nu, const ThermoOptions& o) {
  const TransferMatrix B = assemble_transfer(spec, nu.grid, o.interpolation);
  const SpectralResult s = power_iteration(B, o.tol, o.max_iter);
  return candidate_value(spec, nu.grid, nu.normalized(), B, s.eigenfunction, o).value;
}

double pressure_functional(const SystemSpec& base, const DiscreteFunction& phi, const ThermoOptions& o) {
  const SystemSpec spec = base.with_weighting(log_tabulated_potential(phi, o.interpolation));
  const TransferMatrix B = assemble_transfer(spec, phi.grid, o.interpolation);
  return power_iteration(B, o.tol, o.max_iter).log_rho;
}

MidpointCheck convexity_midpoint(const SystemSpec& base, const DiscreteFunction& a, const DiscreteFunction& b,
                                 const ThermoOptions& o) {
  require_same_grid(a.grid, b.grid, "convexity_midpoint");
  std::vector<double> mid(a.values.size());
  for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (a.values[k] + b.values[k]);
  MidpointCheck c;
  c.p_a = pressure_functional(base, a, o);
  c.p_b = pressure_functional(base, b, o);
  c.p_mid = pressure_functional(base, DiscreteFunction(a.grid, std::move(mid)), o);
  c.gap = c.p_mid - 0.5 * (c.p_a + c.p_b);
  return c;
}

PressureFunctionalProbe pressure_functional_probe(const SystemSpec& base, const DiscreteFunction& phi,
                                                  std::span<const DiscreteFunction> directions,
                                                  std::span<const double> t_stencil, const DiscreteMeasure* nu,
                                                  const ThermoOptions& o) {
  static constexpr double kDefaultStencil[] = {1e-2, 1e-3, 1e-4};
  if (t_stencil.empty()) t_stencil = kDefaultStencil;
  for (std::size_t k = 0; k < t_stencil.size(); ++k) {
    if (!(t_stencil[k] > 0.0) || (k > 0 && !(t_stencil[k] < t_stencil[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "t stencil must be positive and decreasing");
    }
  }
  if (nu) require_same_grid(nu->grid, phi.grid, "pressure_functional_probe");

  auto shifted = [&](const DiscreteFunction& eta, double t) {
    std::vector<double> v(phi.values.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = phi.values[k] + t * eta.values[k];
    return DiscreteFunction(phi.grid, std::move(v));
  };

  PressureFunctionalProbe probe;
  probe.base_value = pressure_functional(base, phi, o);
  probe.convex = true;
  for (const DiscreteFunction& eta : directions) {
    require_same_grid(eta.grid, phi.grid, "pressure_functional_probe");
    DirectionProbe d;
    for (double t : t_stencil) {
      const double p = pressure_functional(base, shifted(eta, t), o);
      d.t.push_back(t);
      d.values.push_back(p);
      d.quotients.push_back((p - probe.base_value) / t);
    }
    d.monotone = true;
    for (std::size_t k = 1; k < d.quotients.size(); ++k) {
      const double r = d.t[k - 1] / d.t[k];
      d.richardson.push_back((r * d.quotients[k] - d.quotients[k - 1]) / (r - 1.0));
      // Quotients carry an absolute error of about tol / t.
      if (d.quotients[k] > d.quotients[k - 1] + 1e-12 / d.t[k] + 1e-12) d.monotone = false;
    }
    d.midpoint.p_a = probe.base_value;
    d.midpoint.p_b = pressure_functional(base, shifted(eta, 1.0), o);
    d.midpoint.p_mid = pressure_functional(base, shifted(eta, 0.5), o);
    d.midpoint.gap = d.midpoint.p_mid - 0.5 * (d.midpoint.p_a + d.midpoint.p_b);
    probe.worst_midpoint_gap = probe.directions.empty() ? d.midpoint.gap
                                                        : std::max(probe.worst_midpoint_gap, d.midpoint.gap);
    if (d.midpoint.gap > 1e-8 || !d.monotone) probe.convex = false;
    if (nu) {
      double integral = 0.0;
      for (std::size_t k = 0; k < eta.values.size(); ++k) integral += nu->weights[k] * eta.values[k];
      d.nu_eta = integral;
      d.subgradient_slack = d.midpoint.p_b - probe.base_value - integral;
      probe.worst_subgradient_slack = probe.worst_subgradient_slack
                                          ? std::min(*probe.worst_subgradient_slack, *d.subgradient_slack)
                                          : *d.subgradient_slack;
    }
    probe.directions.push_back(std::move(d));
  }
  return probe;
}

}  // namespace ifsm
