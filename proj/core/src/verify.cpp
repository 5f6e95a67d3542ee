#include "ifsm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ifsm/chaos.hpp"
#include "ifsm/holonomy.hpp"
#include "ifsm/spectral.hpp"
#include "ifsm/thermo.hpp"
#include "ifsm/transfer.hpp"

namespace ifsm {

namespace {

CheckResult upper(std::string name, double value, double bound) {
  return {std::move(name), value <= bound, value, bound, {}};
}

std::vector<DiscreteFunction> test_functions(const Grid& grid) {
  std::vector<DiscreteFunction> fs;
  fs.push_back(DiscreteFunction::sample(grid, [](const Point& p) { return p[0]; }));
  fs.push_back(DiscreteFunction::sample(grid, [](const Point& p) { return p[0] * p[0]; }));
  fs.push_back(DiscreteFunction::sample(grid, [](const Point& p) { return std::sin(7.0 * p[0] + 3.0 * p[1]); }));
  if (grid.dimension() == 2) {
    fs.push_back(DiscreteFunction::sample(grid, [](const Point& p) { return p[1]; }));
    fs.push_back(DiscreteFunction::sample(grid, [](const Point& p) { return p[0] * p[1]; }));
  }
  return fs;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const SystemSpec& spec, const Grid& grid, const VerifyOptions& o) {
  std::vector<CheckResult> out;
  const Interpolation mode = o.interpolation;
  const int res = std::max(grid.nodes(0), grid.dimension() == 2 ? grid.nodes(1) : 0);

  const ValidationReport vr = validate_system(spec, res);
  out.push_back({"validation", vr.passes, static_cast<double>(vr.issues.size()), 0.0,
                 vr.issues.empty() ? std::string{} : vr.issues.front().message});
  if (!vr.passes) return out;

  const TransferMatrix B = assemble_transfer(spec, grid, mode);
  OrbitRng rng(o.seed, 7);
  double worst_duality = 0.0;
  for (int k = 0; k < o.duality_pairs; ++k) {
    std::vector<double> f(grid.size()), m(grid.size());
    for (auto& v : f) v = 2.0 * rng.uniform() - 1.0;
    for (auto& v : m) v = rng.uniform();
    const DiscreteMeasure meas = DiscreteMeasure(grid, std::move(m)).normalized();
    worst_duality = std::max(worst_duality, duality_residual(B, DiscreteFunction(grid, std::move(f)), meas));
  }
  out.push_back(upper("duality_residual", worst_duality, 1e-12));

  const SeedAgreement seeds = eigenfunction_seed_check(B, o.tol, 100000, o.seed);
  out.push_back(upper("eigenfunction_seed_agreement", seeds.eigenfunction_gap, 1e-6));
  const SpectralResult& s = seeds.from_constant;

  const EigenmeasureResult em = eigenmeasure(B, o.tol);
  double inf_q = INFINITY, sup_q = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    inf_q = std::min(inf_q, B.row_sum(i));
    sup_q = std::max(sup_q, B.row_sum(i));
  }
  const double slack = 1e-12 * sup_q;
  out.push_back({"rho_star_within_q_bounds", inf_q - slack <= em.rho_star && em.rho_star <= sup_q + slack, em.rho_star,
                 sup_q, "inf q = " + std::to_string(inf_q)});
  out.push_back(upper("rho_star_below_rho", em.rho_star - s.rho, 1e-6));

  const auto table = spectral_radius_gelfand(B, o.gelfand_max);
  const double hmin = s.eigenfunction.min(), hmax = s.eigenfunction.max();
  const double rate_bound = 2.0 * std::log(hmax / hmin) + 1e-9;
  double worst_rate = 0.0;
  for (const auto& row : table) {
    if (row.n >= 10) worst_rate = std::max(worst_rate, row.n * row.spread);
  }
  out.push_back(upper("gelfand_uniform_rate", worst_rate, rate_bound));
  out.push_back(upper("gelfand_estimate", std::abs(table.back().estimate - s.log_rho), 1e-2));

  ThermoOptions topt;
  topt.interpolation = mode;
  topt.tol = o.tol;
  auto [lift, thermo] = equilibrium_state(spec, grid, topt);
  out.push_back(upper("variational_bound", thermo.variational_lower_bound - thermo.pressure, 1e-6));
  out.push_back(upper("equilibrium_defect", thermo.equilibrium_defect, 1e-3));

  const SystemSpec normalized = normalize_system(spec, s);
  const EntropyReport er = entropy_variational(lift, normalized);
  out.push_back(upper("h_v_nonpositive", er.h_v, 1e-9));
  out.push_back(upper("h_a_below_h_v", er.h_a - er.h_v, 1e-6));

  const auto fs = test_functions(grid);
  double fmax = 0.0;
  for (const auto& f : fs) fmax = std::max(fmax, f.sup_norm());
  const double hol = holonomy_residual(lift, normalized, fs);
  out.push_back(upper("lift_holonomy", hol, thermo.invariance_residual * fmax + 1e-10));

  const Disintegration dis = disintegrate(lift);
  const std::vector<double> back = dis.recombine();
  std::size_t mismatched = 0;
  for (std::size_t k = 0; k < back.size(); ++k) mismatched += back[k] != lift.weights[k];
  out.push_back(upper("disintegration_exact", static_cast<double>(mismatched), 0.0));

  Point z0{};
  for (int a = 0; a < spec.dimension(); ++a) z0[a] = 0.5 * (spec.domain().lower[a] + spec.domain().upper[a]);
  const OrbitRecord orbit = sample_orbit(spec, z0, o.orbit_length, o.seed);
  out.push_back(upper("orbit_consistency", orbit_consistency(spec, orbit), 1e-15));
  const HolonomicMeasure emp = empirical_holonomic(orbit, grid, spec.branch_count(), mode);
  double worst_tel = 0.0;
  for (const auto& f : fs) {
    const std::span<const DiscreteFunction> one(&f, 1);
    const double ratio = holonomy_residual(emp, spec, one) / (2.0 * f.sup_norm() / static_cast<double>(orbit.length()));
    worst_tel = std::max(worst_tel, ratio);
  }
  out.push_back(upper("telescoping_ratio", worst_tel, 1.0));

  const OrbitRecord again = sample_orbit(spec, z0, o.orbit_length, o.seed);
  const bool same = again.labels == orbit.labels && again.points == orbit.points;
  out.push_back({"orbit_determinism", same, same ? 0.0 : 1.0, 0.0, {}});
  return out;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::string out;
  char buf[256];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%-30s %s  value=%.6e  bound=%.6e", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                  c.value, c.bound);
    out += buf;
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += '\n';
  }
  return out;
}

}  // namespace ifsm
