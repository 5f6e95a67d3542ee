#include "ifsm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace ifsm {

std::vector<GelfandPoint> spectral_radius_gelfand(const TransferMatrix& B, int n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
  const std::size_t n = B.size();
  std::vector<double> v(n, 1.0), w(n);
  double log_scale = 0.0;
  std::vector<GelfandPoint> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int step = 1; step <= n_max; ++step) {
    B.multiply(v, w);
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    if (!(*lo > 0.0)) {
      throw Error(ErrorCode::Overflow, "B^N(1) has a zero entry at N=" + std::to_string(step) +
                                           " (a node with zero q mass)");
    }
    const double top = *hi;
    const double bottom = *lo;
    log_scale += std::log(top);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / top;
    GelfandPoint p;
    p.n = step;
    p.estimate = log_scale / step;
    p.spread = (std::log(top) - std::log(bottom)) / step;
    out.push_back(p);
  }
  return out;
}

SpectralResult power_iteration(const TransferMatrix& B, double tol, int max_iter, std::span<const double> start) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const std::size_t n = B.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(B.row_sum(i) > 0.0)) {
      throw Error(ErrorCode::DegenerateOperator, "B(1) vanishes at node " + std::to_string(i));
    }
  }
  std::vector<double> v(n, 1.0), w(n);
  if (!start.empty()) {
    if (start.size() != n) throw Error(ErrorCode::GridMismatch, "start vector has the wrong size");
    const double top = *std::max_element(start.begin(), start.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (!(start[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "start vector must be positive");
      v[i] = start[i] / top;
    }
  }

  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    B.multiply(v, w);
    const double rho = *std::max_element(w.begin(), w.end());
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(w[i] - rho * v[i]));
    if (residual <= tol * rho) {
      if (!(*std::min_element(v.begin(), v.end()) > 0.0)) {
        throw Error(ErrorCode::NonPositiveEigenfunction, "power iteration limit has a zero entry");
      }
      return SpectralResult{rho, std::log(rho), DiscreteFunction(B.grid(), v), B.interpolation(), it, residual};
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / rho;
  }
  throw ConvergenceError("power_iteration", residual, max_iter);
}

std::vector<bool> recurrent_nodes(const TransferMatrix& B) {
  const std::size_t n = B.size();
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnseen), low(n), comp(n, kUnseen);
  std::vector<std::size_t> stack, component_of_root;
  std::vector<bool> on_stack(n, false);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    B.for_each_in_row(i, [&](std::size_t j, double v) {
      if (v > 0.0) succ[i].push_back(j);
    });
  }

  // iterative Tarjan
  std::size_t counter = 0, components = 0;
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnseen) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      if (next < succ[v].size()) {
        const std::size_t w = succ[v][next++];
        if (index[w] == kUnseen) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = components;
        } while (w != done);
        ++components;
      }
    }
  }

  std::vector<bool> closed(components, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : succ[i]) {
      if (comp[j] != comp[i]) closed[comp[i]] = false;
    }
  }
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = closed[comp[i]];
  return out;
}

DiscreteMeasure drop_transient_mass(const TransferMatrix& B, const DiscreteMeasure& m) {
  require_same_grid(B.grid(), m.grid, "drop_transient_mass");
  const std::vector<bool> keep = recurrent_nodes(B);
  std::vector<double> w = m.weights;
  double mass = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!keep[i]) w[i] = 0.0;
    mass += w[i];
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateOperator, "no mass on recurrent nodes");
  for (auto& x : w) x /= mass;
  return DiscreteMeasure(m.grid, std::move(w));
}

EigenmeasureResult eigenmeasure(const TransferMatrix& B, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const std::size_t n = B.size();
  std::vector<double> g(n, 1.0 / static_cast<double>(n)), w(n);
  double residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    B.multiply_transpose(g, w);
    double mass = 0.0;
    for (double x : w) mass += x;
    if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateOperator, "Markov operator maps a measure to zero");
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(w[i] - mass * g[i]);
    if (residual <= tol * mass) {
      return EigenmeasureResult{mass, DiscreteMeasure(B.grid(), g), residual, it};
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = w[i] / mass;
  }
  throw ConvergenceError("eigenmeasure", residual, max_iter);
}

SystemSpec normalize_system(const SystemSpec& spec, const SpectralResult& s) {
  if (!(s.eigenfunction.min() > 0.0)) {
    throw Error(ErrorCode::NonPositiveEigenfunction, "eigenfunction must be strictly positive");
  }
  if (!(s.rho > 0.0)) throw Error(ErrorCode::NonPositiveEigenfunction, "spectral radius must be positive");
  auto base = std::make_shared<const SystemSpec>(spec);
  auto h = std::make_shared<const DiscreteFunction>(s.eigenfunction);
  const double rho = s.rho;
  const Interpolation mode = s.interpolation;
  auto fn = [base, h, rho, mode](const Point& x, std::size_t b) {
    const double hx = interpolate(h->grid, h->values, x, mode);
    const double hy = interpolate(h->grid, h->values, base->map_image(b, x), mode);
    return base->branch_weight(x, b) * hy / (rho * hx);
  };
  return spec.with_weighting(DensityFamily::from_function(fn, "normalized(" + spec.name() + ")"),
                             spec.name().empty() ? "normalized" : spec.name() + " (normalized)");
}

SeedAgreement eigenfunction_seed_check(const TransferMatrix& B, double tol, int max_iter, std::uint64_t seed,
                                       double agreement_tol) {
  std::mt19937_64 rng(seed);
  std::vector<double> start(B.size());
  for (double& x : start) x = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
  SpectralResult a = power_iteration(B, tol, max_iter);
  SpectralResult b = power_iteration(B, tol, max_iter, start);
  double gap = 0.0;
  for (std::size_t i = 0; i < B.size(); ++i) {
    gap = std::max(gap, std::abs(a.eigenfunction.values[i] - b.eigenfunction.values[i]));
  }
  const double rho_gap = std::abs(a.rho - b.rho);
  const bool ok = rho_gap <= agreement_tol * a.rho && gap <= agreement_tol;
  return SeedAgreement{std::move(a), std::move(b), rho_gap, gap, ok};
}

}  // namespace ifsm
