#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ifsm/chaos.hpp"
#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"

namespace fixtures {

using namespace ifsm;

inline const std::vector<double> kMarketFreq{0.39, 0.17, 0.15, 0.29};

inline std::vector<BranchMap> halving_maps() {
  return {AffineMap{{0.5, 0.0, 0.0, 0.5}, {0.0, 0.0}}, AffineMap{{0.5, 0.0, 0.0, 0.5}, {0.5, 0.0}}};
}

inline std::vector<BranchMap> quadrant_maps() {
  std::vector<BranchMap> maps;
  for (Point o : {Point{0.0, 0.0}, Point{0.5, 0.0}, Point{0.0, 0.5}, Point{0.5, 0.5}}) {
    maps.push_back(AffineMap{{0.5, 0.0, 0.0, 0.5}, o});
  }
  return maps;
}

/// τ0 = x/2, τ1 = x/2 + 1/2, μ uniform, ψ ≡ 1.
inline SystemSpec halving() {
  return SystemSpec(DomainBox::unit(1), ParameterSet::uniform({"0", "1"}), halving_maps(), Potential::constant(1.0),
                    "halving");
}

/// Same maps with ψ = exp(βx).
inline SystemSpec halving_exp(double beta) {
  return SystemSpec(DomainBox::unit(1), ParameterSet::uniform({"0", "1"}), halving_maps(),
                    Potential::from_function([beta](const Point& p) { return std::exp(beta * p[0]); }, "exp(beta x)"),
                    "halving-exp");
}

inline double halving_exp_log_rho(double beta) { return std::log((1.0 + std::exp(beta)) / 2.0); }

/// Four quadrant maps, a-priori measure = observed frequencies, ψ ≡ 1.
inline SystemSpec market() {
  return SystemSpec(DomainBox::unit(2), ParameterSet({"A", "B", "C", "D"}, kMarketFreq), quadrant_maps(),
                    Potential::constant(1.0), "market");
}

/// Four quadrant maps, uniform a-priori measure, J(x, θ) = 4 p_θ.
inline SystemSpec market_uniform() {
  std::vector<Expression> dens;
  for (double p : kMarketFreq) dens.push_back(Expression::constant(4.0 * p));
  return SystemSpec(DomainBox::unit(2), ParameterSet::uniform({"A", "B", "C", "D"}), quadrant_maps(),
                    DensityFamily::from_expressions(std::move(dens)), "market-uniform");
}

/// Quadrant of a point with half-open lower halves: 0 A, 1 B, 2 C, 3 D.
inline int quadrant(const Point& x) { return (x[0] < 0.5 ? 0 : 1) + (x[1] < 0.5 ? 0 : 2); }

/// H(p) − ln 4 by direct summation.
inline double market_entropy() {
  double h = 0.0;
  for (double p : kMarketFreq) h -= p * std::log(4.0 * p);
  return h;
}

/// Grid with 2^level + 1 nodes per axis on the unit square.
inline Grid dyadic_grid(int level) { return Grid(DomainBox::unit(2), (1 << level) + 1); }

/// A random one-dimensional system with two or three affine branches and a
/// positive potential, seeded.
inline SystemSpec random_system(std::uint64_t seed) {
  OrbitRng rng(seed, 99);
  const int n = 2 + static_cast<int>(rng.uniform() * 2.0);
  std::vector<BranchMap> maps;
  std::vector<std::string> labels;
  std::vector<double> weights;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = 0.2 + 0.5 * rng.uniform();
    const double b = rng.uniform() * (1.0 - a);
    maps.push_back(AffineMap{{a, 0.0, 0.0, 1.0}, {b, 0.0}});
    labels.push_back("t" + std::to_string(k));
    weights.push_back(0.2 + rng.uniform());
    total += weights.back();
  }
  for (auto& w : weights) w /= total;
  const double c1 = 2.0 * rng.uniform() - 1.0;
  const double c2 = 2.0 * rng.uniform() - 1.0;
  return SystemSpec(DomainBox::unit(1), ParameterSet(labels, weights), maps,
                    Potential::from_function(
                        [c1, c2](const Point& p) { return std::exp(c1 * p[0] + c2 * std::sin(3.0 * p[0])); }, "rand"),
                    "random-" + std::to_string(seed));
}

}  // namespace fixtures
