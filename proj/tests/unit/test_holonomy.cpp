#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ifsm/holonomy.hpp"
#include "ifsm/spectral.hpp"

using namespace ifsm;

namespace {

DiscreteFunction identity(const Grid& g) { return DiscreteFunction::sample(g, [](const Point& p) { return p[0]; }); }

DiscreteMeasure invariant(const SystemSpec& spec, const Grid& g, Interpolation mode) {
  return eigenmeasure(assemble_transfer(spec, g, mode)).measure;
}

}  // namespace

TEST_CASE("lift of the market invariant measure") {
  const Grid g = fixtures::dyadic_grid(4);
  const auto spec = fixtures::market();
  const auto nu = invariant(spec, g, Interpolation::nearest);
  const LiftResult lift = holonomic_lift(spec, nu, Interpolation::nearest);
  CHECK(lift.invariant);
  CHECK(lift.measure.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t b = 0; b < 4; ++b) CHECK(lift.measure.weight(i, b) == nu.weights[i] * fixtures::kMarketFreq[b]);
  }
  const Disintegration dis = disintegrate(lift.measure);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!dis.defined[i]) continue;
    for (std::size_t b = 0; b < 4; ++b) CHECK(dis.at(i)[b] == doctest::Approx(fixtures::kMarketFreq[b]).epsilon(1e-14));
  }
}

TEST_CASE("lift of Lebesgue for the halving maps") {
  const Grid g(DomainBox::unit(1), 1024);
  const auto spec = fixtures::halving();
  const auto nu = invariant(spec, g, Interpolation::multilinear);
  const LiftResult lift = holonomic_lift(spec, nu);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(lift.measure.weight(i, 1) == nu.weights[i] / 2);
  const DiscreteFunction f[] = {identity(g)};
  CHECK(holonomy_residual(lift.measure, spec, f) <= 1e-3);
}

TEST_CASE("non-invariant marginal gives a positive residual") {
  const Grid g(DomainBox::unit(1), 65);
  const auto spec = fixtures::halving();
  const auto nu = DiscreteMeasure::point_mass(g, 10);
  const LiftResult lift = holonomic_lift(spec, nu);
  CHECK_FALSE(lift.invariant);
  const DiscreteFunction f[] = {identity(g)};
  const double x = g.node(10)[0];
  // ½(x/2 − x) + ½(x/2 + ½ − x) = ¼ − x/2.
  CHECK(holonomy_residual(lift.measure, spec, f) == doctest::Approx(std::abs(0.25 - x / 2)).epsilon(1e-14));
}

TEST_CASE("constant test functions have zero residual") {
  const Grid g(DomainBox::unit(1), 33);
  const auto spec = fixtures::halving_exp(1.0);
  const auto m = HolonomicMeasure::point_mass(g, 2, 7, 1);
  const DiscreteFunction f[] = {DiscreteFunction::constant(g, 3.0)};
  CHECK(holonomy_residual(m, spec, f) == 0.0);
}

TEST_CASE("single atom residual") {
  const Grid g(DomainBox::unit(1), 33);
  const auto spec = fixtures::halving();
  const auto m = HolonomicMeasure::point_mass(g, 2, 5, 1);
  const DiscreteFunction f[] = {identity(g)};
  const double x = g.node(5)[0];
  CHECK(holonomy_residual(m, spec, f) == doctest::Approx(std::abs(x / 2 + 0.5 - x)).epsilon(1e-15));
}

TEST_CASE("lift requires a normalized system") {
  const Grid g(DomainBox::unit(1), 33);
  try {
    holonomic_lift(fixtures::halving_exp(1.0), DiscreteMeasure::uniform(g));
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNormalized);
  }
}

TEST_CASE("lift residual shrinks with the invariance residual under refinement") {
  for (const SystemSpec& spec : {fixtures::halving_exp(1.0), fixtures::market_uniform()}) {
    const bool two_d = spec.dimension() == 2;
    double previous = INFINITY;
    for (int level : {4, 6}) {
      const Grid g = two_d ? fixtures::dyadic_grid(level) : Grid(DomainBox::unit(1), (1 << (level + 3)) + 1);
      const auto s = power_iteration(assemble_transfer(spec, g));
      const SystemSpec n = normalize_system(spec, s);
      const auto nu = eigenmeasure(assemble_transfer(n, g)).measure;
      const LiftResult lift = holonomic_lift(n, nu);
      std::vector<DiscreteFunction> fs{identity(g), DiscreteFunction::sample(g, [](const Point& p) { return std::cos(4 * p[0] + p[1]); })};
      const double r = holonomy_residual(lift.measure, n, fs);
      CHECK(r <= lift.invariance_residual * 1.0 + 1e-12);
      CHECK(lift.invariance_residual <= 1e-9);
      CHECK(r <= previous + 1e-12);
      previous = r;
    }
  }
}

TEST_CASE("empirical measures obey the telescoping bound") {
  const auto spec = fixtures::market();
  const Grid g = fixtures::dyadic_grid(5);
  std::vector<DiscreteFunction> fs{identity(g), DiscreteFunction::sample(g, [](const Point& p) { return p[1] * p[1]; }),
                                   DiscreteFunction::sample(g, [](const Point& p) { return std::sin(9 * p[0] * p[1]); })};
  for (std::size_t n : {1UL, 100UL, 10000UL}) {
    const OrbitRecord orbit = sample_orbit(spec, {0.5, 0.5}, n, 17);
    const HolonomicMeasure m = empirical_holonomic(orbit, g, 4);
    CHECK(m.atoms.size() == n);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.marginal().is_probability(1e-12));
    for (const auto& f : fs) {
      const std::span<const DiscreteFunction> one(&f, 1);
      CHECK(holonomy_residual(m, spec, one) <= 2.0 * f.sup_norm() / static_cast<double>(n));
    }
  }
  const OrbitRecord one_step = sample_orbit(spec, {0.5, 0.5}, 1, 3);
  const HolonomicMeasure m = empirical_holonomic(one_step, g, 4);
  const DiscreteFunction f[] = {identity(g)};
  CHECK(holonomy_residual(m, spec, f) == doctest::Approx(std::abs(one_step.points[1][0] - 0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(empirical_holonomic(OrbitRecord{}, g, 4), Error);
}

TEST_CASE("disintegration") {
  const Grid g(DomainBox::unit(1), 9);
  SUBCASE("single atom") {
    const auto m = HolonomicMeasure::point_mass(g, 3, 4, 2);
    const Disintegration d = disintegrate(m);
    CHECK(d.marginal.weights[4] == 1.0);
    CHECK(d.defined[4]);
    CHECK_FALSE(d.defined[3]);
    CHECK(d.at(4)[2] == 1.0);
    CHECK(d.at(4)[0] == 0.0);
  }
  SUBCASE("bit-exact recombination of random measures") {
    OrbitRng rng(23, 0);
    for (int trial = 0; trial < 200; ++trial) {
      HolonomicMeasure m{g, 3, Interpolation::multilinear, std::vector<double>(g.size() * 3), {}};
      double total = 0.0;
      for (auto& w : m.weights) total += (w = rng.uniform() < 0.2 ? 0.0 : rng.uniform());
      for (auto& w : m.weights) w /= total;
      const Disintegration d = disintegrate(m);
      CHECK(d.recombine() == m.weights);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!d.defined[i]) continue;
        double s = 0.0;
        for (double c : d.at(i)) s += c;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("convex combinations do not increase the worst residual") {
  const Grid g(DomainBox::unit(1), 65);
  const auto spec = fixtures::halving();
  const DiscreteFunction f[] = {identity(g)};
  const auto a = holonomic_lift(spec, DiscreteMeasure::point_mass(g, 3)).measure;
  const auto b = holonomic_lift(spec, DiscreteMeasure::point_mass(g, 50)).measure;
  const double ra = holonomy_residual(a, spec, f), rb = holonomy_residual(b, spec, f);
  for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    CHECK(holonomy_residual(HolonomicMeasure::mix(a, b, t), spec, f) <= std::max(ra, rb) + 1e-15);
  }
  const OrbitRecord o1 = sample_orbit(spec, {0.2, 0}, 50, 1), o2 = sample_orbit(spec, {0.7, 0}, 80, 2);
  const auto emp1 = empirical_holonomic(o1, g, 2), emp2 = empirical_holonomic(o2, g, 2);
  const auto mixed = HolonomicMeasure::mix(emp1, emp2, 0.3);
  CHECK(mixed.atoms.size() == 130);
  CHECK(holonomy_residual(mixed, spec, f) <=
        std::max(holonomy_residual(emp1, spec, f), holonomy_residual(emp2, spec, f)) + 1e-15);
}
