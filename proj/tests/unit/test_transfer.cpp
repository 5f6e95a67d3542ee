#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "ifsm/transfer.hpp"

using namespace ifsm;

TEST_CASE("grid layout and stencils") {
  const Grid g(DomainBox::unit(2), {5, 3});
  CHECK(g.size() == 15);
  CHECK(g.node(0) == Point{0.0, 0.0});
  CHECK(g.node(14) == Point{1.0, 1.0});
  CHECK(g.node(6) == Point{0.25, 0.5});

  const Stencil s = g.stencil({0.3, 0.5}, Interpolation::multilinear);
  double total = 0.0;
  for (int k = 0; k < s.count; ++k) total += s.weight[k];
  CHECK(s.count == 2);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

  const Grid line(DomainBox::unit(1), 5);
  const Stencil tie = line.stencil({0.125, 0.0}, Interpolation::nearest);
  CHECK(tie.count == 1);
  CHECK(tie.node[0] == 0);
  CHECK(line.stencil({0.13, 0.0}, Interpolation::nearest).node[0] == 1);
  CHECK(line.stencil({1.0, 0.0}, Interpolation::multilinear).node[0] == 4);
}

TEST_CASE("B 1 reproduces q_mass") {
  SUBCASE("normalized market system") {
    for (auto mode : {Interpolation::nearest, Interpolation::multilinear}) {
      const Grid g = fixtures::dyadic_grid(3);
      const TransferMatrix B = assemble_transfer(fixtures::market(), g, mode);
      const auto one = apply_transfer(B, DiscreteFunction::constant(g, 1.0));
      for (double v : one.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("constant weight") {
    const Grid g(DomainBox::unit(1), 9);
    const auto spec = fixtures::halving().with_weighting(Potential::constant(3.0));
    const auto one = apply_transfer(assemble_transfer(spec, g), DiscreteFunction::constant(g, 1.0));
    for (double v : one.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("exponential potential at x = 0") {
    const Grid g(DomainBox::unit(1), 5);
    const auto spec = fixtures::halving_exp(1.0);
    const TransferMatrix B = assemble_transfer(spec, g);
    CHECK(B.row_sum(0) == doctest::Approx((1.0 + std::exp(0.5)) / 2.0).epsilon(1e-15));
    CHECK(B.row_sum(0) == doctest::Approx(1.3244).epsilon(1e-4));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(B.row_sum(i) - spec.q_mass(g.node(i))) <= 1e-10);
    CHECK(B.min_entry() >= 0.0);
  }
}

TEST_CASE("apply_transfer examples") {
  const Grid g(DomainBox::unit(1), 65);
  const TransferMatrix B = assemble_transfer(fixtures::halving(), g);
  const auto zero = apply_transfer(B, DiscreteFunction::constant(g, 0.0));
  for (double v : zero.values) CHECK(v == 0.0);
  const auto id = DiscreteFunction::sample(g, [](const Point& p) { return p[0]; });
  const auto out = apply_transfer(B, id);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(out.values[i] == doctest::Approx(g.node(i)[0] / 2 + 0.25).epsilon(1e-14));
  CHECK_THROWS_AS(apply_transfer(B, DiscreteFunction::constant(Grid(DomainBox::unit(1), 9), 1.0)), Error);
}

TEST_CASE("refinement consistency for a curved function") {
  // B f for f = x^2 against ½((x/2)^2 + (x/2+½)^2); error shrinks like h^2.
  double previous = 0.0;
  for (int m : {33, 65, 129}) {
    const Grid g(DomainBox::unit(1), m);
    const auto f = DiscreteFunction::sample(g, [](const Point& p) { return p[0] * p[0]; });
    const auto out = apply_transfer(assemble_transfer(fixtures::halving(), g), f);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i)[0];
      err = std::max(err, std::abs(out.values[i] - 0.5 * (x * x / 4 + (x / 2 + 0.5) * (x / 2 + 0.5))));
    }
    CHECK(err <= 0.5 * g.spacing(0) * g.spacing(0));
    if (previous > 0.0) CHECK(err < 0.3 * previous);
    previous = err;
  }
}

TEST_CASE("positivity and monotonicity") {
  const Grid g = fixtures::dyadic_grid(3);
  const TransferMatrix B = assemble_transfer(fixtures::market_uniform(), g);
  OrbitRng rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(g.size()), h(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = rng.uniform();
      h[i] = f[i] + rng.uniform();
    }
    const auto bf = apply_transfer(B, DiscreteFunction(g, f));
    const auto bh = apply_transfer(B, DiscreteFunction(g, h));
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(bf.values[i] >= 0.0);
      CHECK(bf.values[i] <= bh.values[i]);
    }
  }
}

TEST_CASE("Markov operator") {
  const Grid g(DomainBox::unit(1), 17);
  const auto halving = fixtures::halving();
  const TransferMatrix B = assemble_transfer(halving, g);
  const DiscreteMeasure m = DiscreteMeasure::uniform(g);
  CHECK(apply_markov(B, m).mass() == doctest::Approx(m.mass()).epsilon(1e-15));

  const auto c = assemble_transfer(halving.with_weighting(Potential::constant(2.0)), g);
  CHECK(apply_markov(c, m).mass() == doctest::Approx(2.0 * m.mass()).epsilon(1e-15));

  const auto f = DiscreteFunction::sample(g, [](const Point& p) { return std::sin(5 * p[0]); });
  const auto delta = DiscreteMeasure::point_mass(g, 5);
  CHECK(apply_markov(B, delta).integrate(f) == doctest::Approx(apply_transfer(B, f).values[5]).epsilon(1e-15));
}

TEST_CASE("duality is exact up to rounding") {
  OrbitRng rng(11, 0);
  auto check_system = [&](const SystemSpec& spec, const Grid& g, double bound) {
    const TransferMatrix B = assemble_transfer(spec, g);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> f(g.size()), w(g.size());
      for (auto& v : f) v = 2.0 * rng.uniform() - 1.0;
      for (auto& v : w) v = rng.uniform();
      worst = std::max(worst, duality_residual(B, DiscreteFunction(g, f), DiscreteMeasure(g, w).normalized()));
    }
    CHECK(worst < bound);
  };
  check_system(fixtures::halving(), Grid(DomainBox::unit(1), 64), 1e-13);
  check_system(fixtures::market(), fixtures::dyadic_grid(4), 1e-12);
  const Grid g(DomainBox::unit(1), 33);
  const TransferMatrix B = assemble_transfer(fixtures::halving_exp(1.0), g);
  const auto m = DiscreteMeasure::uniform(g);
  CHECK(std::abs(apply_markov(B, m).mass() - m.integrate(apply_transfer(B, DiscreteFunction::constant(g, 1.0)))) <=
        1e-14);
}

TEST_CASE("matrix export") {
  const Grid g(DomainBox::unit(1), 4);
  const TransferMatrix B = assemble_transfer(fixtures::halving(), g);
  const auto dir = std::filesystem::temp_directory_path();
  B.export_csv(dir / "ifsm_b.csv");
  B.export_binary(dir / "ifsm_b.bin");
  std::ifstream bin(dir / "ifsm_b.bin", std::ios::binary);
  char magic[8];
  bin.read(magic, 8);
  CHECK(std::string(magic, 8) == "IFSMTM01");
  std::uint64_t rows = 0, cols = 0;
  bin.read(reinterpret_cast<char*>(&rows), 8);
  bin.read(reinterpret_cast<char*>(&cols), 8);
  CHECK(rows == 4);
  CHECK(cols == 4);
  std::vector<double> dense(16);
  bin.read(reinterpret_cast<char*>(dense.data()), 16 * 8);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(dense[i * 4 + j] == B.entry(i, j));
  }
  std::ifstream csv(dir / "ifsm_b.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "# 4,4,multilinear");
}

TEST_CASE("grid mismatch") {
  const Grid g(DomainBox::unit(2), 5);
  CHECK_THROWS_AS(assemble_transfer(fixtures::halving(), g), Error);
}
