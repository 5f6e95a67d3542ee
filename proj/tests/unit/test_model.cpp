#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ifsm/model.hpp"

using namespace ifsm;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("domain box checks") {
  const double lo[] = {0.0, 0.0}, hi[] = {1.0, 2.0}, bad[] = {1.0, 0.0};
  const DomainBox box = DomainBox::make(lo, hi);
  CHECK(box.dimension == 2);
  CHECK(box.extent(1) == 2.0);
  CHECK(code_of([&] { DomainBox::make(lo, bad); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([&] { DomainBox::make(std::span(lo, 1), hi); }) == ErrorCode::InvalidDomain);
  CHECK(box.contains({1.0, 2.0}));
  CHECK_FALSE(box.contains({1.0 + 1e-12, 2.0}));
  CHECK(box.contains({1.0 + 1e-12, 2.0}, 1e-9));
}

TEST_CASE("parameter set contract") {
  CHECK(code_of([] { ParameterSet({}, {}); }) == ErrorCode::EmptyParameterSet);
  CHECK(code_of([] { ParameterSet({"a", "b"}, {1.2, -0.2}); }) == ErrorCode::InvalidParameterSet);
  CHECK(code_of([] { ParameterSet({"a", "a"}, {0.5, 0.5}); }) == ErrorCode::InvalidParameterSet);
  CHECK(code_of([] { ParameterSet({"a", "b"}, {0.5, 0.6}); }) == ErrorCode::InvalidParameterSet);
  const ParameterSet p({"A", "B"}, {0.25, 0.75});
  CHECK(p.index_of("B") == 1);
  CHECK(code_of([&] { p.index_of("Z"); }) == ErrorCode::UnknownParameter);
}

TEST_CASE("market system validates as normalized") {
  const auto r = validate_system(fixtures::market(), 17);
  CHECK(r.passes);
  CHECK(r.normalized);
  CHECK(r.sup_q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.inf_q == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.maps_contained);
}

TEST_CASE("J = 1 with uniform a-priori measure") {
  const auto r = validate_system(fixtures::halving(), 33);
  CHECK(r.passes);
  CHECK(r.sup_q == 1.0);
  CHECK(r.inf_q == 1.0);
}

TEST_CASE("exponential potential on the halving maps") {
  const auto r = validate_system(fixtures::halving_exp(1.0), 101);
  CHECK(r.passes);
  CHECK_FALSE(r.normalized);
  CHECK(r.sup_q == doctest::Approx((std::exp(0.5) + std::exp(1.0)) / 2.0).epsilon(1e-14));
  CHECK(r.inf_q == doctest::Approx((1.0 + std::exp(0.5)) / 2.0).epsilon(1e-14));
}

TEST_CASE("validation failures are recorded") {
  auto spec = fixtures::halving().with_weighting(DensityFamily::from_expressions(
      {Expression::parse("x - 0.5"), Expression::constant(1.0)}));
  auto r = validate_system(spec, 11);
  CHECK_FALSE(r.passes);
  REQUIRE_FALSE(r.issues.empty());
  CHECK(r.issues.front().code == ErrorCode::NonPositiveDensity);
  CHECK(code_of([&] { r.raise_if_failed(); }) == ErrorCode::NonPositiveDensity);

  SystemSpec escaping(DomainBox::unit(1), ParameterSet::uniform({"a", "b"}),
                      {AffineMap{{0.5, 0, 0, 0.5}, {0.0, 0}}, AffineMap{{0.5, 0, 0, 0.5}, {0.6, 0}}},
                      Potential::constant(1.0));
  r = validate_system(escaping, 11);
  CHECK_FALSE(r.passes);
  CHECK_FALSE(r.maps_contained);
  CHECK(r.max_escape == doctest::Approx(0.1));
  CHECK(r.issues.front().code == ErrorCode::MapEscapesDomain);
}

TEST_CASE("q_mass examples") {
  CHECK(q_mass(fixtures::market(), {0.3, 0.9}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(q_mass(fixtures::halving_exp(1.0), {0.0, 0.0}) == doctest::Approx((1.0 + std::exp(0.5)) / 2.0).epsilon(1e-15));
  SystemSpec three(DomainBox::unit(1), ParameterSet::uniform({"a", "b", "c"}),
                   {AffineMap{{0.3, 0, 0, 1}, {0, 0}}, AffineMap{{0.3, 0, 0, 1}, {0.3, 0}},
                    AffineMap{{0.3, 0, 0, 1}, {0.6, 0}}},
                   Potential::constant(2.5));
  CHECK(q_mass(three, {0.7, 0.0}) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(code_of([&] { q_mass(three, {1.5, 0.0}); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("evaluate_map examples") {
  const auto spec = fixtures::market();
  const Point d = evaluate_map(spec, "D", {0.5, 0.5});
  CHECK(d[0] == 0.75);
  CHECK(d[1] == 0.75);
  const Point a = evaluate_map(spec, "A", {0.0, 0.0});
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
  CHECK(evaluate_map(fixtures::halving(), "1", {1.0, 0.0})[0] == 1.0);
  CHECK(code_of([&] { evaluate_map(spec, "E", {0.5, 0.5}); }) == ErrorCode::UnknownParameter);
  CHECK(code_of([&] { evaluate_map(spec, "A", {1.5, 0.5}); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("potential and the equivalent density give the same q_mass") {
  const auto pot = fixtures::halving_exp(1.3);
  const auto dens = pot.with_weighting(DensityFamily::from_function(
      [&](const Point& x, std::size_t b) { return std::exp(1.3 * pot.map_image(b, x)[0]); }, "psi o tau"));
  for (int i = 0; i <= 50; ++i) {
    const Point x{i / 50.0, 0.0};
    CHECK(std::abs(pot.q_mass(x) - dens.q_mass(x)) <= 1e-12);
  }
}

TEST_CASE("normalized flag implies unit q_mass at every node") {
  for (const SystemSpec& s : {fixtures::market(), fixtures::market_uniform(), fixtures::halving()}) {
    const auto r = validate_system(s, 9);
    REQUIRE(r.normalized);
    CHECK(std::abs(r.sup_q - 1.0) <= 1e-12);
    CHECK(std::abs(r.inf_q - 1.0) <= 1e-12);
  }
}

TEST_CASE("structural checks") {
  CHECK(code_of([] {
          SystemSpec(DomainBox::unit(1), ParameterSet::uniform({"a", "b"}), {AffineMap{}}, Potential::constant(1.0));
        }) == ErrorCode::ValidationError);
}
