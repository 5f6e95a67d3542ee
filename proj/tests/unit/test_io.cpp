#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "ifsm/error.hpp"
#include "ifsm/io.hpp"
#include "ifsm/transfer.hpp"
#include "json.hpp"

using namespace ifsm;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs{IFSM_CONFIG_DIR};

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an ifsm::Error");
  return Error(ErrorCode::InvalidArgument, "");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ifsm_test_io";
  fs::create_directories(dir);
  return dir / name;
}

const char* kMinimal = R"({
  "version": 1,
  "domain": {"lower": [0], "upper": [1]},
  "maps": [
    {"label": "l", "matrix": [[0.5]], "offset": [0]},
    {"label": "r", "matrix": [[0.5]], "offset": [0.5]}
  ]
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled configs load") {
  const auto market = load_config(kConfigs / "market.json");
  CHECK(market.spec.branch_count() == 4);
  CHECK(market.spec.params().weights() == fixtures::kMarketFreq);
  CHECK(market.spec.params().label(3) == "D");
  CHECK(market.grid.nodes == std::array<int, 2>{33, 33});
  CHECK(market.grid.interpolation == Interpolation::nearest);
  CHECK(market.validation.passes);
  CHECK(market.validation.normalized);

  const auto halving = load_config(kConfigs / "halving.json");
  CHECK(halving.spec.dimension() == 1);
  CHECK(halving.grid.nodes[1] == 1);
  CHECK(halving.spec.params().weight(0) == doctest::Approx(0.5));

  const auto halving_exp = load_config(kConfigs / "halving_exp.json");
  CHECK(halving_exp.grid.nodes[0] == 2048);
  CHECK(halving_exp.spec.map_image(1, {0.5})[0] == doctest::Approx(0.75));
  CHECK(halving_exp.spec.branch_weight({1.0}, 0) == doctest::Approx(std::exp(0.5)));  // ψ(τ₀x)

  const auto uni = load_config(kConfigs / "market_uniform.json");
  CHECK(uni.spec.branch_weight({0.2, 0.9}, 0) == doctest::Approx(1.56));
  CHECK(uni.spec.q_mass({0.3, 0.3}) == doctest::Approx(1.0));

  CHECK(error_of([] { load_config(kConfigs / "missing.json"); }).code() == ErrorCode::IoError);
}

TEST_CASE("defaults for optional fields") {
  const auto c = parse_config(kMinimal);
  CHECK(c.spec.params().weight(1) == 0.5);
  CHECK(c.spec.branch_weight({0.3}, 1) == 1.0);
  CHECK(c.grid.nodes[0] == 65);
  CHECK(c.grid.interpolation == Interpolation::multilinear);
}

TEST_CASE("schema errors carry a pointer") {
  auto path_of = [](const std::string& text) {
    const Error e = error_of([&] { parse_config(text); });
    CHECK(e.code() == ErrorCode::SchemaError);
    const std::string msg = e.what();
    return msg.substr(msg.find(": ") + 2);
  };
  const std::string base = kMinimal;
  CHECK(path_of(with(base, "\"version\": 1,", "\"version\": 1, \"apriori\": [0.5, -0.5],")).find("/apriori/1") == 0);
  CHECK(path_of(with(base, "\"version\": 1", "\"version\": 2")).find("/version") == 0);
  CHECK(path_of(with(base, "\"version\": 1,", "\"version\": 1, \"extra\": 3,")).find("/extra") == 0);
  CHECK(path_of(with(base, "[[0.5]], \"offset\": [0.5]", "[[0.5]], \"offset\": [\"a\"]")).find("/maps/1/offset") == 0);
  CHECK(path_of(with(base, "\"version\": 1,", "\"version\": 1, \"weighting\": {\"potential\": \"x +\"},"))
            .find("/weighting/potential") == 0);
  CHECK(path_of(with(base, "\"version\": 1,", "\"version\": 1, \"weighting\": {\"density\": [\"1\"]},"))
            .find("/weighting/density") == 0);
  CHECK(path_of("{\"version\": 1,").find("/") == 0);
  CHECK(path_of("[]").find("/") == 0);
  CHECK(path_of(R"({"maps": []})").find("domain") != std::string::npos);
}

TEST_CASE("invalid systems are reported or raised") {
  // second map escapes the interval
  const std::string escaping = with(kMinimal, "\"offset\": [0.5]", "\"offset\": [0.75]");
  const auto c = parse_config(escaping, false);
  CHECK_FALSE(c.validation.passes);
  CHECK_FALSE(c.validation.maps_contained);
  CHECK(c.validation.max_escape == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_config(escaping), Error);
}

TEST_CASE("config round trip preserves evaluations") {
  for (const char* name : {"market.json", "market_uniform.json", "halving.json", "halving_exp.json"}) {
    INFO(name);
    const auto a = load_config(kConfigs / name);
    const auto text = config_to_json(a.spec, a.grid);
    const auto b = parse_config(text);
    CHECK(b.grid.nodes == a.grid.nodes);
    CHECK(b.grid.interpolation == a.grid.interpolation);
    CHECK(b.spec.name() == a.spec.name());
    CHECK(b.spec.params().labels() == a.spec.params().labels());
    CHECK(config_to_json(b.spec, b.grid) == text);

    const Grid g = a.spec.dimension() == 1 ? Grid(a.spec.domain(), {17, 1}) : Grid(a.spec.domain(), 9);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.node(i);
      for (std::size_t t = 0; t < a.spec.branch_count(); ++t) {
        REQUIRE(b.spec.branch_weight(x, t) == a.spec.branch_weight(x, t));
        REQUIRE(b.spec.map_image(t, x) == a.spec.map_image(t, x));
      }
    }
  }

  const auto path = scratch("round.json");
  const auto a = load_config(kConfigs / "halving_exp.json");
  write_config(a.spec, a.grid, path);
  CHECK(load_config(path).spec.branch_weight({0.3}, 1) == a.spec.branch_weight({0.3}, 1));

  const SystemSpec opaque = fixtures::halving_exp(1.0);
  CHECK(error_of([&] { config_to_json(opaque); }).code() == ErrorCode::InvalidArgument);
}

TEST_CASE("symbolization rules") {
  const std::vector<double> series{100.0, 99.0, 99.9999, 100.00005, 101.0};
  const auto s = symbolize(series);
  CHECK(s.symbols == "ADCD");
  CHECK(s.counts == std::array<std::size_t, 4>{1, 0, 1, 2});
  CHECK(s.frequencies[3] == 0.5);
  CHECK(s.source_length == 5);

  const std::vector<double> flat(10, 3.0);
  CHECK(symbolize(flat).symbols == std::string(9, 'C'));

  // boundaries: r = −thr is B, r = +thr is D, r = 0 is C
  const std::vector<double> edges{1.0, 0.5, 0.5, 1.0};
  CHECK(symbolize(edges, 0.5).symbols == "BCD");
  CHECK(symbolize(std::vector<double>{1.0, 0.25}, 0.5).symbols == "A");
  CHECK(symbolize(std::vector<double>{1.0, 1.25}, 0.5).symbols == "C");
  CHECK(symbolize(std::vector<double>{-2.0, -3.0}, 0.0).symbols == "D");  // relative change of a negative value

  CHECK(error_of([] { symbolize(std::vector<double>{1.0}); }).code() == ErrorCode::TooShort);
  CHECK(error_of([] { symbolize(std::vector<double>{1.0, 0.0, 2.0}); }).code() == ErrorCode::ZeroPreviousValue);

  double total = 0.0;
  for (double f : symbolize(std::vector<double>{1, 2, 1, 1, 3, 2.9999, 2.5}).frequencies) total += f;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("CSV column parsing") {
  CHECK(parse_csv_column("1\n2.5\n-3e2\n") == std::vector<double>{1.0, 2.5, -300.0});
  CHECK(parse_csv_column("close\n1\n2\n") == std::vector<double>{1.0, 2.0});
  CHECK(parse_csv_column("1\r\n2\r\n\r\n") == std::vector<double>{1.0, 2.0});

  const std::string table = "date,open,close\nd1,1,10\nd2,2,20\nd3,3,30\n";
  CHECK(parse_csv_column(table, {.name = "close"}) == std::vector<double>{10.0, 20.0, 30.0});
  CHECK(parse_csv_column(table, {.index = 1}) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(error_of([&] { parse_csv_column(table); }).code() == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { parse_csv_column(table, {.name = "volume"}); }).code() == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { parse_csv_column(table, {.index = 7}); }).code() == ErrorCode::InvalidArgument);

  // the same column is read regardless of its position
  const std::string permuted = "close,date,open\n10,d1,1\n20,d2,2\n30,d3,3\n";
  CHECK(parse_csv_column(permuted, {.name = "close"}) == parse_csv_column(table, {.name = "close"}));

  const Error bad = error_of([] { parse_csv_column("v\n1\n2\nx\n4\n"); });
  CHECK(bad.code() == ErrorCode::NonNumericCell);
  CHECK(std::string(bad.what()).find("line 4") != std::string::npos);

  const auto path = scratch("series.csv");
  write_text(path, "price\n100\n99\n99.9999\n100.00005\n101\n");
  CHECK(ingest_timeseries(path).symbols == "ADCD");
  CHECK(error_of([] { ingest_timeseries(scratch("absent.csv")); }).code() == ErrorCode::IoError);
}

TEST_CASE("emitted configs parse back") {
  const auto s = symbolize(std::vector<double>{100.0, 99.0, 99.9999, 100.00005, 101.0});
  const auto c = parse_config(emit_config(s, "prices"));
  CHECK(c.spec.name() == "prices");
  CHECK(c.spec.branch_count() == 4);
  CHECK(c.spec.params().labels() == std::vector<std::string>{"A", "B", "C", "D"});
  for (std::size_t k = 0; k < 4; ++k) CHECK(c.spec.params().weight(k) == s.frequencies[k]);
  CHECK(c.grid.interpolation == Interpolation::nearest);
  CHECK(dyadic_quadrant_labels(c.spec) == std::optional<std::vector<std::size_t>>({0, 1, 2, 3}));
  CHECK(c.spec.map_image(3, {0.5, 0.5}) == Point{0.75, 0.75});
}

TEST_CASE("PGM output") {
  ImageGrid one{1, 1, {255}};
  CHECK(to_pgm(one) == "P2\n1 1\n255\n255\n");

  ImageGrid flat{4, 4, std::vector<std::uint8_t>(16, 128)};
  const auto text = to_pgm(flat);
  CHECK(text.rfind("P2\n4 4\n255\n", 0) == 0);
  CHECK(text.find("128 128 128 128\n") != std::string::npos);

  const auto path = scratch("img.pgm");
  write_pgm(flat, path);
  CHECK(read_text(path) == text);
  CHECK(error_of([] { write_pgm(ImageGrid{}, scratch("empty.pgm")); }).code() == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { write_pgm(flat, scratch("no/such/dir/x.pgm")); }).code() == ErrorCode::IoError);
}

TEST_CASE("report documents") {
  using nlohmann::json;
  const auto spec = fixtures::market();
  const auto orbit = sample_orbit(spec, {0.5, 0.5}, 5000, 42);
  const auto h = empirical_measure(orbit, spec, 2);
  const auto doc = json::parse(report_json(h, orbit));
  CHECK(doc["seed"] == 42);
  CHECK(doc["steps"] == 5000);
  CHECK(doc["samples"] == 4000);
  CHECK(doc["counts"].size() == 16);
  CHECK(doc["weights"][0].get<double>() == h.weight(0));

  const auto s = json::parse(report_json(symbolize(std::vector<double>{1.0, 2.0, 1.0})));
  CHECK(s["symbols"] == "DA");
  CHECK(s["frequencies"]["A"].get<double>() == 0.5);

  const auto v = json::parse(report_json(validate_system(spec, 9)));
  CHECK(v["passes"] == true);
}
