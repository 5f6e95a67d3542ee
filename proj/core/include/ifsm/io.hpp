#pragma once

// Boundary formats: JSON system configs, CSV time series, PGM images and
// JSON reports.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifsm/chaos.hpp"
#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"
#include "ifsm/spectral.hpp"
#include "ifsm/thermo.hpp"

namespace ifsm {

inline constexpr int kConfigVersion = 1;

struct GridSettings {
  std::array<int, 2> nodes{65, 65};
  Interpolation interpolation = Interpolation::multilinear;

  Grid make(const DomainBox& box) const { return Grid(box, nodes); }
};

struct Config {
  SystemSpec spec;
  GridSettings grid;
  ValidationReport validation;
};

/// Parses and validates a config document. Throws Error{SchemaError} with a
/// JSON pointer to the offending value, or the first validation issue unless
/// `raise_on_invalid` is false (the report is then left in the result).
Config parse_config(std::string_view json_text, bool raise_on_invalid = true);
/// Throws Error{IoError} when the file cannot be read.
Config load_config(const std::filesystem::path& path, bool raise_on_invalid = true);

/// Pretty-printed JSON. Throws Error{InvalidArgument} when a map or the
/// weighting is not expression-backed.
std::string config_to_json(const SystemSpec& spec, const GridSettings& grid = {});
void write_config(const SystemSpec& spec, const GridSettings& grid, const std::filesystem::path& path);

/// Symbols A–D of the relative changes of a series.
struct SymbolSeries {
  std::string symbols;
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> frequencies{};
  std::size_t source_length = 0;
  double threshold = 1e-4;
};

/// r = (v_t − v_{t−1}) / v_{t−1}: A if r < −thr, B if −thr ≤ r < 0, C if
/// 0 ≤ r < thr, D if r ≥ thr. Throws Error{TooShort} or
/// Error{ZeroPreviousValue}.
SymbolSeries symbolize(std::span<const double> values, double threshold = 1e-4);

/// Which CSV column holds the values: a header name or a zero-based index.
struct ColumnSelector {
  std::optional<std::string> name;
  std::optional<std::size_t> index;
};

/// Reads one numeric column. A first row that is not numeric in that column
/// is taken as a header. A single-column file needs no selector. Throws
/// Error{NonNumericCell} with the 1-based line, Error{IoError},
/// Error{InvalidArgument} for an unknown column.
std::vector<double> parse_csv_column(std::string_view text, const ColumnSelector& column = {});

SymbolSeries ingest_timeseries(const std::filesystem::path& csv, double threshold = 1e-4,
                               const ColumnSelector& column = {});

/// Four dyadic maps of the unit square with the observed frequencies as
/// a-priori weights and ψ ≡ 1.
std::string emit_config(const SymbolSeries& series, std::string name = "ingested");

/// ASCII "P2", maxval 255, one image row per line.
std::string to_pgm(const ImageGrid& image);
/// Throws Error{InvalidArgument} for an empty image and Error{IoError}.
void write_pgm(const ImageGrid& image, const std::filesystem::path& path);

/// Throws Error{IoError}.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

std::string report_json(const ValidationReport& r);
std::string report_json(const SpectralResult& r, std::span<const GelfandPoint> gelfand = {});
std::string report_json(const EigenmeasureResult& r);
std::string report_json(const EntropyReport& r);
std::string report_json(const ThermoReport& r);
std::string report_json(const PressureFunctionalProbe& r);
std::string report_json(const CellHistogram& h, const OrbitRecord& orbit);
std::string report_json(const SymbolSeries& s);

}  // namespace ifsm
