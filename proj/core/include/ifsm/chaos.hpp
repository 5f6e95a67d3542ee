#pragma once

// Random iteration Z_{j+1} = τ_{θ_j}(Z_j) with θ_j drawn from q_{Z_j}
// normalized by q_mass(Z_j).
//
// Reproducibility contract: the engine is std::mt19937_64 (fully specified by
// the standard) seeded with derive_seed(seed, stream). Uniforms are
// (engine() >> 11) * 2^-53. A branch is chosen by inverse CDF over the
// weights μ(θ)J(Z_j, θ) accumulated in label order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"

namespace ifsm {

/// SplitMix64 finalizer applied to seed + (stream + 1) * 0x9E3779B97F4A7C15.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class OrbitRng {
 public:
  OrbitRng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// One step of an orbit: τ_θ(z) clamped to the box. `clamped` is set when
/// the raw image was outside.
Point orbit_step(const SystemSpec& spec, std::size_t branch, const Point& z, bool* clamped = nullptr);

struct OrbitRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<Point> points;         ///< Z_0 … Z_N (N + 1 entries)
  std::vector<std::uint32_t> labels; ///< θ_0 … θ_{N−1}
  std::size_t clamped_steps = 0;

  std::size_t length() const { return labels.size(); }
};

/// Throws Error{InvalidArgument} for n = 0 and Error{OutOfDomain} for a start
/// outside the box.
OrbitRecord sample_orbit(const SystemSpec& spec, const Point& z0, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream = 0);

/// Largest |τ_{θ_j}(Z_j) − Z_{j+1}| over the orbit.
double orbit_consistency(const SystemSpec& spec, const OrbitRecord& orbit);

/// Branch index for each quadrant code (bit 0: upper half in x, bit 1: upper
/// half in y) when the maps are the 2^d dyadic contractions of the box;
/// nullopt otherwise.
std::optional<std::vector<std::size_t>> dyadic_quadrant_labels(const SystemSpec& spec);

/// Visit counts on the dyadic partition of the box at a given level.
struct CellHistogram {
  int level = 1;
  int dimension = 2;
  DomainBox box;
  std::vector<std::uint64_t> counts;  ///< cell ix + 2^level * iy
  std::uint64_t total = 0;
  std::optional<std::vector<std::size_t>> quadrant_labels;

  std::size_t cells_per_axis() const { return std::size_t{1} << level; }
  std::size_t cell_count() const { return counts.size(); }
  double weight(std::size_t cell) const;
  std::vector<double> weights() const;

  /// Points on an interior cell edge go to the lower cell.
  std::size_t cell_of(const Point& p) const;
  /// Branch indices of the address, coarsest quadrant first. Throws
  /// Error{NotDyadicFamily}.
  std::vector<std::size_t> address(std::size_t cell) const;
  std::size_t cell_at(std::size_t ix, std::size_t iy) const { return ix + cells_per_axis() * iy; }

  /// Adds the counts of a histogram with the same layout.
  void merge(const CellHistogram& other);
};

/// Histogram of Z_j for burn_in ≤ j < N. Throws Error{LevelTooFine} when the
/// partition would exceed 2^24 cells, Error{EmptyOrbit} for an empty orbit,
/// Error{InvalidArgument} for level < 1 or burn_in ≥ N.
CellHistogram empirical_measure(const OrbitRecord& orbit, const SystemSpec& spec, int level,
                                std::size_t burn_in = 1000);

struct EltonTrace {
  double reference = 0.0;  ///< ∫ f d(reference)
  std::vector<std::size_t> checkpoints;
  std::vector<double> averages;
  std::vector<double> gaps;
  double final_average = 0.0;
  double final_gap = 0.0;
};

/// Running averages of f̃(Z_j), j < N, at powers of two and at N.
EltonTrace elton_average(const OrbitRecord& orbit, const DiscreteFunction& f, const DiscreteMeasure& reference,
                         Interpolation mode = Interpolation::multilinear);

/// Grey-scale raster, row 0 at the top.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// One block × block square per cell, grey proportional to W(Λ) with the
/// heaviest cell at 255. Upper cells are drawn at the top. Throws
/// Error{NotDyadicFamily} for histograms of non-dyadic systems.
ImageGrid pc_plot(const CellHistogram& hist, int block = 1);

}  // namespace ifsm
