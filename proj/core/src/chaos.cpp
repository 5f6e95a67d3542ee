#include "ifsm/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ifsm {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Point orbit_step(const SystemSpec& spec, std::size_t branch, const Point& z, bool* clamped) {
  const Point raw = apply_branch(spec.maps()[branch], z, spec.dimension());
  const bool inside = spec.domain().contains(raw);
  if (clamped) *clamped = !inside;
  return inside ? raw : spec.domain().clamp(raw);
}

OrbitRecord sample_orbit(const SystemSpec& spec, const Point& z0, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "orbit length must be at least 1");
  if (!spec.domain().contains(z0)) throw Error(ErrorCode::OutOfDomain, "start point outside the domain box");

  OrbitRecord rec;
  rec.seed = seed;
  rec.stream = stream;
  rec.points.reserve(n + 1);
  rec.labels.reserve(n);
  rec.points.push_back(z0);

  OrbitRng rng(seed, stream);
  const std::size_t branches = spec.branch_count();
  std::vector<double> cumulative(branches);
  Point z = z0;
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t b = 0; b < branches; ++b) {
      const double mu = spec.params().weight(b);
      const double w = mu == 0.0 ? 0.0 : mu * spec.branch_weight(z, b);
      if (w > 0.0) last_positive = b;
      total += w;
      cumulative[b] = total;
    }
    const double u = rng.uniform() * total;
    std::size_t pick = last_positive;
    for (std::size_t b = 0; b < branches; ++b) {
      if (u < cumulative[b]) {
        pick = b;
        break;
      }
    }
    bool clamped = false;
    z = orbit_step(spec, pick, z, &clamped);
    if (clamped) ++rec.clamped_steps;
    rec.labels.push_back(static_cast<std::uint32_t>(pick));
    rec.points.push_back(z);
  }
  return rec;
}

double orbit_consistency(const SystemSpec& spec, const OrbitRecord& orbit) {
  double worst = 0.0;
  for (std::size_t j = 0; j < orbit.length(); ++j) {
    const Point next = orbit_step(spec, orbit.labels[j], orbit.points[j]);
    for (int a = 0; a < spec.dimension(); ++a) worst = std::max(worst, std::abs(next[a] - orbit.points[j + 1][a]));
  }
  return worst;
}

std::optional<std::vector<std::size_t>> dyadic_quadrant_labels(const SystemSpec& spec) {
  const int d = spec.dimension();
  const std::size_t expected = std::size_t{1} << d;
  if (spec.branch_count() != expected) return std::nullopt;
  std::vector<std::size_t> labels(expected, expected);
  const DomainBox& box = spec.domain();
  for (std::size_t b = 0; b < expected; ++b) {
    const auto* affine = std::get_if<AffineMap>(&spec.maps()[b]);
    if (!affine) return std::nullopt;
    const auto& m = affine->matrix;
    if (d == 1) {
      if (m[0] != 0.5) return std::nullopt;
    } else if (m[0] != 0.5 || m[1] != 0.0 || m[2] != 0.0 || m[3] != 0.5) {
      return std::nullopt;
    }
    std::size_t code = 0;
    for (int a = 0; a < d; ++a) {
      const double shift = (affine->offset[a] - 0.5 * box.lower[a]) / box.extent(a);
      if (std::abs(shift) <= 1e-12) continue;
      if (std::abs(shift - 0.5) <= 1e-12) {
        code |= std::size_t{1} << a;
        continue;
      }
      return std::nullopt;
    }
    if (labels[code] != expected) return std::nullopt;
    labels[code] = b;
  }
  return labels;
}

double CellHistogram::weight(std::size_t cell) const {
  return total == 0 ? 0.0 : static_cast<double>(counts.at(cell)) / static_cast<double>(total);
}

std::vector<double> CellHistogram::weights() const {
  std::vector<double> w(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) w[c] = weight(c);
  return w;
}

std::size_t CellHistogram::cell_of(const Point& p) const {
  const std::size_t per_axis = cells_per_axis();
  std::size_t index[2] = {0, 0};
  for (int a = 0; a < dimension; ++a) {
    const double t = (p[a] - box.lower[a]) / box.extent(a) * static_cast<double>(per_axis);
    double k = std::floor(t);
    if (k == t && k > 0.0) k -= 1.0;
    index[a] = static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(per_axis - 1)));
  }
  return index[0] + per_axis * index[1];
}

std::vector<std::size_t> CellHistogram::address(std::size_t cell) const {
  if (!quadrant_labels) throw Error(ErrorCode::NotDyadicFamily, "histogram has no dyadic address scheme");
  const std::size_t per_axis = cells_per_axis();
  const std::size_t ix = cell % per_axis;
  const std::size_t iy = cell / per_axis;
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(level));
  for (int k = 0; k < level; ++k) {
    const int bit = level - 1 - k;
    std::size_t code = (ix >> bit) & 1U;
    if (dimension == 2) code |= ((iy >> bit) & 1U) << 1;
    out.push_back((*quadrant_labels)[code]);
  }
  return out;
}

void CellHistogram::merge(const CellHistogram& other) {
  if (other.level != level || other.dimension != dimension || !(other.box == box)) {
    throw Error(ErrorCode::GridMismatch, "histograms have different layouts");
  }
  for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += other.counts[c];
  total += other.total;
}

CellHistogram empirical_measure(const OrbitRecord& orbit, const SystemSpec& spec, int level, std::size_t burn_in) {
  if (orbit.length() == 0) throw Error(ErrorCode::EmptyOrbit, "orbit has no steps");
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "level must be at least 1");
  const int d = spec.dimension();
  if (static_cast<long long>(level) * d > 24) {
    throw Error(ErrorCode::LevelTooFine, "2^" + std::to_string(level * d) + " cells exceed the 2^24 limit");
  }
  if (burn_in >= orbit.length()) throw Error(ErrorCode::InvalidArgument, "burn-in must be shorter than the orbit");

  CellHistogram h;
  h.level = level;
  h.dimension = d;
  h.box = spec.domain();
  h.counts.assign(std::size_t{1} << (level * d), 0);
  h.quadrant_labels = dyadic_quadrant_labels(spec);
  for (std::size_t j = burn_in; j < orbit.length(); ++j) ++h.counts[h.cell_of(orbit.points[j])];
  h.total = orbit.length() - burn_in;
  return h;
}

EltonTrace elton_average(const OrbitRecord& orbit, const DiscreteFunction& f, const DiscreteMeasure& reference,
                         Interpolation mode) {
  require_same_grid(f.grid, reference.grid, "elton_average");
  if (orbit.length() == 0) throw Error(ErrorCode::EmptyOrbit, "orbit has no steps");
  EltonTrace trace;
  trace.reference = reference.integrate(f) / reference.mass();
  double sum = 0.0;
  std::size_t next_checkpoint = 1;
  const std::size_t n = orbit.length();
  for (std::size_t j = 0; j < n; ++j) {
    sum += interpolate(f.grid, f.values, orbit.points[j], mode);
    const std::size_t count = j + 1;
    if (count == next_checkpoint || count == n) {
      const double avg = sum / static_cast<double>(count);
      trace.checkpoints.push_back(count);
      trace.averages.push_back(avg);
      trace.gaps.push_back(std::abs(avg - trace.reference));
      if (count == next_checkpoint) next_checkpoint *= 2;
    }
  }
  trace.final_average = trace.averages.back();
  trace.final_gap = trace.gaps.back();
  return trace;
}

ImageGrid pc_plot(const CellHistogram& hist, int block) {
  if (!hist.quadrant_labels) throw Error(ErrorCode::NotDyadicFamily, "PC plots need the dyadic map family");
  if (block < 1) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  const int per_axis = static_cast<int>(hist.cells_per_axis());
  ImageGrid img;
  img.width = per_axis * block;
  img.height = hist.dimension == 2 ? per_axis * block : block;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, 0);

  const std::uint64_t top = *std::max_element(hist.counts.begin(), hist.counts.end());
  for (int row = 0; row < img.height; ++row) {
    const int iy = hist.dimension == 2 ? per_axis - 1 - row / block : 0;
    for (int col = 0; col < img.width; ++col) {
      const int ix = col / block;
      const std::uint64_t c = hist.counts[hist.cell_at(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy))];
      const double grey = top == 0 ? 0.0 : 255.0 * static_cast<double>(c) / static_cast<double>(top);
      img.pixels[static_cast<std::size_t>(row) * img.width + col] = static_cast<std::uint8_t>(std::lround(grey));
    }
  }
  return img;
}

}  // namespace ifsm
