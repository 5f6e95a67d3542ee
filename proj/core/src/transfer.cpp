#include "ifsm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <cstring>

namespace ifsm {

TransferMatrix::TransferMatrix(Grid grid, Interpolation mode, std::vector<std::size_t> row_start,
                               std::vector<std::size_t> cols, std::vector<double> values)
    : grid_(std::move(grid)),
      mode_(mode),
      row_start_(std::move(row_start)),
      cols_(std::move(cols)),
      values_(std::move(values)) {
  if (row_start_.size() != grid_.size() + 1 || cols_.size() != values_.size() ||
      row_start_.back() != values_.size()) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent sparse matrix layout");
  }
}

void TransferMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

void TransferMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) y[cols_[k]] += values_[k] * xi;
  }
}

double TransferMatrix::entry(std::size_t row, std::size_t col) const {
  for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) {
    if (cols_[k] == col) return values_[k];
  }
  return 0.0;
}

double TransferMatrix::row_sum(std::size_t row) const {
  double s = 0.0;
  for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) s += values_[k];
  return s;
}

double TransferMatrix::min_entry() const {
  if (values_.empty()) return 0.0;
  return *std::min_element(values_.begin(), values_.end());
}

void TransferMatrix::export_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::size_t n = size();
  out << "# " << n << ',' << n << ',' << to_string(mode_) << '\n';
  out.precision(17);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for_each_in_row(i, [&](std::size_t j, double v) { row[j] = v; });
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void TransferMatrix::export_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  static_assert(sizeof(double) == 8);
  const std::uint64_t n = size();
  out.write("IFSMTM01", 8);
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 8);
  };
  put_u64(n);
  put_u64(n);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for_each_in_row(i, [&](std::size_t j, double v) { row[j] = v; });
    for (double v : row) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      put_u64(bits);
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

template <class WeightFn>
TransferMatrix assemble(const SystemSpec& spec, const ParameterSet& apriori, const Grid& grid, Interpolation mode,
                        WeightFn&& weight) {
  if (!(spec.domain() == grid.box())) throw Error(ErrorCode::GridMismatch, "grid box differs from the domain");
  const std::size_t n = grid.size();
  const std::size_t branches = spec.branch_count();
  std::vector<std::size_t> row_start(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> values;
  cols.reserve(n * branches * 2);
  values.reserve(n * branches * 2);

  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = grid.node(i);
    row.clear();
    for (std::size_t b = 0; b < branches; ++b) {
      const double mu = apriori.weight(b);
      if (mu == 0.0) continue;
      const double w = mu * weight(x, b);
      const Stencil s = grid.stencil(spec.map_image(b, x), mode);
      for (int k = 0; k < s.count; ++k) row.emplace_back(s.node[k], w * s.weight[k]);
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size();) {
      const std::size_t col = row[k].first;
      double v = 0.0;
      for (; k < row.size() && row[k].first == col; ++k) v += row[k].second;
      cols.push_back(col);
      values.push_back(v);
    }
    row_start[i + 1] = values.size();
  }
  return TransferMatrix(grid, mode, std::move(row_start), std::move(cols), std::move(values));
}

}  // namespace

TransferMatrix assemble_transfer(const SystemSpec& spec, const Grid& grid, Interpolation mode) {
  return assemble(spec, spec.params(), grid, mode,
                  [&](const Point& x, std::size_t b) { return spec.branch_weight(x, b); });
}

TransferMatrix assemble_apriori_transfer(const SystemSpec& spec, const ParameterSet& apriori, const Grid& grid,
                                         Interpolation mode) {
  if (apriori.size() != spec.branch_count()) {
    throw Error(ErrorCode::InvalidArgument, "a-priori measure has the wrong number of parameters");
  }
  return assemble(spec, apriori, grid, mode, [](const Point&, std::size_t) { return 1.0; });
}

DiscreteFunction apply_transfer(const TransferMatrix& B, const DiscreteFunction& f) {
  require_same_grid(B.grid(), f.grid, "apply_transfer");
  std::vector<double> out(B.size());
  B.multiply(f.values, out);
  return DiscreteFunction(B.grid(), std::move(out));
}

DiscreteMeasure apply_markov(const TransferMatrix& B, const DiscreteMeasure& m) {
  require_same_grid(B.grid(), m.grid, "apply_markov");
  std::vector<double> out(B.size());
  B.multiply_transpose(m.weights, out);
  return DiscreteMeasure(B.grid(), std::move(out));
}

double duality_residual(const TransferMatrix& B, const DiscreteFunction& f, const DiscreteMeasure& m) {
  require_same_grid(B.grid(), f.grid, "duality_residual");
  require_same_grid(B.grid(), m.grid, "duality_residual");
  const DiscreteMeasure pushed = apply_markov(B, m);
  const DiscreteFunction pulled = apply_transfer(B, f);
  return std::abs(pushed.integrate(f) - m.integrate(pulled));
}

double invariance_residual(const TransferMatrix& B, const DiscreteMeasure& nu) {
  const DiscreteMeasure pushed = apply_markov(B, nu);
  double r = 0.0;
  for (std::size_t i = 0; i < nu.weights.size(); ++i) r += std::abs(pushed.weights[i] - nu.weights[i]);
  return r;
}

}  // namespace ifsm
