#pragma once

// Finite-dimensional transfer operator
//
//   (B f)(x_i) = Σ_θ μ(θ) w_θ(x_i) f̃(τ_θ x_i),   B[i][j] = Σ_θ μ(θ) w_θ(x_i) c_j(τ_θ x_i)
//
// where f̃ = Σ_j c_j f(x_j) is the nodal interpolant. The Markov operator is
// the literal transpose, so ⟨f, Bᵀm⟩ = ⟨Bf, m⟩ holds up to rounding.

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "ifsm/grid.hpp"
#include "ifsm/model.hpp"

namespace ifsm {

/// Sparse row-compressed storage; each row holds at most |Θ|·2^d entries.
class TransferMatrix {
 public:
  TransferMatrix(Grid grid, Interpolation mode, std::vector<std::size_t> row_start, std::vector<std::size_t> cols,
                 std::vector<double> values);

  const Grid& grid() const { return grid_; }
  Interpolation interpolation() const { return mode_; }
  std::size_t size() const { return grid_.size(); }
  std::size_t nonzeros() const { return values_.size(); }

  /// y = B x
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = Bᵀ x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  double entry(std::size_t row, std::size_t col) const;
  double row_sum(std::size_t row) const;
  double min_entry() const;

  template <class F>
  void for_each_in_row(std::size_t row, F&& f) const {
    for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) f(cols_[k], values_[k]);
  }

  /// Dense row-major CSV, preceded by a "# rows,cols,interpolation" line.
  void export_csv(const std::filesystem::path& path) const;
  /// Little-endian: magic "IFSMTM01", uint64 rows, uint64 cols, then
  /// rows*cols float64 values row-major.
  void export_binary(const std::filesystem::path& path) const;

 private:
  Grid grid_;
  Interpolation mode_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Discretizes B_q. Propagates map and weighting errors.
TransferMatrix assemble_transfer(const SystemSpec& spec, const Grid& grid,
                                 Interpolation mode = Interpolation::multilinear);

/// Discretizes B_μ, the operator of the same maps with J ≡ 1 against `apriori`.
TransferMatrix assemble_apriori_transfer(const SystemSpec& spec, const ParameterSet& apriori, const Grid& grid,
                                         Interpolation mode = Interpolation::multilinear);

/// Throws Error{GridMismatch}.
DiscreteFunction apply_transfer(const TransferMatrix& B, const DiscreteFunction& f);
/// Weights of the result are Bᵀ applied to the input weights.
DiscreteMeasure apply_markov(const TransferMatrix& B, const DiscreteMeasure& m);
/// |⟨f, Bᵀm⟩ − ⟨Bf, m⟩|.
double duality_residual(const TransferMatrix& B, const DiscreteFunction& f, const DiscreteMeasure& m);

/// ‖Bᵀν − ν‖₁: how far ν is from being invariant.
double invariance_residual(const TransferMatrix& B, const DiscreteMeasure& nu);

}  // namespace ifsm
