#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "imcorrect/types.hpp"

namespace imc {

using DenseRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Square item-item weight matrix. Picks sparse storage below a 5% density
// threshold (SLIM weights) and dense above it (projector / Gram mappings);
// both storages honor identical operation semantics. Entries must be
// finite. Immutable after construction.
class MappingMatrix {
 public:
  enum class Storage { Dense, Sparse };

  static constexpr double kSparseDensityThreshold = 0.05;

  MappingMatrix() = default;

  static MappingMatrix zero(Index dim);
  static MappingMatrix identity(Index dim);
  // Chooses storage from the nonzero density.
  static MappingMatrix from_dense(const DenseRowMajor& values);
  static MappingMatrix from_triplets(
      Index dim, const std::vector<Eigen::Triplet<double>>& triplets);

  Index dim() const { return dim_; }
  Storage storage() const { return storage_; }
  std::size_t nnz() const;
  double density() const;

  double coeff(Index row, Index col) const;
  // Symmetrized weight (w_ab + w_ba) / 2, the item-similarity read used by
  // preference forgetting.
  double similarity(Index a, Index b) const {
    return 0.5 * (coeff(a, b) + coeff(b, a));
  }
  double trace() const;
  double max_abs() const;

  // Returns a copy with column i multiplied by factors[i].
  MappingMatrix scaled_columns(std::span<const double> factors) const;
  // Returns this + sign * other.
  MappingMatrix plus(const MappingMatrix& other, double sign) const;

  // acc[j] += w(row, j) for all j; the inner step of row prediction.
  void accumulate_row(Index row, std::span<double> acc) const;

  DenseRowMajor to_dense() const;

  const DenseRowMajor& dense_values() const { return dense_; }
  const Eigen::SparseMatrix<double>& sparse_values() const { return sparse_; }

  bool equals_bitwise(const MappingMatrix& other) const;

 private:
  void validate_finite() const;
  void build_row_mirror();

  Index dim_ = 0;
  Storage storage_ = Storage::Dense;
  DenseRowMajor dense_;
  Eigen::SparseMatrix<double> sparse_;  // column-major, the canonical copy
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_rows_;  // row mirror
};

}  // namespace imc
