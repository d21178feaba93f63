#include "imcorrect/mapping_matrix.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "imcorrect/errors.hpp"

namespace imc {

MappingMatrix MappingMatrix::zero(Index dim) {
  MappingMatrix w;
  w.dim_ = dim;
  w.storage_ = Storage::Sparse;
  w.sparse_.resize(dim, dim);
  w.sparse_.makeCompressed();
  w.build_row_mirror();
  return w;
}

MappingMatrix MappingMatrix::identity(Index dim) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(dim);
  for (Index i = 0; i < dim; ++i) t.emplace_back(i, i, 1.0);
  return from_triplets(dim, t);
}

MappingMatrix MappingMatrix::from_dense(const DenseRowMajor& values) {
  if (values.rows() != values.cols()) {
    throw DimensionMismatchError("mapping matrix must be square, got " +
                                 std::to_string(values.rows()) + "x" +
                                 std::to_string(values.cols()));
  }
  const Index dim = static_cast<Index>(values.rows());
  std::size_t nonzeros = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values.data()[i] != 0.0) ++nonzeros;
  }
  const double total = static_cast<double>(dim) * static_cast<double>(dim);
  MappingMatrix w;
  w.dim_ = dim;
  if (total > 0 && static_cast<double>(nonzeros) / total < kSparseDensityThreshold) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(nonzeros);
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) {
        const double v = values(i, j);
        if (v != 0.0) t.emplace_back(i, j, v);
      }
    }
    return from_triplets(dim, t);
  }
  w.storage_ = Storage::Dense;
  w.dense_ = values;
  w.validate_finite();
  return w;
}

MappingMatrix MappingMatrix::from_triplets(
    Index dim, const std::vector<Eigen::Triplet<double>>& triplets) {
  Eigen::SparseMatrix<double> s(dim, dim);
  s.setFromTriplets(triplets.begin(), triplets.end());
  s.prune(0.0, 0.0);
  s.makeCompressed();

  const double total = static_cast<double>(dim) * static_cast<double>(dim);
  MappingMatrix w;
  w.dim_ = dim;
  if (total > 0 &&
      static_cast<double>(s.nonZeros()) / total >= kSparseDensityThreshold) {
    w.storage_ = Storage::Dense;
    w.dense_ = DenseRowMajor(s);
    w.validate_finite();
    return w;
  }
  w.storage_ = Storage::Sparse;
  w.sparse_ = std::move(s);
  w.validate_finite();
  w.build_row_mirror();
  return w;
}

void MappingMatrix::validate_finite() const {
  if (storage_ == Storage::Dense) {
    if (!dense_.allFinite()) {
      throw ValidationError("mapping matrix contains NaN or Inf");
    }
    return;
  }
  for (Eigen::Index k = 0; k < sparse_.nonZeros(); ++k) {
    if (!std::isfinite(sparse_.valuePtr()[k])) {
      throw ValidationError("mapping matrix contains NaN or Inf");
    }
  }
}

void MappingMatrix::build_row_mirror() { sparse_rows_ = sparse_; }

std::size_t MappingMatrix::nnz() const {
  if (storage_ == Storage::Dense) {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < dense_.size(); ++i) {
      if (dense_.data()[i] != 0.0) ++n;
    }
    return n;
  }
  return static_cast<std::size_t>(sparse_.nonZeros());
}

double MappingMatrix::density() const {
  const double total = static_cast<double>(dim_) * static_cast<double>(dim_);
  return total == 0 ? 0.0 : static_cast<double>(nnz()) / total;
}

double MappingMatrix::coeff(Index row, Index col) const {
  if (storage_ == Storage::Dense) return dense_(row, col);
  return sparse_.coeff(row, col);
}

double MappingMatrix::trace() const {
  double t = 0.0;
  for (Index i = 0; i < dim_; ++i) t += coeff(i, i);
  return t;
}

double MappingMatrix::max_abs() const {
  if (storage_ == Storage::Dense) {
    return dense_.size() == 0 ? 0.0 : dense_.cwiseAbs().maxCoeff();
  }
  double m = 0.0;
  for (Eigen::Index k = 0; k < sparse_.nonZeros(); ++k) {
    m = std::max(m, std::abs(sparse_.valuePtr()[k]));
  }
  return m;
}

MappingMatrix MappingMatrix::scaled_columns(
    std::span<const double> factors) const {
  if (factors.size() != dim_) {
    throw DimensionMismatchError("expected " + std::to_string(dim_) +
                                 " column factors, got " +
                                 std::to_string(factors.size()));
  }
  if (storage_ == Storage::Dense) {
    DenseRowMajor scaled = dense_;
    for (Index j = 0; j < dim_; ++j) scaled.col(j) *= factors[j];
    return from_dense(scaled);
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(sparse_.nonZeros()));
  for (Index j = 0; j < dim_; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sparse_, j); it; ++it) {
      t.emplace_back(it.row(), j, it.value() * factors[j]);
    }
  }
  return from_triplets(dim_, t);
}

MappingMatrix MappingMatrix::plus(const MappingMatrix& other,
                                  double sign) const {
  if (other.dim_ != dim_) {
    throw DimensionMismatchError("mapping dims differ: " +
                                 std::to_string(dim_) + " vs " +
                                 std::to_string(other.dim_));
  }
  if (storage_ == Storage::Sparse && other.storage_ == Storage::Sparse) {
    Eigen::SparseMatrix<double> sum = sparse_ + sign * other.sparse_;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(sum.nonZeros()));
    for (Index j = 0; j < dim_; ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sum, j); it; ++it) {
        t.emplace_back(it.row(), it.col(), it.value());
      }
    }
    return from_triplets(dim_, t);
  }
  DenseRowMajor sum = to_dense() + sign * other.to_dense();
  return from_dense(sum);
}

void MappingMatrix::accumulate_row(Index row, std::span<double> acc) const {
  if (storage_ == Storage::Dense) {
    const double* src = dense_.data() + static_cast<std::size_t>(row) * dim_;
    for (Index j = 0; j < dim_; ++j) acc[j] += src[j];
    return;
  }
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
           it(sparse_rows_, row);
       it; ++it) {
    acc[static_cast<std::size_t>(it.col())] += it.value();
  }
}

DenseRowMajor MappingMatrix::to_dense() const {
  if (storage_ == Storage::Dense) return dense_;
  return DenseRowMajor(sparse_);
}

bool MappingMatrix::equals_bitwise(const MappingMatrix& other) const {
  if (dim_ != other.dim_ || storage_ != other.storage_) return false;
  if (storage_ == Storage::Dense) {
    return std::memcmp(dense_.data(), other.dense_.data(),
                       sizeof(double) * static_cast<std::size_t>(
                                            dense_.size())) == 0;
  }
  if (sparse_.nonZeros() != other.sparse_.nonZeros()) return false;
  for (Index j = 0; j < dim_; ++j) {
    Eigen::SparseMatrix<double>::InnerIterator a(sparse_, j);
    Eigen::SparseMatrix<double>::InnerIterator b(other.sparse_, j);
    for (; a && b; ++a, ++b) {
      if (a.row() != b.row()) return false;
      if (std::memcmp(&a.valueRef(), &b.valueRef(), sizeof(double)) != 0) {
        return false;
      }
    }
    if (a || b) return false;
  }
  return true;
}

}  // namespace imc
