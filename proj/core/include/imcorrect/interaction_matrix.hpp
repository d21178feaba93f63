#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "imcorrect/types.hpp"

namespace imc {

// Binary user-item interaction matrix in compressed sparse row form with
// sorted column indices. Stored cells have value 1, absent cells 0.
// Immutable after construction; all operations on it are pure.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  InteractionMatrix(Index num_users, Index num_items);

  // Builds from an arbitrary cell list: sorts, drops duplicates, and
  // rejects out-of-range indices.
  static InteractionMatrix from_cells(Index num_users, Index num_items,
                                      std::vector<Cell> cells);

  Index num_users() const { return num_users_; }
  Index num_items() const { return num_items_; }
  std::size_t nnz() const { return col_idx_.size(); }

  // Sorted item indices of one user's interactions.
  std::span<const Index> row(Index user) const {
    return {col_idx_.data() + row_ptr_[user],
            col_idx_.data() + row_ptr_[user + 1]};
  }

  bool contains(Index user, Index item) const;

  std::vector<Cell> cells() const;

  // Raw CSR arrays, exposed for serialization and hashing.
  std::span<const std::size_t> row_offsets() const { return row_ptr_; }
  std::span<const Index> column_indices() const { return col_idx_; }

  friend bool operator==(const InteractionMatrix&,
                         const InteractionMatrix&) = default;

 private:
  Index num_users_ = 0;
  Index num_items_ = 0;
  std::vector<std::size_t> row_ptr_{0};  // size num_users_ + 1
  std::vector<Index> col_idx_;           // sorted within each row
};

// Per-item interaction counts: counts[i] = number of users interacting
// with item i.
using ItemCounts = std::vector<std::uint32_t>;

ItemCounts item_counts(const InteractionMatrix& r);

// A uniform-direction set of cells to flip. `reversed()` flips the
// direction, which turns a clean-to-noisy edit into its undo.
struct FlipSet {
  Direction direction = Direction::Negative;
  InteractionMatrix cells;

  FlipSet reversed() const {
    return {direction == Direction::Negative ? Direction::Positive
                                             : Direction::Negative,
            cells};
  }
};

// Returns r - f.cells (Negative) or r + f.cells (Positive). Throws
// FlipConflictError naming the first offending cell when a Negative flip
// targets an absent cell or a Positive flip targets a present one.
InteractionMatrix apply_flip(const InteractionMatrix& r, const FlipSet& f);

// Validates the apply_flip precondition without building the result.
void check_flip(const InteractionMatrix& r, const FlipSet& f);

}  // namespace imc
