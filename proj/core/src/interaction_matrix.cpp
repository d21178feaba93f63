#include "imcorrect/interaction_matrix.hpp"

#include <algorithm>
#include <string>

#include "imcorrect/errors.hpp"

namespace imc {

InteractionMatrix::InteractionMatrix(Index num_users, Index num_items)
    : num_users_(num_users),
      num_items_(num_items),
      row_ptr_(static_cast<std::size_t>(num_users) + 1, 0) {}

InteractionMatrix InteractionMatrix::from_cells(Index num_users,
                                                Index num_items,
                                                std::vector<Cell> cells) {
  for (const Cell& c : cells) {
    if (c.user >= num_users || c.item >= num_items) {
      throw ValidationError("cell (" + std::to_string(c.user) + ", " +
                            std::to_string(c.item) + ") out of range for " +
                            std::to_string(num_users) + "x" +
                            std::to_string(num_items) + " matrix");
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  InteractionMatrix r(num_users, num_items);
  r.col_idx_.reserve(cells.size());
  std::size_t pos = 0;
  for (Index u = 0; u < num_users; ++u) {
    while (pos < cells.size() && cells[pos].user == u) {
      r.col_idx_.push_back(cells[pos].item);
      ++pos;
    }
    r.row_ptr_[u + 1] = r.col_idx_.size();
  }
  return r;
}

bool InteractionMatrix::contains(Index user, Index item) const {
  if (user >= num_users_) return false;
  const auto r = row(user);
  return std::binary_search(r.begin(), r.end(), item);
}

std::vector<Cell> InteractionMatrix::cells() const {
  std::vector<Cell> out;
  out.reserve(nnz());
  for (Index u = 0; u < num_users_; ++u) {
    for (Index i : row(u)) out.push_back({u, i});
  }
  return out;
}

ItemCounts item_counts(const InteractionMatrix& r) {
  ItemCounts counts(r.num_items(), 0);
  for (Index i : r.column_indices()) ++counts[i];
  return counts;
}

void check_flip(const InteractionMatrix& r, const FlipSet& f) {
  if (f.cells.num_users() > r.num_users() ||
      f.cells.num_items() > r.num_items()) {
    throw DimensionMismatchError(
        "flip set is " + std::to_string(f.cells.num_users()) + "x" +
        std::to_string(f.cells.num_items()) + " but matrix is " +
        std::to_string(r.num_users()) + "x" + std::to_string(r.num_items()));
  }
  const bool removing = f.direction == Direction::Negative;
  for (Index u = 0; u < f.cells.num_users(); ++u) {
    for (Index i : f.cells.row(u)) {
      if (r.contains(u, i) != removing) {
        throw FlipConflictError(
            std::string(removing ? "negative" : "positive") + " flip at (" +
                std::to_string(u) + ", " + std::to_string(i) + ") " +
                (removing ? "targets an absent cell" : "targets a present cell"),
            u, i);
      }
    }
  }
}

InteractionMatrix apply_flip(const InteractionMatrix& r, const FlipSet& f) {
  check_flip(r, f);

  std::vector<Cell> merged;
  if (f.direction == Direction::Negative) {
    merged.reserve(r.nnz() - f.cells.nnz());
    for (Index u = 0; u < r.num_users(); ++u) {
      const auto keep = r.row(u);
      const auto drop =
          u < f.cells.num_users() ? f.cells.row(u) : std::span<const Index>{};
      std::vector<Index> rest;
      rest.reserve(keep.size());
      std::set_difference(keep.begin(), keep.end(), drop.begin(), drop.end(),
                          std::back_inserter(rest));
      for (Index i : rest) merged.push_back({u, i});
    }
  } else {
    merged.reserve(r.nnz() + f.cells.nnz());
    for (const Cell& c : r.cells()) merged.push_back(c);
    for (const Cell& c : f.cells.cells()) merged.push_back(c);
  }
  return InteractionMatrix::from_cells(r.num_users(), r.num_items(),
                                       std::move(merged));
}

}  // namespace imc
