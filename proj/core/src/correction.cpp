#include "imcorrect/correction.hpp"

#include <algorithm>
#include <string>

#include "imcorrect/errors.hpp"

namespace imc {

const char* to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::InteractionOnly:
      return "interaction-only";
    case CorrectionMode::MappingOnly:
      return "mapping-only";
    case CorrectionMode::Both:
      return "both";
  }
  return "?";
}

std::vector<double> correction_scale_factors(const ItemCounts& c,
                                             const ItemCounts& c_bar,
                                             Direction dir) {
  if (c.size() != c_bar.size()) {
    throw DimensionMismatchError("item count vectors differ in length");
  }
  std::vector<double> factors(c.size(), 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (dir == Direction::Negative && c_bar[i] > c[i]) {
      throw CountOverflowError("item " + std::to_string(i) + " flips " +
                               std::to_string(c_bar[i]) +
                               " interactions but only has " +
                               std::to_string(c[i]));
    }
    if (c[i] == 0) continue;  // factor 1: nothing learned on this column
    const double ci = static_cast<double>(c[i]);
    const double bi = static_cast<double>(c_bar[i]);
    factors[i] = dir == Direction::Negative ? (ci - bi) / ci : (ci + bi) / ci;
  }
  return factors;
}

MappingMatrix scale_mapping_columns(const MappingMatrix& w,
                                    const ItemCounts& c,
                                    const ItemCounts& c_bar, Direction dir) {
  if (c.size() != w.dim()) {
    throw DimensionMismatchError("item counts length " +
                                 std::to_string(c.size()) +
                                 " does not match mapping dim " +
                                 std::to_string(w.dim()));
  }
  return w.scaled_columns(correction_scale_factors(c, c_bar, dir));
}

MappingMatrix weight_bar_mapping(const MappingMatrix& w_bar,
                                 const ItemCounts& c,
                                 const ItemCounts& c_bar) {
  if (c.size() != w_bar.dim() || c_bar.size() != w_bar.dim()) {
    throw DimensionMismatchError("item counts do not match bar mapping dim");
  }
  std::vector<double> weights(c.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) {
      weights[i] = c_bar[i] > 0 ? 1.0 : 0.0;
    } else {
      weights[i] = static_cast<double>(c_bar[i]) / static_cast<double>(c[i]);
    }
  }
  return w_bar.scaled_columns(weights);
}

MappingMatrix correct_mapping(const MappingMatrix& w,
                              const MappingMatrix& w_bar, const ItemCounts& c,
                              const ItemCounts& c_bar, Direction dir) {
  const bool empty_flip =
      std::all_of(c_bar.begin(), c_bar.end(), [](auto v) { return v == 0; });
  if (empty_flip) {
    (void)correction_scale_factors(c, c_bar, dir);  // still validate dims
    return w;
  }
  const MappingMatrix scaled = scale_mapping_columns(w, c, c_bar, dir);
  const MappingMatrix bar = weight_bar_mapping(w_bar, c, c_bar);
  return scaled.plus(bar, dir == Direction::Negative ? -1.0 : 1.0);
}

CorrectionResult unlearn(const InteractionMatrix& r, const MappingMatrix& w,
                         const FlipSet& f, CorrectionMode mode,
                         const BarFitter& bar_fitter) {
  if (r.num_items() != w.dim()) {
    throw DimensionMismatchError("interaction matrix items (" +
                                 std::to_string(r.num_items()) +
                                 ") do not match mapping dim (" +
                                 std::to_string(w.dim()) + ")");
  }
  check_flip(r, f);

  CorrectionResult result;
  result.mode = mode;
  result.direction = f.direction;
  result.corrected_interactions =
      mode == CorrectionMode::MappingOnly ? r : apply_flip(r, f);

  const ItemCounts c = item_counts(r);
  ItemCounts c_bar(r.num_items(), 0);
  {
    const ItemCounts flipped = item_counts(f.cells);
    std::copy(flipped.begin(), flipped.end(), c_bar.begin());
  }
  result.scale_factors =
      mode == CorrectionMode::InteractionOnly
          ? std::vector<double>(r.num_items(), 1.0)
          : correction_scale_factors(c, c_bar, f.direction);

  if (mode != CorrectionMode::InteractionOnly) {
    if (f.cells.nnz() == 0) {
      result.corrected_mapping = w;  // bitwise identity, no bar fit
    } else {
      InteractionMatrix bar_cells = InteractionMatrix::from_cells(
          r.num_users(), r.num_items(), f.cells.cells());
      const MappingMatrix w_bar = bar_fitter(bar_cells);
      if (w_bar.dim() != w.dim()) {
        throw DimensionMismatchError("bar fitter returned dim " +
                                     std::to_string(w_bar.dim()) +
                                     ", expected " + std::to_string(w.dim()));
      }
      result.corrected_mapping =
          correct_mapping(w, w_bar, c, c_bar, f.direction);
    }
  }
  return result;
}

ScoreMatrix corrected_predict(const CorrectionResult& result,
                              const MappingMatrix& original_w) {
  const MappingMatrix& w = result.corrected_mapping ? *result.corrected_mapping
                                                    : original_w;
  return predict(result.corrected_interactions, w);
}

std::vector<double> corrected_predict_row(const CorrectionResult& result,
                                          const MappingMatrix& original_w,
                                          Index user) {
  const MappingMatrix& w = result.corrected_mapping ? *result.corrected_mapping
                                                    : original_w;
  return predict_row(result.corrected_interactions, w, user);
}

FlipSet forget_preference(const InteractionMatrix& r, const MappingMatrix& w,
                          Index user, Index target_item, Index breadth) {
  if (user >= r.num_users() || !r.contains(user, target_item)) {
    throw UnknownInteractionError("user " + std::to_string(user) +
                                  " has no interaction with item " +
                                  std::to_string(target_item));
  }
  const auto history = r.row(user);

  // Rank the rest of the history by similarity to the target, descending,
  // with index as the tiebreak.
  std::vector<std::pair<double, Index>> ranked;
  ranked.reserve(history.size());
  for (Index i : history) {
    if (i == target_item) continue;
    ranked.emplace_back(w.similarity(i, target_item), i);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::vector<Cell> cells;
  cells.push_back({user, target_item});
  const std::size_t take =
      std::min<std::size_t>(breadth, ranked.size());
  for (std::size_t i = 0; i < take; ++i) {
    cells.push_back({user, ranked[i].second});
  }
  return {Direction::Negative,
          InteractionMatrix::from_cells(r.num_users(), r.num_items(),
                                        std::move(cells))};
}

}  // namespace imc
