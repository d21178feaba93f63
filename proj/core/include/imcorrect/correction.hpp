#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/mapping_matrix.hpp"
#include "imcorrect/prediction.hpp"

namespace imc {

// Which matrices the unlearning step corrects. InteractionOnly predicts
// with the edited interactions and the original mapping; MappingOnly keeps
// the interactions and predicts with the corrected mapping; Both edits
// both sides.
enum class CorrectionMode { InteractionOnly, MappingOnly, Both };

const char* to_string(CorrectionMode mode);

// Fits a mapping matrix on the flipped cells alone (the "bar" model).
using BarFitter = std::function<MappingMatrix(const InteractionMatrix&)>;

// Per-column factors f_i applied to the main mapping:
//   Negative: (c_i - cbar_i) / c_i      Positive: (c_i + cbar_i) / c_i
// with f_i = 1 whenever c_i = 0 (nothing to scale). Throws
// CountOverflowError if a Negative flip removes more than an item has.
std::vector<double> correction_scale_factors(const ItemCounts& c,
                                             const ItemCounts& c_bar,
                                             Direction dir);

MappingMatrix scale_mapping_columns(const MappingMatrix& w,
                                    const ItemCounts& c,
                                    const ItemCounts& c_bar, Direction dir);

// Column-wise reliability weighting of the bar mapping: column i scaled by
// cbar_i / c_i, with weight 1 when c_i = 0 and cbar_i > 0 (the bar model is
// the only evidence) and 0 when both counts are 0.
MappingMatrix weight_bar_mapping(const MappingMatrix& w_bar,
                                 const ItemCounts& c, const ItemCounts& c_bar);

// W~ = W' - Wbar' (Negative) or W' + Wbar' (Positive). Entries may go
// negative and the diagonal is not re-zeroed; ranking uses relative scores.
// An all-zero flip count returns W bitwise unchanged.
MappingMatrix correct_mapping(const MappingMatrix& w,
                              const MappingMatrix& w_bar, const ItemCounts& c,
                              const ItemCounts& c_bar, Direction dir);

struct CorrectionResult {
  CorrectionMode mode = CorrectionMode::Both;
  Direction direction = Direction::Negative;
  InteractionMatrix corrected_interactions;           // R~ (== R for MappingOnly)
  std::optional<MappingMatrix> corrected_mapping;     // W~ (absent for InteractionOnly)
  std::vector<double> scale_factors;                  // f_i per column
};

// Applies the requested correction. The bar fitter runs on the flip cells
// alone and is skipped entirely for InteractionOnly mode or an empty flip
// set.
CorrectionResult unlearn(const InteractionMatrix& r, const MappingMatrix& w,
                         const FlipSet& f, CorrectionMode mode,
                         const BarFitter& bar_fitter);

// Predictions from a correction result, using the original mapping where
// no corrected one exists.
ScoreMatrix corrected_predict(const CorrectionResult& result,
                              const MappingMatrix& original_w);
std::vector<double> corrected_predict_row(const CorrectionResult& result,
                                          const MappingMatrix& original_w,
                                          Index user);

// Builds the Negative flip set for preference-level forgetting: the target
// interaction plus the user's `breadth` historical items most similar to
// the target under the symmetrized mapping weight, ties broken by
// ascending item index.
FlipSet forget_preference(const InteractionMatrix& r, const MappingMatrix& w,
                          Index user, Index target_item, Index breadth);

}  // namespace imc
