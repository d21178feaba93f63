#pragma once

#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/mapping_matrix.hpp"

namespace imc {

struct SlimConfig {
  double l1 = 1.0;
  double l2 = 1.0;
  int max_sweeps = 100;
  double tol = 1e-4;  // max coordinate change that counts as converged
};

struct SlimResult {
  MappingMatrix mapping;
  // False when some column hit max_sweeps before its coordinates settled;
  // the best iterate is still returned.
  bool converged = true;
};

// Optional per-column diagnostics: objective value at sweep 0 (all-zero
// column) and after every sweep.
struct SlimTrace {
  std::vector<std::vector<double>> column_sweep_objectives;
};

// Learns the item-item weight matrix minimizing, per column j,
//   ||r_j - R w||^2 + l1 * ||w||_1 + l2 * ||w||^2
// subject to w >= 0 and w_j = 0, by cyclic coordinate descent with
// soft-thresholding and nonnegative projection. Only items co-occurring
// with j can take nonzero weight, so each column works over its
// co-occurrence set. Deterministic; columns solve independently in
// parallel.
SlimResult fit_slim(const InteractionMatrix& r, const SlimConfig& cfg,
                    SlimTrace* trace = nullptr);

// Objective of one column given explicit weights; used by tests as an
// independent check of fitted columns.
double slim_column_objective(const InteractionMatrix& r, Index column,
                             const std::vector<double>& weights,
                             const SlimConfig& cfg);

}  // namespace imc
