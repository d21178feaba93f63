#pragma once

#include <cstdint>
#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/svd.hpp"

namespace imc {

struct MfConfig {
  int dim = 64;
  double reg = 0.001;
  int iters = 20;
  std::uint64_t seed = 2024;
};

// Alternating ridge least squares on ||R - P Q^T||^2 + reg (||P||^2 +
// ||Q||^2), treating every unobserved cell as a zero with unit weight.
// Each alternation solves the P block exactly, then the Q block exactly,
// so the objective is non-increasing. Gaussian init scaled by 1/sqrt(dim)
// from the seed. Users and items with no interactions keep zero vectors
// and are skipped in the solves.
//
// When `loss_trace` is non-null it receives the objective at init and
// after every alternation.
EmbeddingPair fit_mf_als(const InteractionMatrix& r, const MfConfig& cfg,
                         std::vector<double>* loss_trace = nullptr);

// The ALS objective, evaluated without materializing P Q^T.
double mf_loss(const InteractionMatrix& r, const EmbeddingPair& e, double reg);

}  // namespace imc
