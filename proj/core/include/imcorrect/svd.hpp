#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/mapping_matrix.hpp"

namespace imc {

// Truncated SVD R ~ U diag(s) V^T with singular values in non-increasing
// order. U is m x k, V is n x k.
struct TruncatedSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

// Randomized range-finder SVD: Gaussian sketch of rank + oversample
// columns, `power_iters` power iterations with re-orthonormalization, then
// an exact SVD of the projected matrix. Deterministic given the seed.
TruncatedSvd randomized_svd(const InteractionMatrix& r, Index rank,
                            std::uint64_t seed, int power_iters = 10,
                            int oversample = 8);

struct GfcfConfig {
  Index rank = 64;
  std::uint64_t seed = 2024;
  int power_iters = 10;
  int oversample = 8;
};

// Low-pass graph filter W = V V^T over the top-k right singular vectors of
// the raw interaction matrix: a symmetric idempotent projector with trace k.
MappingMatrix fit_gfcf(const InteractionMatrix& r, const GfcfConfig& cfg);

// User/item embeddings with a shared inner dimension.
struct EmbeddingPair {
  Eigen::MatrixXd user_embeddings;  // m x k
  Eigen::MatrixXd item_embeddings;  // n x k
};

// P = U s^{1/2}, Q = V s^{1/2} from the same truncated SVD as fit_gfcf.
EmbeddingPair embeddings_from_svd(const InteractionMatrix& r, Index rank,
                                  std::uint64_t seed);

// W = Q Q^T: the item-similarity mapping of any embedding model.
MappingMatrix mapping_from_embeddings(const EmbeddingPair& e);

// R * X and R^T * X against the CSR interaction matrix.
Eigen::MatrixXd multiply(const InteractionMatrix& r, const Eigen::MatrixXd& x);
Eigen::MatrixXd multiply_transposed(const InteractionMatrix& r,
                                    const Eigen::MatrixXd& x);

}  // namespace imc
