#include "imcorrect/svd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <string>

#include "imcorrect/errors.hpp"
#include "imcorrect/parallel.hpp"
#include "imcorrect/rng.hpp"

namespace imc {

Eigen::MatrixXd multiply(const InteractionMatrix& r, const Eigen::MatrixXd& x) {
  if (x.rows() != static_cast<Eigen::Index>(r.num_items())) {
    throw DimensionMismatchError("multiply: inner dimensions differ");
  }
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(r.num_users(), x.cols());
  parallel_for(r.num_users(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      auto row = y.row(static_cast<Eigen::Index>(u));
      for (Index i : r.row(static_cast<Index>(u))) {
        row += x.row(i);
      }
    }
  });
  return y;
}

Eigen::MatrixXd multiply_transposed(const InteractionMatrix& r,
                                    const Eigen::MatrixXd& x) {
  if (x.rows() != static_cast<Eigen::Index>(r.num_users())) {
    throw DimensionMismatchError("multiply_transposed: inner dimensions differ");
  }
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(r.num_items(), x.cols());
  for (Index u = 0; u < r.num_users(); ++u) {
    for (Index i : r.row(u)) {
      y.row(i) += x.row(u);
    }
  }
  return y;
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(y.rows(), y.cols());
  q = qr.householderQ() * q;
  return q;
}

}  // namespace

TruncatedSvd randomized_svd(const InteractionMatrix& r, Index rank,
                            std::uint64_t seed, int power_iters,
                            int oversample) {
  const Index m = r.num_users();
  const Index n = r.num_items();
  const Index max_rank = std::min(m, n);
  if (rank > max_rank) {
    throw RankTooLargeError("rank " + std::to_string(rank) +
                            " exceeds min(users, items) = " +
                            std::to_string(max_rank));
  }
  if (rank == 0) {
    return {Eigen::MatrixXd::Zero(m, 0), Eigen::VectorXd::Zero(0),
            Eigen::MatrixXd::Zero(n, 0)};
  }

  const Index sketch =
      std::min<Index>(max_rank, rank + static_cast<Index>(std::max(0, oversample)));

  Rng rng(seed);
  Eigen::MatrixXd omega(n, sketch);
  for (Eigen::Index j = 0; j < omega.cols(); ++j) {
    for (Eigen::Index i = 0; i < omega.rows(); ++i) {
      omega(i, j) = rng.next_gaussian();
    }
  }

  Eigen::MatrixXd q = orthonormalize(multiply(r, omega));
  for (int it = 0; it < power_iters; ++it) {
    const Eigen::MatrixXd z = orthonormalize(multiply_transposed(r, q));
    q = orthonormalize(multiply(r, z));
  }

  // Project and take the exact SVD of the small matrix.
  const Eigen::MatrixXd b = multiply_transposed(r, q).transpose();  // sketch x n
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);

  TruncatedSvd out;
  out.u = (q * svd.matrixU()).leftCols(rank);
  out.s = svd.singularValues().head(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

MappingMatrix fit_gfcf(const InteractionMatrix& r, const GfcfConfig& cfg) {
  if (cfg.rank < 1) throw ValidationError("gfcf rank must be >= 1");
  const TruncatedSvd svd =
      randomized_svd(r, cfg.rank, cfg.seed, cfg.power_iters, cfg.oversample);
  // Rank-update keeps the projector exactly symmetric.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(r.num_items(), r.num_items());
  w.selfadjointView<Eigen::Lower>().rankUpdate(svd.v);
  w.triangularView<Eigen::StrictlyUpper>() =
      w.triangularView<Eigen::StrictlyLower>().transpose();
  return MappingMatrix::from_dense(w);
}

EmbeddingPair embeddings_from_svd(const InteractionMatrix& r, Index rank,
                                  std::uint64_t seed) {
  const TruncatedSvd svd = randomized_svd(r, rank, seed);
  const Eigen::VectorXd root = svd.s.cwiseMax(0.0).cwiseSqrt();
  return {svd.u * root.asDiagonal(), svd.v * root.asDiagonal()};
}

MappingMatrix mapping_from_embeddings(const EmbeddingPair& e) {
  const Eigen::Index n = e.item_embeddings.rows();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  w.selfadjointView<Eigen::Lower>().rankUpdate(e.item_embeddings);
  w.triangularView<Eigen::StrictlyUpper>() =
      w.triangularView<Eigen::StrictlyLower>().transpose();
  return MappingMatrix::from_dense(w);
}

}  // namespace imc
