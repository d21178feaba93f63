#include "imcorrect/als.hpp"

#include <Eigen/Cholesky>

#include "imcorrect/errors.hpp"
#include "imcorrect/rng.hpp"

namespace imc {

namespace {

// Rows with at least one interaction; the complement stays zero under the
// unit-weight zero-target objective, so the solves skip it.
std::vector<Index> active_users(const InteractionMatrix& r) {
  std::vector<Index> out;
  for (Index u = 0; u < r.num_users(); ++u) {
    if (!r.row(u).empty()) out.push_back(u);
  }
  return out;
}

std::vector<Index> active_items(const InteractionMatrix& r) {
  const ItemCounts counts = item_counts(r);
  std::vector<Index> out;
  for (Index i = 0; i < r.num_items(); ++i) {
    if (counts[i] > 0) out.push_back(i);
  }
  return out;
}

Eigen::MatrixXd gaussian_init(Rng rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = scale * rng.next_gaussian();
    }
  }
  return m;
}

// Solve X = B (G + reg I)^{-1} for the active rows of B only; inactive
// rows of X are zeroed.
void ridge_solve_rows(const Eigen::MatrixXd& b, const Eigen::MatrixXd& gram,
                      double reg, const std::vector<Index>& active,
                      Eigen::MatrixXd& x) {
  const Eigen::Index k = gram.rows();
  Eigen::MatrixXd g = gram;
  g.diagonal().array() += reg;
  // (G + reg I) is positive semidefinite, definite whenever reg > 0.
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(g);

  x.setZero();
  if (active.empty()) return;
  Eigen::MatrixXd packed(static_cast<Eigen::Index>(active.size()), k);
  for (std::size_t a = 0; a < active.size(); ++a) {
    packed.row(static_cast<Eigen::Index>(a)) = b.row(active[a]);
  }
  packed = ldlt.solve(packed.transpose()).transpose();
  for (std::size_t a = 0; a < active.size(); ++a) {
    x.row(active[a]) = packed.row(static_cast<Eigen::Index>(a));
  }
}

}  // namespace

EmbeddingPair fit_mf_als(const InteractionMatrix& r, const MfConfig& cfg,
                         std::vector<double>* loss_trace) {
  if (cfg.dim < 1) throw ValidationError("mf dim must be >= 1");
  if (cfg.iters < 0) throw ValidationError("mf iters must be >= 0");
  if (cfg.reg < 0.0) throw ValidationError("mf reg must be non-negative");

  const Index m = r.num_users();
  const Index n = r.num_items();
  const Eigen::Index k = cfg.dim;

  Rng rng(cfg.seed);
  EmbeddingPair e;
  e.user_embeddings = gaussian_init(rng.substream(0), m, k);
  e.item_embeddings = gaussian_init(rng.substream(1), n, k);

  const std::vector<Index> users = active_users(r);
  const std::vector<Index> items = active_items(r);
  // Zero the never-updated rows up front so the invariant holds from init.
  for (Index u = 0; u < m; ++u) {
    if (r.row(u).empty()) e.user_embeddings.row(u).setZero();
  }
  {
    const ItemCounts counts = item_counts(r);
    for (Index i = 0; i < n; ++i) {
      if (counts[i] == 0) e.item_embeddings.row(i).setZero();
    }
  }

  if (loss_trace) {
    loss_trace->clear();
    loss_trace->push_back(mf_loss(r, e, cfg.reg));
  }

  for (int it = 0; it < cfg.iters; ++it) {
    // P block: P = (R Q) (Q^T Q + reg I)^{-1}
    {
      const Eigen::MatrixXd rq = multiply(r, e.item_embeddings);
      const Eigen::MatrixXd gram =
          e.item_embeddings.transpose() * e.item_embeddings;
      ridge_solve_rows(rq, gram, cfg.reg, users, e.user_embeddings);
    }
    // Q block: Q = (R^T P) (P^T P + reg I)^{-1}
    {
      const Eigen::MatrixXd rtp = multiply_transposed(r, e.user_embeddings);
      const Eigen::MatrixXd gram =
          e.user_embeddings.transpose() * e.user_embeddings;
      ridge_solve_rows(rtp, gram, cfg.reg, items, e.item_embeddings);
    }
    if (loss_trace) loss_trace->push_back(mf_loss(r, e, cfg.reg));
  }
  return e;
}

double mf_loss(const InteractionMatrix& r, const EmbeddingPair& e,
               double reg) {
  // ||R - P Q^T||^2 = nnz - 2 sum_{(u,i) in R} p_u . q_i + <P^T P, Q^T Q>
  double cross = 0.0;
  for (Index u = 0; u < r.num_users(); ++u) {
    const auto p = e.user_embeddings.row(u);
    for (Index i : r.row(u)) {
      cross += p.dot(e.item_embeddings.row(i));
    }
  }
  const Eigen::MatrixXd pg =
      e.user_embeddings.transpose() * e.user_embeddings;
  const Eigen::MatrixXd qg =
      e.item_embeddings.transpose() * e.item_embeddings;
  const double fro = pg.cwiseProduct(qg).sum();
  const double recon = static_cast<double>(r.nnz()) - 2.0 * cross + fro;
  return recon + reg * (e.user_embeddings.squaredNorm() +
                        e.item_embeddings.squaredNorm());
}

}  // namespace imc
