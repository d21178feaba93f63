#include "imcorrect/slim.hpp"

#include <algorithm>
#include <cmath>

#include "imcorrect/errors.hpp"
#include "imcorrect/parallel.hpp"

namespace imc {

namespace {

// Column-compressed view of the interaction matrix: users per item.
struct CscView {
  std::vector<std::size_t> col_ptr;
  std::vector<Index> user_idx;

  std::span<const Index> column(Index item) const {
    return {user_idx.data() + col_ptr[item],
            user_idx.data() + col_ptr[item + 1]};
  }
};

CscView build_csc(const InteractionMatrix& r) {
  CscView v;
  v.col_ptr.assign(static_cast<std::size_t>(r.num_items()) + 1, 0);
  for (Index i : r.column_indices()) ++v.col_ptr[i + 1];
  for (std::size_t i = 1; i < v.col_ptr.size(); ++i) {
    v.col_ptr[i] += v.col_ptr[i - 1];
  }
  v.user_idx.resize(r.nnz());
  std::vector<std::size_t> cursor(v.col_ptr.begin(), v.col_ptr.end() - 1);
  for (Index u = 0; u < r.num_users(); ++u) {
    for (Index i : r.row(u)) v.user_idx[cursor[i]++] = u;
  }
  return v;
}

struct ColumnFit {
  std::vector<Index> items;
  std::vector<double> weights;
  bool converged = true;
  std::vector<double> sweep_objectives;
};

// Coordinate descent for one target column. `residual` and `candidate_mark`
// are caller-owned scratch of size m and n respectively (mark must be false
// on entry and is false again on exit).
ColumnFit fit_column(const InteractionMatrix& r, const CscView& csc,
                     const ItemCounts& counts, Index target,
                     const SlimConfig& cfg, std::vector<double>& residual,
                     std::vector<char>& candidate_mark, bool want_trace) {
  ColumnFit fit;
  const auto target_users = csc.column(target);

  // Items co-occurring with the target; everything else stays at zero.
  std::vector<Index> candidates;
  for (Index u : target_users) {
    for (Index i : r.row(u)) {
      if (i != target && !candidate_mark[i]) {
        candidate_mark[i] = 1;
        candidates.push_back(i);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (Index i : candidates) candidate_mark[i] = 0;
  if (candidates.empty()) return fit;

  // residual = r_target - R w, starting from w = 0.
  for (Index u : target_users) residual[u] = 1.0;

  std::vector<double> w(candidates.size(), 0.0);

  // Users whose residual entry can be nonzero: the target's users plus
  // every candidate column's users. Only materialized when tracing.
  std::vector<Index> touched;
  const auto current_objective = [&] {
    double rss = 0.0;
    for (Index u : touched) rss += residual[u] * residual[u];
    double l1 = 0.0, sq = 0.0;
    for (double v : w) {
      l1 += v;
      sq += v * v;
    }
    return rss + cfg.l1 * l1 + cfg.l2 * sq;
  };
  if (want_trace) {
    std::vector<char> seen(residual.size(), 0);
    const auto mark = [&](std::span<const Index> users) {
      for (Index u : users) {
        if (!seen[u]) {
          seen[u] = 1;
          touched.push_back(u);
        }
      }
    };
    mark(target_users);
    for (Index i : candidates) mark(csc.column(i));
    fit.sweep_objectives.push_back(current_objective());  // w = 0
  }

  bool converged = false;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const Index i = candidates[c];
      const auto users = csc.column(i);
      const double ci = static_cast<double>(counts[i]);

      double dot = 0.0;
      for (Index u : users) dot += residual[u];
      const double old_w = w[c];
      const double numerator = 2.0 * (dot + ci * old_w) - cfg.l1;
      double new_w = numerator / (2.0 * (ci + cfg.l2));
      if (new_w < 0.0) new_w = 0.0;

      const double delta = new_w - old_w;
      if (delta != 0.0) {
        for (Index u : users) residual[u] -= delta;
        w[c] = new_w;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (want_trace) fit.sweep_objectives.push_back(current_objective());
    if (max_change < cfg.tol) {
      converged = true;
      break;
    }
  }
  fit.converged = converged;

  // Clean the scratch residual for the next column. Every entry that may
  // have been written lives on the target's users or a candidate column's
  // users.
  for (Index u : target_users) residual[u] = 0.0;
  for (Index i : candidates) {
    for (Index u : csc.column(i)) residual[u] = 0.0;
  }

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (w[c] > 0.0) {
      fit.items.push_back(candidates[c]);
      fit.weights.push_back(w[c]);
    }
  }
  return fit;
}

}  // namespace

SlimResult fit_slim(const InteractionMatrix& r, const SlimConfig& cfg,
                    SlimTrace* trace) {
  if (r.nnz() == 0) {
    throw ValidationError("cannot fit on an empty interaction matrix");
  }
  if (cfg.max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
  if (cfg.tol <= 0.0) throw ValidationError("tol must be positive");
  if (cfg.l1 < 0.0 || cfg.l2 < 0.0) {
    throw ValidationError("regularization coefficients must be non-negative");
  }

  const Index n = r.num_items();
  const CscView csc = build_csc(r);
  const ItemCounts counts = item_counts(r);

  std::vector<ColumnFit> fits(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> residual(r.num_users(), 0.0);
    std::vector<char> candidate_mark(n, 0);
    for (std::size_t j = begin; j < end; ++j) {
      fits[j] = fit_column(r, csc, counts, static_cast<Index>(j), cfg,
                           residual, candidate_mark, trace != nullptr);
    }
  });

  bool converged = true;
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < n; ++j) {
    const ColumnFit& f = fits[j];
    converged = converged && f.converged;
    for (std::size_t c = 0; c < f.items.size(); ++c) {
      triplets.emplace_back(f.items[c], j, f.weights[c]);
    }
  }
  if (trace) {
    trace->column_sweep_objectives.clear();
    trace->column_sweep_objectives.reserve(n);
    for (Index j = 0; j < n; ++j) {
      trace->column_sweep_objectives.push_back(
          std::move(fits[j].sweep_objectives));
    }
  }
  return {MappingMatrix::from_triplets(n, triplets), converged};
}

double slim_column_objective(const InteractionMatrix& r, Index column,
                             const std::vector<double>& weights,
                             const SlimConfig& cfg) {
  double rss = 0.0;
  for (Index u = 0; u < r.num_users(); ++u) {
    double pred = 0.0;
    for (Index i : r.row(u)) pred += weights[i];
    const double target = r.contains(u, column) ? 1.0 : 0.0;
    const double d = target - pred;
    rss += d * d;
  }
  double l1 = 0.0, sq = 0.0;
  for (double v : weights) {
    l1 += std::abs(v);
    sq += v * v;
  }
  return rss + cfg.l1 * l1 + cfg.l2 * sq;
}

}  // namespace imc
