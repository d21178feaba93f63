#include "imcorrect/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "imcorrect/errors.hpp"
#include "imcorrect/parallel.hpp"
#include "imcorrect/rng.hpp"

namespace imc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<Index> topk_row(std::span<const double> scores,
                            std::span<const Index> masked_items, int k) {
  std::vector<char> masked(scores.size(), 0);
  for (Index i : masked_items) masked[i] = 1;

  std::vector<Index> order;
  order.reserve(scores.size() - masked_items.size());
  for (Index i = 0; i < scores.size(); ++i) {
    if (!masked[i]) order.push_back(i);
  }
  if (static_cast<std::size_t>(k) > order.size()) {
    throw KTooLargeError("k=" + std::to_string(k) + " exceeds the " +
                         std::to_string(order.size()) +
                         " unmasked items available");
  }
  const auto better = [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  order.resize(k);
  return order;
}

TopKList topk(const ScoreMatrix& scores, const InteractionMatrix& train_mask,
              int k) {
  if (scores.num_users() != train_mask.num_users() ||
      scores.num_items() != train_mask.num_items()) {
    throw DimensionMismatchError("score matrix and mask shapes differ");
  }
  if (k < 1) throw ValidationError("k must be >= 1");

  TopKList lists;
  lists.k = k;
  lists.items.resize(scores.num_users());
  std::mutex failure_mutex;
  std::exception_ptr failure;
  parallel_for(scores.num_users(), [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t u = begin; u < end; ++u) {
        lists.items[u] = topk_row(scores.row(static_cast<Index>(u)),
                                  train_mask.row(static_cast<Index>(u)), k);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return lists;
}

std::vector<double> per_user_recall(const TopKList& lists,
                                    const InteractionMatrix& test) {
  std::vector<double> recalls(lists.items.size(),
                              std::numeric_limits<double>::quiet_NaN());
  for (Index u = 0; u < test.num_users() && u < lists.items.size(); ++u) {
    const auto held_out = test.row(u);
    if (held_out.empty()) continue;
    std::size_t hits = 0;
    for (Index i : lists.items[u]) {
      if (std::binary_search(held_out.begin(), held_out.end(), i)) ++hits;
    }
    recalls[u] =
        static_cast<double>(hits) / static_cast<double>(held_out.size());
  }
  return recalls;
}

double recall_at_k(const TopKList& lists, const InteractionMatrix& test) {
  const std::vector<double> recalls = per_user_recall(lists, test);
  double sum = 0.0;
  std::size_t counted = 0;
  for (double r : recalls) {
    if (!std::isnan(r)) {
      sum += r;
      ++counted;
    }
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

int exposure_count(const TopKList& lists, Index item) {
  int count = 0;
  for (const auto& list : lists.items) {
    if (std::find(list.begin(), list.end(), item) != list.end()) ++count;
  }
  return count;
}

std::string BackboneConfig::name() const {
  switch (kind) {
    case Kind::Slim:
      return "slim";
    case Kind::Gfcf:
      return "gfcf";
    case Kind::Mf:
      return "mf";
  }
  return "?";
}

MappingMatrix fit_backbone(const InteractionMatrix& r,
                           const BackboneConfig& cfg) {
  switch (cfg.kind) {
    case BackboneConfig::Kind::Slim:
      return fit_slim(r, cfg.slim).mapping;
    case BackboneConfig::Kind::Gfcf:
      return fit_gfcf(r, cfg.gfcf);
    case BackboneConfig::Kind::Mf:
      return mapping_from_embeddings(fit_mf_als(r, cfg.mf));
  }
  throw ValidationError("unknown backbone");
}

MappingMatrix fit_bar_backbone(const InteractionMatrix& bar,
                               const BackboneConfig& cfg, bool* rank_capped) {
  if (rank_capped) *rank_capped = false;
  if (bar.nnz() == 0) return MappingMatrix::zero(bar.num_items());

  if (cfg.kind == BackboneConfig::Kind::Gfcf) {
    // The flip matrix can only support as many singular directions as it
    // has active users or items.
    Index active_users = 0;
    for (Index u = 0; u < bar.num_users(); ++u) {
      if (!bar.row(u).empty()) ++active_users;
    }
    Index active_items = 0;
    for (std::uint32_t c : item_counts(bar)) {
      if (c > 0) ++active_items;
    }
    const Index feasible = std::min(active_users, active_items);
    GfcfConfig capped = cfg.gfcf;
    if (capped.rank > feasible) {
      capped.rank = feasible;
      if (rank_capped) *rank_capped = true;
    }
    if (capped.rank == 0) return MappingMatrix::zero(bar.num_items());
    return fit_gfcf(bar, capped);
  }
  return fit_backbone(bar, cfg);
}

const char* to_string(EvalCondition c) {
  switch (c) {
    case EvalCondition::Original:
      return "original";
    case EvalCondition::Retrain:
      return "retrain";
    case EvalCondition::IMCorrect:
      return "imcorrect";
    case EvalCondition::IMCorrectNoW:
      return "imcorrect-no-w";
  }
  return "?";
}

EvalReport run_condition(const DatasetBundle& bundle, const NoiseSpec& noise,
                         EvalCondition condition,
                         const BackboneConfig& backbone, int k) {
  EvalReport report;
  report.condition = to_string(condition);
  report.backbone = backbone.name();
  report.noise_mode = to_string(noise.mode);
  report.fraction = noise.fraction;
  report.k = k;

  const NoiseResult noisy = generate_noise(bundle, noise);

  const InteractionMatrix& fit_matrix = condition == EvalCondition::Retrain
                                            ? bundle.train
                                            : noisy.noisy_train;
  auto t0 = Clock::now();
  const MappingMatrix w = fit_backbone(fit_matrix, backbone);
  report.fit_seconds = seconds_since(t0);

  // Unlearning reverses the clean -> noisy edits: inserted noise is
  // forgotten (Negative), deleted interactions are re-learned (Positive).
  InteractionMatrix eval_interactions = fit_matrix;
  const MappingMatrix* eval_mapping = &w;
  std::optional<MappingMatrix> corrected;

  if (condition == EvalCondition::IMCorrect ||
      condition == EvalCondition::IMCorrectNoW) {
    const CorrectionMode mode = condition == EvalCondition::IMCorrect
                                    ? CorrectionMode::Both
                                    : CorrectionMode::InteractionOnly;
    BarFitter bar = [&](const InteractionMatrix& cells) {
      ++report.bar_fit_count;
      return fit_bar_backbone(cells, backbone);
    };

    t0 = Clock::now();
    InteractionMatrix current = noisy.noisy_train;
    MappingMatrix current_w = w;
    // Negative phase first, then Positive on the intermediate state.
    if (noisy.inserted) {
      CorrectionResult res =
          unlearn(current, current_w, noisy.inserted->reversed(), mode, bar);
      current = std::move(res.corrected_interactions);
      if (res.corrected_mapping) current_w = std::move(*res.corrected_mapping);
    }
    if (noisy.removed) {
      CorrectionResult res =
          unlearn(current, current_w, noisy.removed->reversed(), mode, bar);
      current = std::move(res.corrected_interactions);
      if (res.corrected_mapping) current_w = std::move(*res.corrected_mapping);
    }
    report.correct_seconds = seconds_since(t0);
    eval_interactions = std::move(current);
    if (mode == CorrectionMode::Both) {
      corrected = std::move(current_w);
      eval_mapping = &*corrected;
    }
  }

  t0 = Clock::now();
  const ScoreMatrix scores = predict(eval_interactions, *eval_mapping);
  const TopKList lists = topk(scores, eval_interactions, k);
  report.user_recalls = per_user_recall(lists, bundle.test);
  report.recall = recall_at_k(lists, bundle.test);
  report.eval_seconds = seconds_since(t0);
  return report;
}

AttackReport attack_case_study(const DatasetBundle& bundle, Index target_item,
                               int fake_count, const BackboneConfig& backbone,
                               int k, std::uint64_t seed) {
  const InteractionMatrix& train = bundle.train;
  if (target_item >= train.num_items()) {
    throw ValidationError("target item " + std::to_string(target_item) +
                          " out of range");
  }
  if (fake_count < 0) throw ValidationError("fake count must be >= 0");

  AttackReport report;
  report.target_item = target_item;
  report.fake_count = fake_count;

  // Users who have not touched the target are attack candidates.
  std::vector<Index> candidates;
  for (Index u = 0; u < train.num_users(); ++u) {
    if (!train.contains(u, target_item)) candidates.push_back(u);
  }
  if (static_cast<std::size_t>(fake_count) > candidates.size()) {
    throw InsufficientUsersError(
        "need " + std::to_string(fake_count) + " fake users but only " +
        std::to_string(candidates.size()) + " have no interaction with item " +
        std::to_string(target_item));
  }

  const MappingMatrix w_clean = fit_backbone(train, backbone);
  report.exposure_clean =
      exposure_count(topk(predict(train, w_clean), train, k), target_item);

  Rng rng(seed);
  std::vector<Cell> fakes;
  for (Index u : rng.sample(candidates, static_cast<std::size_t>(fake_count))) {
    fakes.push_back({u, target_item});
  }
  const FlipSet attack{Direction::Positive,
                       InteractionMatrix::from_cells(
                           train.num_users(), train.num_items(), fakes)};
  const InteractionMatrix attacked = apply_flip(train, attack);

  const MappingMatrix w_attacked = fit_backbone(attacked, backbone);
  report.exposure_attacked = exposure_count(
      topk(predict(attacked, w_attacked), attacked, k), target_item);

  // Attack cleanup corrects the mapping only: user rows keep the fakes but
  // the similarity model forgets them.
  const CorrectionResult res =
      unlearn(attacked, w_attacked, attack.reversed(),
              CorrectionMode::MappingOnly, [&](const InteractionMatrix& cells) {
                return fit_bar_backbone(cells, backbone);
              });
  report.exposure_corrected = exposure_count(
      topk(corrected_predict(res, w_attacked), attacked, k), target_item);
  return report;
}

PrivacyReport privacy_case_study(const DatasetBundle& bundle, Index user,
                                 int trials, Index breadth,
                                 const BackboneConfig& backbone, int k,
                                 std::uint64_t seed) {
  const InteractionMatrix& train = bundle.train;
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (user >= train.num_users()) {
    throw ValidationError("user " + std::to_string(user) + " out of range");
  }
  const auto history = train.row(user);
  if (history.size() <= static_cast<std::size_t>(breadth) + 1) {
    throw ValidationError("user " + std::to_string(user) + " has only " +
                          std::to_string(history.size()) +
                          " training interactions; need more than " +
                          std::to_string(breadth + 1));
  }

  const MappingMatrix w = fit_backbone(train, backbone);
  const std::vector<double> base_scores = predict_row(train, w, user);
  const std::vector<Index> base_list = topk_row(base_scores, history, k);

  const auto mean_similarity = [&](const std::vector<Index>& list,
                                   Index target) {
    double sum = 0.0;
    for (Index i : list) sum += w.similarity(i, target);
    return list.empty() ? 0.0 : sum / static_cast<double>(list.size());
  };

  PrivacyReport report;
  report.user = user;
  report.trials = trials;
  report.breadth = breadth;

  Rng rng(seed);
  double before_sum = 0.0, after_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = rng.substream(static_cast<std::uint64_t>(t));
    const Index target =
        history[static_cast<std::size_t>(trial_rng.below(history.size()))];

    const FlipSet forget = forget_preference(train, w, user, target, breadth);
    const CorrectionResult res =
        unlearn(train, w, forget, CorrectionMode::Both,
                [&](const InteractionMatrix& cells) {
                  return fit_bar_backbone(cells, backbone);
                });
    const std::vector<double> after_scores =
        corrected_predict_row(res, w, user);
    const std::vector<Index> after_list =
        topk_row(after_scores, res.corrected_interactions.row(user), k);

    const double before = mean_similarity(base_list, target);
    const double after = mean_similarity(after_list, target);
    before_sum += before;
    after_sum += after;
    if (after < before) ++report.decreased_trials;
  }
  report.mean_similarity_before = before_sum / trials;
  report.mean_similarity_after = after_sum / trials;
  return report;
}

namespace {

constexpr char kReportHeader[] =
    "condition\tbackbone\tnoise_mode\tfraction\tk\trecall\tfit_seconds\t"
    "correct_seconds\teval_seconds";

}  // namespace

void write_report_tsv(const std::filesystem::path& path,
                      std::span<const EvalReport> reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kReportHeader << '\n';
  out.precision(10);
  for (const EvalReport& r : reports) {
    out << r.condition << '\t' << r.backbone << '\t' << r.noise_mode << '\t'
        << r.fraction << '\t' << r.k << '\t' << r.recall << '\t'
        << r.fit_seconds << '\t' << r.correct_seconds << '\t'
        << r.eval_seconds << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<EvalReport> read_report_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<EvalReport> reports;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || lineno == 1) continue;  // header
    std::istringstream ss(line);
    EvalReport r;
    if (!(ss >> r.condition >> r.backbone >> r.noise_mode >> r.fraction >>
          r.k >> r.recall >> r.fit_seconds >> r.correct_seconds >>
          r.eval_seconds)) {
      throw ParseError("malformed report row in " + path.string(), lineno);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string format_report_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << "condition        backbone  noise    frac    K   recall     fit(s)  "
         "correct(s)\n";
  char buf[160];
  for (const EvalReport& r : reports) {
    std::snprintf(buf, sizeof(buf),
                  "%-16s %-9s %-8s %5.2f %4d   %.4f  %9.3f  %10.3f\n",
                  r.condition.c_str(), r.backbone.c_str(),
                  r.noise_mode.c_str(), r.fraction, r.k, r.recall,
                  r.fit_seconds, r.correct_seconds);
    out << buf;
  }
  return out.str();
}

}  // namespace imc
