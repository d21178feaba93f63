#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "imcorrect/als.hpp"
#include "imcorrect/correction.hpp"
#include "imcorrect/pipeline.hpp"
#include "imcorrect/prediction.hpp"
#include "imcorrect/slim.hpp"
#include "imcorrect/svd.hpp"

namespace imc {

// Per-user ranked recommendation lists of length k. Training interactions
// never appear in a user's list.
struct TopKList {
  int k = 0;
  std::vector<std::vector<Index>> items;
};

// Highest-scoring unmasked items per user, ties broken by ascending item
// index. Throws KTooLargeError when k exceeds some user's unmasked count.
TopKList topk(const ScoreMatrix& scores, const InteractionMatrix& train_mask,
              int k);
std::vector<Index> topk_row(std::span<const double> scores,
                            std::span<const Index> masked_items, int k);

// Mean over users with a nonempty test set of |list intersect test| / |test|.
double recall_at_k(const TopKList& lists, const InteractionMatrix& test);
// Per-user recalls; users with no test interactions get NaN and are
// excluded from the mean.
std::vector<double> per_user_recall(const TopKList& lists,
                                    const InteractionMatrix& test);

// Number of users whose top-k list contains the item.
int exposure_count(const TopKList& lists, Index item);

// One backbone choice plus its configuration.
struct BackboneConfig {
  enum class Kind { Slim, Gfcf, Mf };
  Kind kind = Kind::Slim;
  SlimConfig slim{};
  GfcfConfig gfcf{};
  MfConfig mf{};

  std::string name() const;
};

MappingMatrix fit_backbone(const InteractionMatrix& r,
                           const BackboneConfig& cfg);

// Bar-model fit on flipped cells. For the SVD-based backbone the rank is
// capped at what the flip matrix can support; `rank_capped` reports when
// that happened.
MappingMatrix fit_bar_backbone(const InteractionMatrix& bar,
                               const BackboneConfig& cfg,
                               bool* rank_capped = nullptr);

enum class EvalCondition { Original, Retrain, IMCorrect, IMCorrectNoW };

const char* to_string(EvalCondition c);

struct EvalReport {
  std::string condition;
  std::string backbone;
  std::string noise_mode;
  double fraction = 0.0;
  int k = 0;
  double recall = 0.0;
  std::vector<double> user_recalls;  // NaN marks users with no test items
  double fit_seconds = 0.0;
  double correct_seconds = 0.0;
  double eval_seconds = 0.0;
  int bar_fit_count = 0;
};

// Runs one experimental condition end to end:
//   Original      fit on noisy train, evaluate as-is
//   Retrain       fit on clean train
//   IMCorrectNoW  fit on noisy train, interaction-only correction
//   IMCorrect     fit on noisy train, correct both matrices
// All conditions score against the untouched test split. Update noise
// corrects in two phases, Negative first.
EvalReport run_condition(const DatasetBundle& bundle, const NoiseSpec& noise,
                         EvalCondition condition, const BackboneConfig& backbone,
                         int k);

struct AttackReport {
  Index target_item = 0;
  int fake_count = 0;
  int exposure_clean = 0;
  int exposure_attacked = 0;
  int exposure_corrected = 0;
};

// Injects `fake_count` fake interactions on the target item from distinct
// non-interacting users, refits, then removes the attack with a
// mapping-only correction. Reports the item's top-k exposure in all three
// states.
AttackReport attack_case_study(const DatasetBundle& bundle, Index target_item,
                               int fake_count, const BackboneConfig& backbone,
                               int k, std::uint64_t seed);

struct PrivacyReport {
  Index user = 0;
  int trials = 0;
  Index breadth = 0;
  double mean_similarity_before = 0.0;
  double mean_similarity_after = 0.0;
  int decreased_trials = 0;
};

// Preference-level forgetting trials: each trial picks a random interacted
// target, forgets it together with the `breadth` most similar history
// items (Both correction), and compares the mean similarity of the user's
// recommendations to the target before and after. Similarities are read
// from the original mapping so the two sides share a fixed metric.
PrivacyReport privacy_case_study(const DatasetBundle& bundle, Index user,
                                 int trials, Index breadth,
                                 const BackboneConfig& backbone, int k,
                                 std::uint64_t seed);

// Machine-readable report rows (tab-separated) and a human-readable table.
void write_report_tsv(const std::filesystem::path& path,
                      std::span<const EvalReport> reports);
std::vector<EvalReport> read_report_tsv(const std::filesystem::path& path);
std::string format_report_table(std::span<const EvalReport> reports);

}  // namespace imc
