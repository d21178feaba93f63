#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/io.hpp"

namespace imc {

struct RawRecord {
  std::string user;
  std::string item;
  std::optional<double> rating;
  std::optional<std::int64_t> timestamp;
};

struct RawInteractionLog {
  std::vector<RawRecord> records;
};

// Reads a delimiter-separated interaction log (delimiter auto-detected
// among tab, comma and "::"). Records with a rating below the threshold
// are dropped; ratingless logs keep everything. Duplicate (user, item)
// pairs collapse to the first occurrence. Throws ParseError with the
// offending line number.
RawInteractionLog ingest(const std::filesystem::path& path,
                         double rating_threshold = 3.0);

// Iteratively removes users and items with fewer than k interactions until
// a fixpoint. Throws EmptyResultError when nothing survives.
RawInteractionLog kcore_filter(const RawInteractionLog& log, int k);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

// Train/validation/test interaction matrices over one shared index space.
// Splits are pairwise disjoint; every user keeps at least one train
// interaction (the remainder rounds toward train), and after k-core
// filtering at realistic levels every item does too. Vocabularies map
// index -> token in first-appearance order.
struct DatasetBundle {
  InteractionMatrix train;
  InteractionMatrix validation;
  InteractionMatrix test;
  std::vector<std::string> user_vocab;
  std::vector<std::string> item_vocab;
  std::uint64_t seed = 0;
};

// Per-user random partition by the ratios, rounding toward train;
// deterministic given the seed.
DatasetBundle split(const RawInteractionLog& log, const SplitRatios& ratios,
                    std::uint64_t seed);

struct NoiseSpec {
  enum class Mode { Insert, Delete, Update };
  Mode mode = Mode::Delete;
  double fraction = 0.05;
  std::uint64_t seed = 2024;
};

const char* to_string(NoiseSpec::Mode mode);

// The flip sets describe the clean -> noisy edit, so unlearning the noise
// applies them reversed against the noisy matrix.
struct NoiseResult {
  InteractionMatrix noisy_train;
  std::optional<FlipSet> inserted;  // Positive cells added to train
  std::optional<FlipSet> removed;   // Negative cells removed from train
};

// Per-user noise: Insert adds round(fraction * t_u) random non-interacted
// items (excluding the user's validation/test cells), Delete removes the
// same count but always keeps at least one train interaction, Update does
// both. Sampling uses a per-user substream of the spec seed, so user order
// does not affect the draw.
NoiseResult generate_noise(const DatasetBundle& bundle, const NoiseSpec& spec);

// Bundle directory layout: train.mtx, valid.mtx, test.mtx, user_vocab.tsv,
// item_vocab.tsv and a key=value manifest with the seed, counts and any
// extra provenance the caller supplies.
void save_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle,
                 const Metadata& extra = {});
DatasetBundle load_bundle(const std::filesystem::path& dir);

}  // namespace imc
