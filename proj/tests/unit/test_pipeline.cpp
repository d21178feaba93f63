#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"

#include "imcorrect/errors.hpp"
#include "imcorrect/pipeline.hpp"
#include "imcorrect/synthetic.hpp"

using namespace imc;
namespace fs = std::filesystem;

namespace {

fs::path write_lines(const std::string& name,
                     const std::vector<std::string>& lines) {
  const fs::path dir = fs::temp_directory_path() / "imc_pipeline_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  for (const auto& l : lines) out << l << '\n';
  return path;
}

// Independent peeling oracle: recompute degrees from scratch and drop
// offenders one round at a time.
RawInteractionLog naive_kcore(RawInteractionLog log, int k) {
  while (true) {
    std::map<std::string, int> ud, id;
    for (const auto& rec : log.records) {
      ++ud[rec.user];
      ++id[rec.item];
    }
    std::vector<RawRecord> keep;
    for (const auto& rec : log.records) {
      if (ud[rec.user] >= k && id[rec.item] >= k) keep.push_back(rec);
    }
    if (keep.size() == log.records.size()) return log;
    log.records = std::move(keep);
  }
}

bool same_pairs(const RawInteractionLog& a, const RawInteractionLog& b) {
  std::set<std::pair<std::string, std::string>> sa, sb;
  for (const auto& r : a.records) sa.insert({r.user, r.item});
  for (const auto& r : b.records) sb.insert({r.user, r.item});
  return sa == sb;
}

}  // namespace

TEST_CASE("ingest parses the :: rating format and applies the threshold") {
  const auto path = write_lines("ml.dat", {
                                              "1::2::5::964982703",
                                              "1::3::2::964982704",
                                              "2::2::3::964982705",
                                              "2::2::4::964982706",
                                          });
  const auto log = ingest(path, 3.0);
  REQUIRE(log.records.size() == 2);  // rating 2 dropped, duplicate collapsed
  CHECK(log.records[0].user == "1");
  CHECK(log.records[0].item == "2");
  CHECK(*log.records[0].rating == 5.0);
  CHECK(*log.records[0].timestamp == 964982703);
  CHECK(log.records[1].user == "2");
}

TEST_CASE("ratingless logs keep every record") {
  const auto path = write_lines("checkins.tsv", {
                                                    "alice\tcafe",
                                                    "bob\tpark",
                                                    "alice\tpark",
                                                });
  const auto log = ingest(path, 3.0);
  CHECK(log.records.size() == 3);
  CHECK_FALSE(log.records[0].rating.has_value());
}

TEST_CASE("comma logs parse too") {
  const auto path = write_lines("r.csv", {"7,9,4", "8,9,3"});
  const auto log = ingest(path, 3.0);
  CHECK(log.records.size() == 2);
}

TEST_CASE("parse errors name the line") {
  const auto path =
      write_lines("bad.dat", {"1::2::5", "1::3::not_a_number"});
  try {
    ingest(path, 3.0);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("missing file raises an IO error") {
  CHECK_THROWS_AS(ingest("/nonexistent/ratings.dat", 3.0), IoError);
}

TEST_CASE("k-core keeps an already-conforming log unchanged") {
  // 3 users x 3 items complete bipartite graph: all degrees 3.
  std::vector<std::string> lines;
  for (int u = 1; u <= 3; ++u) {
    for (int i = 1; i <= 3; ++i) {
      lines.push_back(std::to_string(u) + "\t" + std::to_string(i));
    }
  }
  const auto log = ingest(write_lines("core.tsv", lines), 3.0);
  const auto filtered = kcore_filter(log, 3);
  CHECK(filtered.records.size() == 9);
}

TEST_CASE("a star graph collapses to nothing at k=20") {
  std::vector<std::string> lines;
  for (int i = 1; i <= 30; ++i) lines.push_back("1\t" + std::to_string(i));
  const auto log = ingest(write_lines("star.tsv", lines), 3.0);
  CHECK_THROWS_AS(kcore_filter(log, 20), EmptyResultError);
}

TEST_CASE("k-core matches the naive peeling oracle") {
  SyntheticConfig cfg;
  cfg.users = 100;
  cfg.items = 80;
  cfg.seed = 555;
  cfg.min_user_degree = 1;
  cfg.p_primary = 0.4;
  cfg.p_secondary = 0.1;
  cfg.p_background = 0.02;
  const auto log = synthetic_log(cfg);
  for (int k : {2, 3, 4, 6}) {
    const auto oracle = naive_kcore(log, k);
    if (oracle.records.empty()) {
      CHECK_THROWS_AS(kcore_filter(log, k), EmptyResultError);
      continue;
    }
    const auto fast = kcore_filter(log, k);
    CHECK(same_pairs(fast, oracle));
    // Survivor degrees clear the bar.
    std::map<std::string, int> ud, id;
    for (const auto& rec : fast.records) {
      ++ud[rec.user];
      ++id[rec.item];
    }
    for (const auto& [_, d] : ud) CHECK(d >= k);
    for (const auto& [_, d] : id) CHECK(d >= k);
  }
}

TEST_CASE("split sizes follow the 7:1:2 rule with remainder to train") {
  std::vector<std::string> lines;
  for (int i = 1; i <= 10; ++i) lines.push_back("u\ti" + std::to_string(i));
  for (int i = 1; i <= 20; ++i) lines.push_back("v\ti" + std::to_string(i));
  const auto log = ingest(write_lines("split.tsv", lines), 3.0);
  const auto bundle = split(log, {}, 2024);

  CHECK(bundle.train.row(0).size() == 7);
  CHECK(bundle.validation.row(0).size() == 1);
  CHECK(bundle.test.row(0).size() == 2);
  CHECK(bundle.train.row(1).size() == 14);
  CHECK(bundle.validation.row(1).size() == 2);
  CHECK(bundle.test.row(1).size() == 4);
}

TEST_CASE("splitting is deterministic and partitions the log") {
  SyntheticConfig cfg;
  cfg.users = 60;
  cfg.items = 50;
  cfg.seed = 777;
  const auto log = synthetic_log(cfg);

  const auto a = split(log, {}, 2024);
  const auto b = split(log, {}, 2024);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  CHECK(a.user_vocab == b.user_vocab);
  CHECK(a.item_vocab == b.item_vocab);

  const auto c = split(log, {}, 2025);
  CHECK(a.train != c.train);

  // Pairwise disjoint, union preserves the filtered log.
  std::set<std::pair<Index, Index>> train_set, valid_set, test_set;
  for (const Cell& cell : a.train.cells()) train_set.insert({cell.user, cell.item});
  for (const Cell& cell : a.validation.cells()) valid_set.insert({cell.user, cell.item});
  for (const Cell& cell : a.test.cells()) test_set.insert({cell.user, cell.item});
  CHECK(a.train.nnz() + a.validation.nnz() + a.test.nnz() ==
        log.records.size());
  for (const auto& p : valid_set) CHECK_FALSE(train_set.count(p));
  for (const auto& p : test_set) {
    CHECK_FALSE(train_set.count(p));
    CHECK_FALSE(valid_set.count(p));
  }

  // Every user keeps at least one train interaction.
  for (Index u = 0; u < a.train.num_users(); ++u) {
    CHECK_FALSE(a.train.row(u).empty());
  }
}

TEST_CASE("bad split ratios are rejected") {
  RawInteractionLog log;
  log.records.push_back({"a", "b", std::nullopt, std::nullopt});
  CHECK_THROWS_AS(split(log, {0.5, 0.2, 0.2}, 1), ValidationError);
}

TEST_CASE("zero-fraction noise is a no-op") {
  SyntheticConfig cfg;
  cfg.users = 40;
  cfg.items = 30;
  cfg.seed = 888;
  const auto bundle = split(synthetic_log(cfg), {}, 2024);
  NoiseSpec spec;
  spec.mode = NoiseSpec::Mode::Update;
  spec.fraction = 0.0;
  const auto noise = generate_noise(bundle, spec);
  CHECK(noise.noisy_train == bundle.train);
  CHECK(noise.inserted->cells.nnz() == 0);
  CHECK(noise.removed->cells.nnz() == 0);
}

TEST_CASE("insert counts round half up per user") {
  std::vector<std::string> lines;
  for (int i = 1; i <= 27; ++i) lines.push_back("u\ti" + std::to_string(i));
  // A second user widens the item vocabulary so user u has insert
  // candidates; their own 7-train-row quota rounds to zero.
  for (int i = 28; i <= 37; ++i) lines.push_back("w\ti" + std::to_string(i));
  // 27 interactions for u: 2 valid, 5 test, 20 train.
  const auto bundle = split(ingest(write_lines("quota.tsv", lines), 3.0), {},
                            2024);
  REQUIRE(bundle.train.row(0).size() == 20);

  NoiseSpec spec;
  spec.mode = NoiseSpec::Mode::Insert;
  spec.fraction = 0.05;
  spec.seed = 1;
  const auto noise = generate_noise(bundle, spec);
  // round(0.05 * 20) = 1
  CHECK(noise.inserted->cells.nnz() == 1);
}

TEST_CASE("noise flips stay consistent with the splits") {
  SyntheticConfig cfg;
  cfg.users = 50;
  cfg.items = 40;
  const auto bundle = split(synthetic_log(cfg), {}, 2024);

  for (int trial = 0; trial < 50; ++trial) {
    NoiseSpec spec;
    spec.mode = NoiseSpec::Mode::Update;
    spec.fraction = 0.25;
    spec.seed = static_cast<std::uint64_t>(trial);
    const auto noise = generate_noise(bundle, spec);

    for (const Cell& c : noise.inserted->cells.cells()) {
      CHECK_FALSE(bundle.train.contains(c.user, c.item));
      CHECK_FALSE(bundle.validation.contains(c.user, c.item));
      CHECK_FALSE(bundle.test.contains(c.user, c.item));
    }
    for (const Cell& c : noise.removed->cells.cells()) {
      CHECK(bundle.train.contains(c.user, c.item));
    }
    // No user is wiped out.
    for (Index u = 0; u < noise.noisy_train.num_users(); ++u) {
      if (!bundle.train.row(u).empty()) {
        CHECK_FALSE(noise.noisy_train.row(u).empty());
      }
    }

    // Undoing the noise reproduces the clean train split exactly.
    InteractionMatrix restored = noise.noisy_train;
    restored = apply_flip(restored, noise.inserted->reversed());
    restored = apply_flip(restored, noise.removed->reversed());
    CHECK(restored == bundle.train);
  }
}

TEST_CASE("noise generation is deterministic per seed") {
  SyntheticConfig cfg;
  cfg.users = 30;
  cfg.items = 25;
  const auto bundle = split(synthetic_log(cfg), {}, 2024);
  NoiseSpec spec;
  spec.mode = NoiseSpec::Mode::Delete;
  spec.fraction = 0.1;
  spec.seed = 2024;
  const auto a = generate_noise(bundle, spec);
  const auto b = generate_noise(bundle, spec);
  CHECK(a.noisy_train == b.noisy_train);
  CHECK(a.removed->cells == b.removed->cells);
}

TEST_CASE("out-of-range fractions are rejected") {
  SyntheticConfig cfg;
  cfg.users = 10;
  cfg.items = 10;
  cfg.min_user_degree = 5;
  const auto bundle = split(synthetic_log(cfg), {}, 2024);
  NoiseSpec spec;
  spec.fraction = 0.6;
  CHECK_THROWS_AS(generate_noise(bundle, spec), ValidationError);
}

TEST_CASE("bundles round trip through a directory") {
  SyntheticConfig cfg;
  cfg.users = 25;
  cfg.items = 20;
  const auto bundle = split(synthetic_log(cfg), {}, 2024);
  const fs::path dir = fs::temp_directory_path() / "imc_bundle_test";
  save_bundle(dir, bundle, {{"source", "synthetic"}});

  const auto back = load_bundle(dir);
  CHECK(back.train == bundle.train);
  CHECK(back.validation == bundle.validation);
  CHECK(back.test == bundle.test);
  CHECK(back.user_vocab == bundle.user_vocab);
  CHECK(back.item_vocab == bundle.item_vocab);
  CHECK(back.seed == 2024);

  const auto manifest = read_metadata(dir / "manifest.txt");
  CHECK(*metadata_get(manifest, "source") == "synthetic");
  CHECK(*metadata_get(manifest, "train_nnz") ==
        std::to_string(bundle.train.nnz()));
}
