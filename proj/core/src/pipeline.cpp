#include "imcorrect/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "imcorrect/errors.hpp"
#include "imcorrect/rng.hpp"

namespace imc {

namespace {

std::vector<std::string> split_fields(const std::string& line,
                                      const std::string& delim) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + delim.size();
  }
  return fields;
}

std::string detect_delimiter(const std::string& line) {
  if (line.find("::") != std::string::npos) return "::";
  if (line.find('\t') != std::string::npos) return "\t";
  if (line.find(',') != std::string::npos) return ",";
  return "";
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace

RawInteractionLog ingest(const std::filesystem::path& path,
                         double rating_threshold) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");

  RawInteractionLog log;
  std::unordered_set<std::string> seen;
  std::string delim;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (delim.empty()) {
      delim = detect_delimiter(line);
      if (delim.empty()) {
        throw ParseError("cannot detect delimiter (tab, comma or ::) in " +
                             path.string(),
                         lineno);
      }
    }

    const auto fields = split_fields(line, delim);
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected at least user and item fields in " +
                           path.string(),
                       lineno);
    }

    RawRecord rec;
    rec.user = fields[0];
    rec.item = fields[1];
    if (fields.size() >= 3 && !fields[2].empty()) {
      try {
        std::size_t used = 0;
        rec.rating = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("bad rating field '" + fields[2] + "' in " +
                             path.string(),
                         lineno);
      }
    }
    if (fields.size() >= 4 && !fields[3].empty()) {
      try {
        std::size_t used = 0;
        rec.timestamp = std::stoll(fields[3], &used);
        if (used != fields[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("bad timestamp field '" + fields[3] + "' in " +
                             path.string(),
                         lineno);
      }
    }

    if (rec.rating && *rec.rating < rating_threshold) continue;

    std::string key = rec.user;
    key.push_back('\x1f');
    key += rec.item;
    if (!seen.insert(std::move(key)).second) continue;

    log.records.push_back(std::move(rec));
  }
  return log;
}

RawInteractionLog kcore_filter(const RawInteractionLog& log, int k) {
  if (k < 1) throw ValidationError("k-core level must be >= 1");

  std::vector<char> alive(log.records.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, int> user_deg, item_deg;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      if (!alive[i]) continue;
      ++user_deg[log.records[i].user];
      ++item_deg[log.records[i].item];
    }
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      if (!alive[i]) continue;
      if (user_deg[log.records[i].user] < k ||
          item_deg[log.records[i].item] < k) {
        alive[i] = 0;
        changed = true;
      }
    }
  }

  RawInteractionLog out;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (alive[i]) out.records.push_back(log.records[i]);
  }
  if (out.records.empty()) {
    throw EmptyResultError("k-core filtering at k=" + std::to_string(k) +
                           " removed every interaction");
  }
  return out;
}

DatasetBundle split(const RawInteractionLog& log, const SplitRatios& ratios,
                    std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }

  DatasetBundle bundle;
  bundle.seed = seed;

  // Vocabulary indices by first appearance after filtering.
  std::unordered_map<std::string, Index> user_ix, item_ix;
  std::vector<std::vector<Index>> per_user;
  for (const RawRecord& rec : log.records) {
    auto [uit, unew] = user_ix.try_emplace(
        rec.user, static_cast<Index>(bundle.user_vocab.size()));
    if (unew) {
      bundle.user_vocab.push_back(rec.user);
      per_user.emplace_back();
    }
    auto [iit, inew] = item_ix.try_emplace(
        rec.item, static_cast<Index>(bundle.item_vocab.size()));
    if (inew) bundle.item_vocab.push_back(rec.item);
    per_user[uit->second].push_back(iit->second);
  }

  const Index m = static_cast<Index>(bundle.user_vocab.size());
  const Index n = static_cast<Index>(bundle.item_vocab.size());

  Rng rng(seed);
  std::vector<Cell> train_cells, valid_cells, test_cells;
  for (Index u = 0; u < m; ++u) {
    std::vector<Index>& items = per_user[u];
    Rng user_rng = rng.substream(u);
    user_rng.shuffle(items);

    const std::size_t t = items.size();
    const std::size_t n_valid =
        static_cast<std::size_t>(std::floor(static_cast<double>(t) *
                                            ratios.validation));
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(t) * ratios.test));
    // Remainder rounds toward train.
    std::size_t pos = 0;
    for (; pos < n_valid; ++pos) valid_cells.push_back({u, items[pos]});
    for (; pos < n_valid + n_test; ++pos) test_cells.push_back({u, items[pos]});
    for (; pos < t; ++pos) train_cells.push_back({u, items[pos]});
  }

  bundle.train = InteractionMatrix::from_cells(m, n, std::move(train_cells));
  bundle.validation =
      InteractionMatrix::from_cells(m, n, std::move(valid_cells));
  bundle.test = InteractionMatrix::from_cells(m, n, std::move(test_cells));
  return bundle;
}

const char* to_string(NoiseSpec::Mode mode) {
  switch (mode) {
    case NoiseSpec::Mode::Insert:
      return "insert";
    case NoiseSpec::Mode::Delete:
      return "delete";
    case NoiseSpec::Mode::Update:
      return "update";
  }
  return "?";
}

NoiseResult generate_noise(const DatasetBundle& bundle,
                           const NoiseSpec& spec) {
  if (spec.fraction < 0.0 || spec.fraction > 0.5) {
    throw ValidationError("noise fraction must lie in [0, 0.5]");
  }

  const InteractionMatrix& train = bundle.train;
  const Index m = train.num_users();
  const Index n = train.num_items();
  const bool want_insert = spec.mode != NoiseSpec::Mode::Delete;
  const bool want_delete = spec.mode != NoiseSpec::Mode::Insert;

  Rng rng(spec.seed);
  std::vector<Cell> inserted_cells, removed_cells;

  for (Index u = 0; u < m; ++u) {
    const auto hist = train.row(u);
    const std::size_t t = hist.size();
    const std::size_t quota =
        round_half_up(spec.fraction * static_cast<double>(t));
    if (quota == 0) continue;

    if (want_delete) {
      Rng user_rng = rng.substream(static_cast<std::uint64_t>(u) * 2);
      const std::size_t n_del = std::min(quota, t > 0 ? t - 1 : 0);
      std::vector<Index> pool(hist.begin(), hist.end());
      for (Index i : user_rng.sample(pool, n_del)) {
        removed_cells.push_back({u, i});
      }
    }
    if (want_insert) {
      Rng user_rng = rng.substream(static_cast<std::uint64_t>(u) * 2 + 1);
      // Candidates exclude the user's train, validation and test items so
      // noise never leaks held-out positives.
      std::vector<char> blocked(n, 0);
      for (Index i : hist) blocked[i] = 1;
      for (Index i : bundle.validation.row(u)) blocked[i] = 1;
      for (Index i : bundle.test.row(u)) blocked[i] = 1;
      std::vector<Index> pool;
      for (Index i = 0; i < n; ++i) {
        if (!blocked[i]) pool.push_back(i);
      }
      if (pool.empty()) {
        throw InsufficientCandidatesError(
            "user " + std::to_string(u) +
            " has no non-interacted items left to insert");
      }
      for (Index i : user_rng.sample(pool, quota)) {
        inserted_cells.push_back({u, i});
      }
    }
  }

  NoiseResult result;
  InteractionMatrix noisy = train;
  if (want_delete) {
    FlipSet removed{Direction::Negative,
                    InteractionMatrix::from_cells(m, n, removed_cells)};
    noisy = apply_flip(noisy, removed);
    result.removed = std::move(removed);
  }
  if (want_insert) {
    FlipSet inserted{Direction::Positive,
                     InteractionMatrix::from_cells(m, n, inserted_cells)};
    noisy = apply_flip(noisy, inserted);
    result.inserted = std::move(inserted);
  }
  result.noisy_train = std::move(noisy);
  return result;
}

namespace {

void write_vocab(const std::filesystem::path& path,
                 const std::vector<std::string>& vocab) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab[i] << '\t' << i << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> read_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::string> vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected token<TAB>index in " + path.string(), lineno);
    }
    vocab.push_back(line.substr(0, tab));
  }
  return vocab;
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle,
                 const Metadata& extra) {
  std::filesystem::create_directories(dir);
  write_interactions(dir / "train.mtx", bundle.train);
  write_interactions(dir / "valid.mtx", bundle.validation);
  write_interactions(dir / "test.mtx", bundle.test);
  write_vocab(dir / "user_vocab.tsv", bundle.user_vocab);
  write_vocab(dir / "item_vocab.tsv", bundle.item_vocab);

  Metadata manifest;
  manifest.emplace_back("seed", std::to_string(bundle.seed));
  manifest.emplace_back("num_users", std::to_string(bundle.train.num_users()));
  manifest.emplace_back("num_items", std::to_string(bundle.train.num_items()));
  manifest.emplace_back("train_nnz", std::to_string(bundle.train.nnz()));
  manifest.emplace_back("valid_nnz", std::to_string(bundle.validation.nnz()));
  manifest.emplace_back("test_nnz", std::to_string(bundle.test.nnz()));
  for (const auto& kv : extra) manifest.push_back(kv);
  write_metadata(dir / "manifest.txt", manifest);
}

DatasetBundle load_bundle(const std::filesystem::path& dir) {
  DatasetBundle bundle;
  bundle.train = read_interactions(dir / "train.mtx");
  bundle.validation = read_interactions(dir / "valid.mtx");
  bundle.test = read_interactions(dir / "test.mtx");
  bundle.user_vocab = read_vocab(dir / "user_vocab.tsv");
  bundle.item_vocab = read_vocab(dir / "item_vocab.tsv");
  const Metadata manifest = read_metadata(dir / "manifest.txt");
  if (const auto seed = metadata_get(manifest, "seed")) {
    bundle.seed = std::stoull(*seed);
  }
  return bundle;
}

}  // namespace imc
