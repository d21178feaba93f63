// Command-line front end: dataset ingestion, backbone training, matrix
// correction, experiment sweeps, case studies and report plotting.
//
// Exit codes: 0 success, 2 usage or validation problem, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "imcorrect/correction.hpp"
#include "imcorrect/errors.hpp"
#include "imcorrect/eval.hpp"
#include "imcorrect/io.hpp"
#include "imcorrect/parallel.hpp"
#include "imcorrect/pipeline.hpp"
#include "imcorrect/svg.hpp"
#include "imcorrect/synthetic.hpp"
#include "imcorrect/version.hpp"

namespace fs = std::filesystem;
using namespace imc;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

// Shared backbone flags; each subcommand that fits a model registers these.
struct BackboneFlags {
  std::string backbone = "slim";
  double l1 = 1.0;
  double l2 = 1.0;
  int sweeps = 100;
  double tol = 1e-4;
  unsigned rank = 64;
  int power_iters = 10;
  int oversample = 8;
  int dim = 64;
  double reg = 0.001;
  int iters = 20;

  void add_to(CLI::App* cmd, bool with_name = true) {
    if (with_name) {
      cmd->add_option("--backbone", backbone, "Backbone: slim, gfcf or mf")
          ->check(CLI::IsMember({"slim", "gfcf", "mf"}));
    }
    cmd->add_option("--l1", l1, "SLIM L1 coefficient");
    cmd->add_option("--l2", l2, "SLIM L2 coefficient");
    cmd->add_option("--sweeps", sweeps, "SLIM max coordinate sweeps");
    cmd->add_option("--tol", tol, "SLIM convergence tolerance");
    cmd->add_option("--rank", rank, "Truncated SVD rank");
    cmd->add_option("--power-iters", power_iters, "SVD power iterations");
    cmd->add_option("--oversample", oversample, "SVD oversampling columns");
    cmd->add_option("--dim", dim, "MF embedding dimension");
    cmd->add_option("--reg", reg, "MF regularization coefficient");
    cmd->add_option("--iters", iters, "MF alternations");
  }

  BackboneConfig config(std::uint64_t seed) const {
    BackboneConfig cfg;
    if (backbone == "slim") {
      cfg.kind = BackboneConfig::Kind::Slim;
      cfg.slim = {l1, l2, sweeps, tol};
    } else if (backbone == "gfcf") {
      cfg.kind = BackboneConfig::Kind::Gfcf;
      cfg.gfcf = {rank, seed, power_iters, oversample};
    } else if (backbone == "mf") {
      cfg.kind = BackboneConfig::Kind::Mf;
      cfg.mf = {dim, reg, iters, seed};
    } else {
      throw ValidationError("unknown backbone: " + backbone);
    }
    return cfg;
  }
};

Metadata config_metadata(const BackboneConfig& cfg, std::uint64_t seed) {
  Metadata meta;
  meta.emplace_back("backbone", cfg.name());
  switch (cfg.kind) {
    case BackboneConfig::Kind::Slim:
      meta.emplace_back("l1", std::to_string(cfg.slim.l1));
      meta.emplace_back("l2", std::to_string(cfg.slim.l2));
      meta.emplace_back("max_sweeps", std::to_string(cfg.slim.max_sweeps));
      meta.emplace_back("tol", std::to_string(cfg.slim.tol));
      break;
    case BackboneConfig::Kind::Gfcf:
      meta.emplace_back("rank", std::to_string(cfg.gfcf.rank));
      meta.emplace_back("power_iters", std::to_string(cfg.gfcf.power_iters));
      meta.emplace_back("oversample", std::to_string(cfg.gfcf.oversample));
      break;
    case BackboneConfig::Kind::Mf:
      meta.emplace_back("dim", std::to_string(cfg.mf.dim));
      meta.emplace_back("reg", std::to_string(cfg.mf.reg));
      meta.emplace_back("iters", std::to_string(cfg.mf.iters));
      break;
  }
  meta.emplace_back("seed", std::to_string(seed));
  return meta;
}

BackboneConfig config_from_metadata(const Metadata& meta) {
  const auto get = [&](const std::string& key) -> std::string {
    const auto v = metadata_get(meta, key);
    if (!v) throw ValidationError("model metadata is missing key: " + key);
    return *v;
  };
  const std::string backbone = get("backbone");
  const std::uint64_t seed = std::stoull(get("seed"));
  BackboneConfig cfg;
  if (backbone == "slim") {
    cfg.kind = BackboneConfig::Kind::Slim;
    cfg.slim = {std::stod(get("l1")), std::stod(get("l2")),
                std::stoi(get("max_sweeps")), std::stod(get("tol"))};
  } else if (backbone == "gfcf") {
    cfg.kind = BackboneConfig::Kind::Gfcf;
    cfg.gfcf = {static_cast<Index>(std::stoul(get("rank"))), seed,
                std::stoi(get("power_iters")), std::stoi(get("oversample"))};
  } else if (backbone == "mf") {
    cfg.kind = BackboneConfig::Kind::Mf;
    cfg.mf = {std::stoi(get("dim")), std::stod(get("reg")),
              std::stoi(get("iters")), seed};
  } else {
    throw ValidationError("model metadata names unknown backbone: " + backbone);
  }
  return cfg;
}

Index lookup_token(const std::vector<std::string>& vocab,
                   const std::string& token, const std::string& what) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == token) return static_cast<Index>(i);
  }
  throw ValidationError("unknown " + what + " token: " + token);
}

fs::path require_out(std::string out, const std::string& flag_help) {
  if (out.empty()) {
    if (const auto v = env("IMCORRECT_OUT")) {
      out = *v;
    } else {
      throw ValidationError("no output directory: pass " + flag_help +
                            " or set IMCORRECT_OUT");
    }
  }
  return fs::path(out);
}

// ----- subcommand payloads -------------------------------------------------

struct SynthArgs {
  std::string out;
  SyntheticConfig cfg;
};

int run_synth(const SynthArgs& a) {
  const fs::path out = require_out(a.out, "--out");
  const RawInteractionLog log = synthetic_log(a.cfg);
  const DatasetBundle bundle = split(log, {}, a.cfg.seed);
  Metadata extra;
  extra.emplace_back("source", "synthetic");
  extra.emplace_back("ratio_train", "0.7");
  extra.emplace_back("ratio_validation", "0.1");
  extra.emplace_back("ratio_test", "0.2");
  extra.emplace_back("blocks", std::to_string(a.cfg.blocks));
  extra.emplace_back("tool_version", kToolVersion);
  save_bundle(out, bundle, extra);
  std::cout << "wrote synthetic bundle to " << out.string() << " ("
            << bundle.train.num_users() << " users, "
            << bundle.train.num_items() << " items, " << bundle.train.nnz()
            << " train interactions)\n";
  return 0;
}

struct IngestArgs {
  std::string input;
  std::string out;
  int kcore = 20;
  double threshold = 3.0;
  std::uint64_t seed = 2024;
  std::vector<double> ratios{0.7, 0.1, 0.2};
};

int run_ingest(const IngestArgs& a) {
  if (!fs::exists(a.input)) {
    throw ValidationError("input file does not exist: " + a.input);
  }
  if (a.ratios.size() != 3) {
    throw ValidationError("--ratios needs three values (train,valid,test)");
  }
  const fs::path out = require_out(a.out, "--out");

  const RawInteractionLog raw = ingest(a.input, a.threshold);
  const RawInteractionLog filtered = kcore_filter(raw, a.kcore);
  const DatasetBundle bundle =
      split(filtered, {a.ratios[0], a.ratios[1], a.ratios[2]}, a.seed);

  Metadata extra;
  extra.emplace_back("source", a.input);
  extra.emplace_back("rating_threshold", std::to_string(a.threshold));
  extra.emplace_back("kcore", std::to_string(a.kcore));
  extra.emplace_back("ratio_train", std::to_string(a.ratios[0]));
  extra.emplace_back("ratio_validation", std::to_string(a.ratios[1]));
  extra.emplace_back("ratio_test", std::to_string(a.ratios[2]));
  extra.emplace_back("raw_records", std::to_string(raw.records.size()));
  extra.emplace_back("tool_version", kToolVersion);
  save_bundle(out, bundle, extra);
  std::cout << "wrote bundle to " << out.string() << " ("
            << bundle.train.num_users() << " users, "
            << bundle.train.num_items() << " items, "
            << bundle.train.nnz() + bundle.validation.nnz() +
                   bundle.test.nnz()
            << " interactions after filtering)\n";
  return 0;
}

struct TrainArgs {
  std::string bundle;
  std::string out;
  std::uint64_t seed = 2024;
  BackboneFlags flags;
};

int run_train(const TrainArgs& a) {
  const fs::path out = require_out(a.out, "--out");
  const DatasetBundle bundle = load_bundle(a.bundle);
  const BackboneConfig cfg = a.flags.config(a.seed);

  fs::create_directories(out);
  Metadata meta = config_metadata(cfg, a.seed);
  meta.emplace_back("train_hash", hash_hex(content_hash(bundle.train)));

  MappingMatrix w = MappingMatrix::zero(bundle.train.num_items());
  if (cfg.kind == BackboneConfig::Kind::Slim) {
    const SlimResult fit = fit_slim(bundle.train, cfg.slim);
    w = fit.mapping;
    meta.emplace_back("converged", fit.converged ? "true" : "false");
    if (!fit.converged) {
      std::cerr << "warning: some columns hit max_sweeps before converging\n";
    }
  } else if (cfg.kind == BackboneConfig::Kind::Mf) {
    const EmbeddingPair e = fit_mf_als(bundle.train, cfg.mf);
    w = mapping_from_embeddings(e);
    write_dense_matrix(out / "user_embeddings.imcd", e.user_embeddings);
    write_dense_matrix(out / "item_embeddings.imcd", e.item_embeddings);
    meta.emplace_back("user_embeddings_file", "user_embeddings.imcd");
    meta.emplace_back("item_embeddings_file", "item_embeddings.imcd");
  } else {
    w = fit_gfcf(bundle.train, cfg.gfcf);
  }

  const std::string mapping_name =
      w.storage() == MappingMatrix::Storage::Sparse ? "mapping.mtx"
                                                    : "mapping.imcw";
  write_mapping(out / mapping_name, w);
  meta.emplace_back("mapping_file", mapping_name);
  meta.emplace_back("tool_version", kToolVersion);
  write_metadata(out / "model.meta", meta);

  std::cout << "wrote " << cfg.name() << " model to " << out.string()
            << " (dim " << w.dim() << ", " << w.nnz() << " nonzeros, trace "
            << w.trace() << ")\n";
  return 0;
}

MappingMatrix load_model_mapping(const fs::path& model_dir, Metadata* meta_out) {
  const Metadata meta = read_metadata(model_dir / "model.meta");
  const auto file = metadata_get(meta, "mapping_file");
  if (!file) {
    throw ValidationError("model metadata has no mapping_file entry in " +
                          model_dir.string());
  }
  if (meta_out) *meta_out = meta;
  return read_mapping(model_dir / *file);
}

struct UnlearnArgs {
  std::string bundle;
  std::string interactions;
  std::string model;
  std::string flips;
  std::string mode = "both";
  std::string direction;
  std::string out;
};

int run_unlearn(const UnlearnArgs& a) {
  const fs::path out = require_out(a.out, "--out");

  InteractionMatrix r;
  if (!a.interactions.empty()) {
    r = read_interactions(a.interactions);
  } else if (!a.bundle.empty()) {
    r = read_interactions(fs::path(a.bundle) / "train.mtx");
  } else {
    throw ValidationError("pass --interactions FILE or --bundle DIR");
  }

  Metadata model_meta;
  const MappingMatrix w = load_model_mapping(a.model, &model_meta);
  const BackboneConfig backbone = config_from_metadata(model_meta);

  std::optional<Direction> dir_flag;
  if (a.direction == "negative") dir_flag = Direction::Negative;
  if (a.direction == "positive") dir_flag = Direction::Positive;
  const FlipSet flips = read_flip_set(a.flips, dir_flag);

  CorrectionMode mode;
  if (a.mode == "both") {
    mode = CorrectionMode::Both;
  } else if (a.mode == "interaction-only") {
    mode = CorrectionMode::InteractionOnly;
  } else if (a.mode == "mapping-only") {
    mode = CorrectionMode::MappingOnly;
  } else {
    throw ValidationError("unknown mode: " + a.mode);
  }

  bool rank_capped = false;
  const CorrectionResult result =
      unlearn(r, w, flips, mode, [&](const InteractionMatrix& cells) {
        return fit_bar_backbone(cells, backbone, &rank_capped);
      });

  fs::create_directories(out);
  write_interactions(out / "interactions.mtx", result.corrected_interactions);

  Metadata meta;
  meta.emplace_back("mode", to_string(mode));
  meta.emplace_back("direction", to_string(flips.direction));
  meta.emplace_back("flip_count", std::to_string(flips.cells.nnz()));
  meta.emplace_back("parent_model", fs::path(a.model).string());
  meta.emplace_back(
      "parent_model_hash",
      hash_hex(file_hash(fs::path(a.model) /
                         *metadata_get(model_meta, "mapping_file"))));
  meta.emplace_back("parent_interactions_hash",
                    hash_hex(content_hash(r)));
  if (result.corrected_mapping) {
    const std::string mapping_name =
        result.corrected_mapping->storage() == MappingMatrix::Storage::Sparse
            ? "mapping.mtx"
            : "mapping.imcw";
    write_mapping(out / mapping_name, *result.corrected_mapping);
    meta.emplace_back("mapping_file", mapping_name);
    meta.emplace_back("bar_rank_capped", rank_capped ? "true" : "false");
  }
  meta.emplace_back("tool_version", kToolVersion);
  write_metadata(out / "correction.meta", meta);

  std::cout << "wrote corrected artifacts to " << out.string() << " (mode "
            << to_string(mode) << ", " << flips.cells.nnz() << " flips, "
            << to_string(flips.direction) << ")\n";
  return 0;
}

struct ExperimentArgs {
  std::string bundle;
  std::string noise = "delete";
  std::vector<double> fractions{0.01, 0.05, 0.1, 0.25, 0.5};
  std::vector<std::string> conditions{"original", "retrain", "imcorrect",
                                      "imcorrect-no-w"};
  int k = 20;
  std::uint64_t seed = 2024;
  std::string out;
  BackboneFlags flags;
};

int run_experiment(const ExperimentArgs& a) {
  const fs::path out = require_out(a.out, "--out");
  const DatasetBundle bundle = load_bundle(a.bundle);
  const BackboneConfig backbone = a.flags.config(a.seed);

  NoiseSpec::Mode mode;
  if (a.noise == "insert") {
    mode = NoiseSpec::Mode::Insert;
  } else if (a.noise == "delete") {
    mode = NoiseSpec::Mode::Delete;
  } else if (a.noise == "update") {
    mode = NoiseSpec::Mode::Update;
  } else {
    throw ValidationError("unknown noise mode: " + a.noise);
  }

  for (double f : a.fractions) {
    if (f < 0.01 || f > 0.5) {
      throw ValidationError("fraction " + std::to_string(f) +
                            " outside the supported sweep range [0.01, 0.5]");
    }
  }

  std::vector<EvalCondition> conditions;
  for (const std::string& c : a.conditions) {
    if (c == "original") {
      conditions.push_back(EvalCondition::Original);
    } else if (c == "retrain") {
      conditions.push_back(EvalCondition::Retrain);
    } else if (c == "imcorrect") {
      conditions.push_back(EvalCondition::IMCorrect);
    } else if (c == "imcorrect-no-w") {
      conditions.push_back(EvalCondition::IMCorrectNoW);
    } else {
      throw ValidationError("unknown condition: " + c);
    }
  }

  std::vector<EvalReport> reports;
  for (double fraction : a.fractions) {
    NoiseSpec spec;
    spec.mode = mode;
    spec.fraction = fraction;
    spec.seed = a.seed;
    for (EvalCondition condition : conditions) {
      reports.push_back(run_condition(bundle, spec, condition, backbone, a.k));
      const EvalReport& r = reports.back();
      std::cout << r.condition << " " << r.noise_mode << " " << r.fraction
                << " recall@" << r.k << " = " << r.recall << "\n";
    }
  }

  fs::create_directories(out);
  write_report_tsv(out / "report.tsv", reports);
  {
    std::ofstream table(out / "report.txt");
    table << format_report_table(reports);
  }
  std::vector<SvgSeries> series;
  for (EvalCondition condition : conditions) {
    SvgSeries s;
    s.label = to_string(condition);
    for (const EvalReport& r : reports) {
      if (r.condition == to_string(condition)) {
        s.points.emplace_back(r.fraction, r.recall);
      }
    }
    series.push_back(std::move(s));
  }
  write_line_chart_svg(out / "recall_vs_fraction.svg",
                       "Recall@" + std::to_string(a.k) + " vs " + a.noise +
                           " noise (" + backbone.name() + ")",
                       "noise fraction", "recall", series);

  std::cout << format_report_table(reports);
  std::cout << "wrote " << (out / "report.tsv").string() << ", report.txt, "
            << "recall_vs_fraction.svg\n";
  return 0;
}

struct AttackArgs {
  std::string bundle;
  std::string item;
  int fakes = 1000;
  int k = 20;
  std::uint64_t seed = 2024;
  std::string out;
  BackboneFlags flags;
};

int run_attack(const AttackArgs& a) {
  const DatasetBundle bundle = load_bundle(a.bundle);
  const Index item = lookup_token(bundle.item_vocab, a.item, "item");
  const AttackReport report = attack_case_study(
      bundle, item, a.fakes, a.flags.config(a.seed), a.k, a.seed);

  std::cout << "attack case study: item " << a.item << " (" << a.fakes
            << " fake interactions)\n"
            << "  exposure clean:     " << report.exposure_clean << "\n"
            << "  exposure attacked:  " << report.exposure_attacked << "\n"
            << "  exposure corrected: " << report.exposure_corrected << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    Metadata meta;
    meta.emplace_back("item", a.item);
    meta.emplace_back("fakes", std::to_string(a.fakes));
    meta.emplace_back("k", std::to_string(a.k));
    meta.emplace_back("seed", std::to_string(a.seed));
    meta.emplace_back("exposure_clean", std::to_string(report.exposure_clean));
    meta.emplace_back("exposure_attacked",
                      std::to_string(report.exposure_attacked));
    meta.emplace_back("exposure_corrected",
                      std::to_string(report.exposure_corrected));
    meta.emplace_back("tool_version", kToolVersion);
    write_metadata(fs::path(a.out) / "attack_report.txt", meta);
  }
  return 0;
}

struct PrivacyArgs {
  std::string bundle;
  std::string user;
  int trials = 100;
  unsigned breadth = 10;
  int k = 20;
  std::uint64_t seed = 2024;
  std::string out;
  BackboneFlags flags;
};

int run_privacy(const PrivacyArgs& a) {
  if (a.trials < 1) throw ValidationError("--trials must be >= 1");
  const DatasetBundle bundle = load_bundle(a.bundle);
  const Index user = lookup_token(bundle.user_vocab, a.user, "user");
  const PrivacyReport report =
      privacy_case_study(bundle, user, a.trials, a.breadth,
                         a.flags.config(a.seed), a.k, a.seed);

  std::cout << "privacy case study: user " << a.user << " (" << a.trials
            << " trials, breadth " << a.breadth << ")\n"
            << "  mean similarity before: " << report.mean_similarity_before
            << "\n"
            << "  mean similarity after:  " << report.mean_similarity_after
            << "\n"
            << "  decreased in " << report.decreased_trials << "/" << a.trials
            << " trials\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    Metadata meta;
    meta.emplace_back("user", a.user);
    meta.emplace_back("trials", std::to_string(a.trials));
    meta.emplace_back("breadth", std::to_string(a.breadth));
    meta.emplace_back("k", std::to_string(a.k));
    meta.emplace_back("seed", std::to_string(a.seed));
    meta.emplace_back("mean_similarity_before",
                      std::to_string(report.mean_similarity_before));
    meta.emplace_back("mean_similarity_after",
                      std::to_string(report.mean_similarity_after));
    meta.emplace_back("decreased_trials",
                      std::to_string(report.decreased_trials));
    meta.emplace_back("tool_version", kToolVersion);
    write_metadata(fs::path(a.out) / "privacy_report.txt", meta);
  }
  return 0;
}

struct PlotArgs {
  std::string report;
  std::string out;
  std::string title = "Recall vs noise fraction";
};

int run_plot(const PlotArgs& a) {
  const std::vector<EvalReport> reports = read_report_tsv(a.report);
  if (reports.empty()) throw ValidationError("report file has no rows");

  std::vector<SvgSeries> series;
  for (const EvalReport& r : reports) {
    auto it = std::find_if(series.begin(), series.end(), [&](const SvgSeries& s) {
      return s.label == r.condition;
    });
    if (it == series.end()) {
      series.push_back({r.condition, {}});
      it = series.end() - 1;
    }
    it->points.emplace_back(r.fraction, r.recall);
  }
  write_line_chart_svg(a.out, a.title, "noise fraction", "recall", series);
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mapping-based collaborative filtering with matrix-correction "
               "unlearning"};
  app.set_version_flag("--version", std::string("imcorrect ") + kToolVersion);
  app.require_subcommand(1);

  int threads = 0;
  if (const auto v = env("IMCORRECT_THREADS")) threads = std::stoi(*v);
  app.add_option("--threads", threads,
                 "Worker threads (0 = hardware concurrency)");

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate the synthetic demo bundle");
  synth_cmd->add_option("--out", synth.out, "Output bundle directory");
  synth_cmd->add_option("--users", synth.cfg.users, "Number of users");
  synth_cmd->add_option("--items", synth.cfg.items, "Number of items");
  synth_cmd->add_option("--blocks", synth.cfg.blocks, "Planted item blocks");
  synth_cmd->add_option("--seed", synth.cfg.seed, "Random seed");

  IngestArgs ing;
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Ingest, k-core filter and split an interaction log");
  ingest_cmd->add_option("--input", ing.input, "Interaction log file")
      ->required();
  ingest_cmd->add_option("--out", ing.out, "Output bundle directory");
  ingest_cmd->add_option("--kcore", ing.kcore, "k-core level");
  ingest_cmd->add_option("--threshold", ing.threshold,
                         "Minimum rating kept (when ratings exist)");
  ingest_cmd->add_option("--seed", ing.seed, "Split seed");
  ingest_cmd
      ->add_option("--ratios", ing.ratios,
                   "Train/valid/test ratios (comma separated)")
      ->delimiter(',');

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train", "Fit a backbone on a bundle's train split");
  train_cmd->add_option("--bundle", train.bundle, "Bundle directory")
      ->required();
  train_cmd->add_option("--out", train.out, "Output model directory");
  train_cmd->add_option("--seed", train.seed, "Fit seed");
  train.flags.add_to(train_cmd);

  UnlearnArgs unl;
  auto* unlearn_cmd = app.add_subcommand(
      "unlearn", "Correct a trained model for a set of flipped interactions");
  unlearn_cmd->add_option("--bundle", unl.bundle,
                          "Bundle directory (uses its train.mtx)");
  unlearn_cmd->add_option("--interactions", unl.interactions,
                          "Interaction matrix file (overrides --bundle)");
  unlearn_cmd->add_option("--model", unl.model, "Trained model directory")
      ->required();
  unlearn_cmd->add_option("--flips", unl.flips, "Flip set file")->required();
  unlearn_cmd
      ->add_option("--mode", unl.mode,
                   "Correction mode: both, interaction-only, mapping-only")
      ->check(CLI::IsMember({"both", "interaction-only", "mapping-only"}));
  unlearn_cmd
      ->add_option("--direction", unl.direction,
                   "Flip direction when the file has no %direction header")
      ->check(CLI::IsMember({"negative", "positive"}));
  unlearn_cmd->add_option("--out", unl.out, "Output directory");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand(
      "experiment",
      "Sweep noise fractions across the four evaluation conditions");
  exp_cmd->add_option("--bundle", exp.bundle, "Bundle directory")->required();
  exp_cmd->add_option("--noise", exp.noise, "Noise mode: insert, delete, update")
      ->check(CLI::IsMember({"insert", "delete", "update"}));
  exp_cmd->add_option("--fractions", exp.fractions, "Noise fractions to sweep")
      ->delimiter(',');
  exp_cmd
      ->add_option("--conditions", exp.conditions,
                   "Conditions to run (original, retrain, imcorrect, "
                   "imcorrect-no-w)")
      ->delimiter(',');
  exp_cmd->add_option("--k", exp.k, "Recommendation list length");
  exp_cmd->add_option("--seed", exp.seed, "Noise and fit seed");
  exp_cmd->add_option("--out", exp.out, "Output report directory");
  exp.flags.add_to(exp_cmd);

  auto* case_cmd =
      app.add_subcommand("case-study", "Attack and privacy case studies");
  case_cmd->require_subcommand(1);

  AttackArgs attack;
  auto* attack_cmd = case_cmd->add_subcommand(
      "attack", "Fake-interaction attack and mapping-only cleanup");
  attack_cmd->add_option("--bundle", attack.bundle, "Bundle directory")
      ->required();
  attack_cmd->add_option("--item", attack.item, "Target item token")
      ->required();
  attack_cmd->add_option("--fakes", attack.fakes, "Fake interactions to inject");
  attack_cmd->add_option("--k", attack.k, "Recommendation list length");
  attack_cmd->add_option("--seed", attack.seed, "Seed");
  attack_cmd->add_option("--out", attack.out, "Optional report directory");
  attack.flags.add_to(attack_cmd);

  PrivacyArgs privacy;
  auto* privacy_cmd = case_cmd->add_subcommand(
      "privacy", "Preference-level forgetting trials");
  privacy_cmd->add_option("--bundle", privacy.bundle, "Bundle directory")
      ->required();
  privacy_cmd->add_option("--user", privacy.user, "Target user token")
      ->required();
  privacy_cmd->add_option("--trials", privacy.trials, "Number of trials");
  privacy_cmd->add_option("--breadth", privacy.breadth,
                          "Similar history items forgotten with the target");
  privacy_cmd->add_option("--k", privacy.k, "Recommendation list length");
  privacy_cmd->add_option("--seed", privacy.seed, "Seed");
  privacy_cmd->add_option("--out", privacy.out, "Optional report directory");
  privacy.flags.add_to(privacy_cmd);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand(
      "plot", "Render a report.tsv as a recall-vs-fraction SVG chart");
  plot_cmd->add_option("--report", plot.report, "Report TSV path")->required();
  plot_cmd->add_option("--out", plot.out, "Output SVG path")->required();
  plot_cmd->add_option("--title", plot.title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  set_default_threads(threads);

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (ingest_cmd->parsed()) return run_ingest(ing);
    if (train_cmd->parsed()) return run_train(train);
    if (unlearn_cmd->parsed()) return run_unlearn(unl);
    if (exp_cmd->parsed()) return run_experiment(exp);
    if (case_cmd->parsed()) {
      if (attack_cmd->parsed()) return run_attack(attack);
      if (privacy_cmd->parsed()) return run_privacy(privacy);
    }
    if (plot_cmd->parsed()) return run_plot(plot);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
