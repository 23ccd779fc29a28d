#pragma once

// Model assembly, training loop, batch parsing and the run-level entry
// points behind the command-line tool.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latparse/decoder.hpp"
#include "latparse/embedding.hpp"
#include "latparse/eval.hpp"
#include "latparse/morph_analyzer.hpp"
#include "latparse/optimizer.hpp"
#include "latparse/scorer.hpp"

namespace latparse {

enum class ProviderKind { Static, Precomputed, ToyContext };
ProviderKind parse_provider_kind(std::string_view name);  // throws UsageError
std::string_view provider_name(ProviderKind kind);

struct ProviderSpec {
  ProviderKind kind = ProviderKind::Static;
  std::size_t static_buckets = 64;
  std::size_t toy_window = 1;
  std::filesystem::path vectors;  // precomputed only
};

/// A scorer together with the embedding provider that feeds it.
class Model {
 public:
  /// Builds a fresh model; the embedding dimension comes from `config`
  /// (a precomputed file must agree with it).
  Model(const ScorerConfig& config, OutputInventory inventory, ProviderSpec provider, std::uint64_t seed);

  Scorer& scorer() { return *scorer_; }
  const Scorer& scorer() const { return *scorer_; }
  const EmbeddingProvider& provider() const { return *provider_; }
  const ProviderSpec& provider_spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  /// Non-null for the trainable static provider.
  StaticProvider* static_table() { return static_; }
  const StaticProvider* static_table() const { return static_; }
  void replace_static_table(StaticProvider table);

  Matrix embed(const LinearizedLattice& lin) const;
  ScoreSet score(const LinearizedLattice& lin) const;

 private:
  std::unique_ptr<Scorer> scorer_;
  std::unique_ptr<EmbeddingProvider> provider_;
  StaticProvider* static_ = nullptr;
  ProviderSpec spec_;
  std::uint64_t seed_;
};

enum class ParseStrategy {
  Joint,          // analyses chosen by the decoder
  FirstAnalysis,  // commit to each token's first lexicon analysis, then parse
};

JointParse parse_sentence(const Model& model, const SentenceLattice& lattice, const DecoderOptions& options = {},
                          ParseStrategy strategy = ParseStrategy::Joint);

/// Parses the raw tokens of each sentence against `lexicon` and returns the
/// results as CoNLL-U sentences carrying the input's sent_id.
std::vector<GoldSentence> parse_treebank(const Model& model, std::span<const GoldSentence> sentences,
                                         const Lexicon& lexicon, const DecoderOptions& options = {},
                                         ParseStrategy strategy = ParseStrategy::Joint);

struct TrainOptions {
  std::size_t epochs = 30;
  std::size_t eval_every = 1;
  DecoderOptions decoder;
  /// Stop as soon as a dev evaluation reaches both thresholds.
  std::optional<double> stop_seg_f1;
  std::optional<double> stop_dep_f1;
  /// Restore the parameters of the best dev DEP F1 evaluation at the end.
  bool keep_best = true;
};

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown loss;     // mean over batches
  std::optional<EvalReport> dev;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochReport> epochs;
  std::optional<EvalReport> best_dev;
  std::size_t best_epoch = 0;
  std::size_t skipped_sentences = 0;  // gold path missing from the lattice
};

/// Builds lattices, gold targets and (for fixed providers) embeddings.
/// Sentences whose gold segmentation is not a lattice path are skipped and
/// counted. For a static provider the vocabulary is extended with the gold
/// segment forms and token forms of `treebank`; other forms share the
/// hashed bucket rows.
std::vector<TrainingExample> prepare_examples(Model& model, std::span<const GoldSentence> treebank,
                                              const Lexicon& lexicon, std::size_t* skipped = nullptr);

/// Mini-batch training with per-epoch shuffling seeded from the model seed.
/// `dev` sentences are parsed against `dev_lexicon` every eval_every epochs.
TrainResult train_model(Model& model, std::span<const GoldSentence> train, const Lexicon& train_lexicon,
                        std::span<const GoldSentence> dev, const Lexicon& dev_lexicon, const TrainOptions& options,
                        const std::function<void(const EpochReport&)>& on_epoch = {});

// ---------------------------------------------------------------------------

struct RunConfig {
  std::filesystem::path treebank;    // train: training set; parse: input; eval: gold
  std::filesystem::path dev;         // optional dev set for model selection
  std::filesystem::path lexicon;     // optional; empty lexicon when absent
  std::filesystem::path config;      // optional ScorerConfig overrides
  std::filesystem::path model_dir;   // train output
  std::filesystem::path checkpoint;  // parse input
  std::filesystem::path output;      // parse output
  bool raw_input = false;            // parse: treebank is raw text, one sentence per line
  MAMode ma_mode = MAMode::Infused;
  ParseStrategy strategy = ParseStrategy::Joint;  // parse only
  std::vector<std::uint64_t> seeds{1};
  ScorerConfig scorer;
  ProviderSpec provider;
  TrainOptions train;
};

/// Checkpoint written for `seed` under `model_dir`.
std::filesystem::path checkpoint_path(const std::filesystem::path& model_dir, std::uint64_t seed);

struct TrainRunSummary {
  std::vector<std::filesystem::path> checkpoints;
  std::vector<TrainResult> results;
  std::optional<RunReport> dev;
};

/// Throws MissingAssetError for the first referenced file that does not
/// exist, before any other work.
void check_train_assets(const RunConfig& config);
void check_parse_assets(const RunConfig& config);

/// One independent model per seed, each checkpointed; writes
/// `summary.txt` with per-seed dev scores and their mean when a dev set is
/// given.
TrainRunSummary run_train(const RunConfig& config);

/// Loads the checkpoint, builds lattices per the MA mode (infused mode adds
/// the input's gold analyses, so it needs a CoNLL-U input) and writes the
/// parses as CoNLL-U.
void run_parse(const RunConfig& config);

/// Scores each prediction file against `gold`.
RunReport run_eval(const std::filesystem::path& gold, std::span<const std::filesystem::path> predictions,
                   DepStrictness strictness = DepStrictness::Form);

}  // namespace latparse
