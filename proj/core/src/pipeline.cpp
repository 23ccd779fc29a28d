#include "latparse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

#include "latparse/checkpoint.hpp"
#include "latparse/config.hpp"
#include "latparse/conllu.hpp"
#include "latparse/error.hpp"
#include "latparse/gold_targets.hpp"
#include "latparse/logging.hpp"
#include "latparse/random.hpp"

namespace latparse {

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "static") return ProviderKind::Static;
  if (name == "precomputed") return ProviderKind::Precomputed;
  if (name == "toyctx") return ProviderKind::ToyContext;
  throw UsageError("unknown embedding provider '" + std::string(name) + "' (static, precomputed, toyctx)");
}

std::string_view provider_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Static: return "static";
    case ProviderKind::Precomputed: return "precomputed";
    case ProviderKind::ToyContext: return "toyctx";
  }
  return "?";
}

Model::Model(const ScorerConfig& config, OutputInventory inventory, ProviderSpec provider, std::uint64_t seed)
    : spec_(std::move(provider)), seed_(seed) {
  const std::size_t dim = config.embedding_dim;
  switch (spec_.kind) {
    case ProviderKind::Static: {
      auto table = std::make_unique<StaticProvider>(dim, spec_.static_buckets, mix_seed(seed, 0x656d62ull));
      static_ = table.get();
      provider_ = std::move(table);
      break;
    }
    case ProviderKind::Precomputed: {
      auto loaded = std::make_unique<PrecomputedProvider>(PrecomputedProvider::load(spec_.vectors));
      if (loaded->dim() != dim) {
        throw UsageError("vectors file has dimension " + std::to_string(loaded->dim()) + " but embedding_dim is " +
                         std::to_string(dim));
      }
      provider_ = std::move(loaded);
      break;
    }
    case ProviderKind::ToyContext:
      provider_ = std::make_unique<ToyContextProvider>(dim, mix_seed(seed, 0x746f79ull), spec_.toy_window);
      break;
  }
  scorer_ = std::make_unique<Scorer>(config, std::move(inventory), seed);
}

void Model::replace_static_table(StaticProvider table) {
  if (static_ == nullptr) throw DataError("model does not use a static embedding table");
  if (table.dim() != scorer_->config().embedding_dim) throw DataError("static table dimension mismatch");
  auto fresh = std::make_unique<StaticProvider>(std::move(table));
  static_ = fresh.get();
  provider_ = std::move(fresh);
}

Matrix Model::embed(const LinearizedLattice& lin) const { return embed_lattice(*provider_, lin).values; }

ScoreSet Model::score(const LinearizedLattice& lin) const { return scorer_->forward(embed(lin), Mode::Eval); }

// ---------------------------------------------------------------------------

JointParse parse_sentence(const Model& model, const SentenceLattice& lattice, const DecoderOptions& options,
                          ParseStrategy strategy) {
  const LinearizedLattice lin = linearize(lattice);
  const ScoreSet scores = model.score(lin);
  const OutputInventory& inventory = model.scorer().inventory();
  if (strategy == ParseStrategy::FirstAnalysis) {
    const std::vector<std::size_t> first(lin.token_count(), 1);
    return decode_with_analyses(lin, scores, inventory, first, options);
  }
  return decode(lin, scores, inventory, options);
}

std::vector<GoldSentence> parse_treebank(const Model& model, std::span<const GoldSentence> sentences,
                                         const Lexicon& lexicon, const DecoderOptions& options,
                                         ParseStrategy strategy) {
  std::vector<GoldSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    GoldSentence parsed = to_gold_sentence(parse_sentence(model, build_sentence_lattice(lexicon, s), options, strategy));
    if (!s.comments.empty()) parsed.comments = s.comments;
    out.push_back(std::move(parsed));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<TrainingExample> prepare_examples(Model& model, std::span<const GoldSentence> treebank,
                                              const Lexicon& lexicon, std::size_t* skipped) {
  const OutputInventory& inventory = model.scorer().inventory();
  const bool aux_labels = model.scorer().config().aux_label_loss;
  if (StaticProvider* table = model.static_table()) {
    std::vector<std::string> forms;
    for (const auto& s : treebank) {
      for (const auto& t : s.tokens) {
        forms.push_back(t.form);
        for (const auto& seg : t.segments) forms.push_back(seg.form);
      }
    }
    table->extend_vocabulary(forms);
  }

  std::vector<TrainingExample> examples;
  std::size_t missing = 0;
  for (const auto& s : treebank) {
    const SentenceLattice lattice = build_sentence_lattice(lexicon, s);
    const auto path = find_gold_path(lattice, s);
    if (std::find(path.begin(), path.end(), std::size_t{0}) != path.end()) {
      ++missing;
      log_debug("skipping sentence '" + s.sent_id + "': gold segmentation not in lattice");
      continue;
    }
    TrainingExample ex{linearize(lattice), Matrix(), {}};
    ex.gold = build_gold_targets(ex.lattice, s, inventory, aux_labels);
    if (model.static_table() == nullptr) ex.embeddings = model.embed(ex.lattice);
    examples.push_back(std::move(ex));
  }
  if (missing > 0) log_warn(std::to_string(missing) + " training sentences skipped: gold path missing from lattice");
  if (skipped != nullptr) *skipped = missing;
  return examples;
}

namespace {

std::vector<Parameter*> trainable(Model& model) {
  std::vector<Parameter*> params = model.scorer().parameters();
  if (StaticProvider* table = model.static_table()) params.push_back(&table->table());
  return params;
}

}  // namespace

TrainResult train_model(Model& model, std::span<const GoldSentence> train, const Lexicon& train_lexicon,
                        std::span<const GoldSentence> dev, const Lexicon& dev_lexicon, const TrainOptions& options,
                        const std::function<void(const EpochReport&)>& on_epoch) {
  TrainResult result;
  const std::vector<TrainingExample> examples = prepare_examples(model, train, train_lexicon, &result.skipped_sentences);
  if (examples.empty()) throw DataError("no usable training sentences");

  const ScorerConfig& config = model.scorer().config();
  Adam optimizer(AdamConfig::from(config));
  const std::size_t batch_size = config.batch_size;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<Matrix> best_values;
  double best_dep = -1.0;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    Rng shuffle_rng(mix_seed(model.seed(), 0x65706f6368ull + epoch));
    shuffle_rng.shuffle(order);

    EpochReport report;
    report.epoch = epoch;
    std::size_t batches = 0;
    std::vector<const TrainingExample*> batch;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      batch.clear();
      for (std::size_t k = begin; k < std::min(order.size(), begin + batch_size); ++k) batch.push_back(&examples[order[k]]);
      const StepResult r =
          train_step(model.scorer(), batch, optimizer, mix_seed(model.seed(), 0x73746570ull + step), model.static_table());
      report.loss += r.loss;
      ++batches;
      ++step;
    }
    const double scale = 1.0 / static_cast<double>(batches);
    report.loss.head *= scale;
    report.loss.label *= scale;
    for (double& t : report.loss.tasks) t *= scale;
    report.loss.total *= scale;

    const bool evaluate_now = !dev.empty() && (epoch % std::max<std::size_t>(1, options.eval_every) == 0 ||
                                               epoch == options.epochs);
    bool stop = false;
    if (evaluate_now) {
      const auto parsed = parse_treebank(model, dev, dev_lexicon, options.decoder);
      report.dev = evaluate(dev, parsed);
      if (report.dev->dep.f1 > best_dep) {
        best_dep = report.dev->dep.f1;
        result.best_dev = report.dev;
        result.best_epoch = epoch;
        if (options.keep_best) {
          best_values.clear();
          for (const Parameter* p : trainable(model)) best_values.push_back(p->value);
        }
      }
      stop = (options.stop_seg_f1 || options.stop_dep_f1) &&
             (!options.stop_seg_f1 || report.dev->seg.f1 >= *options.stop_seg_f1) &&
             (!options.stop_dep_f1 || report.dev->dep.f1 >= *options.stop_dep_f1);
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log_info("epoch " + std::to_string(epoch) + " loss " + std::to_string(report.loss.total) +
             (report.dev ? " dev dep f1 " + std::to_string(report.dev->dep.f1) : std::string()));
    if (on_epoch) on_epoch(report);
    result.epochs.push_back(std::move(report));
    if (stop) break;
  }

  if (options.keep_best && !best_values.empty()) {
    const auto params = trainable(model);
    for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best_values[k];
  }
  return result;
}

// ---------------------------------------------------------------------------

std::filesystem::path checkpoint_path(const std::filesystem::path& model_dir, std::uint64_t seed) {
  return model_dir / ("seed-" + std::to_string(seed) + ".ckpt");
}

namespace {

void require_file(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("missing required ") + what + " path");
  if (!std::filesystem::is_regular_file(path)) {
    throw MissingAssetError(std::string(what) + " not found: " + path.string());
  }
}

void optional_file(const std::filesystem::path& path, const char* what) {
  if (!path.empty()) require_file(path, what);
}

Lexicon load_lexicon(const std::filesystem::path& path) { return path.empty() ? Lexicon{} : read_lexicon(path); }

}  // namespace

void check_train_assets(const RunConfig& config) {
  require_file(config.treebank, "treebank");
  optional_file(config.dev, "dev treebank");
  optional_file(config.lexicon, "lexicon");
  optional_file(config.config, "config file");
  if (config.provider.kind == ProviderKind::Precomputed) require_file(config.provider.vectors, "vectors file");
  if (config.model_dir.empty()) throw UsageError("missing required model directory");
  if (config.seeds.empty()) throw UsageError("at least one seed is required");
}

void check_parse_assets(const RunConfig& config) {
  require_file(config.treebank, "input");
  require_file(config.checkpoint, "checkpoint");
  optional_file(config.lexicon, "lexicon");
  if (!config.provider.vectors.empty()) require_file(config.provider.vectors, "vectors file");
  if (config.output.empty()) throw UsageError("missing required output path");
  if (config.raw_input && config.ma_mode == MAMode::Infused) {
    throw UsageError("infused parsing needs gold segmentation; use --uninfused with raw text input");
  }
}

TrainRunSummary run_train(const RunConfig& config) {
  check_train_assets(config);
  const ScorerConfig scorer_config = config.config.empty() ? config.scorer : read_config(config.config, config.scorer);
  const std::vector<GoldSentence> train = read_treebank(config.treebank);
  const std::vector<GoldSentence> dev = config.dev.empty() ? std::vector<GoldSentence>{} : read_treebank(config.dev);
  const Lexicon base = load_lexicon(config.lexicon);
  const bool infused = config.ma_mode == MAMode::Infused;
  const Lexicon train_lexicon = infused ? infuse(base, train) : base;
  const Lexicon dev_lexicon = infused ? infuse(base, dev) : base;
  const OutputInventory inventory = OutputInventory::from_treebank(train, scorer_config.tasks);

  std::filesystem::create_directories(config.model_dir);
  TrainRunSummary summary;
  std::vector<EvalReport> dev_reports;
  for (std::uint64_t seed : config.seeds) {
    log_info("training seed " + std::to_string(seed));
    Model model(scorer_config, inventory, config.provider, seed);
    TrainResult result = train_model(model, train, train_lexicon, dev, dev_lexicon, config.train);
    const auto path = checkpoint_path(config.model_dir, seed);
    save_checkpoint(path, model);
    summary.checkpoints.push_back(path);
    if (result.best_dev) dev_reports.push_back(*result.best_dev);
    summary.results.push_back(std::move(result));
  }
  if (!dev_reports.empty()) summary.dev = summarize(dev_reports);

  std::ofstream out(config.model_dir / "summary.txt");
  if (!out) throw MissingAssetError("cannot write " + (config.model_dir / "summary.txt").string());
  for (std::size_t k = 0; k < config.seeds.size(); ++k) {
    const TrainResult& r = summary.results[k];
    out << "seed=" << config.seeds[k] << " epochs=" << r.epochs.size() << " best_epoch=" << r.best_epoch
        << " skipped_sentences=" << r.skipped_sentences << " checkpoint=" << summary.checkpoints[k].string() << '\n';
  }
  if (summary.dev) {
    out << '\n';
    write_report(out, *summary.dev);
  }
  return summary;
}

void run_parse(const RunConfig& config) {
  check_parse_assets(config);
  std::optional<std::filesystem::path> vectors;
  if (!config.provider.vectors.empty()) vectors = config.provider.vectors;
  const Model model = load_checkpoint(config.checkpoint, vectors);

  std::vector<GoldSentence> input;
  if (config.raw_input) {
    std::ifstream in(config.treebank);
    input = read_raw_text(in);
  } else {
    input = read_treebank(config.treebank);
  }
  Lexicon lexicon = load_lexicon(config.lexicon);
  if (config.ma_mode == MAMode::Infused) lexicon = infuse(lexicon, input);

  const auto parsed = parse_treebank(model, input, lexicon, config.train.decoder, config.strategy);
  if (config.output.has_parent_path()) std::filesystem::create_directories(config.output.parent_path());
  write_treebank(config.output, parsed);
}

RunReport run_eval(const std::filesystem::path& gold_path, std::span<const std::filesystem::path> predictions,
                   DepStrictness strictness) {
  require_file(gold_path, "gold treebank");
  if (predictions.empty()) throw UsageError("at least one prediction file is required");
  for (const auto& p : predictions) require_file(p, "prediction file");
  const auto gold = read_treebank(gold_path);
  std::vector<std::vector<GoldSentence>> runs;
  for (const auto& p : predictions) runs.push_back(read_treebank(p));
  return evaluate_run(gold, runs, strictness);
}

}  // namespace latparse
