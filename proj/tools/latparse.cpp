// latparse: train, parse and evaluate joint segmentation + dependency models.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 usage, 3 missing asset,
// 4 malformed file, 5 data invariant, 6 numeric failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "latparse/conllu.hpp"
#include "latparse/error.hpp"
#include "latparse/eval.hpp"
#include "latparse/lattice_io.hpp"
#include "latparse/logging.hpp"
#include "latparse/morph_analyzer.hpp"
#include "latparse/pipeline.hpp"
#include "latparse/synth.hpp"

namespace lp = latparse;

namespace {

int exit_code(lp::ErrorCategory c) {
  switch (c) {
    case lp::ErrorCategory::Usage: return 2;
    case lp::ErrorCategory::Missing: return 3;
    case lp::ErrorCategory::Format: return 4;
    case lp::ErrorCategory::Data: return 5;
    case lp::ErrorCategory::Numeric: return 6;
  }
  return 1;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.front() == '-') throw lp::UsageError("invalid seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw lp::UsageError("--seeds needs at least one seed");
  return seeds;
}

struct DecoderFlags {
  std::string scoring = "max";
  std::string scope = "chosen";
  bool multi_root = false;

  void add(CLI::App* app) {
    app->add_option("--analysis-scoring", scoring, "Fallback analysis score: max or mean")
        ->check(CLI::IsMember({"max", "mean"}));
    app->add_option("--mst-scope", scope, "Arborescence over chosen nodes or all nodes")
        ->check(CLI::IsMember({"chosen", "all"}));
    app->add_flag("--multi-root", multi_root, "Allow several ROOT children");
  }

  lp::DecoderOptions options() const {
    lp::DecoderOptions o;
    o.scoring = scoring == "mean" ? lp::AnalysisScoring::MeanSegment : lp::AnalysisScoring::MaxSegment;
    o.mst.scope = scope == "all" ? lp::MstScope::AllNodes : lp::MstScope::ChosenOnly;
    o.mst.single_root = !multi_root;
    return o;
  }
};

void add_mode_flags(CLI::App* app, bool& infused, bool& uninfused) {
  auto* a = app->add_flag("--infused", infused, "Add the gold analyses to the lexicon (default)");
  auto* b = app->add_flag("--uninfused", uninfused, "Use the lexicon as given");
  a->excludes(b);
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw lp::MissingAssetError("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  lp::init_logging();
  CLI::App app{"Joint morphological segmentation and dependency parsing over lattices"};
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level, "debug, info, warn, error or off (overrides LATPARSE_LOG_LEVEL)");

  // train
  lp::RunConfig train_cfg;
  std::string train_seeds = "1", provider = "static";
  bool train_infused = false, train_uninfused = false;
  DecoderFlags train_decoder;
  std::optional<double> stop_seg, stop_dep;
  auto* train = app.add_subcommand("train", "Train one model per seed");
  train->add_option("--treebank", train_cfg.treebank, "Training CoNLL-U")->required();
  train->add_option("--dev", train_cfg.dev, "Dev CoNLL-U for model selection");
  train->add_option("--lexicon", train_cfg.lexicon, "Morphological lexicon");
  train->add_option("--config", train_cfg.config, "key = value hyperparameter file");
  train->add_option("--model-dir", train_cfg.model_dir, "Output directory for checkpoints")->required();
  train->add_option("--provider", provider, "static, precomputed or toyctx")
      ->check(CLI::IsMember({"static", "precomputed", "toyctx"}));
  train->add_option("--vectors", train_cfg.provider.vectors, "Precomputed embedding records");
  train->add_option("--buckets", train_cfg.provider.static_buckets, "Hashed rows for unseen forms (static)");
  train->add_option("--window", train_cfg.provider.toy_window, "Context window (toyctx)");
  train->add_option("--seeds", train_seeds, "Comma-separated seeds");
  train->add_option("--epochs", train_cfg.train.epochs, "Maximum epochs")->check(CLI::PositiveNumber);
  train->add_option("--eval-every", train_cfg.train.eval_every, "Dev evaluation interval in epochs")
      ->check(CLI::PositiveNumber);
  train->add_option("--stop-seg-f1", stop_seg, "Stop once dev SEG F1 reaches this value");
  train->add_option("--stop-dep-f1", stop_dep, "Stop once dev DEP F1 reaches this value");
  add_mode_flags(train, train_infused, train_uninfused);
  train_decoder.add(train);

  // parse
  lp::RunConfig parse_cfg;
  bool parse_infused = false, parse_uninfused = false, first_analysis = false;
  DecoderFlags parse_decoder;
  auto* parse = app.add_subcommand("parse", "Parse a treebank or raw text with a checkpoint");
  parse->add_option("--checkpoint", parse_cfg.checkpoint, "Trained checkpoint")->required();
  parse->add_option("--input", parse_cfg.treebank, "CoNLL-U (or raw text with --raw)")->required();
  parse->add_option("--lexicon", parse_cfg.lexicon, "Morphological lexicon");
  parse->add_option("--output,-o", parse_cfg.output, "Output CoNLL-U")->required();
  parse->add_option("--vectors", parse_cfg.provider.vectors, "Precomputed records for the input");
  parse->add_flag("--raw", parse_cfg.raw_input, "Input is one tokenized sentence per line");
  parse->add_flag("--first-analysis", first_analysis, "Commit to each token's first analysis before parsing");
  add_mode_flags(parse, parse_infused, parse_uninfused);
  parse_decoder.add(parse);

  // eval
  std::string gold_path, breakdown_path;
  std::vector<std::string> pred_paths;
  bool strict = false;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold; several runs are averaged");
  eval->add_option("--gold", gold_path, "Gold CoNLL-U")->required();
  eval->add_option("--pred", pred_paths, "Prediction CoNLL-U, one per seed run")->required();
  eval->add_flag("--strict", strict, "DEP items also carry the signed head-token offset");
  eval->add_option("--breakdown", breakdown_path, "Write the head/label error table of the first run here");

  // lexicon infuse
  auto* lexicon = app.add_subcommand("lexicon", "Lexicon utilities");
  lexicon->require_subcommand(1);
  std::string lex_in, lex_out;
  std::vector<std::string> lex_treebanks;
  auto* infuse_cmd = lexicon->add_subcommand("infuse", "Add gold analyses from treebanks to a lexicon");
  infuse_cmd->add_option("--lexicon", lex_in, "Input lexicon (empty when omitted)");
  infuse_cmd->add_option("--treebank", lex_treebanks, "CoNLL-U treebank(s)")->required();
  infuse_cmd->add_option("--output,-o", lex_out, "Output lexicon (stdout when omitted)");

  // lattice dump
  auto* lattice = app.add_subcommand("lattice", "Lattice utilities");
  lattice->require_subcommand(1);
  std::string dump_in, dump_lex, dump_out;
  bool dump_raw = false, dump_infused = false, dump_uninfused = false;
  auto* dump = lattice->add_subcommand("dump", "Write the analyzer's lattices as TSV");
  dump->add_option("--input", dump_in, "CoNLL-U (or raw text with --raw)")->required();
  dump->add_option("--lexicon", dump_lex, "Morphological lexicon");
  dump->add_option("--output,-o", dump_out, "Output TSV (stdout when omitted)");
  dump->add_flag("--raw", dump_raw, "Input is one tokenized sentence per line");
  add_mode_flags(dump, dump_infused, dump_uninfused);

  // synth
  std::size_t synth_n = 100, synth_stems = 12;
  double synth_ambiguity = 0.5, synth_drop = 0.0;
  std::uint64_t synth_seed = 1, synth_vocab_seed = 1;
  std::string synth_treebank, synth_lexicon;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic ambiguous treebank and lexicon");
  synth->add_option("--sentences", synth_n, "Number of sentences")->check(CLI::PositiveNumber);
  synth->add_option("--ambiguity", synth_ambiguity, "Fusion probability of content words")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", synth_seed, "Sentence sampling seed");
  synth->add_option("--vocab-seed", synth_vocab_seed, "Vocabulary and distractor seed; share it across train/dev/test sets");
  synth->add_option("--stems", synth_stems, "Noun stems in the vocabulary")->check(CLI::PositiveNumber);
  synth->add_option("--drop-gold", synth_drop, "Remove this fraction of gold analyses from the lexicon")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--treebank", synth_treebank, "Output CoNLL-U")->required();
  synth->add_option("--lexicon", synth_lexicon, "Output lexicon")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!log_level.empty()) lp::set_log_level(lp::parse_log_level(log_level));

    if (*train) {
      train_cfg.seeds = parse_seeds(train_seeds);
      train_cfg.provider.kind = lp::parse_provider_kind(provider);
      train_cfg.ma_mode = train_uninfused ? lp::MAMode::Uninfused : lp::MAMode::Infused;
      train_cfg.train.stop_seg_f1 = stop_seg;
      train_cfg.train.stop_dep_f1 = stop_dep;
      train_cfg.train.decoder = train_decoder.options();
      const auto summary = lp::run_train(train_cfg);
      for (const auto& path : summary.checkpoints) std::cout << "checkpoint " << path.string() << '\n';
      if (summary.dev) lp::write_report(std::cout, *summary.dev);
    } else if (*parse) {
      parse_cfg.ma_mode = parse_uninfused ? lp::MAMode::Uninfused : lp::MAMode::Infused;
      if (parse_cfg.raw_input && !parse_infused) parse_cfg.ma_mode = lp::MAMode::Uninfused;
      parse_cfg.strategy = first_analysis ? lp::ParseStrategy::FirstAnalysis : lp::ParseStrategy::Joint;
      parse_cfg.train.decoder = parse_decoder.options();
      lp::run_parse(parse_cfg);
    } else if (*eval) {
      std::vector<std::filesystem::path> preds(pred_paths.begin(), pred_paths.end());
      const auto strictness = strict ? lp::DepStrictness::FormDistance : lp::DepStrictness::Form;
      const lp::RunReport report = lp::run_eval(gold_path, preds, strictness);
      lp::write_report(std::cout, report);
      if (!breakdown_path.empty()) {
        const auto gold = lp::read_treebank(gold_path);
        const auto pred = lp::read_treebank(preds.front());
        std::ofstream out;
        lp::write_breakdown(open_output(breakdown_path, out), lp::error_breakdown(gold, pred));
      }
    } else if (*infuse_cmd) {
      lp::Lexicon lex = lex_in.empty() ? lp::Lexicon{} : lp::read_lexicon(std::filesystem::path(lex_in));
      for (const auto& tb : lex_treebanks) lex = lp::infuse(lex, lp::read_treebank(std::filesystem::path(tb)));
      std::ofstream out;
      lp::write_lexicon(open_output(lex_out, out), lex);
    } else if (*dump) {
      std::vector<lp::GoldSentence> input;
      if (dump_raw) {
        if (dump_infused) throw lp::UsageError("infused lattices need gold segmentation; raw input is uninfused");
        std::ifstream in(dump_in);
        if (!in) throw lp::MissingAssetError("cannot open input " + dump_in);
        input = lp::read_raw_text(in);
      } else {
        input = lp::read_treebank(std::filesystem::path(dump_in));
      }
      lp::Lexicon lex = dump_lex.empty() ? lp::Lexicon{} : lp::read_lexicon(std::filesystem::path(dump_lex));
      if (!dump_raw && !dump_uninfused) lex = lp::infuse(lex, input);
      std::vector<lp::SentenceLattice> lattices;
      for (const auto& s : input) lattices.push_back(lp::build_sentence_lattice(lex, s));
      std::ofstream out;
      lp::write_lattice_tsv(open_output(dump_out, out), lattices);
    } else if (*synth) {
      lp::SynthGrammar grammar = lp::make_grammar(synth_ambiguity, synth_vocab_seed, synth_stems);
      grammar.seed = synth_seed;
      lp::SynthCorpus corpus = lp::generate(grammar, synth_n);
      if (synth_drop > 0.0) {
        corpus.lexicon = lp::drop_gold_analyses(corpus.lexicon, corpus.treebank, synth_drop, synth_seed);
      }
      lp::write_treebank(std::filesystem::path(synth_treebank), corpus.treebank);
      lp::write_lexicon(std::filesystem::path(synth_lexicon), corpus.lexicon);
      const auto& st = corpus.stats;
      std::printf("sentences=%zu tokens=%zu segments=%zu ambiguous_tokens=%zu realized_ambiguity=%.4f "
                  "analyses_per_token=%.4f\n",
                  st.sentences, st.tokens, st.segments, st.ambiguous_tokens, st.realized_ambiguity(),
                  st.analyses_per_token());
    }
  } catch (const lp::Error& e) {
    std::fprintf(stderr, "latparse: %s\n", e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "latparse: %s\n", e.what());
    return 1;
  }
  return 0;
}
