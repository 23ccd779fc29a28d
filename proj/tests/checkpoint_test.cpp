#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "latparse/checkpoint.hpp"
#include "latparse/config.hpp"
#include "latparse/error.hpp"
#include "latparse/synth.hpp"
#include "test_util.hpp"

namespace latparse {
namespace {

ScorerConfig small_config() { return read_config(std::filesystem::path(LATPARSE_TEST_DATA) / "small.cfg"); }

std::size_t config_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_config(in, "c.cfg");
  } catch (const FormatError& e) {
    return e.line();
  }
  return 0;
}

TEST(Config, FixtureOverridesDefaults) {
  const ScorerConfig c = small_config();
  EXPECT_EQ(c.embedding_dim, 16u);
  EXPECT_EQ(c.label_mlp_size, 8u);
  EXPECT_EQ(c.batch_size, 4u);
  EXPECT_EQ(c.shared_rnn_depth, ScorerConfig{}.shared_rnn_depth);
  EXPECT_DOUBLE_EQ(c.adam_beta2, 0.9);
}

TEST(Config, WriteReadRoundTrip) {
  ScorerConfig c = small_config();
  c.learning_rate = 0.1 / 3.0;
  c.aux_label_loss = false;
  c.tasks[2] = false;
  std::ostringstream out;
  write_config(out, c);
  std::istringstream in(out.str());
  EXPECT_EQ(read_config(in), c);
  EXPECT_EQ(config_keys().size(), 22u);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error_line("# c\nembedding_dim = 8\nbogus = 1\n"), 3u);
  EXPECT_EQ(config_error_line("embedding_dim = eight\n"), 1u);
  EXPECT_EQ(config_error_line("\nlearning_rate = inf\n"), 2u);
  EXPECT_EQ(config_error_line("task_pos = maybe\n"), 1u);
  EXPECT_EQ(config_error_line("embedding_dim 8\n"), 1u);
  // Range checks run after parsing, so they name the file but no line.
  std::istringstream zero("embedding_dim = 0\n");
  EXPECT_THROW(read_config(zero), FormatError);
  EXPECT_THROW(read_config(std::filesystem::path("/nonexistent.cfg")), MissingAssetError);
  ScorerConfig c;
  EXPECT_THROW(set_config_value(c, "nope", "1"), UsageError);
}

// ---------------------------------------------------------------------------

struct Fixture {
  SynthCorpus corpus = generate(make_grammar(0.5, 3), 20);
  OutputInventory inventory = OutputInventory::from_treebank(corpus.treebank);

  Model trained(ProviderSpec spec) {
    Model m(small_config(), inventory, spec, 7);
    TrainOptions opts;
    opts.epochs = 2;
    train_model(m, corpus.treebank, corpus.lexicon, {}, corpus.lexicon, opts);
    return m;
  }
};

void expect_same_scores(const Model& a, const Model& b, const LinearizedLattice& lin) {
  const ScoreSet x = a.score(lin), y = b.score(lin);
  EXPECT_EQ(x.head_scores, y.head_scores);
  ASSERT_EQ(x.label_count(), y.label_count());
  for (std::size_t l = 0; l < x.label_count(); ++l) EXPECT_EQ(x.label_scores[l], y.label_scores[l]);
  for (std::size_t k = 0; k < kTaskCount; ++k) EXPECT_EQ(x.mtl_logits[k], y.mtl_logits[k]);
}

TEST(Checkpoint, RoundTripReproducesScoresExactly) {
  Fixture f;
  for (const ProviderKind kind : {ProviderKind::Static, ProviderKind::ToyContext}) {
    ProviderSpec spec;
    spec.kind = kind;
    spec.static_buckets = 5;
    const Model model = f.trained(spec);
    std::stringstream buf;
    save_checkpoint(buf, model);
    const Model back = load_checkpoint(buf);
    EXPECT_EQ(back.seed(), 7u);
    EXPECT_EQ(back.provider_spec().kind, kind);
    EXPECT_EQ(back.scorer().config(), model.scorer().config());
    EXPECT_EQ(back.scorer().inventory(), f.inventory);
    for (const auto& s : f.corpus.treebank) {
      expect_same_scores(model, back, linearize(build_sentence_lattice(f.corpus.lexicon, s)));
    }
    // Unseen forms use the restored hash buckets.
    expect_same_scores(model, back, linearize(testing::worked_example()));
    std::ostringstream again;
    save_checkpoint(again, back);
    EXPECT_EQ(again.str(), buf.str());
  }
}

std::string saved_checkpoint() {
  Fixture f;
  ProviderSpec spec;
  spec.static_buckets = 3;
  std::ostringstream out;
  save_checkpoint(out, Model(small_config(), f.inventory, spec, 1));
  return out.str();
}

void expect_format_error(const std::string& text, const std::string& fragment) {
  std::istringstream in(text);
  try {
    load_checkpoint(in, "m.ckpt");
    FAIL() << "expected FormatError containing " << fragment;
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, CorruptInputsAreFormatErrors) {
  const std::string good = saved_checkpoint();
  {
    std::string bad = good;
    bad.replace(bad.find(" 1\n"), 3, " 9\n");
    expect_format_error(bad, "unsupported checkpoint version");
  }
  {
    // Drop the last tensor.
    const std::size_t last = good.rfind("tensor ");
    expect_format_error(good.substr(0, last) + "end\n", "lacks tensor");
  }
  {
    std::string bad = good;
    const std::size_t at = bad.rfind("tensor ");
    bad.insert(at, "tensor mystery 1 1\n0x1p+0\n");
    expect_format_error(bad, "unknown tensor 'mystery'");
  }
  {
    expect_format_error(good.substr(0, good.size() / 2), "m.ckpt");
  }
  {
    std::string bad = good;
    const std::size_t at = bad.find('\n', bad.rfind("tensor ")) + 1;
    bad.replace(at, 2, "zz");
    expect_format_error(bad, "m.ckpt");
  }
  expect_format_error("", "m.ckpt");
  EXPECT_THROW(load_checkpoint(std::filesystem::path("/nonexistent.ckpt")), MissingAssetError);
}

}  // namespace
}  // namespace latparse
