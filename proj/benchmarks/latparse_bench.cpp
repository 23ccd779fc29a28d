#include <benchmark/benchmark.h>

#include <vector>

#include "latparse/decoder.hpp"
#include "latparse/lattice.hpp"
#include "latparse/morph_analyzer.hpp"
#include "latparse/optimizer.hpp"
#include "latparse/pipeline.hpp"
#include "latparse/random.hpp"
#include "latparse/synth.hpp"

namespace latparse {
namespace {

// Run with: ./build/benchmarks/latparse_bench --benchmark_min_time=0.2

// Synthetic sentences with roughly `tokens` tokens and the grammar lexicon.
struct Workload {
  SynthCorpus corpus;
  std::vector<LinearizedLattice> lattices;
  OutputInventory inventory;

  explicit Workload(std::size_t tokens) {
    SynthGrammar g = make_grammar(0.7, 11);
    g.min_tokens = tokens;
    g.max_tokens = tokens + 2;
    corpus = generate(g, 16);
    inventory = OutputInventory::from_treebank(corpus.treebank);
    for (const auto& s : corpus.treebank) lattices.push_back(linearize(build_sentence_lattice(corpus.lexicon, s)));
  }
};

ScorerConfig bench_config(std::size_t width) {
  ScorerConfig c;
  c.embedding_dim = c.shared_rnn_hidden = c.arc_mlp_size = c.mtl_linear_size = width;
  c.label_mlp_size = width / 4;
  c.batch_size = 8;
  return c;
}

ScoreSet random_scores(Rng& rng, std::size_t n, const OutputInventory& inv) {
  const auto nn = static_cast<Eigen::Index>(n);
  const auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-5.0, 5.0);
    return m;
  };
  ScoreSet s;
  s.head_scores = fill(nn, nn);
  for (std::size_t l = 0; l < inv.labels.size(); ++l) s.label_scores.push_back(fill(nn, nn));
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    s.mtl_logits[k] = fill(nn, static_cast<Eigen::Index>(inv.tag_sets[k].size()));
  }
  return s;
}

void BM_Linearize(benchmark::State& state) {
  const Workload w(static_cast<std::size_t>(state.range(0)));
  std::vector<SentenceLattice> lattices;
  for (const auto& s : w.corpus.treebank) lattices.push_back(build_sentence_lattice(w.corpus.lexicon, s));
  std::size_t k = 0;
  for (auto _ : state) {
    LinearizedLattice lin = linearize(lattices[k++ % lattices.size()]);
    benchmark::DoNotOptimize(lin);
  }
}
BENCHMARK(BM_Linearize)->Arg(4)->Arg(10);

void BM_Decode(benchmark::State& state) {
  const Workload w(static_cast<std::size_t>(state.range(0)));
  Rng rng(5);
  std::vector<ScoreSet> scores;
  for (const auto& lin : w.lattices) scores.push_back(random_scores(rng, lin.size(), w.inventory));
  std::size_t k = 0, nodes = 0;
  for (auto _ : state) {
    const std::size_t i = k++ % w.lattices.size();
    JointParse p = decode(w.lattices[i], scores[i], w.inventory);
    benchmark::DoNotOptimize(p);
    nodes += w.lattices[i].size();
  }
  state.counters["nodes/s"] = benchmark::Counter(static_cast<double>(nodes), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Decode)->Arg(4)->Arg(10);

void BM_MstAllNodes(benchmark::State& state) {
  const Workload w(static_cast<std::size_t>(state.range(0)));
  Rng rng(6);
  std::vector<ScoreSet> scores;
  for (const auto& lin : w.lattices) scores.push_back(random_scores(rng, lin.size(), w.inventory));
  DecoderOptions opts;
  opts.mst.scope = MstScope::AllNodes;
  std::size_t k = 0;
  for (auto _ : state) {
    const std::size_t i = k++ % w.lattices.size();
    JointParse p = decode(w.lattices[i], scores[i], w.inventory, opts);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_MstAllNodes)->Arg(10);

void BM_ScorerForward(benchmark::State& state) {
  const Workload w(8);
  const Model model(bench_config(static_cast<std::size_t>(state.range(0))), w.inventory, {}, 1);
  std::vector<Matrix> inputs;
  for (const auto& lin : w.lattices) inputs.push_back(model.embed(lin));
  std::size_t k = 0;
  for (auto _ : state) {
    ScoreSet s = model.scorer().forward(inputs[k++ % inputs.size()], Mode::Eval);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ScorerForward)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_TrainStep(benchmark::State& state) {
  const Workload w(8);
  Model model(bench_config(static_cast<std::size_t>(state.range(0))), w.inventory, {}, 1);
  const std::vector<TrainingExample> examples = prepare_examples(model, w.corpus.treebank, w.corpus.lexicon);
  std::vector<const TrainingExample*> batch;
  for (std::size_t i = 0; i < 8 && i < examples.size(); ++i) batch.push_back(&examples[i]);
  Adam optimizer(AdamConfig::from(model.scorer().config()));
  std::uint64_t step = 0;
  for (auto _ : state) {
    StepResult r = train_step(model.scorer(), batch, optimizer, step++, model.static_table());
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch.size()));
}
BENCHMARK(BM_TrainStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace latparse
BENCHMARK_MAIN();
