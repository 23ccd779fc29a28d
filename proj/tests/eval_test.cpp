#include <gtest/gtest.h>

#include <sstream>

#include "latparse/error.hpp"
#include "latparse/eval.hpp"
#include "metric_fixtures.hpp"
#include "test_util.hpp"

namespace latparse {
namespace {

TEST(AlignedF1, HandComputedFixtures) {
  for (const auto& f : testing::metric_fixtures()) {
    const PRF r = aligned_multiset_f1(f.gold, f.predicted);
    EXPECT_EQ(r.matched, f.matched) << f.name;
    EXPECT_DOUBLE_EQ(r.precision, f.precision) << f.name;
    EXPECT_DOUBLE_EQ(r.recall, f.recall) << f.name;
    EXPECT_DOUBLE_EQ(r.f1, f.f1) << f.name;
  }
}

TEST(AlignedF1, TokenCountMismatchThrows) {
  EXPECT_THROW(aligned_multiset_f1(TokenItems{{"a"}}, TokenItems{{"a"}, {"b"}}), DataError);
}

TokenItems random_items(Rng& rng, std::size_t tokens) {
  static const std::vector<std::string> alphabet{"a", "b", "c"};
  TokenItems items(tokens);
  for (auto& t : items) {
    const std::size_t k = rng.index(4);
    for (std::size_t i = 0; i < k; ++i) t.push_back(alphabet[rng.index(alphabet.size())]);
  }
  return items;
}

TEST(AlignedF1, SymmetryAndBounds) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const TokenItems g = random_items(rng, n), p = random_items(rng, n);
    const PRF a = aligned_multiset_f1(g, p), b = aligned_multiset_f1(p, g);
    ASSERT_EQ(a.matched, b.matched);
    ASSERT_EQ(a.precision, b.recall);
    ASSERT_EQ(a.recall, b.precision);
    ASSERT_EQ(a.f1, b.f1);
    ASSERT_GE(a.f1, 0.0);
    ASSERT_LE(a.f1, 1.0);
    ASSERT_LE(a.matched, std::min(a.gold, a.predicted));
  }
}

TEST(AlignedF1, AddingAMissingGoldItemNeverHurtsRecall) {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const TokenItems g = random_items(rng, n), p = random_items(rng, n);
    const PRF before = aligned_multiset_f1(g, p);
    const std::size_t t = rng.index(n);
    if (g[t].empty()) continue;
    TokenItems p2 = p;
    p2[t].push_back(g[t][rng.index(g[t].size())]);
    const PRF after = aligned_multiset_f1(g, p2);
    ASSERT_GE(after.matched, before.matched);
    ASSERT_GE(after.recall, before.recall);
  }
}

TEST(AlignedF1, IdentityIsPerfect) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const TokenItems g = random_items(rng, 1 + rng.index(4));
    const PRF r = aligned_multiset_f1(g, g);
    std::size_t items = 0;
    for (const auto& t : g) items += t.size();
    ASSERT_EQ(r.matched, items);
    ASSERT_EQ(r.f1, items ? 1.0 : 0.0);
  }
}

// ---------------------------------------------------------------------------

TEST(EvalItems, DepItemsUseFormsAndRoot) {
  const GoldSentence g = testing::small_gold();
  const TokenItems dep = eval_items(g, EvalTask::Dep);
  ASSERT_EQ(dep.size(), 3u);
  EXPECT_EQ(dep[0], (std::vector<std::string>{"bkrti\troot\tROOT"}));
  EXPECT_EQ(dep[1], (std::vector<std::string>{"b\tcase\tbit", "h\tdet\tbit", "bit\tobl\tbkrti"}));
  const TokenItems strict = eval_items(g, EvalTask::Dep, DepStrictness::FormDistance);
  EXPECT_EQ(strict[2], (std::vector<std::string>{"h\tdet\tlbn\t0", "lbn\tamod\tbit\t-1"}));
  EXPECT_EQ(eval_items(g, EvalTask::Pos)[1][0], "b\tADP");
  EXPECT_EQ(eval_items(g, EvalTask::Seg)[2], (std::vector<std::string>{"h", "lbn"}));
}

TEST(Evaluate, WrongSegmentationCostsAllThreeTasks) {
  const GoldSentence gold = testing::small_gold();
  GoldSentence pred = gold;
  // Predict bbit as b+bit: drop h and re-point the heads.
  auto& toks = pred.tokens;
  toks[1].segments.erase(toks[1].segments.begin() + 1);
  toks[1].segments[0].head = 3;  // b -> bit
  toks[2].segments[0].head = 5;  // h -> lbn
  toks[2].segments[1].head = 3;  // lbn -> bit
  const EvalReport r = evaluate(std::span(&gold, 1), std::span(&pred, 1));
  EXPECT_EQ(r.seg.matched, 5u);
  EXPECT_EQ(r.seg.gold, 6u);
  EXPECT_EQ(r.seg.predicted, 5u);
  EXPECT_DOUBLE_EQ(r.seg.recall, 5.0 / 6.0);
  EXPECT_EQ(r.dep.matched, 5u);
}

TEST(Evaluate, MisalignedInputsThrow) {
  const GoldSentence gold = testing::small_gold();
  GoldSentence other = gold;
  other.tokens[2].form = "xxx";
  EXPECT_THROW(evaluate(std::span(&gold, 1), std::span(&other, 1)), DataError);
  EXPECT_THROW(evaluate(std::span(&gold, 1), std::span<const GoldSentence>{}), DataError);
}

TEST(ErrorBreakdown, ClassifiesHeadAndLabelErrors) {
  const GoldSentence gold = testing::small_gold();
  GoldSentence pred = gold;
  pred.tokens[1].segments[0].head = 1;       // case: head only
  pred.tokens[2].segments[1].deprel = "nmod";  // amod: label only
  pred.tokens[1].segments[2].head = 6;
  pred.tokens[1].segments[2].deprel = "nmod";  // obl: head and label
  GoldSentence missegmented = gold;
  missegmented.tokens[2].segments.pop_back();
  missegmented.tokens[2].segments[0].form = "hlbn";
  const std::vector<GoldSentence> golds{gold, gold};
  const std::vector<GoldSentence> preds{pred, missegmented};
  const ErrorBreakdown b = error_breakdown(golds, preds);
  EXPECT_EQ(b.compared_sentences, 1u);
  EXPECT_EQ(b.skipped_sentences, 1u);
  EXPECT_EQ(b.total.arcs, 6u);
  EXPECT_EQ(b.total.head_only, 1u);
  EXPECT_EQ(b.total.label_only, 1u);
  EXPECT_EQ(b.total.head_and_label, 1u);
  ASSERT_EQ(b.rows.size(), 5u);
  EXPECT_EQ(b.rows[0].label, "amod");
  EXPECT_EQ(b.rows[0].label_only, 1u);
  std::ostringstream out;
  write_breakdown(out, b);
  EXPECT_NE(out.str().find("obl"), std::string::npos);
}

TEST(Summarize, MeanOfRatesAndSumOfCounts) {
  std::vector<EvalReport> runs(3);
  const double f[] = {0.5, 0.75, 1.0};
  for (int k = 0; k < 3; ++k) {
    runs[k].dep = PRF::from_counts(static_cast<std::size_t>(f[k] * 4), 4, 4);
  }
  const RunReport r = summarize(runs);
  EXPECT_DOUBLE_EQ(r.mean.dep.f1, 0.75);
  EXPECT_EQ(r.mean.dep.matched, 9u);
  EXPECT_THROW(summarize({}), DataError);
  std::ostringstream out;
  write_report(out, r);
  EXPECT_NE(out.str().find("runs=3"), std::string::npos);
  EXPECT_NE(out.str().find("mean.dep.f1=0.750000"), std::string::npos);
  EXPECT_NE(out.str().find("run3.dep.f1=1.000000"), std::string::npos);
}

TEST(Summarize, FiveRunHandMean) {
  // The five-run protocol: F1 values 0.9, 0.8, 0.85, 0.95, 0.7 average 0.84.
  std::vector<EvalReport> runs(5);
  const std::size_t matched[] = {18, 16, 17, 19, 14};
  for (int k = 0; k < 5; ++k) runs[k].dep = PRF::from_counts(matched[k], 20, 20);
  const RunReport r = summarize(runs);
  EXPECT_EQ(r.runs.size(), 5u);
  EXPECT_NEAR(r.mean.dep.f1, 0.84, 1e-15);
}

}  // namespace
}  // namespace latparse
