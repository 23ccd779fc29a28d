#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "latparse/decoder.hpp"
#include "latparse/error.hpp"
#include "latparse/mst.hpp"
#include "test_util.hpp"

namespace latparse {
namespace {

using testing::analysis;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Worked example node positions:
// 0 ROOT, 1 AUX, 2 bkrti | 3 b, 4 bit | 5 b, 6 h, 7 bit | 8 h, 9 lbn | 10 hlbn

TEST(BaseMask, ForbidsSelfRootAuxAndCrossAnalysisArcs) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  const ConstraintMask m = base_mask(lin);
  for (std::size_t h = 0; h < 11; ++h) {
    EXPECT_FALSE(m.allowed(0, h));
    EXPECT_FALSE(m.allowed(1, h));
  }
  EXPECT_EQ(m.permitted_heads(3), (std::vector<std::size_t>{0, 1, 2, 4, 8, 9, 10}));
  EXPECT_EQ(m.permitted_heads(10), (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(m.permitted_heads(2), (std::vector<std::size_t>{0, 1, 3, 4, 5, 6, 7, 8, 9, 10}));
}

TEST(GreedyHeads, AuxDominantColumnForFusedReading) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  Matrix s = Matrix::Zero(11, 11);
  s(10, 1) = 5.0;  // hlbn prefers AUX
  s(9, 4) = 2.0;
  const auto g = greedy_heads(s, base_mask(lin));
  EXPECT_EQ(g[10], LinearizedLattice::kAux);
  EXPECT_EQ(g[9], 4u);
  EXPECT_EQ(g[0], kNpos);
  EXPECT_EQ(g[1], kNpos);
}

TEST(GreedyHeads, SingleNodePicksRootOrAux) {
  SentenceLattice lat;
  lat.tokens.push_back(make_token_lattice({1, "a"}, {analysis({"a"})}));
  const LinearizedLattice lin = linearize(lat);
  Matrix s = Matrix::Zero(3, 3);
  s(2, 0) = 1.0;
  s(2, 1) = 0.5;
  EXPECT_EQ(greedy_heads(s, base_mask(lin))[2], 0u);
  s(2, 1) = 1.5;
  EXPECT_EQ(greedy_heads(s, base_mask(lin))[2], 1u);
}

TEST(GreedyHeads, EqualsRowScanOnRandomMatrices) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const LinearizedLattice lin = linearize(testing::random_lattice(rng, 3, 2, 2));
    const auto n = static_cast<Eigen::Index>(lin.size());
    const Matrix s = testing::random_matrix(rng, n, n);
    const ConstraintMask m = base_mask(lin);
    const auto g = greedy_heads(s, m);
    for (std::size_t d = 2; d < lin.size(); ++d) {
      double best = kNegInf;
      for (std::size_t h = 0; h < lin.size(); ++h) {
        if (m.allowed(d, h)) best = std::max(best, s(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(h)));
      }
      ASSERT_EQ(s(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(g[d])), best);
    }
  }
}

TEST(SelectAnalyses, UniqueFullyAttachedAnalysisWins) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  Matrix s = Matrix::Zero(11, 11);
  // Token 2: analysis 1 (3, 4) fully attached to real heads, analysis 2 has
  // "h" (6) under AUX.
  s(3, 4) = 3;
  s(4, 2) = 3;
  s(5, 7) = 9;  // the strongest non-AUX score sits in analysis 2
  s(6, 1) = 9;
  s(7, 2) = 3;
  // Token 3: analysis 1 attached, analysis 2 (hlbn) under AUX.
  s(8, 9) = 2;
  s(9, 4) = 2;
  s(10, 1) = 4;
  const ConstraintMask m = base_mask(lin);
  const auto chosen = select_analyses(lin, greedy_heads(s, m), s, m);
  EXPECT_EQ(chosen, (std::vector<std::size_t>{1, 1, 1}));
}

TEST(SelectAnalyses, FallbackTakesAnalysisWithBestNonAuxSegment) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  Matrix s = Matrix::Constant(11, 11, -1.0);
  for (std::size_t d = 2; d < 11; ++d) s(static_cast<Eigen::Index>(d), 1) = 10.0;  // everything prefers AUX
  s(6, 2) = 4.0;   // best non-AUX score of token 2 lies in analysis 2
  s(3, 0) = 3.0;
  s(8, 0) = 0.5;   // token 3: analysis 1 has the better segment
  s(10, 2) = 0.25;
  const ConstraintMask m = base_mask(lin);
  EXPECT_EQ(select_analyses(lin, greedy_heads(s, m), s, m), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(SelectAnalyses, BothFullyAttachedFallsBackAndTiesGoLow) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  const Matrix s = Matrix::Zero(11, 11);  // every greedy head is ROOT: all analyses attached
  const ConstraintMask m = base_mask(lin);
  EXPECT_EQ(select_analyses(lin, greedy_heads(s, m), s, m), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(SelectAnalyses, MeanScoringDiffersFromMax) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  Matrix s = Matrix::Constant(11, 11, 0.0);
  for (std::size_t d = 2; d < 11; ++d) s(static_cast<Eigen::Index>(d), 1) = 10.0;
  // Token 3: analysis 1 = {h: 5, lbn: -5} (max 5, mean 0); analysis 2 = {hlbn: 1}.
  s.row(8).head(1).setConstant(5.0);
  s.row(9).setConstant(-5.0);
  s(9, 1) = 10.0;
  s.row(10).setConstant(1.0);
  s(10, 1) = 10.0;
  const ConstraintMask m = base_mask(lin);
  const auto g = greedy_heads(s, m);
  EXPECT_EQ(select_analyses(lin, g, s, m, AnalysisScoring::MaxSegment)[2], 1u);
  EXPECT_EQ(select_analyses(lin, g, s, m, AnalysisScoring::MeanSegment)[2], 2u);
}

TEST(ApplyConstraints, WorkedExampleHandDerivedMask) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  const ConstraintMask m = apply_constraints(lin, std::vector<std::size_t>{1, 2, 1});
  // Chosen: 2, 5, 6, 7, 8, 9. Unchosen: 3, 4, 10.
  const std::vector<std::vector<std::size_t>> expected{
      {},                   // ROOT
      {},                   // AUX
      {0, 5, 6, 7, 8, 9},   // bkrti
      {1},                  // b (analysis 1)
      {1},                  // bit (analysis 1)
      {0, 2, 6, 7, 8, 9},   // b
      {0, 2, 5, 7, 8, 9},   // h
      {0, 2, 5, 6, 8, 9},   // bit
      {0, 2, 5, 6, 7, 9},   // h
      {0, 2, 5, 6, 7, 8},   // lbn
      {1},                  // hlbn
  };
  for (std::size_t d = 0; d < 11; ++d) EXPECT_EQ(m.permitted_heads(d), expected[d]) << "node " << d;
}

TEST(ApplyConstraints, UnambiguousSentenceForbidsAuxOnly) {
  SentenceLattice lat;
  for (std::size_t j = 1; j <= 3; ++j) {
    lat.tokens.push_back(make_token_lattice({j, "w" + std::to_string(j)}, {analysis({("w" + std::to_string(j)).c_str()})}));
  }
  const LinearizedLattice lin = linearize(lat);
  const ConstraintMask m = apply_constraints(lin, std::vector<std::size_t>{1, 1, 1});
  for (std::size_t d = 2; d < 5; ++d) {
    for (std::size_t h = 0; h < 5; ++h) EXPECT_EQ(m.allowed(d, h), h != 1 && h != d) << d << "," << h;
  }
}

// ---------------------------------------------------------------------------

TEST(Mst, ChainRecovered) {
  // w(h, d): ROOT -> 1 -> 2 -> 3 strongly preferred.
  Matrix w = Matrix::Constant(4, 4, 0.0);
  w(0, 1) = 10;
  w(1, 2) = 10;
  w(2, 3) = 10;
  for (int i = 0; i < 4; ++i) w(i, 0) = kNegInf;
  EXPECT_EQ(max_arborescence(w, true), (std::vector<std::size_t>{kNpos, 0, 1, 2}));
}

TEST(Mst, GreedyCycleIsBroken) {
  // Greedy: 1 <- 2, 2 <- 1 (a cycle); ROOT arcs are weak.
  Matrix w = Matrix::Constant(3, 3, kNegInf);
  w(2, 1) = 5;
  w(1, 2) = 5;
  w(0, 1) = 1;
  w(0, 2) = 0;
  const auto heads = max_arborescence(w, true);
  EXPECT_EQ(heads, (std::vector<std::size_t>{kNpos, 0, 1}));
  EXPECT_DOUBLE_EQ(arborescence_weight(w, heads), 6.0);
}

TEST(Mst, SingleRootRestrictsRootChildren) {
  Matrix w = Matrix::Constant(3, 3, 0.0);
  w(0, 1) = 5;
  w(0, 2) = 5;
  w(1, 2) = 1;
  w(2, 1) = 1;
  for (int i = 0; i < 3; ++i) w(i, 0) = kNegInf;
  EXPECT_EQ(max_arborescence(w, false), (std::vector<std::size_t>{kNpos, 0, 0}));
  const auto single = max_arborescence(w, true);
  EXPECT_DOUBLE_EQ(arborescence_weight(w, single), 6.0);
  EXPECT_EQ(std::count(single.begin(), single.end(), 0u), 1);
}

TEST(Mst, InfeasibleGraphReturnsEmpty) {
  Matrix w = Matrix::Constant(3, 3, kNegInf);
  w(0, 1) = 1;  // node 2 has no incoming arc
  EXPECT_TRUE(max_arborescence(w, true).empty());
}

TEST(Mst, MatchesExhaustiveEnumeration) {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng.index(5);
    const auto n = static_cast<Eigen::Index>(k + 1);
    Matrix dep_major = testing::random_matrix(rng, n, n, 4.0);
    std::vector<std::size_t> nodes;
    for (std::size_t d = 1; d <= k; ++d) nodes.push_back(d);
    const bool single = trial % 2 == 0;
    const double oracle = testing::brute_force_tree(dep_major, nodes, [](std::size_t, std::size_t) { return true; }, single);
    Matrix w = dep_major.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i, 0) = kNegInf;
      w(i, i) = kNegInf;
    }
    ASSERT_EQ(arborescence_weight(w, max_arborescence(w, single)), oracle) << "trial " << trial;
  }
}

// ---------------------------------------------------------------------------

TEST(Decode, UnambiguousSentenceIsPlainMstParse) {
  SentenceLattice lat;
  for (std::size_t j = 1; j <= 4; ++j) {
    lat.tokens.push_back(make_token_lattice({j, "w" + std::to_string(j)}, {analysis({("w" + std::to_string(j)).c_str()})}));
  }
  const LinearizedLattice lin = linearize(lat);
  const OutputInventory inv = testing::small_inventory();
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const ScoreSet s = testing::random_scores(rng, lin.size(), inv.labels.size(), {3, 3, 3, 3});
    const JointParse p = decode(lin, s, inv);
    ASSERT_EQ(p.segments.size(), 4u);
    const std::vector<std::size_t> nodes{2, 3, 4, 5};
    const double oracle = testing::brute_force_tree(s.head_scores, nodes,
                                                    [](std::size_t, std::size_t h) { return h != 1; }, true);
    ASSERT_EQ(tree_score(s.head_scores, p.node_heads, nodes), oracle);
  }
}

TEST(Decode, LabelsSkipAuxDiscardAndTagsTakeArgmax) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  const OutputInventory inv = testing::small_inventory();
  Rng rng(2);
  ScoreSet s = testing::random_scores(rng, lin.size(), inv.labels.size(), {3, 3, 3, 3});
  s.label_scores.back().setConstant(100.0);  // aux-discard
  s.label_scores[1].setConstant(50.0);       // nsubj
  s.mtl_logits[0].setZero();
  s.mtl_logits[0].col(2).setConstant(1.0);
  const JointParse p = decode(lin, s, inv);
  for (const auto& seg : p.segments) {
    EXPECT_EQ(seg.label, "nsubj");
    EXPECT_EQ(seg.tags[0], "VERB");
  }
}

TEST(Decode, IsDeterministic) {
  Rng rng(4);
  const OutputInventory inv = testing::small_inventory();
  for (int trial = 0; trial < 50; ++trial) {
    const LinearizedLattice lin = linearize(testing::random_lattice(rng, 4, 3, 3));
    const ScoreSet s = testing::random_scores(rng, lin.size(), inv.labels.size(), {3, 3, 3, 3});
    const JointParse a = decode(lin, s, inv);
    const JointParse b = decode(lin, s, inv);
    ASSERT_EQ(a.node_heads, b.node_heads);
    ASSERT_EQ(a.chosen_analysis, b.chosen_analysis);
  }
}

TEST(Decode, AllNodesScopeKeepsConstraints) {
  Rng rng(6);
  const OutputInventory inv = testing::small_inventory();
  DecoderOptions opt;
  opt.mst.scope = MstScope::AllNodes;
  for (int trial = 0; trial < 300; ++trial) {
    const LinearizedLattice lin = linearize(testing::random_lattice(rng, 4, 3, 3));
    const ScoreSet s = testing::random_scores(rng, lin.size(), inv.labels.size(), {3, 3, 3, 3});
    const JointParse p = decode(lin, s, inv, opt);
    const auto nodes = chosen_nodes(lin, p.chosen_analysis);
    const std::set<std::size_t> chosen(nodes.begin(), nodes.end());
    for (std::size_t d = 2; d < lin.size(); ++d) {
      if (chosen.count(d)) {
        ASSERT_TRUE(p.node_heads[d] == 0 || chosen.count(p.node_heads[d]));
      } else {
        ASSERT_EQ(p.node_heads[d], 1u);
      }
    }
    ASSERT_TRUE(testing::is_tree(p.node_heads, nodes));
  }
}

TEST(Decode, MismatchedScoreSetThrows) {
  const LinearizedLattice lin = linearize(testing::worked_example());
  const OutputInventory inv = testing::small_inventory();
  Rng rng(1);
  const ScoreSet s = testing::random_scores(rng, 5, inv.labels.size(), {3, 3, 3, 3});
  EXPECT_THROW(decode(lin, s, inv), DataError);
  EXPECT_THROW(chosen_nodes(lin, std::vector<std::size_t>{1}), DataError);
}

}  // namespace
}  // namespace latparse
