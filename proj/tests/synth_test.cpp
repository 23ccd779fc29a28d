#include <gtest/gtest.h>

#include <set>

#include "latparse/error.hpp"
#include "latparse/morph_analyzer.hpp"
#include "latparse/synth.hpp"

namespace latparse {
namespace {

std::set<std::string> grammar_words(const SynthGrammar& g) {
  std::set<std::string> words{g.article.form, g.conjunction.form};
  for (const auto* pool : {&g.nouns, &g.pronouns, &g.adjectives, &g.verbs, &g.adpositions}) {
    for (const auto& w : *pool) words.insert(w.form);
  }
  return words;
}

TEST(Synth, GenerationIsDeterministic) {
  const SynthGrammar g = make_grammar(0.5, 9);
  const SynthCorpus a = generate(g, 50);
  const SynthCorpus b = generate(make_grammar(0.5, 9), 50);
  EXPECT_EQ(a.treebank, b.treebank);
  EXPECT_EQ(a.lexicon, b.lexicon);
  SynthGrammar other = g;
  other.seed = 10;
  const SynthCorpus c = generate(other, 50);
  EXPECT_NE(c.treebank, a.treebank);
  EXPECT_EQ(c.lexicon, a.lexicon);  // vocabulary fixed by the grammar
}

TEST(Synth, SentencesAreValidTreesWithinLengthBounds) {
  const SynthCorpus corpus = generate(make_grammar(0.7, 3), 300);
  for (const auto& s : corpus.treebank) {
    ASSERT_GE(s.tokens.size(), 2u);
    ASSERT_LE(s.tokens.size(), 12u);
    EXPECT_NO_THROW(validate(s));
    std::size_t roots = 0;
    for (const auto* seg : s.segments()) roots += seg->head == 0;
    ASSERT_EQ(roots, 1u);
  }
}

TEST(Synth, GoldPathAlwaysPresentAndFusedTokensAmbiguous) {
  const SynthCorpus corpus = generate(make_grammar(0.5, 5), 300);
  std::size_t fused = 0;
  for (const auto& s : corpus.treebank) {
    const SentenceLattice lat = build_sentence_lattice(corpus.lexicon, s);
    const auto path = find_gold_path(lat, s);
    for (std::size_t j = 0; j < path.size(); ++j) {
      ASSERT_NE(path[j], 0u) << s.sent_id << " token " << j + 1;
      if (s.tokens[j].segments.size() > 1) {
        ++fused;
        ASSERT_GE(lat.tokens[j].analyses.size(), 2u) << s.tokens[j].form;
      }
    }
  }
  EXPECT_GT(fused, 0u);
  EXPECT_EQ(corpus.stats.fused_tokens, fused);
  EXPECT_GT(corpus.stats.realized_ambiguity(), 0.2);
  EXPECT_LE(corpus.stats.gold_first, corpus.stats.ambiguous_tokens);
}

TEST(Synth, ZeroAmbiguityMeansSingleAnalyses) {
  const SynthCorpus corpus = generate(make_grammar(0.0, 2), 100);
  EXPECT_EQ(corpus.stats.fused_tokens, 0u);
  EXPECT_EQ(corpus.stats.ambiguous_tokens, 0u);
  EXPECT_EQ(corpus.stats.analyses, corpus.stats.tokens);
}

TEST(Synth, EverySurfaceHasOneAnalysisOfGrammarWords) {
  const SynthGrammar g = make_grammar(0.5, 8);
  const std::set<std::string> words = grammar_words(g);
  const Lexicon lex = grammar_lexicon(g);
  for (const auto& [surface, analyses] : lex.entries()) {
    std::size_t all_words = 0;
    for (const auto& a : analyses) {
      std::string joined;
      bool known = true;
      for (const auto& seg : a.segments) {
        joined += seg.form;
        known = known && words.count(seg.form) > 0;
      }
      ASSERT_EQ(joined, surface);
      all_words += known;
    }
    ASSERT_EQ(all_words, 1u) << surface;
  }
}

TEST(Synth, DropGoldRemovesGoldOfSelectedForms) {
  const SynthCorpus corpus = generate(make_grammar(0.5, 12), 100);
  const Lexicon none = drop_gold_analyses(corpus.lexicon, corpus.treebank, 0.0, 1);
  EXPECT_EQ(none, corpus.lexicon);
  const Lexicon all = drop_gold_analyses(corpus.lexicon, corpus.treebank, 1.0, 1);
  std::size_t missing = 0, ambiguous = 0;
  for (const auto& s : corpus.treebank) {
    const auto path = find_gold_path(build_sentence_lattice(all, s), s);
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (corpus.lexicon.find(s.tokens[j].form)->size() > 1) {
        ++ambiguous;
        missing += path[j] == 0;
      } else {
        ASSERT_NE(path[j], 0u);
      }
    }
  }
  EXPECT_GT(ambiguous, 0u);
  EXPECT_EQ(missing, ambiguous);
  const Lexicon a = drop_gold_analyses(corpus.lexicon, corpus.treebank, 0.3, 4);
  EXPECT_EQ(a, drop_gold_analyses(corpus.lexicon, corpus.treebank, 0.3, 4));
  EXPECT_LT(a.analysis_count(), corpus.lexicon.analysis_count());
  EXPECT_GT(a.analysis_count(), all.analysis_count());
}

TEST(Synth, BadArgumentsAreUsageErrors) {
  EXPECT_THROW(make_grammar(-0.1, 1), UsageError);
  EXPECT_THROW(make_grammar(1.5, 1), UsageError);
  EXPECT_THROW(make_grammar(0.5, 1, 0), UsageError);
  EXPECT_THROW(generate(make_grammar(0.5, 1), 0), UsageError);
  SynthGrammar g = make_grammar(0.5, 1);
  g.min_tokens = 5;
  g.max_tokens = 4;
  EXPECT_THROW(generate(g, 1), UsageError);
}

}  // namespace
}  // namespace latparse
