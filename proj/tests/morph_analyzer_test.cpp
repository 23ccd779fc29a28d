#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "latparse/error.hpp"
#include "latparse/morph_analyzer.hpp"
#include "test_util.hpp"

namespace latparse {
namespace {

Lexicon toy_lexicon() { return read_lexicon(std::filesystem::path(LATPARSE_TEST_DATA) / "toy.lex"); }

TEST(Lexicon, ReadsFixtureWithHints) {
  const Lexicon lex = toy_lexicon();
  EXPECT_EQ(lex.form_count(), 3u);
  EXPECT_EQ(lex.analysis_count(), 5u);
  const auto* bbit = lex.find("bbit");
  ASSERT_NE(bbit, nullptr);
  ASSERT_EQ(bbit->size(), 2u);
  EXPECT_EQ((*bbit)[1].forms(), (std::vector<std::string>{"b", "h", "bit"}));
  EXPECT_EQ((*bbit)[0].segments[0].pos_hint, "ADP");
  EXPECT_EQ(feature_value((*bbit)[0].segments[1].feats_hint, "Gender"), "Masc");
  EXPECT_EQ(lex.find("missing"), nullptr);
}

TEST(Lexicon, WriteReadRoundTrip) {
  const Lexicon lex = toy_lexicon();
  std::ostringstream out;
  write_lexicon(out, lex);
  std::istringstream in(out.str());
  EXPECT_EQ(read_lexicon(in), lex);
}

TEST(Lexicon, ConflictingHintsResolveByFrequency) {
  // "bit" is a NOUN in two lines and a VERB in one; the repeat of
  // bbit=b+bit keeps the more frequent NOUN reading.
  std::istringstream in("bbit\tb/ADP+bit/VERB\nbbit\tb/ADP+bit/NOUN\nbit\tbit/NOUN\n");
  const Lexicon lex = read_lexicon(in);
  ASSERT_EQ(lex.find("bbit")->size(), 1u);
  EXPECT_EQ(lex.find("bbit")->front().segments[1].pos_hint, "NOUN");
}

TEST(Lexicon, MalformedLinesReportLineNumbers) {
  std::istringstream bad("# comment\nbbit\tb+bit\nbroken line\n");
  try {
    read_lexicon(bad, "x.lex");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("x.lex:3"), std::string::npos);
  }
  std::istringstream empty_seg("bbit\tb++bit\n");
  EXPECT_THROW(read_lexicon(empty_seg), FormatError);
  std::istringstream open_feats("bbit\tb+bit[Gender=Masc\n");
  EXPECT_THROW(read_lexicon(open_feats), FormatError);
  EXPECT_THROW(read_lexicon(std::filesystem::path("/nonexistent/lex")), MissingAssetError);
}

TEST(Lexicon, AddAndRemove) {
  Lexicon lex;
  EXPECT_TRUE(lex.add("ab", testing::analysis({"a", "b"})));
  EXPECT_FALSE(lex.add("ab", testing::analysis({"a", "b"})));
  EXPECT_TRUE(lex.add("ab", testing::analysis({"ab"})));
  EXPECT_TRUE(lex.remove("ab", testing::analysis({"a", "b"})));
  EXPECT_FALSE(lex.remove("ab", testing::analysis({"a", "b"})));
  EXPECT_EQ(lex.find("ab")->size(), 1u);
  EXPECT_THROW(lex.add("", testing::analysis({"a"})), DataError);
}

TEST(Analyze, KnownFormListsAnalysesInOrder) {
  const TokenLattice t = analyze(toy_lexicon(), {3, "hlbn"});
  ASSERT_EQ(t.analyses.size(), 2u);
  EXPECT_EQ(t.analyses[0].forms(), (std::vector<std::string>{"h", "lbn"}));
  EXPECT_EQ(t.analyses[1].forms(), (std::vector<std::string>{"hlbn"}));
}

TEST(Analyze, UnknownFormFallsBackToWholeToken) {
  const TokenLattice t = analyze(toy_lexicon(), {1, "xyz"});
  ASSERT_EQ(t.analyses.size(), 1u);
  EXPECT_EQ(t.analyses[0].forms(), (std::vector<std::string>{"xyz"}));
  EXPECT_FALSE(t.analyses[0].segments[0].pos_hint);
}

TEST(Analyze, WorkedExampleLatticeFromLexicon) {
  const std::vector<Token> tokens{{1, "bkrti"}, {2, "bbit"}, {3, "hlbn"}};
  SentenceLattice lat = build_sentence_lattice(toy_lexicon(), tokens, "ex1");
  const LinearizedLattice lin = linearize(lat);
  EXPECT_EQ(segment_forms(lin),
            (std::vector<std::string>{"bkrti", "b", "bit", "b", "h", "bit", "h", "lbn", "hlbn"}));
}

TEST(Infuse, AddsMissingGoldAnalysisOnce) {
  const GoldSentence gold = testing::small_gold();
  Lexicon lex;
  lex.add("bbit", testing::analysis({"bbit"}));
  const Lexicon once = infuse(lex, std::span(&gold, 1));
  EXPECT_EQ(once.find("bbit")->size(), 2u);
  EXPECT_EQ(once.find("bbit")->back().forms(), (std::vector<std::string>{"b", "h", "bit"}));
  EXPECT_EQ(once.find("bbit")->back().segments[2].pos_hint, "NOUN");
  EXPECT_EQ(infuse(once, std::span(&gold, 1)), once);
}

TEST(GoldPath, FoundWhenInfusedMissingOtherwise) {
  const GoldSentence gold = testing::small_gold();
  const Lexicon lex = toy_lexicon();
  const auto path = find_gold_path(build_sentence_lattice(lex, gold), gold);
  EXPECT_EQ(path, (std::vector<std::size_t>{1, 2, 1}));

  Lexicon partial;
  partial.add("bbit", testing::analysis({"b", "bit"}));
  const auto missing = find_gold_path(build_sentence_lattice(partial, gold), gold);
  EXPECT_EQ(missing, (std::vector<std::size_t>{1, 0, 0}));
  const auto fixed = find_gold_path(build_sentence_lattice(infuse(partial, std::span(&gold, 1)), gold), gold);
  EXPECT_EQ(std::count(fixed.begin(), fixed.end(), 0u), 0);
}

TEST(Analysis, FormatParseRoundTrip) {
  const Analysis a = parse_analysis("b/ADP+h+bit/NOUN[Gender=Masc|Number=Sing]");
  ASSERT_EQ(a.segments.size(), 3u);
  EXPECT_FALSE(a.segments[1].pos_hint);
  EXPECT_EQ(format_analysis(a), "b/ADP+h+bit/NOUN[Gender=Masc|Number=Sing]");
  EXPECT_THROW(parse_analysis("a+"), DataError);
}

}  // namespace
}  // namespace latparse
