#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "latparse/conllu.hpp"
#include "latparse/decoder.hpp"
#include "latparse/error.hpp"
#include "test_util.hpp"

namespace latparse {
namespace {

const std::filesystem::path kFixture = std::filesystem::path(LATPARSE_TEST_DATA) / "roundtrip.conllu";

std::vector<GoldSentence> read_string(const std::string& text) {
  std::istringstream in(text);
  return read_treebank(in, "t.conllu");
}

std::size_t error_line(const std::string& text) {
  try {
    read_string(text);
  } catch (const FormatError& e) {
    return e.line();
  }
  return 0;
}

TEST(ReadTreebank, RangeLinesGroupSegmentsIntoTokens) {
  const auto tb = read_treebank(kFixture);
  ASSERT_EQ(tb.size(), 3u);
  const GoldSentence& s = tb[0];
  EXPECT_EQ(s.sent_id, "rt-1");
  ASSERT_EQ(s.tokens.size(), 4u);
  EXPECT_EQ(s.tokens[1].form, "bbit");
  ASSERT_EQ(s.tokens[1].segments.size(), 3u);
  EXPECT_EQ(s.tokens[1].segments[2].form, "bit");
  EXPECT_EQ(s.tokens[1].segments[2].head, 1u);
  EXPECT_EQ(s.tokens[2].misc, "SpaceAfter=No");
  EXPECT_EQ(s.segment_count(), 7u);
  EXPECT_EQ(s.segment_tokens(), (std::vector<std::size_t>{1, 2, 2, 2, 3, 3, 4}));
  EXPECT_EQ(task_value(*s.segments()[3], FeatureTask::Gender), "Masc");
  EXPECT_EQ(task_value(*s.segments()[1], FeatureTask::Gender), kNoFeature);
  EXPECT_EQ(task_value(*s.segments()[1], FeatureTask::Pos), "ADP");
}

TEST(ReadTreebank, NoRangeLinesMeansSingleSegmentTokens) {
  const auto tb = read_string("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n");
  ASSERT_EQ(tb.size(), 1u);
  ASSERT_EQ(tb[0].tokens.size(), 2u);
  for (const auto& t : tb[0].tokens) {
    ASSERT_EQ(t.segments.size(), 1u);
    EXPECT_EQ(t.segments[0].form, t.form);
  }
}

TEST(ReadTreebank, RoundTripIsFixedPointAndByteIdenticalModuloComments) {
  std::ifstream in(kFixture);
  std::stringstream original;
  original << in.rdbuf();
  const auto first = read_string(original.str());
  std::ostringstream written;
  write_treebank(written, first);
  EXPECT_EQ(read_string(written.str()), first);
  const auto strip = [](const std::string& text) {
    std::istringstream lines(text);
    std::string out;
    for (std::string l; std::getline(lines, l);) {
      if (l.empty() || l.front() != '#') out += l + '\n';
    }
    return out;
  };
  EXPECT_EQ(strip(written.str()), strip(original.str()));
}

TEST(ReadTreebank, MalformedRowsCarryLineNumbers) {
  const std::string good = "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n";
  EXPECT_EQ(error_line("# c\n" + good + "2\tb\t_\tX\t_\t_\t1\n"), 3u);            // column count
  EXPECT_EQ(error_line(good + "3\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n"), 2u);           // id gap
  EXPECT_EQ(error_line(good + "2\tb\t_\tX\t_\t_\tx\tdep\t_\t_\n"), 2u);           // head
  EXPECT_EQ(error_line(good + "1.1\tb\t_\tX\t_\t_\t_\t_\t_\t_\n"), 2u);           // empty node
  EXPECT_EQ(error_line(good + "3-4\tbc\t_\t_\t_\t_\t_\t_\t_\t_\n"), 2u);          // range start
  EXPECT_EQ(error_line(good + "2\tb\t_\tX\t_\t_\t1\t_\t_\t_\n"), 2u);             // deprel
  EXPECT_EQ(error_line("# only a comment\n\n"), 1u);
}

TEST(ReadTreebank, InvalidTreesAreDataErrors) {
  // Cycle 1 <-> 2 with no root.
  EXPECT_THROW(read_string("1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n"), DataError);
  // Two roots.
  EXPECT_THROW(read_string("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n"), DataError);
  // Head out of range.
  EXPECT_THROW(read_string("1\ta\t_\tX\t_\t_\t5\troot\t_\t_\n"), DataError);
  EXPECT_THROW(read_treebank(std::filesystem::path("/nonexistent.conllu")), MissingAssetError);
}

TEST(RawText, OneSentencePerLine) {
  std::istringstream in("bkrti bbit  hlbn\n\nxy\n");
  const auto tb = read_raw_text(in);
  ASSERT_EQ(tb.size(), 2u);
  EXPECT_EQ(tb[0].sent_id, "1");
  EXPECT_EQ(tb[1].sent_id, "3");
  ASSERT_EQ(tb[0].tokens.size(), 3u);
  EXPECT_EQ(tb[0].tokens[2].form, "hlbn");
  EXPECT_TRUE(tb[0].tokens[0].segments.empty());
}

TEST(WriteParse, OracleParseRoundTripsThroughReader) {
  const GoldSentence gold = testing::small_gold();
  JointParse p;
  p.sent_id = "g1";
  p.tokens = gold.raw_tokens();
  p.chosen_analysis = {1, 2, 1};
  std::size_t pos = 0;
  for (std::size_t t = 0; t < gold.tokens.size(); ++t) {
    for (const auto& seg : gold.tokens[t].segments) {
      ParsedSegment ps;
      ps.form = seg.form;
      ps.token_idx = t + 1;
      ps.node = 2 + pos++;
      ps.head = seg.head;
      ps.label = seg.deprel;
      ps.tags = {seg.upos, std::string(task_value(seg, FeatureTask::Gender)),
                 std::string(task_value(seg, FeatureTask::Number)), std::string(task_value(seg, FeatureTask::Person))};
      p.segments.push_back(ps);
    }
  }
  std::ostringstream out;
  write_parse(out, {p});
  const auto back = read_string(out.str());
  ASSERT_EQ(back.size(), 1u);
  ASSERT_EQ(back[0].tokens.size(), 3u);
  const auto a = back[0].segments();
  const auto b = gold.segments();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k]->form, b[k]->form);
    EXPECT_EQ(a[k]->head, b[k]->head);
    EXPECT_EQ(a[k]->deprel, b[k]->deprel);
    EXPECT_EQ(a[k]->upos, b[k]->upos);
    EXPECT_EQ(a[k]->feats, b[k]->feats);
  }
}

TEST(WriteParse, UnambiguousSentenceHasNoRangeLines) {
  JointParse p;
  p.sent_id = "u";
  p.tokens = {{1, "a"}, {2, "b"}};
  p.chosen_analysis = {1, 1};
  p.segments = {{"a", 2, 1, 0, "root", {"X", "NONE", "NONE", "NONE"}}, {"b", 3, 2, 1, "dep", {"Y", "", "", ""}}};
  std::ostringstream out;
  write_parse(out, {p});
  EXPECT_EQ(out.str().find('-'), std::string::npos);
  EXPECT_NE(out.str().find("1\ta\t_\tX\t_\t_\t0\troot"), std::string::npos);
}

}  // namespace
}  // namespace latparse
