#include "latparse/conllu.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "latparse/decoder.hpp"
#include "latparse/error.hpp"
#include "text_util.hpp"

namespace latparse {

namespace {

struct SentenceBuilder {
  GoldSentence sentence;
  std::size_t first_line = 0;
  std::size_t next_id = 1;
  std::size_t range_end = 0;  // last id covered by the open range line, 0 if none
  bool has_rows = false;
};

GoldSentence finish(SentenceBuilder& b, const std::string& source) {
  if (b.range_end >= b.next_id) {
    throw FormatError(source, b.first_line, "range line covers ids beyond the end of the sentence");
  }
  try {
    validate(b.sentence);
  } catch (const DataError& e) {
    throw DataError(source + ":" + std::to_string(b.first_line) + ": " + e.what());
  }
  return std::move(b.sentence);
}

std::size_t parse_id(std::string_view text, const std::string& source, std::size_t line) {
  auto id = detail::parse_size(text);
  if (!id || *id == 0) throw FormatError(source, line, "invalid id '" + std::string(text) + "'");
  return *id;
}

}  // namespace

std::vector<GoldSentence> read_treebank(std::istream& in, const std::string& source) {
  std::vector<GoldSentence> out;
  SentenceBuilder b;
  bool open = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) {
      if (open) {
        if (!b.has_rows) throw FormatError(source, b.first_line, "sentence has comments but no rows");
        out.push_back(finish(b, source));
      }
      b = {};
      open = false;
      continue;
    }
    if (!open) {
      b.first_line = line_no;
      open = true;
    }
    if (line.front() == '#') {
      if (b.has_rows) throw FormatError(source, line_no, "comment line inside a sentence");
      b.sentence.comments.emplace_back(line);
      if (auto id = detail::comment_value(line, "sent_id")) b.sentence.sent_id = std::string(*id);
      continue;
    }

    const auto cols = detail::split(line, '\t');
    if (cols.size() != 10) {
      throw FormatError(source, line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    }
    b.has_rows = true;
    const std::string_view id = cols[0];
    if (id.find('.') != std::string_view::npos) {
      throw FormatError(source, line_no, "empty nodes (decimal ids) are not supported");
    }
    if (const auto dash = id.find('-'); dash != std::string_view::npos) {
      const std::size_t first = parse_id(id.substr(0, dash), source, line_no);
      const std::size_t last = parse_id(id.substr(dash + 1), source, line_no);
      if (first != b.next_id || last < first) {
        throw FormatError(source, line_no, "range " + std::string(id) + " does not start at the next word id");
      }
      if (b.range_end >= b.next_id) throw FormatError(source, line_no, "overlapping range lines");
      if (cols[1].empty() || cols[1] == "_") throw FormatError(source, line_no, "range line without a token form");
      b.range_end = last;
      GoldToken tok;
      tok.form = std::string(cols[1]);
      tok.misc = std::string(cols[9]);
      b.sentence.tokens.push_back(std::move(tok));
      continue;
    }

    const std::size_t word_id = parse_id(id, source, line_no);
    if (word_id != b.next_id) {
      throw FormatError(source, line_no, "expected word id " + std::to_string(b.next_id) + ", found " +
                                             std::string(id));
    }
    if (cols[1].empty()) throw FormatError(source, line_no, "empty FORM");
    const auto head = detail::parse_size(cols[6]);
    if (!head) throw FormatError(source, line_no, "invalid HEAD '" + std::string(cols[6]) + "'");
    if (cols[7].empty() || cols[7] == "_") throw FormatError(source, line_no, "missing DEPREL");

    GoldSegment seg;
    seg.form = std::string(cols[1]);
    seg.lemma = std::string(cols[2]);
    seg.upos = std::string(cols[3]);
    seg.xpos = std::string(cols[4]);
    seg.feats = parse_features(cols[5]);
    seg.head = *head;
    seg.deprel = std::string(cols[7]);
    seg.deps = std::string(cols[8]);
    seg.misc = std::string(cols[9]);

    if (b.range_end >= word_id) {
      b.sentence.tokens.back().segments.push_back(std::move(seg));
    } else {
      GoldToken tok;
      tok.form = seg.form;
      tok.segments.push_back(std::move(seg));
      b.sentence.tokens.push_back(std::move(tok));
    }
    ++b.next_id;
  }
  if (open) {
    if (!b.has_rows) throw FormatError(source, b.first_line, "sentence has comments but no rows");
    out.push_back(finish(b, source));
  }
  return out;
}

std::vector<GoldSentence> read_treebank(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingAssetError("cannot open treebank " + path.string());
  return read_treebank(in, path.string());
}

void write_treebank(std::ostream& out, const std::vector<GoldSentence>& sentences) {
  for (const auto& s : sentences) {
    for (const auto& c : s.comments) out << c << '\n';
    std::size_t id = 1;
    for (const auto& tok : s.tokens) {
      const bool needs_range = tok.segments.size() > 1 || tok.segments.front().form != tok.form;
      if (needs_range) {
        out << id << '-' << id + tok.segments.size() - 1 << '\t' << tok.form << "\t_\t_\t_\t_\t_\t_\t_\t" << tok.misc
            << '\n';
      }
      for (const auto& seg : tok.segments) {
        out << id << '\t' << seg.form << '\t' << seg.lemma << '\t' << seg.upos << '\t' << seg.xpos << '\t'
            << format_features(seg.feats) << '\t' << seg.head << '\t' << seg.deprel << '\t' << seg.deps << '\t'
            << seg.misc << '\n';
        ++id;
      }
    }
    out << '\n';
  }
}

void write_treebank(const std::filesystem::path& path, const std::vector<GoldSentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw MissingAssetError("cannot write " + path.string());
  write_treebank(out, sentences);
}

GoldSentence to_gold_sentence(const JointParse& parse) {
  GoldSentence s;
  s.sent_id = parse.sent_id;
  if (!parse.sent_id.empty()) s.comments.push_back("# sent_id = " + parse.sent_id);
  std::string text;
  for (const auto& t : parse.tokens) {
    if (!text.empty()) text += ' ';
    text += t.form;
  }
  s.comments.push_back("# text = " + text);
  for (const auto& t : parse.tokens) s.tokens.push_back({t.form, {}, "_"});

  static constexpr std::array<std::pair<FeatureTask, std::string_view>, 3> kFeats{
      {{FeatureTask::Gender, "Gender"}, {FeatureTask::Number, "Number"}, {FeatureTask::Person, "Person"}}};
  for (const auto& seg : parse.segments) {
    GoldSegment g;
    g.form = seg.form;
    const auto& pos = seg.tags[static_cast<std::size_t>(FeatureTask::Pos)];
    g.upos = pos.empty() ? "_" : pos;
    for (const auto& [task, key] : kFeats) {
      const auto& v = seg.tags[static_cast<std::size_t>(task)];
      if (!v.empty() && v != kNoFeature) g.feats.emplace_back(std::string(key), v);
    }
    g.head = seg.head;
    g.deprel = seg.label.empty() ? "dep" : seg.label;
    s.tokens.at(seg.token_idx - 1).segments.push_back(std::move(g));
  }
  return s;
}

void write_parse(std::ostream& out, const std::vector<JointParse>& parses) {
  std::vector<GoldSentence> sentences;
  sentences.reserve(parses.size());
  for (const auto& p : parses) sentences.push_back(to_gold_sentence(p));
  write_treebank(out, sentences);
}

std::vector<GoldSentence> read_raw_text(std::istream& in) {
  std::vector<GoldSentence> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto forms = detail::split_ws(detail::strip_cr(raw));
    if (forms.empty()) continue;
    GoldSentence s;
    s.sent_id = std::to_string(line_no);
    for (auto f : forms) s.tokens.push_back({std::string(f), {}, "_"});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace latparse
