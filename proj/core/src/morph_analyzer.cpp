#include "latparse/morph_analyzer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "latparse/error.hpp"
#include "text_util.hpp"

namespace latparse {

bool Lexicon::add(std::string_view form, Analysis analysis) {
  if (form.empty()) throw DataError("lexicon form is empty");
  if (analysis.segments.empty()) throw DataError("lexicon analysis for '" + std::string(form) + "' is empty");
  for (const auto& s : analysis.segments) {
    if (s.form.empty()) throw DataError("lexicon analysis for '" + std::string(form) + "' has an empty segment");
  }
  auto it = entries_.find(form);
  if (it == entries_.end()) it = entries_.emplace(std::string(form), std::vector<Analysis>{}).first;
  auto& list = it->second;
  if (std::any_of(list.begin(), list.end(), [&](const Analysis& a) { return a.same_forms(analysis); })) return false;
  list.push_back(std::move(analysis));
  return true;
}

const std::vector<Analysis>* Lexicon::find(std::string_view form) const {
  const auto it = entries_.find(form);
  return it == entries_.end() ? nullptr : &it->second;
}

bool Lexicon::remove(std::string_view form, const Analysis& analysis) {
  const auto it = entries_.find(form);
  if (it == entries_.end()) return false;
  auto& list = it->second;
  const auto pos = std::find_if(list.begin(), list.end(), [&](const Analysis& a) { return a.same_forms(analysis); });
  if (pos == list.end()) return false;
  list.erase(pos);
  if (list.empty()) entries_.erase(it);
  return true;
}

std::size_t Lexicon::analysis_count() const {
  std::size_t n = 0;
  for (const auto& [form, list] : entries_) n += list.size();
  return n;
}

std::string format_analysis(const Analysis& analysis) {
  std::string out;
  for (const auto& seg : analysis.segments) {
    if (!out.empty()) out += '+';
    out += seg.form;
    if (seg.pos_hint || !seg.feats_hint.empty()) {
      out += '/';
      out += seg.pos_hint.value_or("_");
    }
    if (!seg.feats_hint.empty()) {
      out += '[';
      out += format_features(seg.feats_hint);
      out += ']';
    }
  }
  return out;
}

Analysis parse_analysis(std::string_view text) {
  Analysis a;
  for (auto item : detail::split(text, '+')) {
    Segment seg;
    std::string_view rest = item;
    std::string_view feats;
    if (const auto open = rest.find('['); open != std::string_view::npos) {
      if (rest.back() != ']') throw DataError("unterminated feature list in '" + std::string(item) + "'");
      feats = rest.substr(open + 1, rest.size() - open - 2);
      rest = rest.substr(0, open);
    }
    if (const auto slash = rest.find('/'); slash != std::string_view::npos) {
      const auto pos = rest.substr(slash + 1);
      if (!pos.empty() && pos != "_") seg.pos_hint = std::string(pos);
      rest = rest.substr(0, slash);
    }
    if (rest.empty()) throw DataError("empty segment in analysis '" + std::string(text) + "'");
    seg.form = std::string(rest);
    seg.feats_hint = parse_features(feats);
    a.segments.push_back(std::move(seg));
  }
  return a;
}

namespace {

/// Picks, per segment, the hint most frequent for that segment form across
/// the whole lexicon; the first-listed variant wins ties.
Analysis resolve_variants(const std::vector<Analysis>& variants,
                          const std::map<std::pair<std::string, std::string>, std::size_t>& pos_counts,
                          const std::map<std::pair<std::string, std::string>, std::size_t>& feat_counts) {
  Analysis out = variants.front();
  for (std::size_t r = 0; r < out.segments.size(); ++r) {
    const std::string& form = out.segments[r].form;
    std::size_t best_pos = 0;
    std::size_t best_feat = 0;
    std::size_t best_pos_count = 0;
    std::size_t best_feat_count = 0;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const auto& seg = variants[v].segments[r];
      const auto pc = pos_counts.at({form, seg.pos_hint.value_or("_")});
      const auto fc = feat_counts.at({form, format_features(seg.feats_hint)});
      if (pc > best_pos_count) {
        best_pos_count = pc;
        best_pos = v;
      }
      if (fc > best_feat_count) {
        best_feat_count = fc;
        best_feat = v;
      }
    }
    out.segments[r].pos_hint = variants[best_pos].segments[r].pos_hint;
    out.segments[r].feats_hint = variants[best_feat].segments[r].feats_hint;
  }
  return out;
}

}  // namespace

Lexicon read_lexicon(std::istream& in, const std::string& source) {
  struct Raw {
    std::string form;
    Analysis analysis;
  };
  std::vector<Raw> raws;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::strip_cr(raw);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw FormatError(source, line_no, "expected 'form<TAB>analysis'");
    }
    try {
      raws.push_back({std::string(cols[0]), parse_analysis(cols[1])});
    } catch (const DataError& e) {
      throw FormatError(source, line_no, e.what());
    }
  }

  std::map<std::pair<std::string, std::string>, std::size_t> pos_counts;
  std::map<std::pair<std::string, std::string>, std::size_t> feat_counts;
  for (const auto& r : raws) {
    for (const auto& seg : r.analysis.segments) {
      ++pos_counts[{seg.form, seg.pos_hint.value_or("_")}];
      ++feat_counts[{seg.form, format_features(seg.feats_hint)}];
    }
  }

  // Group repeated segmentations per form, keeping first-listed order.
  std::map<std::string, std::vector<std::vector<Analysis>>, std::less<>> grouped;
  for (auto& r : raws) {
    auto& groups = grouped[r.form];
    auto g = std::find_if(groups.begin(), groups.end(),
                          [&](const std::vector<Analysis>& v) { return v.front().same_forms(r.analysis); });
    if (g == groups.end()) {
      groups.push_back({std::move(r.analysis)});
    } else {
      g->push_back(std::move(r.analysis));
    }
  }

  Lexicon lex;
  for (const auto& [form, groups] : grouped) {
    for (const auto& variants : groups) lex.add(form, resolve_variants(variants, pos_counts, feat_counts));
  }
  return lex;
}

Lexicon read_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingAssetError("cannot open lexicon " + path.string());
  return read_lexicon(in, path.string());
}

void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  for (const auto& [form, list] : lexicon.entries()) {
    for (const auto& a : list) out << form << '\t' << format_analysis(a) << '\n';
  }
}

void write_lexicon(const std::filesystem::path& path, const Lexicon& lexicon) {
  std::ofstream out(path);
  if (!out) throw MissingAssetError("cannot write " + path.string());
  write_lexicon(out, lexicon);
}

TokenLattice analyze(const Lexicon& lexicon, const Token& token) {
  if (const auto* listed = lexicon.find(token.form); listed != nullptr && !listed->empty()) {
    return make_token_lattice(token, *listed);
  }
  Analysis fallback;
  fallback.segments.push_back(Segment{token.form, std::nullopt, {}});
  return make_token_lattice(token, {std::move(fallback)});
}

Lexicon infuse(const Lexicon& lexicon, std::span<const GoldSentence> treebank) {
  Lexicon out = lexicon;
  for (const auto& sentence : treebank) {
    for (const auto& tok : sentence.tokens) {
      if (tok.segments.empty()) {
        throw DataError("cannot infuse token '" + tok.form + "' without a gold segmentation");
      }
      out.add(tok.form, gold_analysis(tok));
    }
  }
  return out;
}

SentenceLattice build_sentence_lattice(const Lexicon& lexicon, std::span<const Token> sentence,
                                       std::string sent_id) {
  SentenceLattice lat;
  lat.sent_id = std::move(sent_id);
  lat.tokens.reserve(sentence.size());
  for (const auto& tok : sentence) lat.tokens.push_back(analyze(lexicon, tok));
  return lat;
}

SentenceLattice build_sentence_lattice(const Lexicon& lexicon, const GoldSentence& sentence) {
  const auto tokens = sentence.raw_tokens();
  return build_sentence_lattice(lexicon, tokens, sentence.sent_id);
}

std::vector<std::size_t> find_gold_path(const SentenceLattice& lattice, const GoldSentence& gold) {
  if (lattice.tokens.size() != gold.tokens.size()) {
    throw DataError("lattice has " + std::to_string(lattice.tokens.size()) + " tokens, gold sentence has " +
                    std::to_string(gold.tokens.size()));
  }
  std::vector<std::size_t> path(gold.tokens.size(), 0);
  for (std::size_t j = 0; j < gold.tokens.size(); ++j) {
    const auto gold_forms = gold_analysis(gold.tokens[j]);
    const auto& analyses = lattice.tokens[j].analyses;
    for (std::size_t i = 0; i < analyses.size(); ++i) {
      if (analyses[i].same_forms(gold_forms)) {
        path[j] = i + 1;
        break;
      }
    }
  }
  return path;
}

}  // namespace latparse
