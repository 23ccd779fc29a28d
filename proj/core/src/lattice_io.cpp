#include "latparse/lattice_io.hpp"

#include <istream>
#include <ostream>

#include "latparse/error.hpp"
#include "text_util.hpp"

namespace latparse {

void write_lattice_tsv(std::ostream& out, const std::vector<SentenceLattice>& lattices) {
  for (std::size_t s = 0; s < lattices.size(); ++s) {
    const auto& lat = lattices[s];
    if (s > 0) out << '\n';
    if (!lat.sent_id.empty()) out << "# sent_id = " << lat.sent_id << '\n';
    out << "# text =";
    for (const auto& tl : lat.tokens) out << ' ' << tl.token.form;
    out << '\n';
    for (const auto& tl : lat.tokens) {
      for (std::size_t i = 0; i < tl.analyses.size(); ++i) {
        const auto& segs = tl.analyses[i].segments;
        for (std::size_t r = 0; r < segs.size(); ++r) {
          out << tl.token.index << '\t' << i + 1 << '\t' << r + 1 << '\t' << segs[r].form << '\t'
              << segs[r].pos_hint.value_or("_") << '\t' << format_features(segs[r].feats_hint) << '\n';
        }
      }
    }
  }
}

namespace {

struct PendingSentence {
  std::string sent_id;
  std::vector<std::string> token_forms;
  bool has_text = false;
  std::vector<TokenLattice> tokens;
  std::size_t first_line = 0;
};

SentenceLattice finish(PendingSentence& p, const std::string& source) {
  if (!p.has_text) throw FormatError(source, p.first_line, "sentence lacks a '# text =' line");
  if (p.tokens.size() != p.token_forms.size()) {
    throw FormatError(source, p.first_line,
                      "text line lists " + std::to_string(p.token_forms.size()) + " tokens but rows cover " +
                          std::to_string(p.tokens.size()));
  }
  SentenceLattice lat;
  lat.sent_id = p.sent_id;
  for (std::size_t j = 0; j < p.tokens.size(); ++j) {
    p.tokens[j].token = {j + 1, p.token_forms[j]};
    lat.tokens.push_back(std::move(p.tokens[j]));
  }
  try {
    validate(lat);
  } catch (const DataError& e) {
    throw FormatError(source, p.first_line, e.what());
  }
  return lat;
}

}  // namespace

std::vector<SentenceLattice> read_lattice_tsv(std::istream& in, const std::string& source) {
  std::vector<SentenceLattice> out;
  PendingSentence pending;
  bool open = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (detail::trim(line).empty()) {
      if (open) out.push_back(finish(pending, source));
      pending = {};
      open = false;
      continue;
    }
    if (!open) {
      pending.first_line = line_no;
      open = true;
    }
    if (line.front() == '#') {
      if (auto id = detail::comment_value(line, "sent_id")) pending.sent_id = std::string(*id);
      if (auto text = detail::comment_value(line, "text")) {
        pending.has_text = true;
        for (auto f : detail::split_ws(*text)) pending.token_forms.emplace_back(f);
      }
      continue;
    }
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 6) {
      throw FormatError(source, line_no, "expected 6 tab-separated columns, found " + std::to_string(cols.size()));
    }
    const auto tok = detail::parse_size(cols[0]);
    const auto ana = detail::parse_size(cols[1]);
    const auto within = detail::parse_size(cols[2]);
    if (!tok || !ana || !within || *tok == 0 || *ana == 0 || *within == 0) {
      throw FormatError(source, line_no, "indices must be positive integers");
    }
    if (cols[3].empty()) throw FormatError(source, line_no, "empty segment form");

    auto& tokens = pending.tokens;
    if (*tok == tokens.size() + 1) {
      tokens.emplace_back();
    } else if (*tok != tokens.size()) {
      throw FormatError(source, line_no, "token index " + std::to_string(*tok) + " out of sequence");
    }
    auto& analyses = tokens.back().analyses;
    if (*ana == analyses.size() + 1) {
      if (*within != 1) throw FormatError(source, line_no, "analysis must start at within_idx 1");
      analyses.emplace_back();
    } else if (*ana != analyses.size()) {
      throw FormatError(source, line_no, "analysis index " + std::to_string(*ana) + " out of sequence");
    }
    auto& segs = analyses.back().segments;
    if (*within != segs.size() + 1) {
      throw FormatError(source, line_no, "within index " + std::to_string(*within) + " out of sequence");
    }
    Segment seg;
    seg.form = std::string(cols[3]);
    if (cols[4] != "_") seg.pos_hint = std::string(cols[4]);
    seg.feats_hint = parse_features(cols[5]);
    segs.push_back(std::move(seg));
  }
  if (open) out.push_back(finish(pending, source));
  return out;
}

}  // namespace latparse
