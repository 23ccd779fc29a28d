#include "latparse/lattice.hpp"

#include <algorithm>
#include <stdexcept>

#include "latparse/error.hpp"

namespace latparse {

FeatureList parse_features(std::string_view text) {
  FeatureList feats;
  if (text.empty() || text == "_") return feats;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t bar = std::min(text.find('|', start), text.size());
    const std::string_view item = text.substr(start, bar - start);
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) {
        feats.emplace_back(std::string(item), std::string());
      } else {
        feats.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
      }
    }
    start = bar + 1;
  }
  return feats;
}

std::string format_features(const FeatureList& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [key, value] : feats) {
    if (!out.empty()) out += '|';
    out += key;
    out += '=';
    out += value;
  }
  return out;
}

std::optional<std::string_view> feature_value(const FeatureList& feats, std::string_view key) {
  for (const auto& [k, v] : feats) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

std::vector<std::string> Analysis::forms() const {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(seg.form);
  return out;
}

bool Analysis::same_forms(const Analysis& other) const {
  return std::equal(segments.begin(), segments.end(), other.segments.begin(), other.segments.end(),
                    [](const Segment& a, const Segment& b) { return a.form == b.form; });
}

std::vector<Token> SentenceLattice::raw_tokens() const {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.token);
  return out;
}

TokenLattice make_token_lattice(Token token, std::vector<Analysis> analyses) {
  if (token.form.empty()) throw DataError("token " + std::to_string(token.index) + " has an empty form");
  TokenLattice out{std::move(token), {}};
  for (auto& analysis : analyses) {
    if (analysis.segments.empty()) {
      throw DataError("token '" + out.token.form + "' has an analysis with no segments");
    }
    for (const auto& seg : analysis.segments) {
      if (seg.form.empty()) throw DataError("token '" + out.token.form + "' has an empty segment");
    }
    const bool dup = std::any_of(out.analyses.begin(), out.analyses.end(),
                                 [&](const Analysis& a) { return a.same_forms(analysis); });
    if (!dup) out.analyses.push_back(std::move(analysis));
  }
  if (out.analyses.empty()) throw DataError("token '" + out.token.form + "' has no analyses");
  return out;
}

void validate(const SentenceLattice& lattice) {
  for (std::size_t j = 0; j < lattice.tokens.size(); ++j) {
    const auto& tl = lattice.tokens[j];
    if (tl.token.index != j + 1) {
      throw DataError("token indices must be contiguous from 1; found " + std::to_string(tl.token.index) +
                      " at position " + std::to_string(j + 1));
    }
    if (tl.token.form.empty()) throw DataError("token " + std::to_string(j + 1) + " has an empty form");
    if (tl.analyses.empty()) throw DataError("token '" + tl.token.form + "' has no analyses");
    for (std::size_t i = 0; i < tl.analyses.size(); ++i) {
      const auto& a = tl.analyses[i];
      if (a.segments.empty()) throw DataError("token '" + tl.token.form + "' has an empty analysis");
      for (const auto& s : a.segments) {
        if (s.form.empty()) throw DataError("token '" + tl.token.form + "' has an empty segment");
      }
      for (std::size_t p = 0; p < i; ++p) {
        if (tl.analyses[p].same_forms(a)) {
          throw DataError("token '" + tl.token.form + "' lists a duplicate analysis");
        }
      }
    }
  }
}

std::size_t LinearizedLattice::analysis_count(std::size_t token_idx) const {
  if (token_idx == 0 || token_idx > ranges_.size()) {
    throw std::out_of_range("token index " + std::to_string(token_idx) + " out of range");
  }
  return ranges_[token_idx - 1].size();
}

NodeRange LinearizedLattice::segments_of(std::size_t token_idx, std::size_t analysis_idx) const {
  const std::size_t count = analysis_count(token_idx);
  if (analysis_idx == 0 || analysis_idx > count) {
    throw std::out_of_range("analysis index " + std::to_string(analysis_idx) + " out of range for token " +
                            std::to_string(token_idx));
  }
  return ranges_[token_idx - 1][analysis_idx - 1];
}

NodeRange LinearizedLattice::token_nodes(std::size_t token_idx) const {
  const std::size_t count = analysis_count(token_idx);
  const auto& r = ranges_[token_idx - 1];
  return {r.front().begin, r[count - 1].end};
}

SentenceLattice LinearizedLattice::delinearize() const {
  SentenceLattice out;
  out.sent_id = sent_id_;
  out.tokens.reserve(tokens_.size());
  for (const auto& tok : tokens_) out.tokens.push_back({tok, {}});
  for (std::size_t pos = 2; pos < nodes_.size(); ++pos) {
    const auto& n = nodes_[pos];
    auto& analyses = out.tokens[n.token_idx - 1].analyses;
    if (analyses.size() < n.analysis_idx) analyses.resize(n.analysis_idx);
    auto& segs = analyses[n.analysis_idx - 1].segments;
    if (segs.size() < n.within_idx) segs.resize(n.within_idx);
    segs[n.within_idx - 1] = n.segment;
  }
  return out;
}

LinearizedLattice linearize(const SentenceLattice& lattice) {
  if (lattice.tokens.empty()) throw EmptySentenceError();

  LinearizedLattice lin;
  lin.sent_id_ = lattice.sent_id;
  lin.tokens_ = lattice.raw_tokens();

  std::size_t total = 2;
  for (const auto& tl : lattice.tokens) {
    if (tl.analyses.empty()) throw DataError("token '" + tl.token.form + "' has no analyses");
    for (const auto& a : tl.analyses) total += a.segments.size();
  }
  lin.nodes_.reserve(total);
  lin.nodes_.push_back({NodeKind::Root, {}, 0, 0, 0});
  lin.nodes_.push_back({NodeKind::Aux, {}, 0, 0, 1});

  lin.ranges_.resize(lattice.tokens.size());
  for (std::size_t j = 0; j < lattice.tokens.size(); ++j) {
    const auto& tl = lattice.tokens[j];
    for (std::size_t i = 0; i < tl.analyses.size(); ++i) {
      const std::size_t begin = lin.nodes_.size();
      const auto& segs = tl.analyses[i].segments;
      for (std::size_t r = 0; r < segs.size(); ++r) {
        lin.nodes_.push_back({NodeKind::Segment, segs[r], j + 1, i + 1, r + 1});
      }
      lin.ranges_[j].push_back({begin, lin.nodes_.size()});
    }
  }
  return lin;
}

std::vector<std::string> segment_forms(const LinearizedLattice& lin) {
  std::vector<std::string> out;
  out.reserve(lin.segment_count());
  for (std::size_t pos = 2; pos < lin.size(); ++pos) out.push_back(lin.node(pos).segment.form);
  return out;
}

}  // namespace latparse
