#include "latparse/treebank.hpp"

#include "latparse/error.hpp"

namespace latparse {

std::size_t GoldSentence::segment_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens) n += t.segments.size();
  return n;
}

std::vector<Token> GoldSentence::raw_tokens() const {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) out.push_back({j + 1, tokens[j].form});
  return out;
}

std::vector<const GoldSegment*> GoldSentence::segments() const {
  std::vector<const GoldSegment*> out;
  out.reserve(segment_count());
  for (const auto& t : tokens) {
    for (const auto& s : t.segments) out.push_back(&s);
  }
  return out;
}

std::vector<std::size_t> GoldSentence::segment_tokens() const {
  std::vector<std::size_t> out;
  out.reserve(segment_count());
  for (std::size_t j = 0; j < tokens.size(); ++j) out.insert(out.end(), tokens[j].segments.size(), j + 1);
  return out;
}

std::string task_value(const GoldSegment& seg, FeatureTask task) {
  switch (task) {
    case FeatureTask::Pos:
      return seg.upos;
    case FeatureTask::Gender:
      return std::string(feature_value(seg.feats, "Gender").value_or(kNoFeature));
    case FeatureTask::Number:
      return std::string(feature_value(seg.feats, "Number").value_or(kNoFeature));
    case FeatureTask::Person:
      return std::string(feature_value(seg.feats, "Person").value_or(kNoFeature));
  }
  return std::string(kNoFeature);
}

Analysis gold_analysis(const GoldToken& token) {
  Analysis a;
  a.segments.reserve(token.segments.size());
  for (const auto& s : token.segments) {
    Segment seg{s.form, {}, s.feats};
    if (s.upos != "_") seg.pos_hint = s.upos;
    a.segments.push_back(std::move(seg));
  }
  return a;
}

void validate(const GoldSentence& sentence) {
  const std::string where = sentence.sent_id.empty() ? std::string("sentence") : "sentence " + sentence.sent_id;
  if (sentence.tokens.empty()) throw DataError(where + " has no tokens");
  for (const auto& t : sentence.tokens) {
    if (t.segments.empty()) throw DataError(where + ": token '" + t.form + "' has no segments");
  }
  const auto segs = sentence.segments();
  const std::size_t n = segs.size();
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = segs[i]->head;
    if (h > n) throw DataError(where + ": head " + std::to_string(h) + " out of range");
    if (h == i + 1) throw DataError(where + ": segment " + std::to_string(i + 1) + " heads itself");
    if (h == 0) ++roots;
  }
  if (roots != 1) throw DataError(where + ": expected exactly one root, found " + std::to_string(roots));
  // Every segment must reach the root without revisiting a node.
  std::vector<int> state(n + 1, 0);  // 0 unseen, 1 on path, 2 reaches root
  state[0] = 2;
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<std::size_t> path;
    std::size_t v = start;
    while (state[v] == 0) {
      state[v] = 1;
      path.push_back(v);
      v = segs[v - 1]->head;
    }
    if (state[v] == 1) throw DataError(where + ": gold heads contain a cycle through segment " + std::to_string(v));
    for (auto p : path) state[p] = 2;
  }
}

}  // namespace latparse
