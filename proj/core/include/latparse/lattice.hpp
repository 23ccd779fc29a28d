#pragma once

// Sentence lattices and their linearization into the scorer's node sequence.
//
// Token, analysis and within-analysis indices are 1-based throughout, so that
// (token j, analysis i, position r) reads the same in code, files and logs.
// Node positions in a LinearizedLattice are 0-based: ROOT is 0, AUX is 1.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latparse {

/// Ordered morphological features, e.g. Gender=Masc|Number=Sing. Order is
/// kept as read so that files round-trip byte for byte.
using FeatureList = std::vector<std::pair<std::string, std::string>>;

FeatureList parse_features(std::string_view text);    // "_" -> empty
std::string format_features(const FeatureList& feats);  // empty -> "_"
std::optional<std::string_view> feature_value(const FeatureList& feats, std::string_view key);

struct Token {
  std::size_t index = 0;  // 1-based position in the sentence
  std::string form;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Segment {
  std::string form;
  std::optional<std::string> pos_hint;
  FeatureList feats_hint;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Analysis {
  std::vector<Segment> segments;

  /// Segment forms only; the identity used for deduplication.
  std::vector<std::string> forms() const;
  bool same_forms(const Analysis& other) const;

  friend bool operator==(const Analysis&, const Analysis&) = default;
};

struct TokenLattice {
  Token token;
  std::vector<Analysis> analyses;

  friend bool operator==(const TokenLattice&, const TokenLattice&) = default;
};

struct SentenceLattice {
  std::string sent_id;
  std::vector<TokenLattice> tokens;

  std::vector<Token> raw_tokens() const;

  friend bool operator==(const SentenceLattice&, const SentenceLattice&) = default;
};

/// Builds a token lattice, dropping analyses whose segment-form sequence
/// repeats an earlier one (first occurrence wins). Throws DataError when the
/// form is empty, no analysis remains, or an analysis or segment is empty.
TokenLattice make_token_lattice(Token token, std::vector<Analysis> analyses);

/// Checks every TokenLattice invariant plus contiguous 1..k token indices.
void validate(const SentenceLattice& lattice);

enum class NodeKind { Root, Aux, Segment };

struct LatticeNode {
  NodeKind kind = NodeKind::Segment;
  Segment segment;               // SEGMENT nodes only
  std::size_t token_idx = 0;     // 0 for ROOT/AUX
  std::size_t analysis_idx = 0;  // 0 for ROOT/AUX
  std::size_t within_idx = 0;    // ROOT 0, AUX 1
};

/// Half-open range of node positions.
struct NodeRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t node) const { return node >= begin && node < end; }
  friend bool operator==(const NodeRange&, const NodeRange&) = default;
};

class LinearizedLattice {
 public:
  static constexpr std::size_t kRoot = 0;
  static constexpr std::size_t kAux = 1;

  const std::string& sent_id() const { return sent_id_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const LatticeNode& node(std::size_t pos) const { return nodes_.at(pos); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t segment_count() const { return nodes_.size() - 2; }
  std::size_t token_count() const { return tokens_.size(); }
  std::size_t analysis_count(std::size_t token_idx) const;

  /// Node positions of analysis `analysis_idx` of token `token_idx`.
  /// Throws std::out_of_range on invalid indices.
  NodeRange segments_of(std::size_t token_idx, std::size_t analysis_idx) const;

  /// All node positions of one token, across its analyses.
  NodeRange token_nodes(std::size_t token_idx) const;

  bool is_segment(std::size_t pos) const { return pos >= 2 && pos < nodes_.size(); }

  /// Regroups nodes by provenance back into the lattice they came from.
  SentenceLattice delinearize() const;

 private:
  friend LinearizedLattice linearize(const SentenceLattice& lattice);

  std::string sent_id_;
  std::vector<Token> tokens_;
  std::vector<LatticeNode> nodes_;
  std::vector<std::vector<NodeRange>> ranges_;  // [token-1][analysis-1]
};

/// ROOT, AUX, then every segment of every analysis of every token in
/// (token, analysis, within) order. Throws EmptySentenceError on an empty
/// lattice and DataError if any token has no analyses.
LinearizedLattice linearize(const SentenceLattice& lattice);

/// Segment forms of a linearized lattice, ROOT/AUX excluded.
std::vector<std::string> segment_forms(const LinearizedLattice& lin);

}  // namespace latparse
