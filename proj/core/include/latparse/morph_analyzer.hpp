#pragma once

// Lexicon-backed morphological analyzer.
//
// Lexicon file: UTF-8, one `form<TAB>analysis` per line, where an analysis is
// `seg/POS[feats]` items joined by `+`, e.g.
//
//   bbit	b/ADP+bit/NOUN[Gender=Masc|Number=Sing]
//
// POS and feats are optional per item. A form may span several lines; blank
// lines and lines starting with '#' are ignored.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latparse/lattice.hpp"
#include "latparse/treebank.hpp"

namespace latparse {

enum class MAMode { Infused, Uninfused };

class Lexicon {
 public:
  using Entries = std::map<std::string, std::vector<Analysis>, std::less<>>;

  /// Appends `analysis` under `form` unless an analysis with the same segment
  /// forms is already listed. Returns whether it was added. Throws DataError
  /// on an empty form, analysis or segment.
  bool add(std::string_view form, Analysis analysis);

  /// Listed analyses for `form`, or nullptr.
  const std::vector<Analysis>* find(std::string_view form) const;

  /// Removes one analysis (by segment forms). Returns whether it existed.
  bool remove(std::string_view form, const Analysis& analysis);

  std::size_t form_count() const { return entries_.size(); }
  std::size_t analysis_count() const;
  const Entries& entries() const { return entries_; }

  friend bool operator==(const Lexicon&, const Lexicon&) = default;

 private:
  Entries entries_;
};

/// Parses a lexicon. Analyses repeating a segmentation are merged; where the
/// repeats disagree on a segment's POS or feats, the value most common for
/// that segment form across the whole file wins, first listed on ties.
Lexicon read_lexicon(std::istream& in, const std::string& source = "<lexicon>");
Lexicon read_lexicon(const std::filesystem::path& path);
void write_lexicon(std::ostream& out, const Lexicon& lexicon);
void write_lexicon(const std::filesystem::path& path, const Lexicon& lexicon);

std::string format_analysis(const Analysis& analysis);
Analysis parse_analysis(std::string_view text);  // throws DataError

/// The token's listed analyses, or a single whole-form segment when the form
/// is unknown.
TokenLattice analyze(const Lexicon& lexicon, const Token& token);

/// Copy of `lexicon` with every treebank token's gold analysis added.
Lexicon infuse(const Lexicon& lexicon, std::span<const GoldSentence> treebank);

SentenceLattice build_sentence_lattice(const Lexicon& lexicon, std::span<const Token> sentence,
                                       std::string sent_id = {});

/// Lattice for a treebank sentence's raw tokens.
SentenceLattice build_sentence_lattice(const Lexicon& lexicon, const GoldSentence& sentence);

/// 1-based analysis index of each token's gold segmentation in `lattice`, or
/// 0 where the gold path is missing.
std::vector<std::size_t> find_gold_path(const SentenceLattice& lattice, const GoldSentence& gold);

}  // namespace latparse
