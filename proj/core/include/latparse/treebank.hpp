#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "latparse/lattice.hpp"

namespace latparse {

/// One syntactic word of a gold (or parsed) sentence: a CoNLL-U word row.
struct GoldSegment {
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  FeatureList feats;
  std::size_t head = 0;  // 1-based segment id, 0 = root
  std::string deprel;
  std::string deps = "_";
  std::string misc = "_";

  friend bool operator==(const GoldSegment&, const GoldSegment&) = default;
};

/// A raw space-delimited token and the gold segments it expands to.
struct GoldToken {
  std::string form;
  std::vector<GoldSegment> segments;
  std::string misc = "_";  // MISC column of the range line, if any

  friend bool operator==(const GoldToken&, const GoldToken&) = default;
};

/// The MTL feature tasks, in the order used by every per-task array.
enum class FeatureTask : std::size_t { Pos = 0, Gender = 1, Number = 2, Person = 3 };
inline constexpr std::size_t kTaskCount = 4;
inline constexpr std::array<std::string_view, kTaskCount> kTaskNames{"pos", "gender", "number", "person"};

/// Value used when a segment carries no value for a feature.
inline constexpr std::string_view kNoFeature = "NONE";

struct GoldSentence {
  std::string sent_id;
  std::vector<std::string> comments;  // verbatim, including the leading '#'
  std::vector<GoldToken> tokens;

  std::size_t segment_count() const;
  std::vector<Token> raw_tokens() const;

  /// Flattened segments in order; heads index into this list (1-based).
  std::vector<const GoldSegment*> segments() const;

  /// 1-based token index of every segment, aligned with segments().
  std::vector<std::size_t> segment_tokens() const;

  friend bool operator==(const GoldSentence&, const GoldSentence&) = default;
};

/// POS for Pos, else the Gender/Number/Person feature value or NONE.
std::string task_value(const GoldSegment& seg, FeatureTask task);

/// The gold analysis of one token, with POS/feats carried as hints.
Analysis gold_analysis(const GoldToken& token);

/// Throws DataError unless heads are in range, form a single-rooted tree,
/// and every token has at least one segment.
void validate(const GoldSentence& sentence);

}  // namespace latparse
