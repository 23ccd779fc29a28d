#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "latparse/linalg.hpp"
#include "latparse/treebank.hpp"

namespace latparse {

/// Reserved label for arcs from segments of unchosen analyses to AUX.
inline constexpr std::string_view kAuxDiscard = "aux-discard";

/// Output vocabularies: dependency labels (always containing aux-discard)
/// and one tag set per MTL task. An empty tag set disables that task.
struct OutputInventory {
  std::vector<std::string> labels;
  std::array<std::vector<std::string>, kTaskCount> tag_sets;

  std::size_t label_index(std::string_view label) const;  // kNpos if absent
  std::size_t aux_label() const;                          // throws if absent
  std::size_t tag_index(FeatureTask task, std::string_view tag) const;
  bool task_enabled(FeatureTask task) const { return !tag_sets[static_cast<std::size_t>(task)].empty(); }

  /// Sorted labels and tags observed in `treebank`, aux-discard appended
  /// last. Tasks not in `tasks` get empty tag sets.
  static OutputInventory from_treebank(const std::vector<GoldSentence>& treebank,
                                       const std::array<bool, kTaskCount>& tasks = {true, true, true, true});

  friend bool operator==(const OutputInventory&, const OutputInventory&) = default;
};

/// Scorer output for one linearized lattice of n nodes (ROOT/AUX included).
struct ScoreSet {
  Matrix head_scores;                         // n x n; row = dependent, column = candidate head
  std::vector<Matrix> label_scores;           // |labels| matrices of n x n
  std::array<Matrix, kTaskCount> mtl_logits;  // n x |tags_t|

  std::size_t node_count() const { return static_cast<std::size_t>(head_scores.rows()); }
  std::size_t label_count() const { return label_scores.size(); }
  double label_score(std::size_t dep, std::size_t head, std::size_t label) const {
    return label_scores[label](static_cast<Eigen::Index>(dep), static_cast<Eigen::Index>(head));
  }
  bool all_finite() const;
};

}  // namespace latparse
