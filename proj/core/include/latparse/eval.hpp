#pragma once

// Aligned multiset F1 over SEG, POS and DEP items, and a mechanical
// classification of dependency errors.
//
// Items are built from surface forms and labels only, never node positions,
// because predicted and gold segmentations may differ. Each raw token is an
// alignment unit: its gold and predicted item multisets are intersected.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latparse/treebank.hpp"

namespace latparse {

enum class EvalTask { Seg, Pos, Dep };
inline constexpr std::array<EvalTask, 3> kEvalTasks{EvalTask::Seg, EvalTask::Pos, EvalTask::Dep};
std::string_view eval_task_name(EvalTask task);

enum class DepStrictness {
  Form,          // (form, label, head form or ROOT)
  FormDistance,  // plus the signed head-token offset (0 for root arcs)
};

struct PRF {
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PRF from_counts(std::size_t matched, std::size_t predicted, std::size_t gold);
  PRF& operator+=(const PRF& other);  // adds counts and recomputes rates
};

/// One multiset of encoded items per token.
using TokenItems = std::vector<std::vector<std::string>>;

TokenItems eval_items(const GoldSentence& sentence, EvalTask task, DepStrictness strictness = DepStrictness::Form);

/// Per-token multiset intersection, summed. Throws DataError when the token
/// counts differ.
PRF aligned_multiset_f1(const TokenItems& gold, const TokenItems& predicted);

/// Sentence-by-sentence; sentence counts, token counts and token forms must
/// agree.
PRF aligned_multiset_f1(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted, EvalTask task,
                        DepStrictness strictness = DepStrictness::Form);

struct ErrorRow {
  std::string label;
  std::size_t arcs = 0;  // gold arcs with this label
  std::size_t head_only = 0;
  std::size_t label_only = 0;
  std::size_t head_and_label = 0;

  std::size_t errors() const { return head_only + label_only + head_and_label; }
};

struct ErrorBreakdown {
  std::vector<ErrorRow> rows;  // by gold label, sorted by label
  ErrorRow total;
  std::size_t compared_sentences = 0;
  std::size_t skipped_sentences = 0;  // segmentation differs from gold
};

/// Only sentences whose predicted segmentation equals the gold one are
/// compared, arc by arc.
ErrorBreakdown error_breakdown(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted);

struct EvalReport {
  PRF seg, pos, dep;

  const PRF& get(EvalTask task) const;
};

EvalReport evaluate(std::span<const GoldSentence> gold, std::span<const GoldSentence> predicted,
                    DepStrictness strictness = DepStrictness::Form);

struct RunReport {
  std::vector<EvalReport> runs;  // one per seed
  /// Precision, recall and F1 are arithmetic means over runs; counts are
  /// summed.
  EvalReport mean;
};

RunReport evaluate_run(std::span<const GoldSentence> gold, const std::vector<std::vector<GoldSentence>>& runs,
                       DepStrictness strictness = DepStrictness::Form);

RunReport summarize(std::vector<EvalReport> runs);

/// Human-readable table followed by `key=value` lines.
void write_report(std::ostream& out, const RunReport& report);
void write_breakdown(std::ostream& out, const ErrorBreakdown& breakdown);

}  // namespace latparse
