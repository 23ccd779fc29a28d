#pragma once

// The joint arc-factored model: a shared BiLSTM over node embeddings feeds
// two branch BiLSTMs, one for biaffine head/label scoring and one for the
// morphological feature heads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latparse/gold_targets.hpp"
#include "latparse/nn.hpp"
#include "latparse/scores.hpp"

namespace latparse {

struct ScorerConfig {
  std::size_t embedding_dim = 768;
  std::size_t shared_rnn_hidden = 600;  // per direction
  std::size_t shared_rnn_depth = 2;
  std::size_t branch_rnn_depth = 1;
  std::size_t arc_mlp_size = 500;
  std::size_t label_mlp_size = 100;
  std::size_t mtl_linear_size = 600;
  double embedding_dropout = 0.3;
  double arc_mlp_dropout = 0.3;
  double label_mlp_dropout = 0.3;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.9;
  double adam_epsilon = 1e-12;
  double clip_norm = 5.0;

  /// Unchosen-analysis nodes contribute aux-discard to the label loss.
  bool aux_label_loss = true;
  /// Learned vectors added to the ROOT and AUX input rows, so the two
  /// otherwise identical virtual nodes can be told apart.
  bool virtual_offset = true;
  std::array<bool, kTaskCount> tasks{true, true, true, true};

  /// Throws UsageError on zero sizes or rates outside [0, 1).
  void validate() const;

  friend bool operator==(const ScorerConfig&, const ScorerConfig&) = default;
};

enum class Mode { Train, Eval };

/// Intermediate values kept for the backward pass.
struct ScorerCache {
  bool train = false;
  Matrix input_mask;
  Matrix input;  // after offset and dropout
  BiLstm::Cache shared, arc_branch, mtl_branch;
  Matrix shared_out, arc_out, mtl_out;
  Matrix arc_dep_pre, arc_head_pre, label_dep_pre, label_head_pre;
  Matrix arc_dep_mask, arc_head_mask, label_dep_mask, label_head_mask;
  Matrix arc_dep, arc_head;              // post activation and dropout
  Matrix label_dep_aug, label_head_aug;  // with a trailing column of ones
  Matrix label_proj;                     // label_dep_aug * U, n x (L * (b+1))
  Matrix mtl_reduced;
};

class Scorer {
 public:
  Scorer(const ScorerConfig& config, OutputInventory inventory, std::uint64_t seed);

  const ScorerConfig& config() const { return config_; }
  const OutputInventory& inventory() const { return inventory_; }

  /// `embeddings` is nodes x embedding_dim with ROOT and AUX in rows 0 and 1.
  /// Dropout draws from `dropout_seed` in Train mode only. Throws DataError
  /// on a dimension mismatch.
  ScoreSet forward(const Matrix& embeddings, Mode mode, std::uint64_t dropout_seed = 0,
                   ScorerCache* cache = nullptr) const;

  /// Accumulates parameter gradients given dL/dScoreSet and returns
  /// dL/d(embeddings).
  Matrix backward(const ScorerCache& cache, const ScoreSet& grad);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();

  /// Looks a parameter up by name; nullptr if absent.
  Parameter* find_parameter(const std::string& name);

 private:
  ScorerConfig config_;
  OutputInventory inventory_;

  Parameter virtual_offset_;  // 2 x d
  BiLstm shared_;
  BiLstm arc_branch_;
  BiLstm mtl_branch_;
  Linear arc_dep_, arc_head_, label_dep_, label_head_;
  Parameter arc_u_;    // a x a
  Parameter arc_w_;    // a x 1
  Parameter label_u_;  // (b+1) x (L * (b+1)), one block per label
  Linear mtl_reduce_;
  std::array<std::optional<Linear>, kTaskCount> mtl_heads_;
};

struct LossBreakdown {
  double head = 0.0;
  double label = 0.0;
  std::array<double, kTaskCount> tasks{};
  double total = 0.0;

  LossBreakdown& operator+=(const LossBreakdown& other);
};

/// Target counts used to normalize each loss component over a batch.
struct LossCounts {
  std::size_t head = 0;
  std::size_t label = 0;
  std::array<std::size_t, kTaskCount> tasks{};

  void add(const GoldTargets& gold);
  static LossCounts of(const GoldTargets& gold);
};

/// Head CE over all n candidate heads per scored node, label CE at the gold
/// head, and masked CE per enabled task; each component is divided by its
/// count in `norm` (a zero count contributes zero). When `grad` is given it
/// receives dLoss/dScores, overwritten and shaped like `scores`.
LossBreakdown compute_loss(const ScoreSet& scores, const GoldTargets& gold, const LossCounts& norm,
                           ScoreSet* grad = nullptr);

/// Normalized by the sentence's own counts.
LossBreakdown compute_loss(const ScoreSet& scores, const GoldTargets& gold, ScoreSet* grad = nullptr);

}  // namespace latparse
