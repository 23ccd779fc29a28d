#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "latparse/embedding.hpp"
#include "latparse/gold_targets.hpp"
#include "latparse/lattice.hpp"
#include "latparse/nn.hpp"
#include "latparse/scorer.hpp"

namespace latparse {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double epsilon = 1e-12;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables clipping

  static AdamConfig from(const ScorerConfig& config);
};

/// Adam with global-norm gradient clipping. Moment state is keyed by the
/// position of each parameter in the list passed to step(), which must be
/// the same list on every call.
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  /// Applies one update from the accumulated gradients and returns the
  /// gradient norm before clipping. Throws NumericError naming the first
  /// parameter with a non-finite gradient; parameters are left untouched.
  double step(std::span<Parameter* const> params);

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

/// One lattice prepared for training.
struct TrainingExample {
  LinearizedLattice lattice;
  Matrix embeddings;  // fixed provider output; ignored when a table is trained
  GoldTargets gold;
};

struct StepResult {
  LossBreakdown loss;
  double grad_norm = 0.0;
};

/// Forward, loss and backward over `batch`, then one optimizer update. Loss
/// components are normalized over the whole batch. With `table` set, node
/// embeddings are looked up from it and it is updated alongside the scorer.
/// Example i draws its dropout from mix_seed(step_seed, i).
StepResult train_step(Scorer& scorer, std::span<const TrainingExample* const> batch, Adam& optimizer,
                      std::uint64_t step_seed, StaticProvider* table = nullptr);

}  // namespace latparse
