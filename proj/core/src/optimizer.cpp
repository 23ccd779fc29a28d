#include "latparse/optimizer.hpp"

#include <cmath>

#include "latparse/error.hpp"
#include "latparse/random.hpp"

namespace latparse {

AdamConfig AdamConfig::from(const ScorerConfig& config) {
  return {config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon, config.clip_norm};
}

double Adam::step(std::span<Parameter* const> params) {
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw DataError("optimizer parameter list changed between steps");

  double sq = 0.0;
  for (const Parameter* p : params) {
    if (!p->grad.allFinite()) throw NumericError("non-finite gradient in parameter '" + p->name + "'");
    sq += p->grad.squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("gradient norm overflowed");
  const double clip = config_.clip_norm > 0.0 && norm > config_.clip_norm ? config_.clip_norm / norm : 1.0;

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    const auto g = p.grad.array() * clip;
    m_[k].array() = b1 * m_[k].array() + (1.0 - b1) * g;
    v_[k].array() = b2 * v_[k].array() + (1.0 - b2) * g * g;
    if (lr == 0.0) continue;
    p.value.array() -= lr * (m_[k].array() / correction1) / ((v_[k].array() / correction2).sqrt() + config_.epsilon);
  }
  return norm;
}

StepResult train_step(Scorer& scorer, std::span<const TrainingExample* const> batch, Adam& optimizer,
                      std::uint64_t step_seed, StaticProvider* table) {
  if (batch.empty()) throw DataError("training batch is empty");
  LossCounts counts;
  for (const TrainingExample* ex : batch) counts.add(ex->gold);

  std::vector<Parameter*> params = scorer.parameters();
  if (table != nullptr) params.push_back(&table->table());
  for (Parameter* p : params) p->zero_grad();

  StepResult result;
  ScorerCache cache;
  ScoreSet grad;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainingExample& ex = *batch[i];
    const Matrix embedded = table != nullptr ? embed_lattice(*table, ex.lattice).values : Matrix();
    const Matrix& input = table != nullptr ? embedded : ex.embeddings;
    const ScoreSet scores = scorer.forward(input, Mode::Train, mix_seed(step_seed, i), &cache);
    result.loss += compute_loss(scores, ex.gold, counts, &grad);
    const Matrix d_input = scorer.backward(cache, grad);
    if (table != nullptr) table->accumulate_gradient(ex.lattice, d_input);
  }
  if (!std::isfinite(result.loss.total)) throw NumericError("non-finite loss in training batch");
  result.grad_norm = optimizer.step(params);
  return result;
}

}  // namespace latparse
