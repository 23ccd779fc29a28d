#include "latparse/scorer.hpp"

#include <cmath>

#include "latparse/error.hpp"
#include "latparse/random.hpp"

namespace latparse {

using Index = Eigen::Index;

void ScorerConfig::validate() const {
  const auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw UsageError(std::string(name) + " must be positive");
  };
  positive(embedding_dim, "embedding_dim");
  positive(shared_rnn_hidden, "shared_rnn_hidden");
  positive(shared_rnn_depth, "shared_rnn_depth");
  positive(branch_rnn_depth, "branch_rnn_depth");
  positive(arc_mlp_size, "arc_mlp_size");
  positive(label_mlp_size, "label_mlp_size");
  positive(mtl_linear_size, "mtl_linear_size");
  positive(batch_size, "batch_size");
  const auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) throw UsageError(std::string(name) + " must be in [0, 1)");
  };
  rate(embedding_dropout, "embedding_dropout");
  rate(arc_mlp_dropout, "arc_mlp_dropout");
  rate(label_mlp_dropout, "label_mlp_dropout");
  rate(adam_beta1, "adam_beta1");
  rate(adam_beta2, "adam_beta2");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw UsageError("learning_rate must be >= 0");
  if (!(adam_epsilon > 0.0)) throw UsageError("adam_epsilon must be positive");
  if (!(clip_norm > 0.0)) throw UsageError("clip_norm must be positive");
}

// ---------------------------------------------------------------------------

Scorer::Scorer(const ScorerConfig& config, OutputInventory inventory, std::uint64_t seed)
    : config_(config), inventory_(std::move(inventory)) {
  config_.validate();
  if (inventory_.labels.empty()) throw DataError("scorer needs a non-empty label set");
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    if (!config_.tasks[k]) inventory_.tag_sets[k].clear();
  }

  Rng rng(seed);
  const std::size_t d = config_.embedding_dim;
  const std::size_t branch_in = 2 * config_.shared_rnn_hidden;
  const std::size_t a = config_.arc_mlp_size;
  const std::size_t b = config_.label_mlp_size;
  const Index labels = static_cast<Index>(inventory_.labels.size());

  virtual_offset_ = Parameter("virtual_offset", Matrix::Zero(2, static_cast<Index>(d)));
  shared_ = BiLstm("shared", d, config_.shared_rnn_hidden, config_.shared_rnn_depth, rng);
  arc_branch_ = BiLstm("arc_branch", branch_in, config_.shared_rnn_hidden, config_.branch_rnn_depth, rng);
  mtl_branch_ = BiLstm("mtl_branch", branch_in, config_.shared_rnn_hidden, config_.branch_rnn_depth, rng);
  arc_dep_ = Linear("arc_dep", branch_in, a, rng);
  arc_head_ = Linear("arc_head", branch_in, a, rng);
  label_dep_ = Linear("label_dep", branch_in, b, rng);
  label_head_ = Linear("label_head", branch_in, b, rng);

  Matrix u(static_cast<Index>(a), static_cast<Index>(a));
  xavier_uniform(u, rng);
  arc_u_ = Parameter("arc_u", std::move(u));
  arc_w_ = Parameter("arc_w", Matrix::Zero(static_cast<Index>(a), 1));

  const Index bb = static_cast<Index>(b + 1);
  Matrix lu(bb, labels * bb);
  for (Index l = 0; l < labels; ++l) {
    Matrix block(bb, bb);
    xavier_uniform(block, rng);
    lu.middleCols(l * bb, bb) = block;
  }
  label_u_ = Parameter("label_u", std::move(lu));

  mtl_reduce_ = Linear("mtl_reduce", branch_in, config_.mtl_linear_size, rng);
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    if (!inventory_.tag_sets[k].empty()) {
      mtl_heads_[k].emplace("mtl_" + std::string(kTaskNames[k]), config_.mtl_linear_size,
                            inventory_.tag_sets[k].size(), rng);
    }
  }
}

namespace {

Matrix with_ones(const Matrix& m) {
  Matrix out(m.rows(), m.cols() + 1);
  out.leftCols(m.cols()) = m;
  out.col(m.cols()).setOnes();
  return out;
}

}  // namespace

ScoreSet Scorer::forward(const Matrix& embeddings, Mode mode, std::uint64_t dropout_seed, ScorerCache* cache) const {
  const Index n = embeddings.rows();
  if (static_cast<std::size_t>(embeddings.cols()) != config_.embedding_dim) {
    throw DataError("embedding dimension " + std::to_string(embeddings.cols()) + " does not match configured " +
                    std::to_string(config_.embedding_dim));
  }
  if (n < 3) throw DataError("scorer input needs ROOT, AUX and at least one segment");

  const bool train = mode == Mode::Train;
  Rng rng(dropout_seed);
  ScorerCache local;
  ScorerCache& c = cache != nullptr ? *cache : local;
  c.train = train;

  Matrix x = embeddings;
  if (config_.virtual_offset) x.topRows(2) += virtual_offset_.value;
  if (train && config_.embedding_dropout > 0.0) {
    c.input_mask = dropout_mask(n, x.cols(), config_.embedding_dropout, rng);
    x.array() *= c.input_mask.array();
  } else {
    c.input_mask.resize(0, 0);
  }
  c.input = std::move(x);

  const bool keep = cache != nullptr;
  c.shared_out = shared_.forward(c.input, keep ? &c.shared : nullptr);
  c.arc_out = arc_branch_.forward(c.shared_out, keep ? &c.arc_branch : nullptr);
  c.mtl_out = mtl_branch_.forward(c.shared_out, keep ? &c.mtl_branch : nullptr);

  const auto mlp = [&](const Linear& layer, double rate, Matrix& pre, Matrix& mask) {
    pre = layer.forward(c.arc_out);
    Matrix act = leaky_relu(pre);
    if (train && rate > 0.0) {
      mask = dropout_mask(act.rows(), act.cols(), rate, rng);
      act.array() *= mask.array();
    } else {
      mask.resize(0, 0);
    }
    return act;
  };
  c.arc_dep = mlp(arc_dep_, config_.arc_mlp_dropout, c.arc_dep_pre, c.arc_dep_mask);
  c.arc_head = mlp(arc_head_, config_.arc_mlp_dropout, c.arc_head_pre, c.arc_head_mask);
  c.label_dep_aug = with_ones(mlp(label_dep_, config_.label_mlp_dropout, c.label_dep_pre, c.label_dep_mask));
  c.label_head_aug = with_ones(mlp(label_head_, config_.label_mlp_dropout, c.label_head_pre, c.label_head_mask));

  ScoreSet out;
  out.head_scores = c.arc_dep * arc_u_.value * c.arc_head.transpose();
  out.head_scores.rowwise() += (c.arc_head * arc_w_.value).col(0).transpose();

  const Index bb = c.label_dep_aug.cols();
  const std::size_t labels = inventory_.labels.size();
  c.label_proj = c.label_dep_aug * label_u_.value;
  out.label_scores.resize(labels);
  for (std::size_t l = 0; l < labels; ++l) {
    out.label_scores[l] = c.label_proj.middleCols(static_cast<Index>(l) * bb, bb) * c.label_head_aug.transpose();
  }

  c.mtl_reduced = mtl_reduce_.forward(c.mtl_out);
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    out.mtl_logits[k] = mtl_heads_[k] ? mtl_heads_[k]->forward(c.mtl_reduced) : Matrix(n, 0);
  }
  return out;
}

Matrix Scorer::backward(const ScorerCache& c, const ScoreSet& grad) {
  const Index bb = c.label_dep_aug.cols();
  const Index b = bb - 1;

  // Arc biaffine.
  const Matrix& g_head = grad.head_scores;
  Matrix d_arc_dep = g_head * c.arc_head * arc_u_.value.transpose();
  Matrix d_arc_head = g_head.transpose() * c.arc_dep * arc_u_.value;
  arc_u_.grad.noalias() += c.arc_dep.transpose() * g_head * c.arc_head;
  const Vector col_sums = g_head.colwise().sum().transpose();
  arc_w_.grad.col(0).noalias() += c.arc_head.transpose() * col_sums;
  d_arc_head.noalias() += col_sums * arc_w_.value.col(0).transpose();

  // Label biaffine.
  Matrix d_proj(c.label_proj.rows(), c.label_proj.cols());
  Matrix d_label_head_aug = Matrix::Zero(c.label_head_aug.rows(), bb);
  for (std::size_t l = 0; l < grad.label_scores.size(); ++l) {
    const Index off = static_cast<Index>(l) * bb;
    const Matrix& g = grad.label_scores[l];
    d_proj.middleCols(off, bb).noalias() = g * c.label_head_aug;
    d_label_head_aug.noalias() += g.transpose() * c.label_proj.middleCols(off, bb);
  }
  label_u_.grad.noalias() += c.label_dep_aug.transpose() * d_proj;
  const Matrix d_label_dep_aug = d_proj * label_u_.value.transpose();

  const auto mlp_back = [&](Linear& layer, const Matrix& pre, const Matrix& mask, Matrix dy) {
    if (mask.size() > 0) dy.array() *= mask.array();
    return layer.backward(c.arc_out, leaky_relu_backward(pre, dy));
  };
  Matrix d_arc_out = mlp_back(arc_dep_, c.arc_dep_pre, c.arc_dep_mask, std::move(d_arc_dep));
  d_arc_out += mlp_back(arc_head_, c.arc_head_pre, c.arc_head_mask, std::move(d_arc_head));
  d_arc_out += mlp_back(label_dep_, c.label_dep_pre, c.label_dep_mask, d_label_dep_aug.leftCols(b));
  d_arc_out += mlp_back(label_head_, c.label_head_pre, c.label_head_mask, d_label_head_aug.leftCols(b));

  // Feature heads.
  Matrix d_reduced = Matrix::Zero(c.mtl_reduced.rows(), c.mtl_reduced.cols());
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    if (mtl_heads_[k]) d_reduced += mtl_heads_[k]->backward(c.mtl_reduced, grad.mtl_logits[k]);
  }
  const Matrix d_mtl_out = mtl_reduce_.backward(c.mtl_out, d_reduced);

  Matrix d_shared = arc_branch_.backward(c.arc_branch, d_arc_out);
  d_shared += mtl_branch_.backward(c.mtl_branch, d_mtl_out);
  Matrix d_input = shared_.backward(c.shared, d_shared);
  if (c.input_mask.size() > 0) d_input.array() *= c.input_mask.array();
  if (config_.virtual_offset) virtual_offset_.grad += d_input.topRows(2);
  return d_input;
}

std::vector<Parameter*> Scorer::parameters() {
  std::vector<Parameter*> out;
  if (config_.virtual_offset) out.push_back(&virtual_offset_);
  shared_.collect(out);
  arc_branch_.collect(out);
  mtl_branch_.collect(out);
  arc_dep_.collect(out);
  arc_head_.collect(out);
  label_dep_.collect(out);
  label_head_.collect(out);
  out.push_back(&arc_u_);
  out.push_back(&arc_w_);
  out.push_back(&label_u_);
  mtl_reduce_.collect(out);
  for (auto& head : mtl_heads_) {
    if (head) head->collect(out);
  }
  return out;
}

std::vector<const Parameter*> Scorer::parameters() const {
  const auto mutable_params = const_cast<Scorer*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

void Scorer::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

Parameter* Scorer::find_parameter(const std::string& name) {
  for (Parameter* p : parameters()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& other) {
  head += other.head;
  label += other.label;
  for (std::size_t k = 0; k < kTaskCount; ++k) tasks[k] += other.tasks[k];
  total += other.total;
  return *this;
}

void LossCounts::add(const GoldTargets& gold) {
  for (std::size_t pos = 0; pos < gold.size(); ++pos) {
    if (gold.gold_head[pos] != kNpos) ++head;
    if (gold.gold_head[pos] != kNpos && gold.gold_label[pos] != kNpos) ++label;
    for (std::size_t k = 0; k < kTaskCount; ++k) {
      if (gold.loss_mask[k][pos]) ++tasks[k];
    }
  }
}

LossCounts LossCounts::of(const GoldTargets& gold) {
  LossCounts c;
  c.add(gold);
  return c;
}

namespace {

/// -log softmax(row)[target]; writes (softmax - onehot) * scale into `g`.
template <typename Row, typename GradRow>
double cross_entropy(const Row& row, std::size_t target, double scale, GradRow&& g) {
  const double mx = row.maxCoeff();
  const Eigen::RowVectorXd e = (row.array() - mx).exp().matrix();
  const double z = e.sum();
  if (scale != 0.0) {
    g = e * (scale / z);
    g(static_cast<Index>(target)) -= scale;
  }
  return -(row(static_cast<Index>(target)) - mx - std::log(z));
}

}  // namespace

LossBreakdown compute_loss(const ScoreSet& scores, const GoldTargets& gold, const LossCounts& norm, ScoreSet* grad) {
  const Index n = static_cast<Index>(scores.node_count());
  if (gold.size() != scores.node_count()) {
    throw DataError("gold targets cover " + std::to_string(gold.size()) + " nodes, scores " + std::to_string(n));
  }
  if (grad != nullptr) {
    grad->head_scores = Matrix::Zero(n, n);
    grad->label_scores.assign(scores.label_count(), Matrix::Zero(n, n));
    for (std::size_t k = 0; k < kTaskCount; ++k) {
      grad->mtl_logits[k] = Matrix::Zero(scores.mtl_logits[k].rows(), scores.mtl_logits[k].cols());
    }
  }
  const auto inv = [](std::size_t count) { return count == 0 ? 0.0 : 1.0 / static_cast<double>(count); };
  const double head_scale = inv(norm.head);
  const double label_scale = inv(norm.label);

  LossBreakdown out;
  const std::size_t labels = scores.label_count();
  Eigen::RowVectorXd label_row(static_cast<Index>(labels));
  Eigen::RowVectorXd label_grad(static_cast<Index>(labels));
  for (Index d = 0; d < n; ++d) {
    const std::size_t h = gold.gold_head[static_cast<std::size_t>(d)];
    if (h == kNpos) continue;
    if (grad != nullptr) {
      out.head += head_scale * cross_entropy(scores.head_scores.row(d), h, head_scale, grad->head_scores.row(d));
    } else {
      out.head += head_scale * cross_entropy(scores.head_scores.row(d), h, 0.0, label_grad);
    }

    const std::size_t l = gold.gold_label[static_cast<std::size_t>(d)];
    if (l == kNpos) continue;
    for (std::size_t k = 0; k < labels; ++k) {
      label_row(static_cast<Index>(k)) = scores.label_scores[k](d, static_cast<Index>(h));
    }
    out.label += label_scale * cross_entropy(label_row, l, grad != nullptr ? label_scale : 0.0, label_grad);
    if (grad != nullptr) {
      for (std::size_t k = 0; k < labels; ++k) {
        grad->label_scores[k](d, static_cast<Index>(h)) += label_grad(static_cast<Index>(k));
      }
    }
  }

  for (std::size_t k = 0; k < kTaskCount; ++k) {
    const Matrix& logits = scores.mtl_logits[k];
    if (logits.cols() == 0) continue;
    const double scale = inv(norm.tasks[k]);
    Eigen::RowVectorXd scratch(logits.cols());
    for (Index d = 0; d < n; ++d) {
      if (!gold.loss_mask[k][static_cast<std::size_t>(d)]) continue;
      const std::size_t t = gold.gold_tags[k][static_cast<std::size_t>(d)];
      if (grad != nullptr) {
        out.tasks[k] += scale * cross_entropy(logits.row(d), t, scale, grad->mtl_logits[k].row(d));
      } else {
        out.tasks[k] += scale * cross_entropy(logits.row(d), t, 0.0, scratch);
      }
    }
  }

  out.total = out.head + out.label;
  for (double t : out.tasks) out.total += t;
  return out;
}

LossBreakdown compute_loss(const ScoreSet& scores, const GoldTargets& gold, ScoreSet* grad) {
  return compute_loss(scores, gold, LossCounts::of(gold), grad);
}

}  // namespace latparse
