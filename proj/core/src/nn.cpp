#include "latparse/nn.hpp"

#include <cmath>

namespace latparse {

using Index = Eigen::Index;

void xavier_uniform(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
  }
}

Matrix dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 - rate;
  const double scale = keep > 0.0 ? 1.0 / keep : 0.0;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) mask(r, c) = rng.uniform() < rate ? 0.0 : scale;
  }
  return mask;
}

Matrix leaky_relu(const Matrix& x) {
  return x.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
}

Matrix leaky_relu_backward(const Matrix& pre, const Matrix& dy) {
  return dy.binaryExpr(pre, [](double g, double v) { return v > 0.0 ? g : kLeakySlope * g; });
}

// ---------------------------------------------------------------------------

Linear::Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng)
    : weight_(name + ".weight", Matrix(static_cast<Index>(out), static_cast<Index>(in))),
      bias_(name + ".bias", Matrix::Zero(static_cast<Index>(out), 1)) {
  xavier_uniform(weight_.value, rng);
}

Matrix Linear::forward(const Matrix& x) const {
  Matrix y = x * weight_.value.transpose();
  y.rowwise() += bias_.value.col(0).transpose();
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight_.grad.noalias() += dy.transpose() * x;
  bias_.grad.col(0) += dy.colwise().sum().transpose();
  return dy * weight_.value;
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

LstmDirection::LstmDirection(const std::string& name, std::size_t in, std::size_t hidden, bool reverse, Rng& rng)
    : w_in_(name + ".w_in", Matrix(static_cast<Index>(4 * hidden), static_cast<Index>(in))),
      w_rec_(name + ".w_rec", Matrix(static_cast<Index>(4 * hidden), static_cast<Index>(hidden))),
      bias_(name + ".bias", Matrix::Zero(static_cast<Index>(4 * hidden), 1)),
      reverse_(reverse) {
  xavier_uniform(w_in_.value, rng);
  xavier_uniform(w_rec_.value, rng);
  bias_.value.block(static_cast<Index>(hidden), 0, static_cast<Index>(hidden), 1).setOnes();
}

Matrix LstmDirection::forward(const Matrix& x, Cache* cache) const {
  const Index n = x.rows();
  const Index h = static_cast<Index>(hidden_dim());
  Matrix pre = w_in_.value * x.transpose();  // 4h x n
  pre.colwise() += bias_.value.col(0);

  Matrix gates(4 * h, n);
  Matrix cell(h, n);
  Matrix hidden(h, n);
  Matrix cell_tanh(h, n);
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  Vector z(4 * h);
  for (Index step = 0; step < n; ++step) {
    const Index t = reverse_ ? n - 1 - step : step;
    z.noalias() = pre.col(t) + w_rec_.value * h_prev;
    for (Index k = 0; k < h; ++k) {
      const double i = sigmoid(z(k));
      const double f = sigmoid(z(h + k));
      const double g = std::tanh(z(2 * h + k));
      const double o = sigmoid(z(3 * h + k));
      const double c = f * c_prev(k) + i * g;
      const double tc = std::tanh(c);
      gates(k, t) = i;
      gates(h + k, t) = f;
      gates(2 * h + k, t) = g;
      gates(3 * h + k, t) = o;
      cell(k, t) = c;
      cell_tanh(k, t) = tc;
      hidden(k, t) = o * tc;
    }
    h_prev = hidden.col(t);
    c_prev = cell.col(t);
  }
  Matrix out = hidden.transpose();
  if (cache != nullptr) {
    cache->input = x;
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->hidden = std::move(hidden);
    cache->cell_tanh = std::move(cell_tanh);
  }
  return out;
}

Matrix LstmDirection::backward(const Cache& cache, const Matrix& dy) {
  const Index n = cache.input.rows();
  const Index h = static_cast<Index>(hidden_dim());
  Matrix dz_all(4 * h, n);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  Vector dz(4 * h);

  for (Index step = n - 1; step >= 0; --step) {
    const Index t = reverse_ ? n - 1 - step : step;
    const Index prev = reverse_ ? t + 1 : t - 1;
    const bool has_prev = step > 0;
    for (Index k = 0; k < h; ++k) {
      const double i = cache.gates(k, t);
      const double f = cache.gates(h + k, t);
      const double g = cache.gates(2 * h + k, t);
      const double o = cache.gates(3 * h + k, t);
      const double tc = cache.cell_tanh(k, t);
      const double c_prev = has_prev ? cache.cell(k, prev) : 0.0;
      const double dh = dy(t, k) + dh_next(k);
      const double dc = dh * o * (1.0 - tc * tc) + dc_next(k);
      dz(k) = dc * g * i * (1.0 - i);
      dz(h + k) = dc * c_prev * f * (1.0 - f);
      dz(2 * h + k) = dc * i * (1.0 - g * g);
      dz(3 * h + k) = dh * tc * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dz_all.col(t) = dz;
    if (has_prev) w_rec_.grad.noalias() += dz * cache.hidden.col(prev).transpose();
    dh_next.noalias() = w_rec_.value.transpose() * dz;
  }
  w_in_.grad.noalias() += dz_all * cache.input;
  bias_.grad.col(0) += dz_all.rowwise().sum();
  return dz_all.transpose() * w_in_.value;
}

void LstmDirection::collect(std::vector<Parameter*>& out) {
  out.push_back(&w_in_);
  out.push_back(&w_rec_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------

BiLstm::BiLstm(const std::string& name, std::size_t in, std::size_t hidden, std::size_t depth, Rng& rng)
    : hidden_(hidden) {
  for (std::size_t layer = 0; layer < depth; ++layer) {
    const std::size_t layer_in = layer == 0 ? in : 2 * hidden;
    const std::string prefix = name + ".l" + std::to_string(layer);
    fwd_.emplace_back(prefix + ".fwd", layer_in, hidden, false, rng);
    bwd_.emplace_back(prefix + ".bwd", layer_in, hidden, true, rng);
  }
}

Matrix BiLstm::forward(const Matrix& x, Cache* cache) const {
  if (cache != nullptr) {
    cache->forward.resize(fwd_.size());
    cache->backward.resize(bwd_.size());
  }
  Matrix current = x;
  const Index h = static_cast<Index>(hidden_);
  for (std::size_t layer = 0; layer < fwd_.size(); ++layer) {
    Matrix out(current.rows(), 2 * h);
    out.leftCols(h) = fwd_[layer].forward(current, cache ? &cache->forward[layer] : nullptr);
    out.rightCols(h) = bwd_[layer].forward(current, cache ? &cache->backward[layer] : nullptr);
    current = std::move(out);
  }
  return current;
}

Matrix BiLstm::backward(const Cache& cache, const Matrix& dy) {
  Matrix grad = dy;
  const Index h = static_cast<Index>(hidden_);
  for (std::size_t layer = fwd_.size(); layer-- > 0;) {
    Matrix dx = fwd_[layer].backward(cache.forward[layer], grad.leftCols(h));
    dx += bwd_[layer].backward(cache.backward[layer], grad.rightCols(h));
    grad = std::move(dx);
  }
  return grad;
}

void BiLstm::collect(std::vector<Parameter*>& out) {
  for (std::size_t layer = 0; layer < fwd_.size(); ++layer) {
    fwd_[layer].collect(out);
    bwd_[layer].collect(out);
  }
}

}  // namespace latparse
