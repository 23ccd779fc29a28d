#pragma once

// Minimal layers with explicit forward/backward passes. Sequences are
// matrices with one row per position. Backward passes accumulate into
// Parameter::grad and return the gradient with respect to their input.

#include <cstddef>
#include <string>
#include <vector>

#include "latparse/linalg.hpp"
#include "latparse/random.hpp"

namespace latparse {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// Uniform in +-sqrt(6 / (fan_in + fan_out)) with fan_in = cols, fan_out = rows.
void xavier_uniform(Matrix& m, Rng& rng);

/// Inverted-dropout mask: entries 0 with probability `rate`, else 1/(1-rate).
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

inline constexpr double kLeakySlope = 0.1;
Matrix leaky_relu(const Matrix& x);
/// dy * f'(pre).
Matrix leaky_relu_backward(const Matrix& pre, const Matrix& dy);

/// y = x W^T + b.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng);

  Matrix forward(const Matrix& x) const;
  Matrix backward(const Matrix& x, const Matrix& dy);

  std::size_t in_dim() const { return static_cast<std::size_t>(weight_.value.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight_.value.rows()); }
  void collect(std::vector<Parameter*>& out);

 private:
  Parameter weight_;  // out x in
  Parameter bias_;    // out x 1
};

/// One direction of an LSTM layer; gate order i, f, g, o.
class LstmDirection {
 public:
  struct Cache {
    Matrix input;   // n x in
    Matrix gates;   // 4h x n, post-activation
    Matrix cell;    // h x n
    Matrix hidden;  // h x n
    Matrix cell_tanh;
  };

  LstmDirection() = default;
  LstmDirection(const std::string& name, std::size_t in, std::size_t hidden, bool reverse, Rng& rng);

  /// n x hidden.
  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dy);

  std::size_t hidden_dim() const { return static_cast<std::size_t>(w_rec_.value.cols()); }
  void collect(std::vector<Parameter*>& out);

 private:
  Parameter w_in_;   // 4h x in
  Parameter w_rec_;  // 4h x h
  Parameter bias_;   // 4h x 1, forget gate initialized to 1
  bool reverse_ = false;
};

/// Stacked bidirectional LSTM; each layer's output concatenates forward and
/// backward states (n x 2h).
class BiLstm {
 public:
  struct Cache {
    std::vector<LstmDirection::Cache> forward;
    std::vector<LstmDirection::Cache> backward;
  };

  BiLstm() = default;
  BiLstm(const std::string& name, std::size_t in, std::size_t hidden, std::size_t depth, Rng& rng);

  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dy);

  std::size_t output_dim() const { return 2 * hidden_; }
  std::size_t depth() const { return fwd_.size(); }
  void collect(std::vector<Parameter*>& out);

 private:
  std::size_t hidden_ = 0;
  std::vector<LstmDirection> fwd_;
  std::vector<LstmDirection> bwd_;
};

}  // namespace latparse
