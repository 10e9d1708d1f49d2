#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifcgrl/nn/tensor.hpp"
#include "ifcgrl/rng.hpp"

namespace ifcgrl::nn {

struct Parameter {
  Tensor value;
  Tensor grad;

  explicit Parameter(std::vector<std::size_t> shape = {})
      : value(shape.empty() ? Tensor() : Tensor(shape)),
        grad(shape.empty() ? Tensor() : Tensor(std::move(shape))) {}

  void zero_grad() { grad.fill(0.0); }
};

struct ParamRef {
  std::string name;
  Parameter* param;
};

// y = x W^T + b. Weight rows are output features, so forward is a dot of
// two contiguous rows per output element.
class Linear {
 public:
  Linear(std::size_t in, std::size_t out);

  // weights uniform in +-sqrt(1/fan_in), biases zero
  void init(Rng& rng);

  Tensor forward(const Tensor& x);
  // Accumulates weight/bias gradients, returns gradient w.r.t. x.
  Tensor backward(const Tensor& grad_out);

  void collect(const std::string& prefix, std::vector<ParamRef>& out);

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  std::size_t parameter_count() const { return in_ * out_ + out_; }

  Parameter weight;  // out x in
  Parameter bias;    // out

 private:
  std::size_t in_, out_;
  Tensor cached_x_;
};

// 1-D batch normalization over features. Train mode normalizes by biased
// batch variance and updates running stats (unbiased variance, momentum m);
// eval mode uses the running stats and never mutates them.
class BatchNorm1d {
 public:
  explicit BatchNorm1d(std::size_t features, double momentum = 0.1, double epsilon = 1e-5);

  Tensor forward(const Tensor& x, bool training);
  Tensor backward(const Tensor& grad_out);

  void collect(const std::string& prefix, std::vector<ParamRef>& out);

  std::size_t features() const { return features_; }
  std::size_t parameter_count() const { return 2 * features_; }

  Parameter gamma;  // scale, init 1
  Parameter beta;   // shift, init 0
  Tensor running_mean;
  Tensor running_var;

 private:
  std::size_t features_;
  double momentum_;
  double epsilon_;
  bool cached_training_ = false;
  Tensor cached_xhat_;
  Tensor cached_inv_std_;  // per feature
};

class ReLU {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out) const;

 private:
  Tensor mask_;
};

// Per-feature max over the middle (set) axis: B x k x f -> B x f.
// argmax_out records the winning k per (b, f); ties go to the first index.
Tensor maxpool_set_forward(const Tensor& x, std::vector<std::size_t>& argmax_out);
Tensor maxpool_set_backward(const Tensor& grad_out, const std::vector<std::size_t>& argmax,
                            const std::vector<std::size_t>& input_shape);

struct XentResult {
  double loss = 0.0;
  Tensor grad_logits;  // (softmax - onehot) / batch
  Tensor probabilities;
};

// Numerically stable softmax + mean cross-entropy over the batch.
XentResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels);

}  // namespace ifcgrl::nn
