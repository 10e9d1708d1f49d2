#include "ifcgrl/nn/layers.hpp"

#include <cmath>

namespace ifcgrl::nn {

namespace {

void require(bool ok, NnErrorKind kind, const char* msg) {
  if (!ok) throw NnError(kind, msg);
}

}  // namespace

Linear::Linear(std::size_t in, std::size_t out)
    : weight({out, in}), bias({out}), in_(in), out_(out) {}

void Linear::init(Rng& rng) {
  double bound = std::sqrt(1.0 / static_cast<double>(in_));
  for (double& w : weight.value.raw()) w = rng.uniform(-bound, bound);
  bias.value.fill(0.0);
}

Tensor Linear::forward(const Tensor& x) {
  require(x.rank() == 2 && x.dim(1) == in_, NnErrorKind::shape_mismatch,
          "linear forward: input width mismatch");
  cached_x_ = x;
  std::size_t batch = x.dim(0);
  Tensor y({batch, out_});
  const double* w = weight.value.data();
  const double* b = bias.value.data();
  const double* xd = x.data();
  double* yd = y.data();
  parallel_for(batch, 64, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* xi = xd + i * in_;
      double* yi = yd + i * out_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double* wo = w + o * in_;
        double acc = b[o];
        for (std::size_t k = 0; k < in_; ++k) acc += xi[k] * wo[k];
        yi[o] = acc;
      }
    }
  });
  return y;
}

Tensor Linear::backward(const Tensor& grad_out) {
  require(grad_out.rank() == 2 && grad_out.dim(1) == out_, NnErrorKind::shape_mismatch,
          "linear backward: gradient width mismatch");
  require(!cached_x_.empty() && grad_out.dim(0) == cached_x_.dim(0), NnErrorKind::shape_mismatch,
          "linear backward: no matching forward cache");
  std::size_t batch = grad_out.dim(0);
  const double* g = grad_out.data();
  const double* xd = cached_x_.data();
  const double* w = weight.value.data();

  Tensor grad_x({batch, in_});
  double* gx = grad_x.data();
  parallel_for(batch, 64, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* gi = g + i * out_;
      double* gxi = gx + i * in_;
      for (std::size_t o = 0; o < out_; ++o) {
        double go = gi[o];
        const double* wo = w + o * in_;
        for (std::size_t k = 0; k < in_; ++k) gxi[k] += go * wo[k];
      }
    }
  });

  double* gw = weight.grad.data();
  double* gb = bias.grad.data();
  parallel_for(out_, 16, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t o = lo; o < hi; ++o) {
      double* gwo = gw + o * in_;
      double gbo = 0.0;
      for (std::size_t i = 0; i < batch; ++i) {
        double go = g[i * out_ + o];
        gbo += go;
        const double* xi = xd + i * in_;
        for (std::size_t k = 0; k < in_; ++k) gwo[k] += go * xi[k];
      }
      gb[o] += gbo;
    }
  });
  return grad_x;
}

void Linear::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", &weight});
  out.push_back({prefix + ".bias", &bias});
}

BatchNorm1d::BatchNorm1d(std::size_t features, double momentum, double epsilon)
    : gamma({features}),
      beta({features}),
      running_mean({features}),
      running_var({features}),
      features_(features),
      momentum_(momentum),
      epsilon_(epsilon) {
  gamma.value.fill(1.0);
  beta.value.fill(0.0);
  running_mean.fill(0.0);
  running_var.fill(1.0);
}

Tensor BatchNorm1d::forward(const Tensor& x, bool training) {
  require(x.rank() == 2 && x.dim(1) == features_, NnErrorKind::shape_mismatch,
          "batchnorm forward: feature width mismatch");
  std::size_t batch = x.dim(0);
  cached_training_ = training;

  Tensor y({batch, features_});
  cached_xhat_ = Tensor({batch, features_});
  cached_inv_std_ = Tensor({features_});

  if (training) {
    require(batch >= 2, NnErrorKind::batch_too_small, "batchnorm needs batch >= 2 in train mode");
    for (std::size_t j = 0; j < features_; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < batch; ++i) mean += x(i, j);
      mean /= static_cast<double>(batch);
      double var = 0.0;
      for (std::size_t i = 0; i < batch; ++i) {
        double d = x(i, j) - mean;
        var += d * d;
      }
      var /= static_cast<double>(batch);  // biased, used for normalization
      double inv_std = 1.0 / std::sqrt(var + epsilon_);
      cached_inv_std_.raw()[j] = inv_std;
      for (std::size_t i = 0; i < batch; ++i) {
        double xhat = (x(i, j) - mean) * inv_std;
        cached_xhat_(i, j) = xhat;
        y(i, j) = gamma.value.raw()[j] * xhat + beta.value.raw()[j];
      }
      double unbiased = var * static_cast<double>(batch) / static_cast<double>(batch - 1);
      running_mean.raw()[j] = (1.0 - momentum_) * running_mean.raw()[j] + momentum_ * mean;
      running_var.raw()[j] = (1.0 - momentum_) * running_var.raw()[j] + momentum_ * unbiased;
    }
  } else {
    for (std::size_t j = 0; j < features_; ++j) {
      double inv_std = 1.0 / std::sqrt(running_var.raw()[j] + epsilon_);
      cached_inv_std_.raw()[j] = inv_std;
      double mean = running_mean.raw()[j];
      for (std::size_t i = 0; i < batch; ++i) {
        double xhat = (x(i, j) - mean) * inv_std;
        cached_xhat_(i, j) = xhat;
        y(i, j) = gamma.value.raw()[j] * xhat + beta.value.raw()[j];
      }
    }
  }
  return y;
}

Tensor BatchNorm1d::backward(const Tensor& grad_out) {
  require(grad_out.rank() == 2 && grad_out.dim(1) == features_, NnErrorKind::shape_mismatch,
          "batchnorm backward: gradient width mismatch");
  require(!cached_xhat_.empty() && grad_out.dim(0) == cached_xhat_.dim(0),
          NnErrorKind::shape_mismatch, "batchnorm backward: no matching forward cache");
  std::size_t batch = grad_out.dim(0);
  Tensor grad_x({batch, features_});

  for (std::size_t j = 0; j < features_; ++j) {
    double g = gamma.value.raw()[j];
    double inv_std = cached_inv_std_.raw()[j];
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      double go = grad_out(i, j);
      sum_g += go;
      sum_gx += go * cached_xhat_(i, j);
    }
    gamma.grad.raw()[j] += sum_gx;
    beta.grad.raw()[j] += sum_g;

    if (cached_training_) {
      double n = static_cast<double>(batch);
      for (std::size_t i = 0; i < batch; ++i) {
        double go = grad_out(i, j);
        grad_x(i, j) = g * inv_std / n * (n * go - sum_g - cached_xhat_(i, j) * sum_gx);
      }
    } else {
      for (std::size_t i = 0; i < batch; ++i) {
        grad_x(i, j) = grad_out(i, j) * g * inv_std;
      }
    }
  }
  return grad_x;
}

void BatchNorm1d::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gamma", &gamma});
  out.push_back({prefix + ".beta", &beta});
}

Tensor ReLU::forward(const Tensor& x) {
  mask_ = Tensor(x.shape());
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    bool on = x.raw()[i] > 0.0;  // subgradient 0 at 0
    mask_.raw()[i] = on ? 1.0 : 0.0;
    y.raw()[i] = on ? x.raw()[i] : 0.0;
  }
  return y;
}

Tensor ReLU::backward(const Tensor& grad_out) const {
  require(grad_out.same_shape(mask_), NnErrorKind::shape_mismatch,
          "relu backward: shape mismatch with forward cache");
  Tensor grad_x(grad_out.shape());
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    grad_x.raw()[i] = grad_out.raw()[i] * mask_.raw()[i];
  }
  return grad_x;
}

Tensor maxpool_set_forward(const Tensor& x, std::vector<std::size_t>& argmax_out) {
  require(x.rank() == 3 && x.dim(1) >= 1, NnErrorKind::shape_mismatch,
          "maxpool expects a B x k x f tensor with k >= 1");
  std::size_t batch = x.dim(0), k = x.dim(1), f = x.dim(2);
  Tensor y({batch, f});
  argmax_out.assign(batch * f, 0);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < f; ++j) {
      double best = x(b, 0, j);
      std::size_t best_k = 0;
      for (std::size_t t = 1; t < k; ++t) {
        double v = x(b, t, j);
        if (v > best) {  // strict: first index wins ties
          best = v;
          best_k = t;
        }
      }
      y(b, j) = best;
      argmax_out[b * f + j] = best_k;
    }
  }
  return y;
}

Tensor maxpool_set_backward(const Tensor& grad_out, const std::vector<std::size_t>& argmax,
                            const std::vector<std::size_t>& input_shape) {
  require(input_shape.size() == 3, NnErrorKind::shape_mismatch,
          "maxpool backward: input shape must be rank 3");
  std::size_t batch = input_shape[0], f = input_shape[2];
  require(grad_out.rank() == 2 && grad_out.dim(0) == batch && grad_out.dim(1) == f,
          NnErrorKind::shape_mismatch, "maxpool backward: gradient shape mismatch");
  require(argmax.size() == batch * f, NnErrorKind::shape_mismatch,
          "maxpool backward: argmax size mismatch");
  Tensor grad_x(input_shape);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < f; ++j) {
      grad_x(b, argmax[b * f + j], j) = grad_out(b, j);
    }
  }
  return grad_x;
}

XentResult softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  require(logits.rank() == 2, NnErrorKind::shape_mismatch, "logits must be B x C");
  std::size_t batch = logits.dim(0), classes = logits.dim(1);
  require(labels.size() == batch, NnErrorKind::shape_mismatch,
          "label count does not match batch size");
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw NnError(NnErrorKind::label_out_of_range,
                    "label " + std::to_string(label) + " outside [0, " +
                        std::to_string(classes) + ")");
    }
  }

  XentResult result;
  result.probabilities = Tensor({batch, classes});
  result.grad_logits = Tensor({batch, classes});
  double total = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    double max_logit = logits(i, 0);
    for (std::size_t c = 1; c < classes; ++c) max_logit = std::max(max_logit, logits(i, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(logits(i, c) - max_logit);
    double log_sum = std::log(sum) + max_logit;
    std::size_t y = static_cast<std::size_t>(labels[i]);
    total += log_sum - logits(i, y);
    for (std::size_t c = 0; c < classes; ++c) {
      double p = std::exp(logits(i, c) - log_sum);
      result.probabilities(i, c) = p;
      result.grad_logits(i, c) = (p - (c == y ? 1.0 : 0.0)) / static_cast<double>(batch);
    }
  }
  result.loss = total / static_cast<double>(batch);
  return result;
}

}  // namespace ifcgrl::nn
