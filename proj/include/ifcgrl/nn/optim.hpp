#pragma once

#include <cstdint>
#include <vector>

#include "ifcgrl/nn/layers.hpp"

namespace ifcgrl::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // classic L2-on-gradient form
};

// Bias-corrected Adam over a fixed parameter registry.
class Adam {
 public:
  Adam(std::vector<ParamRef> params, const AdamConfig& config);

  void step();
  void zero_grad();
  std::int64_t timestep() const { return t_; }

 private:
  std::vector<ParamRef> params_;
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace ifcgrl::nn
