#include "ifcgrl/nn/optim.hpp"

#include <cmath>

namespace ifcgrl::nn {

Adam::Adam(std::vector<ParamRef> params, const AdamConfig& config)
    : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const ParamRef& ref : params_) {
    m_.emplace_back(ref.param->value.shape());
    v_.emplace_back(ref.param->value.shape());
  }
}

void Adam::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Parameter& param = *params_[p].param;
    if (!param.grad.same_shape(param.value)) {
      throw NnError(NnErrorKind::shape_mismatch, "adam: gradient shape mismatch for " +
                                                     params_[p].name);
    }
    double* value = param.value.data();
    const double* grad = param.grad.data();
    double* m = m_[p].data();
    double* v = v_[p].data();
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      double g = grad[i] + config_.weight_decay * value[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      double m_hat = m[i] / bc1;
      double v_hat = v[i] / bc2;
      value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void Adam::zero_grad() {
  for (const ParamRef& ref : params_) ref.param->zero_grad();
}

}  // namespace ifcgrl::nn
