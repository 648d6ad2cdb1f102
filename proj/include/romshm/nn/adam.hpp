#pragma once

#include "romshm/common.hpp"
#include "romshm/nn/fcn.hpp"

namespace romshm::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update of one tensor. `t` is the 1-based step count.
template <typename TensorT>
void adam_step(TensorT& param, const TensorT& grad, TensorT& m, TensorT& v, long t,
               const AdamConfig& cfg) {
  if (t < 1) throw ConfigError("adam: step count must be >= 1");
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = (cfg.beta2 * v.array() + (1.0 - cfg.beta2) * grad.array().square()).matrix();
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  param -= (cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon))
               .matrix();
}

/// Adam over the whole model; the moment buffers mirror the parameter
/// tensors and the update order is fixed.
class AdamOptimizer {
 public:
  AdamOptimizer(const FcnModel& model, AdamConfig cfg) : cfg_(cfg) {
    for (const auto& b : model.blocks) {
      m_.kernel.push_back(Mat::Zero(b.kernel.rows(), b.kernel.cols()));
      m_.bias.push_back(Vec::Zero(b.bias.size()));
      m_.bn_scale.push_back(Vec::Zero(b.bn.scale.size()));
      m_.bn_shift.push_back(Vec::Zero(b.bn.shift.size()));
    }
    m_.head_weight = Mat::Zero(model.head_weight.rows(), model.head_weight.cols());
    m_.head_bias = Vec::Zero(model.head_bias.size());
    v_ = m_;
  }

  void step(FcnModel& model, const FcnGradients& g) {
    ++t_;
    for (std::size_t k = 0; k < model.blocks.size(); ++k) {
      auto& b = model.blocks[k];
      adam_step(b.kernel, g.kernel[k], m_.kernel[k], v_.kernel[k], t_, cfg_);
      adam_step(b.bias, g.bias[k], m_.bias[k], v_.bias[k], t_, cfg_);
      adam_step(b.bn.scale, g.bn_scale[k], m_.bn_scale[k], v_.bn_scale[k], t_, cfg_);
      adam_step(b.bn.shift, g.bn_shift[k], m_.bn_shift[k], v_.bn_shift[k], t_, cfg_);
    }
    adam_step(model.head_weight, g.head_weight, m_.head_weight, v_.head_weight, t_, cfg_);
    adam_step(model.head_bias, g.head_bias, m_.head_bias, v_.head_bias, t_, cfg_);
  }

  long step_count() const { return t_; }

 private:
  AdamConfig cfg_;
  FcnGradients m_;
  FcnGradients v_;
  long t_ = 0;
};

}  // namespace romshm::nn
