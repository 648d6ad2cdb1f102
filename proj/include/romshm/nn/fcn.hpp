#pragma once

#include <array>
#include <string>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/io/container.hpp"
#include "romshm/nn/layers.hpp"

namespace romshm::nn {

/// One conv block: cross-correlation kernels, per-channel bias, batch norm.
struct ConvBlock {
  Mat kernel;  // (H * C_in) x C_out
  Vec bias;    // C_out
  BatchNormState bn;
  int kernel_size = 0;
  int in_channels = 0;
  int out_channels = 0;
};

/// The classifier: three conv/BN/ReLU blocks, global average pooling, a
/// linear head and softmax. Input standardization statistics travel with the
/// model so raw recordings can be classified directly.
struct FcnModel {
  std::vector<ConvBlock> blocks;
  Mat head_weight;  // N3 x classes
  Vec head_bias;    // classes
  Vec input_mean;   // per input channel
  Vec input_std;

  int class_count() const { return static_cast<int>(head_weight.cols()); }
  int input_channels() const { return blocks.empty() ? 0 : blocks.front().in_channels; }

  /// Fan-in-scaled uniform initialization, deterministic under the seed.
  static FcnModel create(int input_channels, int class_count, const std::array<int, 3>& filters,
                         const std::array<int, 3>& kernels, std::uint64_t seed,
                         double bn_momentum = 0.1, double bn_epsilon = 1e-5) {
    if (input_channels < 1 || class_count < 2)
      throw ConfigError("fcn: need at least one input channel and two classes");
    FcnModel m;
    Rng rng(derive_seed(seed, 0x46434e494e4954ULL));
    int c_in = input_channels;
    for (int k = 0; k < 3; ++k) {
      ConvBlock b;
      b.kernel_size = kernels[k];
      b.in_channels = c_in;
      b.out_channels = filters[k];
      const int fan_in = b.kernel_size * c_in;
      const double bound = std::sqrt(6.0 / fan_in);
      b.kernel.resize(static_cast<Eigen::Index>(b.kernel_size) * c_in, b.out_channels);
      for (Eigen::Index j = 0; j < b.kernel.cols(); ++j)
        for (Eigen::Index i = 0; i < b.kernel.rows(); ++i)
          b.kernel(i, j) = rng.uniform(-bound, bound);
      b.bias = Vec::Zero(b.out_channels);
      b.bn = BatchNormState::create(b.out_channels, bn_momentum, bn_epsilon);
      m.blocks.push_back(std::move(b));
      c_in = filters[k];
    }
    const double head_bound = std::sqrt(6.0 / (c_in + class_count));
    m.head_weight.resize(c_in, class_count);
    for (Eigen::Index j = 0; j < class_count; ++j)
      for (Eigen::Index i = 0; i < c_in; ++i) m.head_weight(i, j) = rng.uniform(-head_bound, head_bound);
    m.head_bias = Vec::Zero(class_count);
    m.input_mean = Vec::Zero(input_channels);
    m.input_std = Vec::Ones(input_channels);
    return m;
  }

  Mat standardize(const Mat& raw) const {
    return ((raw.rowwise() - input_mean.transpose()).array().rowwise() /
            input_std.transpose().array())
        .matrix();
  }

  void save(io::Archive& a, const std::string& prefix = "fcn/") const {
    a.put_scalar(prefix + "block_count", static_cast<double>(blocks.size()));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto& b = blocks[k];
      const std::string p = prefix + "block" + std::to_string(k) + "/";
      a.put_scalar(p + "kernel_size", b.kernel_size);
      a.put_scalar(p + "in_channels", b.in_channels);
      a.put_scalar(p + "out_channels", b.out_channels);
      a.put_matrix(p + "kernel", b.kernel);
      a.put_vector(p + "bias", b.bias);
      a.put_vector(p + "bn_scale", b.bn.scale);
      a.put_vector(p + "bn_shift", b.bn.shift);
      a.put_vector(p + "bn_running_mean", b.bn.running_mean);
      a.put_vector(p + "bn_running_var", b.bn.running_var);
      a.put_scalar(p + "bn_momentum", b.bn.momentum);
      a.put_scalar(p + "bn_epsilon", b.bn.epsilon);
    }
    a.put_matrix(prefix + "head_weight", head_weight);
    a.put_vector(prefix + "head_bias", head_bias);
    a.put_vector(prefix + "input_mean", input_mean);
    a.put_vector(prefix + "input_std", input_std);
  }

  static FcnModel load(const io::Archive& a, const std::string& prefix = "fcn/") {
    FcnModel m;
    const int count = static_cast<int>(a.get_scalar(prefix + "block_count"));
    for (int k = 0; k < count; ++k) {
      const std::string p = prefix + "block" + std::to_string(k) + "/";
      ConvBlock b;
      b.kernel_size = static_cast<int>(a.get_scalar(p + "kernel_size"));
      b.in_channels = static_cast<int>(a.get_scalar(p + "in_channels"));
      b.out_channels = static_cast<int>(a.get_scalar(p + "out_channels"));
      b.kernel = a.get_matrix(p + "kernel");
      b.bias = a.get_vector(p + "bias");
      b.bn.scale = a.get_vector(p + "bn_scale");
      b.bn.shift = a.get_vector(p + "bn_shift");
      b.bn.running_mean = a.get_vector(p + "bn_running_mean");
      b.bn.running_var = a.get_vector(p + "bn_running_var");
      b.bn.momentum = a.get_scalar(p + "bn_momentum");
      b.bn.epsilon = a.get_scalar(p + "bn_epsilon");
      m.blocks.push_back(std::move(b));
    }
    m.head_weight = a.get_matrix(prefix + "head_weight");
    m.head_bias = a.get_vector(prefix + "head_bias");
    m.input_mean = a.get_vector(prefix + "input_mean");
    m.input_std = a.get_vector(prefix + "input_std");
    return m;
  }
};

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
  std::vector<Mat> xcol;        // per block
  std::vector<BatchNormCache> bn;
  std::vector<Mat> activation;  // post-ReLU, per block
  Mat gap_out;                  // B x N3
  Mat probs;                    // B x classes
  int instance_len = 0;
};

/// Forward pass over a packed batch of raw recordings ((B*L) x N0). In train
/// mode the batch-norm running statistics are updated and a cache must be
/// supplied for the backward pass.
inline Mat forward(FcnModel& model, const Mat& raw_batch, int instance_len, bool train_mode,
                   ForwardCache* cache = nullptr) {
  Mat x = model.standardize(raw_batch);
  if (cache) {
    cache->xcol.clear();
    cache->bn.clear();
    cache->activation.clear();
    cache->instance_len = instance_len;
  }
  for (std::size_t k = 0; k < model.blocks.size(); ++k) {
    auto& b = model.blocks[k];
    Mat xcol = im2col(x, instance_len, b.kernel_size);
    Mat y = conv1d_forward(xcol, b.kernel, b.bias);
    BatchNormCache bn_cache;
    y = batch_norm_forward(y, b.bn, train_mode, cache ? &bn_cache : nullptr);
    x = relu(y);
    if (!x.allFinite())
      throw NumericalError("fcn forward: non-finite activations after block " + std::to_string(k));
    if (cache) {
      cache->xcol.push_back(std::move(xcol));
      cache->bn.push_back(std::move(bn_cache));
      cache->activation.push_back(x);
    }
  }
  const Mat pooled = gap_forward(x, instance_len);
  Mat logits = pooled * model.head_weight;
  logits.rowwise() += model.head_bias.transpose();
  Mat probs = softmax_rows(logits);
  if (cache) {
    cache->gap_out = pooled;
    cache->probs = probs;
  }
  return probs;
}

/// Gradients of the mean batch cross entropy for every trainable tensor.
struct FcnGradients {
  std::vector<Mat> kernel;
  std::vector<Vec> bias;
  std::vector<Vec> bn_scale;
  std::vector<Vec> bn_shift;
  Mat head_weight;
  Vec head_bias;
};

inline FcnGradients backward(const FcnModel& model, const ForwardCache& cache,
                             const std::vector<int>& labels) {
  const int blocks = static_cast<int>(model.blocks.size());
  FcnGradients g;
  g.kernel.resize(blocks);
  g.bias.resize(blocks);
  g.bn_scale.resize(blocks);
  g.bn_shift.resize(blocks);

  const Mat dlogits = softmax_cross_entropy_backward(cache.probs, labels);
  g.head_weight = cache.gap_out.transpose() * dlogits;
  g.head_bias = dlogits.colwise().sum().transpose();
  Mat dgap = dlogits * model.head_weight.transpose();
  Mat dx = gap_backward(dgap, cache.instance_len);

  for (int k = blocks - 1; k >= 0; --k) {
    const auto& b = model.blocks[k];
    const Mat drelu = relu_backward(cache.activation[k], dx);
    Mat dconv;
    batch_norm_backward(cache.bn[k], b.bn, drelu, dconv, g.bn_scale[k], g.bn_shift[k]);
    Mat dxcol;
    conv1d_backward(cache.xcol[k], b.kernel, dconv, g.kernel[k], g.bias[k], dxcol);
    if (k > 0) dx = col2im(dxcol, cache.instance_len, b.kernel_size, b.in_channels);
  }
  return g;
}

/// Highest-probability class; ties resolve to the lowest class index.
inline int argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (int j = 1; j < row.size(); ++j)
    if (row[j] > row[best]) best = j;
  return best;
}

/// Classify one raw recording (L x N0).
inline int predict(FcnModel& model, const Mat& recording) {
  const Mat probs = forward(model, recording, static_cast<int>(recording.rows()), false);
  return argmax_lowest(probs.row(0));
}

/// Class probabilities for one raw recording.
inline Vec predict_probabilities(FcnModel& model, const Mat& recording) {
  const Mat probs = forward(model, recording, static_cast<int>(recording.rows()), false);
  return probs.row(0).transpose();
}

}  // namespace romshm::nn
