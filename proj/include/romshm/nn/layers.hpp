#pragma once

#include <vector>

#include "romshm/common.hpp"

namespace romshm::nn {

// Batches are packed as (B*L) x C matrices, rows grouped per instance, so
// every layer is a single dense operation. Convolutions never read across
// instance boundaries (the im2col pads each instance independently).

/// "Same" padding split: even kernels pad one more sample on the left.
inline int pad_left_of(int kernel_size) { return kernel_size / 2; }

/// Patch matrix for a stride-1 same-padded cross-correlation. Column
/// h * C + c holds input channel c shifted by (h - pad_left) samples.
inline Mat im2col(const Mat& x, int instance_len, int kernel_size) {
  const int rows = static_cast<int>(x.rows());
  const int channels = static_cast<int>(x.cols());
  if (rows % instance_len != 0) throw ConfigError("im2col: batch rows not a multiple of L");
  const int batch = rows / instance_len;
  const int pad_left = pad_left_of(kernel_size);
  Mat xcol = Mat::Zero(rows, static_cast<Eigen::Index>(kernel_size) * channels);
  for (int h = 0; h < kernel_size; ++h) {
    const int shift = h - pad_left;
    const int src_lo = std::max(0, -shift);
    const int src_hi = std::min(instance_len, instance_len - shift);
    if (src_lo >= src_hi) continue;
    const int len = src_hi - src_lo;
    for (int i = 0; i < batch; ++i)
      xcol.block(i * instance_len + src_lo, static_cast<Eigen::Index>(h) * channels, len,
                 channels) = x.block(i * instance_len + src_lo + shift, 0, len, channels);
  }
  return xcol;
}

/// Adjoint of im2col: scatter-add patch gradients back onto the input.
inline Mat col2im(const Mat& dxcol, int instance_len, int kernel_size, int channels) {
  const int rows = static_cast<int>(dxcol.rows());
  const int batch = rows / instance_len;
  const int pad_left = pad_left_of(kernel_size);
  Mat dx = Mat::Zero(rows, channels);
  for (int h = 0; h < kernel_size; ++h) {
    const int shift = h - pad_left;
    const int src_lo = std::max(0, -shift);
    const int src_hi = std::min(instance_len, instance_len - shift);
    if (src_lo >= src_hi) continue;
    const int len = src_hi - src_lo;
    for (int i = 0; i < batch; ++i)
      dx.block(i * instance_len + src_lo + shift, 0, len, channels) +=
          dxcol.block(i * instance_len + src_lo, static_cast<Eigen::Index>(h) * channels, len,
                      channels);
  }
  return dx;
}

/// y = xcol * kernel + bias. The kernel is stored as (H*C_in) x C_out with
/// row index h * C_in + c.
inline Mat conv1d_forward(const Mat& xcol, const Mat& kernel, const Vec& bias) {
  Mat y = xcol * kernel;
  y.rowwise() += bias.transpose();
  return y;
}

inline void conv1d_backward(const Mat& xcol, const Mat& kernel, const Mat& dy, Mat& dkernel,
                            Vec& dbias, Mat& dxcol) {
  dkernel.noalias() = xcol.transpose() * dy;
  dbias = dy.colwise().sum().transpose();
  dxcol.noalias() = dy * kernel.transpose();
}

/// Trainable scale/shift plus running statistics of a per-channel batch norm
/// over the (batch x time) axes.
struct BatchNormState {
  Vec scale;
  Vec shift;
  Vec running_mean;
  Vec running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  static BatchNormState create(int channels, double momentum = 0.1, double epsilon = 1e-5) {
    BatchNormState s;
    s.scale = Vec::Ones(channels);
    s.shift = Vec::Zero(channels);
    s.running_mean = Vec::Zero(channels);
    s.running_var = Vec::Ones(channels);
    s.momentum = momentum;
    s.epsilon = epsilon;
    return s;
  }
};

struct BatchNormCache {
  Mat xhat;
  Vec inv_std;
};

/// Train mode normalizes with the batch statistics and updates the running
/// ones; inference normalizes with the running statistics.
inline Mat batch_norm_forward(const Mat& x, BatchNormState& state, bool train_mode,
                              BatchNormCache* cache = nullptr) {
  const double n = static_cast<double>(x.rows());
  Mat out(x.rows(), x.cols());
  if (train_mode) {
    if (x.rows() < 2) throw ConfigError("batch_norm: train mode needs more than one row");
    const Vec mean = x.colwise().mean().transpose();
    Mat centered = x.rowwise() - mean.transpose();
    const Vec var = centered.array().square().colwise().sum().transpose() / n;
    const Vec inv_std = (var.array() + state.epsilon).sqrt().inverse().matrix();
    Mat xhat = (centered.array().rowwise() * inv_std.transpose().array()).matrix();
    out = (xhat.array().rowwise() * state.scale.transpose().array()).matrix();
    out.rowwise() += state.shift.transpose();
    state.running_mean = (1.0 - state.momentum) * state.running_mean + state.momentum * mean;
    state.running_var = (1.0 - state.momentum) * state.running_var + state.momentum * var;
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = inv_std;
    }
  } else {
    const Vec inv_std = (state.running_var.array() + state.epsilon).sqrt().inverse().matrix();
    out = ((x.rowwise() - state.running_mean.transpose()).array().rowwise() *
           (inv_std.cwiseProduct(state.scale)).transpose().array())
              .matrix();
    out.rowwise() += state.shift.transpose();
  }
  return out;
}

inline void batch_norm_backward(const BatchNormCache& cache, const BatchNormState& state,
                                const Mat& dy, Mat& dx, Vec& dscale, Vec& dshift) {
  const double n = static_cast<double>(dy.rows());
  dscale = (dy.array() * cache.xhat.array()).colwise().sum().transpose();
  dshift = dy.colwise().sum().transpose();
  // dx = inv_std / N * (N dxhat - sum(dxhat) - xhat * sum(dxhat . xhat))
  Mat dxhat = dy.array().rowwise() * state.scale.transpose().array();
  const Vec sum_dxhat = dxhat.colwise().sum().transpose();
  const Vec sum_dxhat_xhat = (dxhat.array() * cache.xhat.array()).colwise().sum().transpose();
  dx = n * dxhat;
  dx.rowwise() -= sum_dxhat.transpose();
  dx -= (cache.xhat.array().rowwise() * sum_dxhat_xhat.transpose().array()).matrix();
  dx.array().rowwise() *= (cache.inv_std / n).transpose().array();
}

inline Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

inline Mat relu_backward(const Mat& activation, const Mat& dy) {
  return (activation.array() > 0.0).select(dy, 0.0);
}

/// Per-channel time average, (B*L) x C -> B x C.
inline Mat gap_forward(const Mat& x, int instance_len) {
  const int batch = static_cast<int>(x.rows()) / instance_len;
  Mat out(batch, x.cols());
  for (int i = 0; i < batch; ++i)
    out.row(i) = x.middleRows(i * instance_len, instance_len).colwise().mean();
  return out;
}

inline Mat gap_backward(const Mat& dgap, int instance_len) {
  const int batch = static_cast<int>(dgap.rows());
  Mat dx(static_cast<Eigen::Index>(batch) * instance_len, dgap.cols());
  for (int i = 0; i < batch; ++i)
    dx.middleRows(i * instance_len, instance_len) =
        (dgap.row(i) / static_cast<double>(instance_len)).replicate(instance_len, 1);
  return dx;
}

/// Row-wise softmax with max-shift.
inline Mat softmax_rows(const Mat& logits) {
  Mat probs(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    probs.row(i) = (logits.row(i).array() - m).exp();
    probs.row(i) /= probs.row(i).sum();
  }
  return probs;
}

/// Mean cross entropy over the batch; log arguments are floored.
inline double cross_entropy_mean(const Mat& probs, const std::vector<int>& labels) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i)
    loss -= std::log(std::max(probs(i, labels[i]), 1e-300));
  return loss / static_cast<double>(probs.rows());
}

/// d(mean CE)/d(logits) = (probs - onehot) / B.
inline Mat softmax_cross_entropy_backward(const Mat& probs, const std::vector<int>& labels) {
  Mat d = probs;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) d(i, labels[i]) -= 1.0;
  return d / static_cast<double>(probs.rows());
}

}  // namespace romshm::nn
