#pragma once

#include <array>
#include <numeric>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/data/dataset.hpp"
#include "romshm/nn/adam.hpp"
#include "romshm/nn/fcn.hpp"

namespace romshm::nn {

struct TrainConfig {
  int batch_size = 16;
  int epochs = 500;
  std::array<int, 3> filters = {16, 32, 16};
  std::array<int, 3> kernels = {8, 5, 3};
  AdamConfig adam;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    for (int f : filters)
      if (f < 1) throw ConfigError("train: filter counts must be >= 1");
    for (int h : kernels)
      if (h < 1) throw ConfigError("train: kernel sizes must be >= 1");
  }
};

struct TrainResult {
  FcnModel model;  // best-validation checkpoint
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::vector<double> iteration_loss;      // per weight update, training mini-batch
  std::vector<double> iteration_accuracy;
  std::vector<double> epoch_val_loss;      // per epoch, inference mode
  std::vector<double> epoch_val_accuracy;
};

namespace detail {

inline Mat pack_batch(const std::vector<data::Instance>& instances,
                      const std::vector<int>& index, int begin, int end, int instance_len) {
  const int channels = static_cast<int>(instances.front().recording.cols());
  Mat packed(static_cast<Eigen::Index>(end - begin) * instance_len, channels);
  for (int i = begin; i < end; ++i)
    packed.middleRows(static_cast<Eigen::Index>(i - begin) * instance_len, instance_len) =
        instances[index[i]].recording;
  return packed;
}

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Inference-mode loss/accuracy over a contiguous instance range.
inline EvalResult evaluate_range(FcnModel& model, const std::vector<data::Instance>& instances,
                                 int begin, int end, int chunk = 64) {
  const int instance_len = static_cast<int>(instances.front().recording.rows());
  std::vector<int> index(end - begin);
  std::iota(index.begin(), index.end(), begin);
  double loss_sum = 0.0;
  int correct = 0;
  for (int at = 0; at < end - begin; at += chunk) {
    const int stop = std::min(at + chunk, end - begin);
    const Mat packed = pack_batch(instances, index, at, stop, instance_len);
    const Mat probs = forward(model, packed, instance_len, false);
    for (int i = at; i < stop; ++i) {
      const int label = instances[index[i]].label;
      loss_sum -= std::log(std::max(probs(i - at, label), 1e-300));
      if (argmax_lowest(probs.row(i - at)) == label) ++correct;
    }
  }
  const double n = static_cast<double>(end - begin);
  return {loss_sum / n, static_cast<double>(correct) / n};
}

}  // namespace detail

/// Mini-batch training with a validation pass per epoch; the returned model
/// is the best-validation-accuracy checkpoint (earliest epoch on ties).
inline TrainResult train(const data::DatasetD& dataset, const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.train_count < 1) throw ConfigError("train: empty training split");
  const auto& instances = dataset.instances;
  const int instance_len = static_cast<int>(instances.front().recording.rows());
  const int channels = static_cast<int>(instances.front().recording.cols());
  int classes = 0;
  for (const auto& inst : instances) classes = std::max(classes, inst.label + 1);
  classes = std::max(classes, 2);

  TrainResult result;
  FcnModel model = FcnModel::create(channels, classes, cfg.filters, cfg.kernels, cfg.seed,
                                    cfg.bn_momentum, cfg.bn_epsilon);
  model.input_mean = dataset.channel_mean;
  model.input_std = dataset.channel_std;
  AdamOptimizer optimizer(model, cfg.adam);

  std::vector<int> order(dataset.train_count);
  std::iota(order.begin(), order.end(), 0);
  ForwardCache cache;
  result.model = model;
  result.best_val_accuracy = -1.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, 0x45504f43480000ULL + static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);
    for (int at = 0; at < dataset.train_count; at += cfg.batch_size) {
      const int stop = std::min(at + cfg.batch_size, dataset.train_count);
      const Mat packed = detail::pack_batch(instances, order, at, stop, instance_len);
      std::vector<int> labels;
      labels.reserve(stop - at);
      for (int i = at; i < stop; ++i) labels.push_back(instances[order[i]].label);

      const Mat probs = forward(model, packed, instance_len, true, &cache);
      const double loss = cross_entropy_mean(probs, labels);
      if (!std::isfinite(loss))
        throw NumericalError("train: loss diverged at iteration " +
                             std::to_string(result.iteration_loss.size() + 1));
      int correct = 0;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (argmax_lowest(probs.row(static_cast<int>(i))) == labels[i]) ++correct;
      result.iteration_loss.push_back(loss);
      result.iteration_accuracy.push_back(static_cast<double>(correct) / labels.size());

      const FcnGradients grads = backward(model, cache, labels);
      optimizer.step(model, grads);
    }

    if (dataset.validation_count() > 0) {
      const auto val =
          detail::evaluate_range(model, instances, dataset.train_count, dataset.total_count());
      result.epoch_val_loss.push_back(val.loss);
      result.epoch_val_accuracy.push_back(val.accuracy);
      if (val.accuracy > result.best_val_accuracy) {
        result.best_val_accuracy = val.accuracy;
        result.best_epoch = epoch + 1;
        result.model = model;
      }
    } else {
      result.model = model;
      result.best_epoch = epoch + 1;
    }
  }
  return result;
}

}  // namespace romshm::nn
