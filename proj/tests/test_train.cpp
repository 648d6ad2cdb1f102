#include <catch2/catch.hpp>

#include "romshm/nn/train.hpp"

using namespace romshm;
using namespace romshm::nn;

namespace {

/// Linearly separable toy series: the channel mean encodes the class.
data::DatasetD separable_dataset(int count, int classes, std::uint64_t seed, double scale = 1.0) {
  const int len = 16, channels = 2;
  Rng rng(seed);
  data::DatasetD d;
  for (int i = 0; i < count; ++i) {
    data::Instance inst;
    inst.label = static_cast<int>(rng.below(classes));
    inst.recording.resize(len, channels);
    for (int n = 0; n < channels; ++n)
      for (int l = 0; l < len; ++l)
        inst.recording(l, n) =
            scale * (inst.label * 2.0 - classes + 0.3 * rng.gaussian() +
                     0.5 * std::sin(0.4 * l + n));
    inst.fidelity = data::Fidelity::rom;
    d.instances.push_back(std::move(inst));
  }
  d.train_count = count * 3 / 4;
  d.channel_mean = Vec::Zero(channels);
  d.channel_std = Vec::Ones(channels);
  // Standardize from the training split, as the generation pipeline does.
  double mean_acc = 0.0;
  for (int n = 0; n < channels; ++n) {
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < d.train_count; ++i) {
      sum += d.instances[i].recording.col(n).sum();
      sq += d.instances[i].recording.col(n).squaredNorm();
    }
    const double cnt = static_cast<double>(d.train_count) * len;
    d.channel_mean[n] = sum / cnt;
    d.channel_std[n] = std::sqrt(sq / cnt - d.channel_mean[n] * d.channel_mean[n]);
    mean_acc += d.channel_mean[n];
  }
  (void)mean_acc;
  return d;
}

TrainConfig toy_config(int epochs, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.filters = {4, 6, 4};
  cfg.kernels = {4, 3, 3};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("a separable two-class dataset is learned within 50 epochs") {
  const auto dataset = separable_dataset(80, 2, 8);
  auto result = train(dataset, toy_config(50, 1));
  // Training accuracy on the last recorded iterations of the final epoch.
  const auto& acc = result.iteration_accuracy;
  const int batches_per_epoch = (dataset.train_count + 7) / 8;
  double last_epoch_acc = 0.0;
  for (int i = 0; i < batches_per_epoch; ++i)
    last_epoch_acc += acc[acc.size() - 1 - i];
  last_epoch_acc /= batches_per_epoch;
  REQUIRE(last_epoch_acc == Approx(1.0).margin(1e-9));
  REQUIRE(result.best_val_accuracy > 0.9);
}

TEST_CASE("first-iteration loss sits near the uniform-prediction entropy") {
  const int classes = 5;
  const auto dataset = separable_dataset(160, classes, 21);
  auto result = train(dataset, toy_config(1, 3));
  REQUIRE(result.iteration_loss.front() ==
          Approx(std::log(static_cast<double>(classes))).epsilon(0.2));
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto dataset = separable_dataset(40, 2, 5);
  auto a = train(dataset, toy_config(3, 42));
  auto b = train(dataset, toy_config(3, 42));
  REQUIRE(a.model.head_weight == b.model.head_weight);
  REQUIRE(a.model.blocks[0].kernel == b.model.blocks[0].kernel);
  REQUIRE(a.iteration_loss == b.iteration_loss);
  auto c = train(dataset, toy_config(3, 43));
  REQUIRE(a.model.head_weight != c.model.head_weight);
}

TEST_CASE("prediction is invariant under an exact positive rescaling") {
  // Power-of-two scale: standardization absorbs it bit-exactly.
  const auto base = separable_dataset(60, 3, 12);
  const auto scaled = separable_dataset(60, 3, 12, 4.0);
  auto r1 = train(base, toy_config(8, 9));
  auto r2 = train(scaled, toy_config(8, 9));
  for (int i = 0; i < 10; ++i) {
    const int p1 = predict(r1.model, base.instances[i].recording);
    const int p2 = predict(r2.model, scaled.instances[i].recording);
    REQUIRE(p1 == p2);
  }
}

TEST_CASE("divergent training aborts with the iteration index") {
  auto dataset = separable_dataset(40, 2, 7);
  auto cfg = toy_config(10, 2);
  cfg.adam.learning_rate = 1e308;  // overflows the weights into non-finite territory
  REQUIRE_THROWS_AS(train(dataset, cfg), NumericalError);
}

TEST_CASE("checkpoint round-trips through the container") {
  const auto dataset = separable_dataset(40, 2, 15);
  auto result = train(dataset, toy_config(2, 4));
  io::Archive a;
  result.model.save(a);
  a.save("/tmp/romshm_ckpt.bin");
  FcnModel back = FcnModel::load(io::Archive::load("/tmp/romshm_ckpt.bin"));
  REQUIRE(back.head_weight == result.model.head_weight);
  REQUIRE(back.blocks[2].bn.running_var == result.model.blocks[2].bn.running_var);
  REQUIRE(back.input_mean == result.model.input_mean);
  // Same predictions after reload.
  for (int i = 0; i < 5; ++i)
    REQUIRE(predict(back, dataset.instances[i].recording) ==
            predict(result.model, dataset.instances[i].recording));
  std::remove("/tmp/romshm_ckpt.bin");
}
