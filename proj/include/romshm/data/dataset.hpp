#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/data/noise.hpp"
#include "romshm/data/sensors.hpp"
#include "romshm/fem/loads.hpp"
#include "romshm/io/container.hpp"
#include "romshm/sampling/lhs.hpp"

namespace romshm::data {

enum class Fidelity { fom = 0, rom = 1 };

inline std::string to_string(Fidelity f) { return f == Fidelity::fom ? "fom" : "rom"; }

/// One labeled sensor recording with its generation provenance.
struct Instance {
  Mat recording;  // L x N0
  int label = 0;
  fem::ParamPoint param;
  Fidelity fidelity = Fidelity::rom;
  double snr = 0.0;  // 0 = noise-free
};

struct GenerationFailure {
  int index = 0;
  std::string message;
};

/// Labeled dataset with its train/validation split and the per-channel
/// standardization statistics computed on the training split.
struct DatasetD {
  std::vector<Instance> instances;
  int train_count = 0;
  Vec channel_mean;
  Vec channel_std;
  std::uint64_t config_hash = 0;
  std::vector<GenerationFailure> failures;

  int total_count() const { return static_cast<int>(instances.size()); }
  int validation_count() const { return total_count() - train_count; }

  std::vector<int> class_counts(int class_count) const {
    std::vector<int> counts(class_count, 0);
    for (const auto& inst : instances) counts[inst.label]++;
    return counts;
  }
};

/// Sensor solver: maps one parameter point to its L x N0 recording matrix.
using SensorSolver = std::function<Mat(const fem::ParamPoint&)>;

namespace detail {

inline void compute_standardization(DatasetD& d) {
  if (d.train_count < 1) throw ConfigError("dataset: empty training split");
  const int n0 = static_cast<int>(d.instances.front().recording.cols());
  const int l = static_cast<int>(d.instances.front().recording.rows());
  d.channel_mean = Vec::Zero(n0);
  d.channel_std = Vec::Zero(n0);
  const double count = static_cast<double>(d.train_count) * l;
  for (int i = 0; i < d.train_count; ++i)
    d.channel_mean += d.instances[i].recording.colwise().sum().transpose() / count;
  for (int i = 0; i < d.train_count; ++i)
    d.channel_std += (d.instances[i].recording.rowwise() - d.channel_mean.transpose())
                         .array()
                         .square()
                         .colwise()
                         .sum()
                         .matrix()
                         .transpose() /
                     count;
  d.channel_std = d.channel_std.cwiseSqrt();
  for (int n = 0; n < n0; ++n)
    if (d.channel_std[n] == 0.0) d.channel_std[n] = 1.0;
}

}  // namespace detail

/// Generate `count` labeled instances: sample a parameter point, solve, and
/// optionally corrupt with noise. Solver failures are recorded with their
/// provenance and generation continues. The split is 75:25 (configurable)
/// over the surviving instances, in generation order.
inline DatasetD generate(int count, const sampling::ParamSpace& space, const SensorSolver& solve,
                         Fidelity fidelity, double snr, std::uint64_t seed,
                         double train_fraction = 0.75) {
  if (count < 1) throw ConfigError("dataset: instance count must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw ConfigError("dataset: train fraction must be in (0, 1]");
  space.validate();

  sampling::ParamSpace seeded = space;
  seeded.seed = seed;
  const Mat block = sampling::lhs(seeded, count);
  const int i_amp = seeded.dim_index("amplitude");
  const int i_freq = seeded.dim_index("load_frequency");
  const int i_delta = seeded.dim_index("damage_level");
  Rng class_rng(derive_seed(seed, 0x67535452ULL));

  DatasetD d;
  d.instances.reserve(count);
  for (int i = 0; i < count; ++i) {
    fem::ParamPoint eta;
    eta.g = sampling::sample_damage(seeded.damage_pdf, class_rng);
    eta.amplitude = block(i, i_amp);
    eta.load_frequency = block(i, i_freq);
    eta.damage_level = eta.g == 0 ? 0.0 : block(i, i_delta);
    try {
      Instance inst;
      inst.recording = solve(eta);
      if (snr > 0.0) {
        Rng noise_rng(derive_seed(seed, 0x4e4f495345ULL + static_cast<std::uint64_t>(i)));
        inst.recording = add_noise(inst.recording, snr, noise_rng);
      }
      inst.label = eta.g;
      inst.param = eta;
      inst.fidelity = fidelity;
      inst.snr = snr;
      d.instances.push_back(std::move(inst));
    } catch (const NumericalError& e) {
      d.failures.push_back({i, e.what()});
    }
  }
  if (d.instances.empty()) throw NumericalError("dataset: every instance failed to generate");
  d.train_count = std::max(1, static_cast<int>(d.instances.size() * train_fraction));
  detail::compute_standardization(d);
  return d;
}

// Serialization. Each split is one self-describing container: the recordings
// are packed column-wise ((L*N0) x count, fixed stride), with labels and
// parameter provenance as the index, plus the generation-config blob.
namespace detail {

inline void save_split(const std::string& path, const DatasetD& d, int begin, int end,
                       const std::string& sidecar) {
  io::Archive a;
  const int l = static_cast<int>(d.instances.front().recording.rows());
  const int n0 = static_cast<int>(d.instances.front().recording.cols());
  const int count = end - begin;
  a.put_scalar("samples_per_channel", l);
  a.put_scalar("channel_count", n0);
  a.put_scalar("instance_count", count);
  Mat packed(static_cast<Eigen::Index>(l) * n0, count);
  std::vector<std::int64_t> labels(count);
  Mat params(count, 4);
  std::vector<std::int64_t> fidelities(count);
  for (int i = 0; i < count; ++i) {
    const Instance& inst = d.instances[begin + i];
    packed.col(i) = Eigen::Map<const Vec>(inst.recording.data(), inst.recording.size());
    labels[i] = inst.label;
    params(i, 0) = inst.param.g;
    params(i, 1) = inst.param.amplitude;
    params(i, 2) = inst.param.load_frequency;
    params(i, 3) = inst.param.damage_level;
    fidelities[i] = static_cast<int>(inst.fidelity);
  }
  a.put_matrix("recordings", packed);
  a.put_indices("labels", labels);
  a.put_matrix("params", params);
  a.put_indices("fidelity", fidelities);
  a.put_scalar("snr", d.instances.front().snr);
  a.put_vector("channel_mean", d.channel_mean);
  a.put_vector("channel_std", d.channel_std);
  a.put_indices("config_hash", {static_cast<std::int64_t>(d.config_hash)});
  a.put_blob("generation_config", sidecar);
  a.save(path);
}

inline void load_split(const std::string& path, DatasetD& d) {
  const io::Archive a = io::Archive::load(path);
  const int l = static_cast<int>(a.get_scalar("samples_per_channel"));
  const int n0 = static_cast<int>(a.get_scalar("channel_count"));
  const int count = static_cast<int>(a.get_scalar("instance_count"));
  const Mat packed = a.get_matrix("recordings");
  const auto labels = a.get_indices("labels");
  const Mat params = a.get_matrix("params");
  const auto fidelities = a.get_indices("fidelity");
  const double snr = a.get_scalar("snr");
  for (int i = 0; i < count; ++i) {
    Instance inst;
    inst.recording = Eigen::Map<const Mat>(packed.col(i).data(), l, n0);
    inst.label = static_cast<int>(labels[i]);
    inst.param.g = static_cast<int>(params(i, 0));
    inst.param.amplitude = params(i, 1);
    inst.param.load_frequency = params(i, 2);
    inst.param.damage_level = params(i, 3);
    inst.fidelity = static_cast<Fidelity>(fidelities[i]);
    inst.snr = snr;
    d.instances.push_back(std::move(inst));
  }
  d.channel_mean = a.get_vector("channel_mean");
  d.channel_std = a.get_vector("channel_std");
  d.config_hash = static_cast<std::uint64_t>(a.get_indices("config_hash").at(0));
}

}  // namespace detail

inline void save_dataset(const DatasetD& d, const std::string& dir,
                         const std::string& sidecar_json) {
  detail::save_split(dir + "/train.bin", d, 0, d.train_count, sidecar_json);
  if (d.validation_count() > 0)
    detail::save_split(dir + "/val.bin", d, d.train_count, d.total_count(), sidecar_json);
  std::ofstream side(dir + "/dataset.json");
  side << sidecar_json;
}

inline DatasetD load_dataset(const std::string& dir, bool with_validation = true) {
  DatasetD d;
  detail::load_split(dir + "/train.bin", d);
  d.train_count = d.total_count();
  if (with_validation) detail::load_split(dir + "/val.bin", d);
  return d;
}

}  // namespace romshm::data
