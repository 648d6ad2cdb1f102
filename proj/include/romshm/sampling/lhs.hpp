#pragma once

#include <numeric>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/sampling/param_space.hpp"

namespace romshm::sampling {

/// Latin hypercube sample of the continuous dimensions: one point per
/// equiprobable stratum per dimension, strata permuted independently per
/// dimension. Rows = samples, columns = dimensions. Each dimension draws
/// from its own derived stream, so the matrix is invariant to how many
/// dimensions precede it.
inline Mat lhs(const ParamSpace& space, int count) {
  space.validate();
  if (count < 1) throw ConfigError("lhs: sample count must be >= 1");
  const int q = static_cast<int>(space.dims.size());
  Mat samples(count, q);
  for (int d = 0; d < q; ++d) {
    Rng rng(derive_seed(space.seed, 0x4c48530000ULL + static_cast<std::uint64_t>(d)));
    std::vector<int> strata(count);
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(strata);
    const double lo = space.dims[d].lo;
    const double width = space.dims[d].hi - space.dims[d].lo;
    for (int i = 0; i < count; ++i) {
      const double u = (strata[i] + rng.uniform01()) / count;
      samples(i, d) = lo + width * u;
    }
  }
  return samples;
}

/// Inverse-CDF draw from the discrete damage pdf.
inline int sample_damage(const std::vector<double>& damage_pdf, Rng& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (std::size_t g = 0; g < damage_pdf.size(); ++g) {
    cum += damage_pdf[g];
    if (u < cum) return static_cast<int>(g);
  }
  return static_cast<int>(damage_pdf.size()) - 1;
}

/// Snapshot collection plan: Y parameter samples, X uniformly spaced
/// time-sample indices (1-based, as multiples of dt) inside the snapshot
/// window of window_samples recording instants.
struct SnapshotPlan {
  Mat continuous;               // Y x Q LHS block
  std::vector<int> damage_class;  // per sample
  std::vector<int> time_indices;  // X indices into 1..window_samples
};

inline std::vector<int> uniform_time_indices(int count, int window_samples) {
  if (count > window_samples)
    throw ConfigError("snapshot schedule: X must not exceed the window sample count");
  std::vector<int> idx(count);
  for (int j = 0; j < count; ++j) idx[j] = (j + 1) * window_samples / count;
  return idx;
}

/// Plan for Y samples and X snapshot instants. The damage-class stream is
/// separate from the LHS block; a full round-robin over the classes is
/// prepended so every damage state is sampled at least once (Y >= 1 + G).
inline SnapshotPlan snapshot_schedule(const ParamSpace& space, int param_count, int time_count,
                                      int window_samples) {
  space.validate();
  const int classes = space.damage_class_count();
  if (param_count < classes)
    throw ConfigError("snapshot schedule: Y must be at least 1 + G so every class appears");
  SnapshotPlan plan;
  plan.continuous = lhs(space, param_count);
  plan.time_indices = uniform_time_indices(time_count, window_samples);
  Rng rng(derive_seed(space.seed, 0x67535452ULL));
  plan.damage_class.resize(param_count);
  for (int i = 0; i < param_count; ++i)
    plan.damage_class[i] = i < classes ? i : sample_damage(space.damage_pdf, rng);
  return plan;
}

}  // namespace romshm::sampling
