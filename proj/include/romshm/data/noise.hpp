#pragma once

#include <vector>

#include "romshm/common.hpp"

namespace romshm::data {

/// Additive white Gaussian noise sized per channel so that
/// mean(u_n^2) / sigma_n^2 equals the requested signal-to-noise power ratio.
/// All-zero channels are left untouched and reported through zero_channels.
inline Mat add_noise(const Mat& recording, double snr, Rng& rng,
                     std::vector<int>* zero_channels = nullptr) {
  if (!(snr > 0.0)) throw ConfigError("add_noise: snr must be > 0");
  Mat out = recording;
  const auto rows = recording.rows();
  for (Eigen::Index n = 0; n < recording.cols(); ++n) {
    const double power = recording.col(n).squaredNorm() / static_cast<double>(rows);
    if (power == 0.0) {
      if (zero_channels) zero_channels->push_back(static_cast<int>(n));
      continue;
    }
    const double sigma = std::sqrt(power / snr);
    for (Eigen::Index l = 0; l < rows; ++l) out(l, n) += sigma * rng.gaussian();
  }
  return out;
}

}  // namespace romshm::data
