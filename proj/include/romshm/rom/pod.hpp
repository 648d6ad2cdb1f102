#pragma once

#include <functional>

#include "romshm/common.hpp"

namespace romshm::rom {

/// Orthonormal reduction basis with the singular-value record that produced it.
struct PodBasis {
  Mat basis;            // M x W, orthonormal columns
  Vec singular_values;  // full spectrum of the decomposed matrix, descending
  double achieved_error = 0.0;  // normalized reconstruction error of the truncation
  double eps_tol = 0.0;

  int size() const { return static_cast<int>(basis.cols()); }
  int full_dim() const { return static_cast<int>(basis.rows()); }
};

/// Truncation rule: smallest W with sqrt(sum_{s>W} sigma_s^2 / sum_s sigma_s^2)
/// strictly below eps_tol. Returns {W, achieved_error}.
inline std::pair<int, double> pod_truncation_rank(const Vec& sigma, double eps_tol) {
  const int r = static_cast<int>(sigma.size());
  // Tail sums accumulated from the smallest value for accuracy.
  std::vector<double> tail(r + 1, 0.0);
  for (int s = r - 1; s >= 0; --s) tail[s] = tail[s + 1] + sigma[s] * sigma[s];
  const double total = tail[0];
  if (total <= 0.0) throw NumericalError("pod: snapshot matrix is identically zero");
  for (int w = 1; w <= r; ++w) {
    const double err = std::sqrt(tail[w] / total);
    if (err < eps_tol) return {w, err};
  }
  return {r, 0.0};
}

/// POD of a snapshot matrix via economy-size SVD, truncated by the
/// normalized-reconstruction-error rule.
inline PodBasis pod(const Mat& snapshots, double eps_tol) {
  if (!(eps_tol > 0.0 && eps_tol < 1.0)) throw ConfigError("pod: eps_tol must be in (0, 1)");
  if (snapshots.cols() < 1) throw ConfigError("pod: need at least one snapshot");
  Eigen::BDCSVD<Mat> svd(snapshots, Eigen::ComputeThinU);
  const Vec sigma = svd.singularValues();
  const auto [w, err] = pod_truncation_rank(sigma, eps_tol);
  PodBasis out;
  out.basis = svd.matrixU().leftCols(w);
  out.singular_values = sigma;
  out.achieved_error = err;
  out.eps_tol = eps_tol;
  return out;
}

/// Incremental basis construction over parameter samples tau = 1..Y:
///   W <- POD(S_1); for tau = 2..Y: W_tau <- POD(S_tau); W <- POD([W | W_tau]).
/// The inner and outer PODs share the same tolerance. The per-sample block
/// provider keeps the solver outside; solve failures propagate with the
/// sample index attached.
inline PodBasis incremental_pod(const std::function<Mat(int)>& snapshot_block, int sample_count,
                                double eps_tol) {
  if (sample_count < 1) throw ConfigError("incremental_pod: need at least one sample");
  auto block = [&](int tau) -> Mat {
    try {
      return snapshot_block(tau);
    } catch (const NumericalError& e) {
      throw NumericalError("incremental_pod: snapshot block for sample " + std::to_string(tau) +
                           " failed: " + e.what());
    }
  };
  PodBasis current = pod(block(0), eps_tol);
  for (int tau = 1; tau < sample_count; ++tau) {
    const PodBasis fresh = pod(block(tau), eps_tol);
    Mat merged(current.full_dim(), current.size() + fresh.size());
    merged.leftCols(current.size()) = current.basis;
    merged.rightCols(fresh.size()) = fresh.basis;
    current = pod(merged, eps_tol);
  }
  return current;
}

}  // namespace romshm::rom
