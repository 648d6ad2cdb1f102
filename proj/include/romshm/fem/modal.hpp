#pragma once

#include <vector>

#include "romshm/common.hpp"

namespace romshm::fem {

/// Smallest `count` natural frequencies (Hz) of K v = lambda M v. Dense
/// generalized eigensolve; the constrained pair must be positive definite.
inline std::vector<double> natural_frequencies(const Mat& mass, const Mat& stiffness, int count) {
  if (count < 1) throw ConfigError("natural_frequencies: count must be >= 1");
  if (mass.rows() != stiffness.rows())
    throw ConfigError("natural_frequencies: dimension mismatch");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(stiffness, mass,
                                                       Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success)
    throw NumericalError("natural_frequencies: eigensolver did not converge");
  const Vec lambda = solver.eigenvalues();
  const int n = std::min<int>(count, static_cast<int>(lambda.size()));
  std::vector<double> freqs(n);
  for (int i = 0; i < n; ++i) {
    if (lambda[i] < -1e-9 * std::abs(lambda[lambda.size() - 1]))
      throw NumericalError("natural_frequencies: negative eigenvalue, pair not SPD");
    freqs[i] = std::sqrt(std::max(0.0, lambda[i])) / (2.0 * M_PI);
  }
  return freqs;
}

inline std::vector<double> natural_frequencies(const SpMat& mass, const SpMat& stiffness,
                                               int count) {
  return natural_frequencies(Mat(mass), Mat(stiffness), count);
}

}  // namespace romshm::fem
