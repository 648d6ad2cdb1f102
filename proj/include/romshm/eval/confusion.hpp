#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/data/dataset.hpp"
#include "romshm/nn/fcn.hpp"

namespace romshm::eval {

/// Rows = true class, columns = predicted class.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(int class_count = 0)
      : counts(Eigen::MatrixXi::Zero(class_count, class_count)) {}

  int class_count() const { return static_cast<int>(counts.rows()); }
  int total() const { return counts.sum(); }

  void add(int true_class, int predicted_class) { counts(true_class, predicted_class)++; }

  double global_accuracy() const {
    const int t = total();
    if (t == 0) throw ConfigError("confusion matrix: no observations");
    return static_cast<double>(counts.trace()) / t;
  }

  /// Row-normalized percentages; rows with no observations stay zero.
  Mat row_percentages() const {
    Mat p = Mat::Zero(counts.rows(), counts.cols());
    for (int i = 0; i < counts.rows(); ++i) {
      const int row_sum = counts.row(i).sum();
      if (row_sum > 0)
        p.row(i) = 100.0 * counts.row(i).cast<double>() / static_cast<double>(row_sum);
    }
    return p;
  }

  /// Damaged instances predicted as class 0 (the misclassification the
  /// monitoring system must avoid).
  int damaged_as_undamaged() const {
    int n = 0;
    for (int i = 1; i < counts.rows(); ++i) n += counts(i, 0);
    return n;
  }

  /// Aligned text table, orientation stated in the header.
  std::string to_text() const {
    std::ostringstream out;
    out << "confusion matrix (rows = true class, columns = predicted class)\n";
    out << std::setw(8) << "";
    for (int j = 0; j < counts.cols(); ++j) out << std::setw(8) << ("pred " + std::to_string(j));
    out << "\n";
    for (int i = 0; i < counts.rows(); ++i) {
      out << std::setw(8) << ("true " + std::to_string(i));
      for (int j = 0; j < counts.cols(); ++j) out << std::setw(8) << counts(i, j);
      out << "\n";
    }
    out << "global accuracy: " << std::fixed << std::setprecision(2) << 100.0 * global_accuracy()
        << " %\n";
    return out.str();
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "true_class";
    for (int j = 0; j < counts.cols(); ++j) out << ",pred_" << j;
    out << "\n";
    for (int i = 0; i < counts.rows(); ++i) {
      out << i;
      for (int j = 0; j < counts.cols(); ++j) out << "," << counts(i, j);
      out << "\n";
    }
    return out.str();
  }
};

/// One prediction per instance, aggregated into the confusion matrix.
inline ConfusionMatrix evaluate(nn::FcnModel& model, const std::vector<data::Instance>& test_set) {
  if (test_set.empty()) throw ConfigError("evaluate: empty test set");
  ConfusionMatrix cm(model.class_count());
  for (const auto& inst : test_set) {
    if (inst.label < 0 || inst.label >= model.class_count())
      throw ConfigError("evaluate: test label out of range");
    cm.add(inst.label, nn::predict(model, inst.recording));
  }
  return cm;
}

}  // namespace romshm::eval
