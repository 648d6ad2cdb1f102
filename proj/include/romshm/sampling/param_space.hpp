#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "romshm/common.hpp"

namespace romshm::sampling {

/// Continuous uniform dimension of the operating-condition space.
struct UniformDim {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

/// Parameter space: continuous uniform pdfs sampled by LHS plus the discrete
/// damage-class pdf. A zero-width continuous dimension (lo == hi) degenerates
/// to a point mass, which the delta sweeps rely on.
struct ParamSpace {
  std::vector<UniformDim> dims;
  std::vector<double> damage_pdf;  // over g = 0..G
  std::uint64_t seed = 0;

  int damage_class_count() const { return static_cast<int>(damage_pdf.size()); }

  void validate() const {
    if (dims.empty()) throw ConfigError("param space: no continuous dimensions");
    for (const auto& d : dims) {
      if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || d.lo > d.hi)
        throw ConfigError("param space: bad bounds for '" + d.name + "'");
    }
    if (damage_pdf.empty()) throw ConfigError("param space: empty damage pdf");
    double sum = 0.0;
    for (double p : damage_pdf) {
      if (p < 0.0) throw ConfigError("param space: negative damage probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("param space: damage probabilities must sum to 1");
  }

  int dim_index(const std::string& name) const {
    for (std::size_t i = 0; i < dims.size(); ++i)
      if (dims[i].name == name) return static_cast<int>(i);
    throw ConfigError("param space: no dimension named '" + name + "'");
  }
};

}  // namespace romshm::sampling
