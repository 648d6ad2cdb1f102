#pragma once

#include <set>
#include <string>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/dyn/generalized_alpha.hpp"

namespace romshm::data {

enum class Quantity { displacement, acceleration };

inline std::string to_string(Quantity q) {
  return q == Quantity::displacement ? "displacement" : "acceleration";
}

inline Quantity quantity_from_string(const std::string& s) {
  if (s == "displacement") return Quantity::displacement;
  if (s == "acceleration") return Quantity::acceleration;
  throw ConfigError("unknown sensor quantity '" + s + "'");
}

/// Virtual sensor: one dof of the state vector, recorded as displacement or
/// acceleration. The dof indices refer to whatever dof set the histories are
/// produced on (the constrained set in the pipeline). Equivalent to a Boolean
/// pick matrix with one unit entry per row.
struct SensorLayout {
  struct Entry {
    int dof = 0;
    Quantity quantity = Quantity::acceleration;
  };
  std::vector<Entry> entries;

  int size() const { return static_cast<int>(entries.size()); }

  std::vector<int> dofs() const {
    std::vector<int> d;
    for (const auto& e : entries) d.push_back(e.dof);
    return d;
  }

  void validate(int dof_count) const {
    if (entries.empty()) throw ConfigError("sensor layout: no sensors");
    std::set<int> seen;
    for (const auto& e : entries) {
      if (e.dof < 0 || e.dof >= dof_count)
        throw ConfigError("sensor layout: dof index out of range");
      if (!seen.insert(e.dof).second)
        throw ConfigError("sensor layout: duplicate sensor dof");
    }
  }
};

/// U = (T V)^T — the L x N0 recording matrix of the layout's dofs, each
/// channel picked from the displacement or acceleration series.
inline Mat extract_sensors(const dyn::StateHistory& history, const SensorLayout& layout) {
  layout.validate(history.dof_count());
  Mat u(history.sample_count(), layout.size());
  Mat acc;
  for (int n = 0; n < layout.size(); ++n) {
    const auto& e = layout.entries[n];
    if (e.quantity == Quantity::displacement) {
      u.col(n) = history.displacement.row(e.dof).transpose();
    } else {
      if (acc.size() == 0) acc = dyn::sensor_accelerations(history);
      u.col(n) = acc.row(e.dof).transpose();
    }
  }
  return u;
}

}  // namespace romshm::data
