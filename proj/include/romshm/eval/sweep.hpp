#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "romshm/pipeline.hpp"

namespace romshm::eval {

/// One grid point of a comparative study. `basis_size` is only meaningful
/// for studies that rebuild the reduction.
struct SweepRow {
  double grid_value = 0.0;
  double accuracy = 0.0;  // NaN when the cell failed
  int basis_size = 0;
  std::string error;
};

struct SweepTable {
  std::string study;
  std::vector<SweepRow> rows;

  std::string to_csv() const {
    std::ostringstream out;
    out << study << ",accuracy,pod_basis_size,error\n";
    for (const auto& r : rows) {
      out << r.grid_value << ",";
      if (std::isfinite(r.accuracy)) out << r.accuracy;
      out << "," << r.basis_size << "," << r.error << "\n";
    }
    return out.str();
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "study: " << study << "\n";
    out << std::setw(14) << study << std::setw(14) << "accuracy" << std::setw(10) << "W"
        << "\n";
    for (const auto& r : rows) {
      out << std::setw(14) << std::defaultfloat << std::setprecision(6) << r.grid_value;
      if (std::isfinite(r.accuracy)) {
        out << std::setw(13) << std::fixed << std::setprecision(1) << 100.0 * r.accuracy << "%";
        out << std::defaultfloat << std::setprecision(6);
      } else {
        out << std::setw(14) << ("failed: " + r.error);
      }
      out << std::setw(10) << r.basis_size << "\n";
    }
    return out.str();
  }
};

namespace detail {

/// Full pipeline for one configuration: ROM, dataset, training, FOM test.
inline SweepRow run_cell(const RunConfig& config, double grid_value) {
  SweepRow row;
  row.grid_value = grid_value;
  try {
    const auto model = pipeline::build_portal_model(config);
    const auto rom_model = pipeline::build_rom(model);
    row.basis_size = rom_model.basis.size();
    const auto dataset = pipeline::generate_dataset(model, &rom_model, data::Fidelity::rom,
                                                    config.dataset_count, config.snr,
                                                    config.dataset_seed);
    auto result = pipeline::train_classifier(dataset, config);
    const auto outcome = pipeline::test_classifier(model, result.model, data::Fidelity::fom);
    row.accuracy = outcome.accuracy;
  } catch (const std::exception& e) {
    row.accuracy = std::numeric_limits<double>::quiet_NaN();
    row.error = e.what();
  }
  return row;
}

}  // namespace detail

/// Classifiers trained and tested at a fixed damage level, one per grid
/// point. The sampling degenerates delta to a point mass.
inline SweepTable sweep_delta(const RunConfig& base, const std::vector<double>& deltas) {
  SweepTable table;
  table.study = "delta";
  for (double d : deltas) {
    RunConfig c = base;
    c.damage_level_lo = d;
    c.damage_level_hi = d;
    table.rows.push_back(detail::run_cell(c, d));
  }
  return table;
}

/// Train and test under a given signal-to-noise ratio (0 = noise-free).
inline SweepTable sweep_snr(const RunConfig& base, const std::vector<double>& snrs) {
  SweepTable table;
  table.study = "snr";
  for (double s : snrs) {
    RunConfig c = base;
    c.snr = s;
    table.rows.push_back(detail::run_cell(c, s));
  }
  return table;
}

/// Vary the POD truncation tolerance used to build the reduction.
inline SweepTable sweep_eps_tol(const RunConfig& base, const std::vector<double>& eps_values) {
  SweepTable table;
  table.study = "eps_tol";
  for (double e : eps_values) {
    RunConfig c = base;
    c.eps_tol = e;
    table.rows.push_back(detail::run_cell(c, e));
  }
  return table;
}

inline SweepTable sweep(const std::string& study, const RunConfig& base,
                        const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("sweep: empty grid");
  if (study == "delta") return sweep_delta(base, grid);
  if (study == "snr") return sweep_snr(base, grid);
  if (study == "eps_tol") return sweep_eps_tol(base, grid);
  throw ConfigError("sweep: unknown study '" + study + "' (expected delta, snr or eps_tol)");
}

}  // namespace romshm::eval
