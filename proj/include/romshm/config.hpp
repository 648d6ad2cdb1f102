#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "romshm/common.hpp"
#include "romshm/data/sensors.hpp"
#include "romshm/fem/material.hpp"
#include "romshm/fem/mesh.hpp"
#include "romshm/nn/train.hpp"
#include "romshm/sampling/param_space.hpp"

namespace romshm {

/// Position-and-direction sensor request, resolved to a dof on the mesh.
struct SensorSpec {
  double x = 0.0;
  double y = 0.0;
  int direction = 0;  // 0 = x, 1 = y
  data::Quantity quantity = data::Quantity::acceleration;
};

/// Declarative configuration of one case study. A single file drives every
/// pipeline stage; each stage stores the config hash in its artifact so
/// reruns are checkable.
struct RunConfig {
  std::string case_name;

  fem::PortalGeometry geometry;
  double target_element_size = 0.0;
  fem::Material material;

  // Operating-condition pdfs (uniform bounds) and the damage-class pdf.
  double amplitude_lo = 0.0, amplitude_hi = 0.0;          // Pa
  double load_frequency_lo = 0.0, load_frequency_hi = 0.0;  // Hz
  double damage_level_lo = 0.0, damage_level_hi = 0.0;
  std::vector<double> damage_pdf;

  double timestep = 0.0;  // s, equals the sensor sampling period
  double duration = 0.0;  // s
  double rho_inf = 1.0;

  int snapshot_param_count = 0;  // Y
  int snapshot_time_count = 0;   // X
  double snapshot_window = 0.0;  // s
  std::uint64_t snapshot_seed = 0;
  double eps_tol = 0.0;

  std::vector<SensorSpec> sensors;

  int dataset_count = 0;
  double train_fraction = 0.75;
  double snr = 0.0;  // 0 = noise-free
  std::uint64_t dataset_seed = 0;
  int test_count = 0;
  std::uint64_t test_seed = 0;

  nn::TrainConfig train;

  int sample_count() const { return static_cast<int>(std::llround(duration / timestep)); }
  int window_sample_count() const {
    return static_cast<int>(std::llround(snapshot_window / timestep));
  }

  sampling::ParamSpace param_space(std::uint64_t seed) const {
    sampling::ParamSpace space;
    space.dims = {{"amplitude", amplitude_lo, amplitude_hi},
                  {"load_frequency", load_frequency_lo, load_frequency_hi},
                  {"damage_level", damage_level_lo, damage_level_hi}};
    space.damage_pdf = damage_pdf;
    space.seed = seed;
    return space;
  }

  void validate() const {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const char* key) {
      if (!ok) bad.push_back(key);
    };
    check(!case_name.empty(), "case_name");
    check(geometry.column_height > 0 && geometry.span > 0 && geometry.column_width > 0 &&
              geometry.deck_depth > 0 && geometry.thickness > 0,
          "geometry");
    check(target_element_size > 0, "mesh.target_element_size_m");
    check(material.young_modulus > 0 && material.density > 0 && material.poisson_ratio >= 0 &&
              material.poisson_ratio < 0.5,
          "material");
    check(amplitude_lo <= amplitude_hi && amplitude_lo > 0, "sampling.amplitude_pa");
    check(load_frequency_lo <= load_frequency_hi && load_frequency_lo > 0,
          "sampling.load_frequency_hz");
    check(damage_level_lo <= damage_level_hi && damage_level_lo >= 0 && damage_level_hi < 1,
          "sampling.damage_level");
    check(!damage_pdf.empty(), "sampling.damage_pdf");
    check(timestep > 0, "recording.timestep_s");
    check(duration >= timestep, "recording.duration_s");
    check(rho_inf >= 0 && rho_inf <= 1, "integrator.rho_inf");
    check(snapshot_param_count >= static_cast<int>(damage_pdf.size()), "snapshots.param_count");
    check(snapshot_time_count >= 1, "snapshots.time_count");
    check(snapshot_window > 0 && snapshot_window <= duration, "snapshots.window_s");
    check(snapshot_time_count <= window_sample_count(), "snapshots.time_count <= window samples");
    check(eps_tol > 0 && eps_tol < 1, "rom.eps_tol");
    check(!sensors.empty(), "sensors");
    check(dataset_count >= 1, "dataset.instance_count");
    check(train_fraction > 0 && train_fraction < 1, "dataset.train_fraction");
    check(snr >= 0, "dataset.snr");
    check(test_count >= 1, "dataset.test_count");
    check(train.epochs >= 1, "train.epochs");
    check(train.batch_size >= 1, "train.batch_size");
    if (!bad.empty()) {
      std::string msg = "config validation failed for keys:";
      for (const auto& k : bad) msg += " " + k;
      throw ConfigError(msg);
    }
  }

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
  std::uint64_t hash() const { return fnv1a(to_json().dump()); }

  /// Hash of the sections that define the structural model; stage artifacts
  /// carry it so downstream commands can detect a mismatched workspace while
  /// still allowing overrides of their own sections.
  std::uint64_t model_hash() const {
    nlohmann::json j = to_json();
    j.erase("case_name");
    j.erase("sampling");
    j.erase("snapshots");
    j.erase("rom");
    j.erase("dataset");
    j.erase("train");
    return fnv1a(j.dump());
  }

  /// Model sections plus everything the reduction depends on.
  std::uint64_t rom_hash() const {
    nlohmann::json j = to_json();
    j.erase("case_name");
    j.erase("dataset");
    j.erase("train");
    return fnv1a(j.dump());
  }
};

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config: missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: key '" + key + "' has the wrong type");
  }
}

}  // namespace detail

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
  using detail::require;
  RunConfig c;
  c.case_name = require<std::string>(j, "case_name");

  const auto geo = require<nlohmann::json>(j, "geometry");
  c.geometry.column_height = require<double>(geo, "column_height_m");
  c.geometry.span = require<double>(geo, "span_m");
  c.geometry.column_width = require<double>(geo, "column_width_m");
  c.geometry.deck_depth = require<double>(geo, "deck_depth_m");
  c.geometry.thickness = require<double>(geo, "thickness_m");
  for (const auto& box : require<nlohmann::json>(geo, "damage_boxes_m")) {
    if (!box.is_array() || box.size() != 4)
      throw ConfigError("config: geometry.damage_boxes_m entries must be [x0, y0, x1, y1]");
    c.geometry.damage_boxes.push_back(
        {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()});
  }

  c.target_element_size = require<double>(require<nlohmann::json>(j, "mesh"),
                                          "target_element_size_m");

  const auto mat = require<nlohmann::json>(j, "material");
  c.material.young_modulus = require<double>(mat, "young_modulus_pa");
  c.material.poisson_ratio = require<double>(mat, "poisson_ratio");
  c.material.density = require<double>(mat, "density_kg_m3");

  const auto smp = require<nlohmann::json>(j, "sampling");
  const auto amp = require<std::array<double, 2>>(smp, "amplitude_pa");
  const auto frq = require<std::array<double, 2>>(smp, "load_frequency_hz");
  const auto dlt = require<std::array<double, 2>>(smp, "damage_level");
  c.amplitude_lo = amp[0];
  c.amplitude_hi = amp[1];
  c.load_frequency_lo = frq[0];
  c.load_frequency_hi = frq[1];
  c.damage_level_lo = dlt[0];
  c.damage_level_hi = dlt[1];
  c.damage_pdf = require<std::vector<double>>(smp, "damage_pdf");

  const auto rec = require<nlohmann::json>(j, "recording");
  c.timestep = require<double>(rec, "timestep_s");
  c.duration = require<double>(rec, "duration_s");

  if (j.contains("integrator"))
    c.rho_inf = require<double>(j.at("integrator"), "rho_inf");

  const auto snap = require<nlohmann::json>(j, "snapshots");
  c.snapshot_param_count = require<int>(snap, "param_count");
  c.snapshot_time_count = require<int>(snap, "time_count");
  c.snapshot_window = require<double>(snap, "window_s");
  c.snapshot_seed = require<std::uint64_t>(snap, "seed");

  c.eps_tol = require<double>(require<nlohmann::json>(j, "rom"), "eps_tol");

  for (const auto& s : require<nlohmann::json>(j, "sensors")) {
    SensorSpec spec;
    spec.x = require<double>(s, "x_m");
    spec.y = require<double>(s, "y_m");
    const auto dir = require<std::string>(s, "direction");
    if (dir == "x")
      spec.direction = 0;
    else if (dir == "y")
      spec.direction = 1;
    else
      throw ConfigError("config: sensor direction must be 'x' or 'y'");
    spec.quantity = data::quantity_from_string(require<std::string>(s, "quantity"));
    c.sensors.push_back(spec);
  }

  const auto ds = require<nlohmann::json>(j, "dataset");
  c.dataset_count = require<int>(ds, "instance_count");
  c.train_fraction = require<double>(ds, "train_fraction");
  c.snr = ds.contains("snr") && !ds.at("snr").is_null() ? ds.at("snr").get<double>() : 0.0;
  c.dataset_seed = require<std::uint64_t>(ds, "seed");
  c.test_count = require<int>(ds, "test_count");
  c.test_seed = require<std::uint64_t>(ds, "test_seed");

  const auto tr = require<nlohmann::json>(j, "train");
  c.train.epochs = require<int>(tr, "epochs");
  c.train.batch_size = require<int>(tr, "batch_size");
  c.train.filters = require<std::array<int, 3>>(tr, "filters");
  c.train.kernels = require<std::array<int, 3>>(tr, "kernels");
  c.train.adam.learning_rate = require<double>(tr, "learning_rate");
  c.train.adam.beta1 = require<double>(tr, "adam_beta1");
  c.train.adam.beta2 = require<double>(tr, "adam_beta2");
  c.train.adam.epsilon = require<double>(tr, "adam_epsilon");
  c.train.bn_momentum = require<double>(tr, "bn_momentum");
  c.train.seed = require<std::uint64_t>(tr, "seed");

  c.validate();
  return c;
}

inline RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

inline nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["case_name"] = case_name;
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : geometry.damage_boxes) boxes.push_back({b.x0, b.y0, b.x1, b.y1});
  j["geometry"] = {{"column_height_m", geometry.column_height},
                   {"span_m", geometry.span},
                   {"column_width_m", geometry.column_width},
                   {"deck_depth_m", geometry.deck_depth},
                   {"thickness_m", geometry.thickness},
                   {"damage_boxes_m", boxes}};
  j["mesh"] = {{"target_element_size_m", target_element_size}};
  j["material"] = {{"young_modulus_pa", material.young_modulus},
                   {"poisson_ratio", material.poisson_ratio},
                   {"density_kg_m3", material.density}};
  j["sampling"] = {{"amplitude_pa", {amplitude_lo, amplitude_hi}},
                   {"load_frequency_hz", {load_frequency_lo, load_frequency_hi}},
                   {"damage_level", {damage_level_lo, damage_level_hi}},
                   {"damage_pdf", damage_pdf}};
  j["recording"] = {{"timestep_s", timestep}, {"duration_s", duration}};
  j["integrator"] = {{"rho_inf", rho_inf}};
  j["snapshots"] = {{"param_count", snapshot_param_count},
                    {"time_count", snapshot_time_count},
                    {"window_s", snapshot_window},
                    {"seed", snapshot_seed}};
  j["rom"] = {{"eps_tol", eps_tol}};
  nlohmann::json sens = nlohmann::json::array();
  for (const auto& s : sensors)
    sens.push_back({{"x_m", s.x},
                    {"y_m", s.y},
                    {"direction", s.direction == 0 ? "x" : "y"},
                    {"quantity", data::to_string(s.quantity)}});
  j["sensors"] = sens;
  j["dataset"] = {{"instance_count", dataset_count}, {"train_fraction", train_fraction},
                  {"snr", snr},          {"seed", dataset_seed},
                  {"test_count", test_count}, {"test_seed", test_seed}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"filters", train.filters},
                {"kernels", train.kernels},
                {"learning_rate", train.adam.learning_rate},
                {"adam_beta1", train.adam.beta1},
                {"adam_beta2", train.adam.beta2},
                {"adam_epsilon", train.adam.epsilon},
                {"bn_momentum", train.bn_momentum},
                {"seed", train.seed}};
  return j;
}

}  // namespace romshm
