#include <catch2/catch.hpp>

#include "romshm/config.hpp"

using namespace romshm;

namespace {

nlohmann::json valid_config() {
  return nlohmann::json::parse(R"JSON({
    "case_name": "toy",
    "geometry": {
      "column_height_m": 4.0, "span_m": 3.0, "column_width_m": 0.4,
      "deck_depth_m": 0.5, "thickness_m": 0.1,
      "damage_boxes_m": [[0.0, 0.0, 0.4, 0.8], [0.0, 2.7, 0.4, 3.5],
                          [3.4, 2.7, 3.8, 3.5], [3.4, 0.0, 3.8, 0.8]]
    },
    "mesh": { "target_element_size_m": 0.25 },
    "material": { "young_modulus_pa": 3.0e10, "poisson_ratio": 0.2, "density_kg_m3": 2500.0 },
    "sampling": {
      "amplitude_pa": [10000.0, 50000.0],
      "load_frequency_hz": [50.0, 95.0],
      "damage_level": [0.02, 0.25],
      "damage_pdf": [0.2, 0.2, 0.2, 0.2, 0.2]
    },
    "recording": { "timestep_s": 0.005, "duration_s": 1.0 },
    "integrator": { "rho_inf": 1.0 },
    "snapshots": { "param_count": 10, "time_count": 20, "window_s": 0.5, "seed": 2001 },
    "rom": { "eps_tol": 1.0e-4 },
    "sensors": [
      { "x_m": 0.2, "y_m": 3.9, "direction": "x", "quantity": "acceleration" },
      { "x_m": 1.9, "y_m": 3.9, "direction": "y", "quantity": "acceleration" }
    ],
    "dataset": {
      "instance_count": 50, "train_fraction": 0.75, "snr": null,
      "seed": 3001, "test_count": 10, "test_seed": 4001
    },
    "train": {
      "epochs": 5, "batch_size": 16, "filters": [16, 32, 16], "kernels": [8, 5, 3],
      "learning_rate": 0.001, "adam_beta1": 0.9, "adam_beta2": 0.999,
      "adam_epsilon": 1.0e-8, "bn_momentum": 0.1, "seed": 5001
    }
  })JSON");
}

}  // namespace

TEST_CASE("a complete config parses into typed fields") {
  const RunConfig c = RunConfig::from_json(valid_config());
  REQUIRE(c.case_name == "toy");
  REQUIRE(c.geometry.damage_boxes.size() == 4);
  REQUIRE(c.material.young_modulus == 3.0e10);
  REQUIRE(c.amplitude_lo == 10000.0);
  REQUIRE(c.damage_pdf.size() == 5);
  REQUIRE(c.sample_count() == 200);
  REQUIRE(c.window_sample_count() == 100);
  REQUIRE(c.snr == 0.0);
  REQUIRE(c.train.filters == std::array<int, 3>{16, 32, 16});
  REQUIRE(c.train.kernels == std::array<int, 3>{8, 5, 3});
}

TEST_CASE("missing keys are reported by name") {
  auto j = valid_config();
  j.erase("rom");
  try {
    RunConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("rom") != std::string::npos);
  }

  auto j2 = valid_config();
  j2["snapshots"].erase("seed");
  try {
    RunConfig::from_json(j2);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("validation lists offending keys") {
  auto j = valid_config();
  j["rom"]["eps_tol"] = 2.0;
  j["snapshots"]["param_count"] = 2;  // fewer than the class count
  try {
    RunConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("eps_tol") != std::string::npos);
    REQUIRE(msg.find("param_count") != std::string::npos);
  }
}

TEST_CASE("snapshot X exceeding the window sample count is rejected") {
  auto j = valid_config();
  j["snapshots"]["time_count"] = 150;  // window holds 100 samples
  REQUIRE_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("the config hash is stable and canonical") {
  const RunConfig a = RunConfig::from_json(valid_config());
  const RunConfig b = RunConfig::from_json(valid_config());
  REQUIRE(a.hash() == b.hash());
  auto j = valid_config();
  j["rom"]["eps_tol"] = 1.0e-3;
  REQUIRE(RunConfig::from_json(j).hash() != a.hash());
  // Round-trip through to_json preserves the hash.
  REQUIRE(RunConfig::from_json(a.to_json()).hash() == a.hash());
}

TEST_CASE("stage hashes ignore downstream overrides") {
  const RunConfig a = RunConfig::from_json(valid_config());
  auto j = valid_config();
  j["dataset"]["instance_count"] = 9999;
  j["train"]["epochs"] = 7;
  const RunConfig b = RunConfig::from_json(j);
  REQUIRE(a.hash() != b.hash());
  REQUIRE(a.model_hash() == b.model_hash());
  REQUIRE(a.rom_hash() == b.rom_hash());

  auto j2 = valid_config();
  j2["rom"]["eps_tol"] = 1e-3;
  const RunConfig c = RunConfig::from_json(j2);
  REQUIRE(a.model_hash() == c.model_hash());
  REQUIRE(a.rom_hash() != c.rom_hash());

  auto j3 = valid_config();
  j3["geometry"]["span_m"] = 4.0;
  const RunConfig d = RunConfig::from_json(j3);
  REQUIRE(a.model_hash() != d.model_hash());
  REQUIRE(a.rom_hash() != d.rom_hash());
}

TEST_CASE("param_space carries the configured pdfs") {
  const RunConfig c = RunConfig::from_json(valid_config());
  const auto space = c.param_space(77);
  REQUIRE(space.seed == 77);
  REQUIRE(space.dims.size() == 3);
  REQUIRE(space.dims[space.dim_index("amplitude")].hi == 50000.0);
  REQUIRE(space.damage_pdf.size() == 5);
}
