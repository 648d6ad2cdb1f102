#pragma once

#include <string>
#include <vector>

#include "romshm/config.hpp"
#include "romshm/data/dataset.hpp"
#include "romshm/data/sensors.hpp"
#include "romshm/dyn/generalized_alpha.hpp"
#include "romshm/eval/confusion.hpp"
#include "romshm/fem/assembly.hpp"
#include "romshm/fem/loads.hpp"
#include "romshm/fem/mesh.hpp"
#include "romshm/fem/modal.hpp"
#include "romshm/io/container.hpp"
#include "romshm/nn/train.hpp"
#include "romshm/rom/galerkin.hpp"
#include "romshm/rom/pod.hpp"
#include "romshm/sampling/lhs.hpp"

namespace romshm::pipeline {

/// Mesh, constrained full-order arrays and the resolved sensor layout of one
/// case study. All downstream stages work on the constrained dof set.
struct PortalModel {
  RunConfig config;
  fem::Mesh2D mesh;
  fem::FomArrays fom;
  data::SensorLayout layout;  // dofs on the constrained set

  int sample_count() const { return config.sample_count(); }
  dyn::GenAlphaParams integrator_params() const { return {config.rho_inf}; }
};

inline PortalModel build_portal_model(const RunConfig& config) {
  config.validate();
  PortalModel model;
  model.config = config;
  model.mesh = fem::generate_portal_mesh(config.geometry, config.target_element_size);
  const auto edges = fem::portal_loaded_edges(model.mesh, config.geometry);
  model.fom = fem::build_fom_arrays(model.mesh, config.material,
                                    {fem::portal_load_basis(model.mesh, edges)});
  for (const auto& spec : config.sensors) {
    const int node = model.mesh.nearest_node(spec.x, spec.y);
    const int full_dof = 2 * node + spec.direction;
    const int free_dof = model.fom.dof_map.full_to_free[full_dof];
    if (free_dof < 0)
      throw ConfigError("sensor at (" + std::to_string(spec.x) + ", " + std::to_string(spec.y) +
                        ") lands on a constrained dof");
    model.layout.entries.push_back({free_dof, spec.quantity});
  }
  model.layout.validate(model.fom.dof_count());
  return model;
}

/// Full-order solve for one parameter point (zero initial conditions).
inline dyn::StateHistory fom_solve(const PortalModel& model, const fem::ParamPoint& eta,
                                   int sample_count = -1) {
  eta.validate();
  if (eta.g >= model.fom.damage_class_count())
    throw ConfigError("fom_solve: damage class exceeds the mesh subdomain count");
  if (sample_count < 0) sample_count = model.sample_count();
  const SpMat stiffness = model.fom.stiffness_at(eta.g, eta.damage_level);
  const Vec& f_spatial = model.fom.load_basis.at(0);
  const Vec zero = Vec::Zero(model.fom.dof_count());
  return dyn::integrate(
      model.fom.mass, stiffness,
      [&](double t) -> Vec { return fem::load_modulation(t, eta) * f_spatial; }, zero, zero,
      model.config.timestep, sample_count, model.integrator_params());
}

inline fem::ParamPoint param_point_from_plan(const sampling::SnapshotPlan& plan,
                                             const sampling::ParamSpace& space, int row) {
  fem::ParamPoint eta;
  eta.g = plan.damage_class[row];
  eta.amplitude = plan.continuous(row, space.dim_index("amplitude"));
  eta.load_frequency = plan.continuous(row, space.dim_index("load_frequency"));
  eta.damage_level = eta.g == 0 ? 0.0 : plan.continuous(row, space.dim_index("damage_level"));
  return eta;
}

/// POD basis and projected arrays.
struct RomModel {
  rom::PodBasis basis;
  rom::RomArrays arrays;
};

/// Snapshot collection and incremental POD over the configured schedule,
/// followed by the Galerkin projection of the affine components.
inline RomModel build_rom(const PortalModel& model) {
  const RunConfig& c = model.config;
  const auto space = c.param_space(c.snapshot_seed);
  const auto plan = sampling::snapshot_schedule(space, c.snapshot_param_count,
                                                c.snapshot_time_count, c.window_sample_count());
  auto block = [&](int tau) -> Mat {
    const fem::ParamPoint eta = param_point_from_plan(plan, space, tau);
    const dyn::StateHistory history = fom_solve(model, eta, c.window_sample_count());
    Mat snapshots(model.fom.dof_count(), plan.time_indices.size());
    for (std::size_t j = 0; j < plan.time_indices.size(); ++j)
      snapshots.col(static_cast<Eigen::Index>(j)) =
          history.displacement.col(plan.time_indices[j] - 1);
    return snapshots;
  };
  RomModel rom_model;
  rom_model.basis = rom::incremental_pod(block, c.snapshot_param_count, c.eps_tol);
  rom_model.arrays = rom::project(model.fom, rom_model.basis);
  return rom_model;
}

namespace detail {

/// L x N0 sensor recording from a reduced trajectory, lifting only the
/// sensor rows of the basis.
inline Mat sensors_from_reduced(const PortalModel& model, const rom::PodBasis& basis,
                                const dyn::StateHistory& reduced) {
  const int n0 = model.layout.size();
  Mat sensor_basis(n0, basis.size());
  for (int n = 0; n < n0; ++n) sensor_basis.row(n) = basis.basis.row(model.layout.entries[n].dof);
  Mat u(reduced.sample_count(), n0);
  for (int n = 0; n < n0; ++n) {
    const auto& entry = model.layout.entries[n];
    const Mat& series = entry.quantity == data::Quantity::displacement ? reduced.displacement
                                                                       : reduced.acceleration;
    u.col(n) = (sensor_basis.row(n) * series).transpose();
  }
  return u;
}

}  // namespace detail

/// Sensor solver backed by the reduced model.
inline data::SensorSolver rom_sensor_solver(const PortalModel& model, const RomModel& rom_model) {
  return [&model, &rom_model](const fem::ParamPoint& eta) -> Mat {
    const dyn::StateHistory reduced =
        rom::rom_solve(rom_model.arrays, eta, model.config.timestep, model.sample_count(),
                       model.integrator_params());
    return detail::sensors_from_reduced(model, rom_model.basis, reduced);
  };
}

/// Sensor solver backed by the full-order model (pseudo-experimental data).
inline data::SensorSolver fom_sensor_solver(const PortalModel& model) {
  return [&model](const fem::ParamPoint& eta) -> Mat {
    return data::extract_sensors(fom_solve(model, eta), model.layout);
  };
}

/// Labeled dataset through either fidelity; the config hash is stamped in.
inline data::DatasetD generate_dataset(const PortalModel& model, const RomModel* rom_model,
                                       data::Fidelity fidelity, int count, double snr,
                                       std::uint64_t seed) {
  const auto space = model.config.param_space(seed);
  data::SensorSolver solver = fidelity == data::Fidelity::rom
                                  ? rom_sensor_solver(model, *rom_model)
                                  : fom_sensor_solver(model);
  data::DatasetD d = data::generate(count, space, solver, fidelity, snr, seed,
                                    model.config.train_fraction);
  d.config_hash = model.config.hash();
  return d;
}

/// Train the classifier on a dataset per the config's training section.
inline nn::TrainResult train_classifier(const data::DatasetD& dataset, const RunConfig& config) {
  nn::TrainConfig tc = config.train;
  return nn::train(dataset, tc);
}

/// FOM-generated pseudo-experimental test set and its confusion matrix.
struct TestOutcome {
  eval::ConfusionMatrix confusion{0};
  double accuracy = 0.0;
};

inline TestOutcome test_classifier(const PortalModel& model, nn::FcnModel& classifier,
                                   data::Fidelity fidelity, const RomModel* rom_model = nullptr) {
  const data::DatasetD test = generate_dataset(model, rom_model, fidelity,
                                               model.config.test_count, model.config.snr,
                                               model.config.test_seed);
  TestOutcome out;
  out.confusion = eval::evaluate(classifier, test.instances);
  out.accuracy = out.confusion.global_accuracy();
  return out;
}

/// Checkpoint container: model tensors, training config, config hash.
inline void save_checkpoint(const std::string& path, const nn::FcnModel& model,
                            const RunConfig& config, const nn::TrainResult& result) {
  io::Archive a;
  model.save(a);
  a.put_blob("config", config.to_json().dump(2));
  a.put_indices("config_hash", {static_cast<std::int64_t>(config.hash())});
  a.put_scalar("best_epoch", result.best_epoch);
  a.put_scalar("best_val_accuracy", result.best_val_accuracy);
  Vec il(static_cast<Eigen::Index>(result.iteration_loss.size()));
  Vec ia(static_cast<Eigen::Index>(result.iteration_accuracy.size()));
  for (Eigen::Index i = 0; i < il.size(); ++i) il[i] = result.iteration_loss[i];
  for (Eigen::Index i = 0; i < ia.size(); ++i) ia[i] = result.iteration_accuracy[i];
  a.put_vector("curve/iteration_loss", il);
  a.put_vector("curve/iteration_accuracy", ia);
  Vec vl(static_cast<Eigen::Index>(result.epoch_val_loss.size()));
  Vec va(static_cast<Eigen::Index>(result.epoch_val_accuracy.size()));
  for (Eigen::Index i = 0; i < vl.size(); ++i) vl[i] = result.epoch_val_loss[i];
  for (Eigen::Index i = 0; i < va.size(); ++i) va[i] = result.epoch_val_accuracy[i];
  a.put_vector("curve/epoch_val_loss", vl);
  a.put_vector("curve/epoch_val_accuracy", va);
  a.save(path);
}

inline nn::FcnModel load_checkpoint(const std::string& path) {
  return nn::FcnModel::load(io::Archive::load(path));
}

}  // namespace romshm::pipeline
