// romshm — simulation-based damage localization pipeline for a portal frame.
//
// Stages (each reads the previous stage's container from the workspace):
//   mesh-gen -> rom-build -> dataset-gen -> train -> test
// plus fom-solve (one-off trajectories / modal tables), predict, sweep and
// report. Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "romshm/eval/sweep.hpp"
#include "romshm/fem/modal.hpp"
#include "romshm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace romshm;

namespace {

struct Options {
  std::string config_path = "configs/portal_desk.json";
  std::string workspace = "workspace";
  int threads = 1;
};

RunConfig load_config(const Options& opt) {
  RunConfig cfg = RunConfig::load(opt.config_path);
  if (opt.threads != 1)
    std::cerr << "note: --threads " << opt.threads
              << " requested; running in single-thread reference mode\n";
  return cfg;
}

std::string ws_path(const Options& opt, const std::string& name) {
  fs::create_directories(opt.workspace);
  return (fs::path(opt.workspace) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

void save_mesh_stage(const Options& opt, const RunConfig& cfg, const fem::Mesh2D& mesh) {
  io::Archive a;
  mesh.save(a);
  a.put_blob("config", cfg.to_json().dump(2));
  a.put_indices("config_hash", {static_cast<std::int64_t>(cfg.hash())});
  a.put_indices("model_hash", {static_cast<std::int64_t>(cfg.model_hash())});
  a.save(ws_path(opt, "mesh.bin"));
}

pipeline::PortalModel rebuild_model(const Options& opt, const RunConfig& cfg) {
  // The mesh container is the stage handshake; regenerate and verify.
  const std::string path = ws_path(opt, "mesh.bin");
  if (fs::exists(path)) {
    const auto a = io::Archive::load(path);
    const auto stored = static_cast<std::uint64_t>(a.get_indices("model_hash").at(0));
    if (stored != cfg.model_hash())
      throw ConfigError("workspace mesh.bin was generated from a different config; rerun mesh-gen");
  }
  return pipeline::build_portal_model(cfg);
}

void save_rom_stage(const Options& opt, const RunConfig& cfg, const pipeline::RomModel& rom) {
  io::Archive a;
  rom.arrays.save(a);
  a.put_matrix("basis", rom.basis.basis);
  a.put_vector("singular_values", rom.basis.singular_values);
  a.put_scalar("achieved_error", rom.basis.achieved_error);
  a.put_scalar("eps_tol", rom.basis.eps_tol);
  a.put_blob("config", cfg.to_json().dump(2));
  a.put_indices("config_hash", {static_cast<std::int64_t>(cfg.hash())});
  a.put_indices("rom_hash", {static_cast<std::int64_t>(cfg.rom_hash())});
  a.save(ws_path(opt, "rom.bin"));
}

pipeline::RomModel load_rom_stage(const Options& opt, const RunConfig& cfg) {
  const std::string path = ws_path(opt, "rom.bin");
  if (!fs::exists(path))
    throw ConfigError("missing artifact '" + path + "'; run rom-build first");
  const auto a = io::Archive::load(path);
  const auto stored = static_cast<std::uint64_t>(a.get_indices("rom_hash").at(0));
  if (stored != cfg.rom_hash())
    throw ConfigError("workspace rom.bin was generated from a different config; rerun rom-build");
  pipeline::RomModel rom;
  rom.arrays = rom::RomArrays::load(a);
  rom.basis.basis = a.get_matrix("basis");
  rom.basis.singular_values = a.get_vector("singular_values");
  rom.basis.achieved_error = a.get_scalar("achieved_error");
  rom.basis.eps_tol = a.get_scalar("eps_tol");
  return rom;
}

std::string curves_csv(const nn::TrainResult& result) {
  std::ostringstream out;
  out << "iteration,train_loss,train_accuracy\n";
  for (std::size_t i = 0; i < result.iteration_loss.size(); ++i)
    out << i + 1 << "," << result.iteration_loss[i] << "," << result.iteration_accuracy[i] << "\n";
  out << "\nepoch,val_loss,val_accuracy\n";
  for (std::size_t e = 0; e < result.epoch_val_loss.size(); ++e)
    out << e + 1 << "," << result.epoch_val_loss[e] << "," << result.epoch_val_accuracy[e] << "\n";
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"ROM-accelerated vibration-based damage localization"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "run configuration file")->capture_default_str();
  app.add_option("--workspace", opt.workspace, "artifact directory")->capture_default_str();
  app.add_option("--threads", opt.threads, "worker threads (1 = reference mode)")
      ->capture_default_str();

  // mesh-gen
  auto* mesh_gen = app.add_subcommand("mesh-gen", "triangulate the frame and store the mesh");
  double mesh_size_override = 0.0;
  std::string geometry_file;
  mesh_gen->add_option("--mesh-size", mesh_size_override, "target element size override (m)");
  mesh_gen->add_option("--geometry", geometry_file, "JSON file overriding the geometry section");

  // fom-solve
  auto* fom_solve = app.add_subcommand("fom-solve", "integrate the full-order model once");
  int fs_g = 0;
  double fs_amp = 30e3, fs_freq = 70.0, fs_delta = 0.0;
  int fs_modes = 0;
  std::string fs_out;
  fom_solve->add_option("--g", fs_g, "damage class");
  fom_solve->add_option("--amplitude", fs_amp, "load amplitude (Pa)");
  fom_solve->add_option("--frequency", fs_freq, "load frequency (Hz)");
  fom_solve->add_option("--delta", fs_delta, "damage level in [0,1)");
  fom_solve->add_option("--modes", fs_modes, "also print the first N natural frequencies");
  fom_solve->add_option("--out", fs_out, "write the state history container here");

  // rom-build
  auto* rom_build = app.add_subcommand("rom-build", "snapshots, POD and Galerkin projection");
  double rb_eps = 0.0;
  std::string rb_snapshots;
  std::uint64_t rb_seed = 0;
  bool rb_seed_set = false;
  rom_build->add_option("--eps-tol", rb_eps, "POD truncation tolerance override");
  rom_build->add_option("--snapshots", rb_snapshots, "override as Y,X");
  rom_build->add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { rb_seed = s; rb_seed_set = true; },
      "snapshot sampling seed override");

  // dataset-gen
  auto* dataset_gen = app.add_subcommand("dataset-gen", "labeled instance generation");
  int dg_count = 0;
  std::string dg_model = "rom", dg_snr = "none", dg_out;
  std::uint64_t dg_seed = 0;
  bool dg_seed_set = false, dg_count_set = false, dg_snr_set = false;
  dataset_gen->add_option_function<int>(
      "--count", [&](const int& v) { dg_count = v; dg_count_set = true; }, "instance count I");
  dataset_gen->add_option("--model", dg_model, "rom or fom")->capture_default_str();
  dataset_gen->add_option_function<std::string>(
      "--snr", [&](const std::string& v) { dg_snr = v; dg_snr_set = true; },
      "signal-to-noise power ratio, or 'none'");
  dataset_gen->add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { dg_seed = s; dg_seed_set = true; }, "seed override");
  dataset_gen->add_option("--out", dg_out, "output directory (default <workspace>/dataset)");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the classifier on a dataset");
  std::string tr_dataset;
  int tr_epochs = 0;
  std::uint64_t tr_seed = 0;
  bool tr_seed_set = false;
  train_cmd->add_option("--dataset", tr_dataset, "dataset directory");
  train_cmd->add_option("--epochs", tr_epochs, "epoch override");
  train_cmd->add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { tr_seed = s; tr_seed_set = true; }, "seed override");

  // test
  auto* test_cmd = app.add_subcommand("test", "evaluate a checkpoint on fresh instances");
  std::string te_model, te_fidelity = "fom";
  test_cmd->add_option("--model", te_model, "checkpoint path (default <workspace>/model.bin)");
  test_cmd->add_option("--fidelity", te_fidelity, "fom or rom test-set generator")
      ->capture_default_str();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "classify one stored recording");
  std::string pr_model, pr_input;
  int pr_index = 0;
  predict_cmd->add_option("--model", pr_model, "checkpoint path")->required();
  predict_cmd->add_option("--input", pr_input, "instance or dataset container")->required();
  predict_cmd->add_option("--index", pr_index, "instance index for dataset containers");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "comparative study over a grid");
  std::string sw_study;
  std::vector<double> sw_grid;
  int sw_count = 0, sw_epochs = 0;
  sweep_cmd->add_option("--study", sw_study, "delta, snr or eps_tol")->required();
  sweep_cmd->add_option("--grid", sw_grid, "grid values")->required();
  sweep_cmd->add_option("--count", sw_count, "per-cell instance count override");
  sweep_cmd->add_option("--epochs", sw_epochs, "per-cell epoch override");

  // report
  auto* report_cmd = app.add_subcommand("report", "bundle tables and curves from the workspace");

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg = load_config(opt);

  if (mesh_gen->parsed()) {
    if (!geometry_file.empty()) {
      std::ifstream in(geometry_file);
      if (!in) throw ConfigError("cannot open geometry file '" + geometry_file + "'");
      nlohmann::json j;
      in >> j;
      nlohmann::json full = cfg.to_json();
      full["geometry"] = j;
      cfg = RunConfig::from_json(full);
    }
    if (mesh_size_override > 0.0) cfg.target_element_size = mesh_size_override;
    const auto model = pipeline::build_portal_model(cfg);
    save_mesh_stage(opt, cfg, model.mesh);
    const auto freqs = fem::natural_frequencies(model.fom.mass, model.fom.stiffness_at(0, 0.0), 1);
    std::cout << "mesh: " << model.mesh.element_count() << " elements, "
              << model.fom.dof_count() << " free dofs, f1 = " << freqs[0] << " Hz\n"
              << "wrote " << ws_path(opt, "mesh.bin") << "\n";
    return 0;
  }

  if (fom_solve->parsed()) {
    const auto model = rebuild_model(opt, cfg);
    if (fs_modes > 0) {
      const auto freqs =
          fem::natural_frequencies(model.fom.mass, model.fom.stiffness_at(0, 0.0), fs_modes);
      std::cout << "mode  frequency_hz  period_s\n";
      for (std::size_t i = 0; i < freqs.size(); ++i)
        std::cout << i + 1 << "  " << freqs[i] << "  " << 1.0 / freqs[i] << "\n";
    }
    fem::ParamPoint eta{fs_g, fs_amp, fs_freq, fs_delta};
    const auto history = pipeline::fom_solve(model, eta);
    const Mat sensors = data::extract_sensors(history, model.layout);
    std::cout << "solved " << cfg.sample_count() << " steps; sensor RMS:";
    for (int n = 0; n < sensors.cols(); ++n)
      std::cout << " " << std::sqrt(sensors.col(n).squaredNorm() / sensors.rows());
    std::cout << "\n";
    if (!fs_out.empty()) {
      io::Archive a;
      a.put_matrix("displacement", history.displacement);
      a.put_matrix("velocity", history.velocity);
      a.put_matrix("acceleration", history.acceleration);
      a.put_matrix("sensors", sensors);
      a.put_scalar("dt", history.dt);
      a.put_blob("config", cfg.to_json().dump(2));
      a.save(fs_out);
      std::cout << "wrote " << fs_out << "\n";
    }
    return 0;
  }

  if (rom_build->parsed()) {
    if (rb_eps > 0.0) cfg.eps_tol = rb_eps;
    if (!rb_snapshots.empty()) {
      const auto comma = rb_snapshots.find(',');
      if (comma == std::string::npos) throw ConfigError("--snapshots expects Y,X");
      cfg.snapshot_param_count = std::stoi(rb_snapshots.substr(0, comma));
      cfg.snapshot_time_count = std::stoi(rb_snapshots.substr(comma + 1));
    }
    if (rb_seed_set) cfg.snapshot_seed = rb_seed;
    cfg.validate();
    const auto model = rebuild_model(opt, cfg);
    const auto rom = pipeline::build_rom(model);
    save_rom_stage(opt, cfg, rom);
    std::cout << "rom: " << rom.basis.size() << " basis vectors, achieved error "
              << rom.basis.achieved_error << " (tol " << cfg.eps_tol << ")\n"
              << "wrote " << ws_path(opt, "rom.bin") << "\n";
    return 0;
  }

  if (dataset_gen->parsed()) {
    if (dg_count_set) cfg.dataset_count = dg_count;
    if (dg_seed_set) cfg.dataset_seed = dg_seed;
    if (dg_snr_set) cfg.snr = dg_snr == "none" ? 0.0 : std::stod(dg_snr);
    cfg.validate();
    const auto model = rebuild_model(opt, cfg);
    data::Fidelity fidelity;
    pipeline::RomModel rom;
    if (dg_model == "rom") {
      fidelity = data::Fidelity::rom;
      rom = load_rom_stage(opt, cfg);
    } else if (dg_model == "fom") {
      fidelity = data::Fidelity::fom;
    } else {
      throw ConfigError("--model must be rom or fom");
    }
    const auto dataset = pipeline::generate_dataset(
        model, dg_model == "rom" ? &rom : nullptr, fidelity, cfg.dataset_count, cfg.snr,
        cfg.dataset_seed);
    const std::string out_dir = dg_out.empty() ? ws_path(opt, "dataset") : dg_out;
    fs::create_directories(out_dir);
    nlohmann::json sidecar = cfg.to_json();
    sidecar["generated"] = {{"fidelity", data::to_string(fidelity)},
                            {"instance_count", dataset.total_count()},
                            {"train_count", dataset.train_count},
                            {"failures", dataset.failures.size()},
                            {"class_counts", dataset.class_counts(model.fom.damage_class_count())}};
    data::save_dataset(dataset, out_dir, sidecar.dump(2));
    std::cout << "dataset: " << dataset.total_count() << " instances ("
              << dataset.failures.size() << " failures), split " << dataset.train_count << ":"
              << dataset.validation_count() << "\nwrote " << out_dir << "\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    if (tr_epochs > 0) cfg.train.epochs = tr_epochs;
    if (tr_seed_set) cfg.train.seed = tr_seed;
    const std::string dataset_dir = tr_dataset.empty() ? ws_path(opt, "dataset") : tr_dataset;
    if (!fs::exists(dataset_dir + "/train.bin"))
      throw ConfigError("missing artifact '" + dataset_dir + "/train.bin'; run dataset-gen first");
    const auto dataset = data::load_dataset(dataset_dir);
    const auto result = pipeline::train_classifier(dataset, cfg);
    pipeline::save_checkpoint(ws_path(opt, "model.bin"), result.model, cfg, result);
    write_text(ws_path(opt, "curves.csv"), curves_csv(result));
    std::cout << "trained " << cfg.train.epochs << " epochs; best validation accuracy "
              << result.best_val_accuracy << " at epoch " << result.best_epoch << "\nwrote "
              << ws_path(opt, "model.bin") << " and curves.csv\n";
    return 0;
  }

  if (test_cmd->parsed()) {
    const std::string model_path = te_model.empty() ? ws_path(opt, "model.bin") : te_model;
    if (!fs::exists(model_path))
      throw ConfigError("missing checkpoint '" + model_path + "'; run train first");
    auto classifier = pipeline::load_checkpoint(model_path);
    const auto model = rebuild_model(opt, cfg);
    pipeline::RomModel rom;
    data::Fidelity fidelity;
    if (te_fidelity == "fom") {
      fidelity = data::Fidelity::fom;
    } else if (te_fidelity == "rom") {
      fidelity = data::Fidelity::rom;
      rom = load_rom_stage(opt, cfg);
    } else {
      throw ConfigError("--fidelity must be fom or rom");
    }
    const auto outcome = pipeline::test_classifier(model, classifier, fidelity,
                                                   te_fidelity == "rom" ? &rom : nullptr);
    std::cout << outcome.confusion.to_text();
    std::cout << "damaged instances classified as undamaged: "
              << outcome.confusion.damaged_as_undamaged() << "\n";
    write_text(ws_path(opt, "confusion.csv"), outcome.confusion.to_csv());
    write_text(ws_path(opt, "confusion.txt"), outcome.confusion.to_text());
    return 0;
  }

  if (predict_cmd->parsed()) {
    auto classifier = pipeline::load_checkpoint(pr_model);
    const auto a = io::Archive::load(pr_input);
    Mat recording;
    if (a.has("recording")) {
      recording = a.get_matrix("recording");
    } else if (a.has("recordings")) {
      const Mat packed = a.get_matrix("recordings");
      const int l = static_cast<int>(a.get_scalar("samples_per_channel"));
      const int n0 = static_cast<int>(a.get_scalar("channel_count"));
      if (pr_index < 0 || pr_index >= packed.cols())
        throw ConfigError("--index out of range for this dataset container");
      recording = Eigen::Map<const Mat>(packed.col(pr_index).data(), l, n0);
    } else {
      throw ConfigError("input container holds no 'recording' or 'recordings' entry");
    }
    const Vec probs = nn::predict_probabilities(classifier, recording);
    int cls = 0;
    for (int g = 1; g < probs.size(); ++g)
      if (probs[g] > probs[cls]) cls = g;
    std::cout << "predicted class: " << cls << "\nprobabilities:";
    for (int g = 0; g < probs.size(); ++g) std::cout << " " << probs[g];
    std::cout << "\n";
    return 0;
  }

  if (sweep_cmd->parsed()) {
    if (sw_count > 0) cfg.dataset_count = sw_count;
    if (sw_epochs > 0) cfg.train.epochs = sw_epochs;
    const auto table = eval::sweep(sw_study, cfg, sw_grid);
    std::cout << table.to_text();
    write_text(ws_path(opt, "sweep_" + sw_study + ".csv"), table.to_csv());
    std::cout << "wrote " << ws_path(opt, "sweep_" + sw_study + ".csv") << "\n";
    for (const auto& row : table.rows)
      if (!row.error.empty()) return 3;
    return 0;
  }

  if (report_cmd->parsed()) {
    const std::string report_dir = ws_path(opt, "report");
    fs::create_directories(report_dir);
    std::ostringstream summary;
    summary << "case: " << cfg.case_name << "\nconfig hash: " << cfg.hash() << "\n";
    if (fs::exists(ws_path(opt, "rom.bin"))) {
      const auto a = io::Archive::load(ws_path(opt, "rom.bin"));
      const Vec sv = a.get_vector("singular_values");
      std::ostringstream csv;
      csv << "index,singular_value,normalized\n";
      for (int i = 0; i < sv.size(); ++i)
        csv << i + 1 << "," << sv[i] << "," << sv[i] / sv[0] << "\n";
      write_text(report_dir + "/singular_values.csv", csv.str());
      summary << "rom basis size: " << a.get_matrix("basis").cols() << ", achieved error "
              << a.get_scalar("achieved_error") << "\n";
    }
    for (const char* name : {"curves.csv", "confusion.csv", "confusion.txt", "sweep_delta.csv",
                             "sweep_snr.csv", "sweep_eps_tol.csv"})
      if (fs::exists(ws_path(opt, name)))
        fs::copy_file(ws_path(opt, name), fs::path(report_dir) / name,
                      fs::copy_options::overwrite_existing);
    if (fs::exists(ws_path(opt, "model.bin"))) {
      const auto a = io::Archive::load(ws_path(opt, "model.bin"));
      summary << "best validation accuracy: " << a.get_scalar("best_val_accuracy")
              << " at epoch " << static_cast<int>(a.get_scalar("best_epoch")) << "\n";
    }
    write_text(report_dir + "/summary.txt", summary.str());
    std::cout << summary.str() << "wrote " << report_dir << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
