#pragma once

#include <vector>

#include "romshm/common.hpp"
#include "romshm/dyn/generalized_alpha.hpp"
#include "romshm/fem/assembly.hpp"
#include "romshm/fem/loads.hpp"
#include "romshm/io/container.hpp"
#include "romshm/rom/pod.hpp"

namespace romshm::rom {

/// Reduced arrays of the Galerkin projection. The affine components are
/// projected once; assembling K_R(g, delta) afterwards costs O(P W^2),
/// independent of the full-order dimension.
struct RomArrays {
  Mat mass_r;                    // W x W
  std::vector<Mat> stiffness_r;  // per subdomain, W x W
  std::vector<Vec> load_r;       // per load basis, W

  int size() const { return static_cast<int>(mass_r.rows()); }
  int damage_class_count() const { return static_cast<int>(stiffness_r.size()); }

  Mat stiffness_at(int g, double delta) const {
    const auto psi = fem::damage_coefficients(damage_class_count(), g, delta);
    Mat k = psi[0] * stiffness_r[0];
    for (std::size_t p = 1; p < stiffness_r.size(); ++p) k += psi[p] * stiffness_r[p];
    return k;
  }

  void save(io::Archive& a, const std::string& prefix = "rom/") const {
    a.put_scalar(prefix + "component_count", damage_class_count());
    a.put_scalar(prefix + "load_basis_count", static_cast<double>(load_r.size()));
    a.put_matrix(prefix + "mass", mass_r);
    for (std::size_t p = 0; p < stiffness_r.size(); ++p)
      a.put_matrix(prefix + "stiffness_" + std::to_string(p), stiffness_r[p]);
    for (std::size_t p = 0; p < load_r.size(); ++p)
      a.put_vector(prefix + "load_" + std::to_string(p), load_r[p]);
  }

  static RomArrays load(const io::Archive& a, const std::string& prefix = "rom/") {
    RomArrays r;
    const int pc = static_cast<int>(a.get_scalar(prefix + "component_count"));
    const int lc = static_cast<int>(a.get_scalar(prefix + "load_basis_count"));
    r.mass_r = a.get_matrix(prefix + "mass");
    for (int p = 0; p < pc; ++p)
      r.stiffness_r.push_back(a.get_matrix(prefix + "stiffness_" + std::to_string(p)));
    for (int p = 0; p < lc; ++p) r.load_r.push_back(a.get_vector(prefix + "load_" + std::to_string(p)));
    return r;
  }
};

/// Galerkin projection of the full-order arrays onto the basis span:
/// M_R = W^T M W, K_R^p = W^T K_p W, f_R^p = W^T f_p.
inline RomArrays project(const fem::FomArrays& fom, const PodBasis& basis) {
  if (basis.full_dim() != fom.dof_count())
    throw ConfigError("project: basis and arrays have mismatched dimensions");
  const Mat& w = basis.basis;
  RomArrays r;
  r.mass_r = w.transpose() * (fom.mass * w);
  for (const auto& kp : fom.stiffness_components)
    r.stiffness_r.push_back(w.transpose() * (kp * w));
  for (const auto& f : fom.load_basis) r.load_r.push_back(w.transpose() * f);
  return r;
}

/// Integrate the reduced system for one parameter point. Initial conditions
/// are the projections W^T v0, W^T v0_dot of the full-order ones.
inline dyn::StateHistory rom_solve(const RomArrays& rom, const fem::ParamPoint& eta, double dt,
                                   int sample_count, const dyn::GenAlphaParams& params = {},
                                   const Vec& v0_reduced = Vec(), const Vec& v0_dot_reduced = Vec()) {
  eta.validate();
  if (rom.load_r.size() != 1)
    throw ConfigError("rom_solve: expected a single load basis for the portal load");
  const Mat k = rom.stiffness_at(eta.g, eta.damage_level);
  const Vec& f_r = rom.load_r[0];
  const Vec v0 = v0_reduced.size() ? v0_reduced : Vec(Vec::Zero(rom.size()));
  const Vec v0d = v0_dot_reduced.size() ? v0_dot_reduced : Vec(Vec::Zero(rom.size()));
  return dyn::integrate(
      rom.mass_r, k, [&](double t) -> Vec { return fem::load_modulation(t, eta) * f_r; }, v0, v0d,
      dt, sample_count, params);
}

/// Lift a reduced history back to the full space, V = W V_R.
inline dyn::StateHistory lift(const PodBasis& basis, const dyn::StateHistory& reduced) {
  dyn::StateHistory full;
  full.dt = reduced.dt;
  full.displacement = basis.basis * reduced.displacement;
  full.velocity = basis.basis * reduced.velocity;
  full.acceleration = basis.basis * reduced.acceleration;
  return full;
}

/// Per-sensor comparison between a full-order trajectory and a lifted
/// reduced-order one.
struct ReconstructionReport {
  std::vector<double> rel_l2_displacement;   // per sensor dof
  std::vector<double> rel_max_displacement;
  std::vector<double> rel_l2_acceleration;
  std::vector<double> rel_max_acceleration;

  double worst_l2_displacement() const {
    double m = 0.0;
    for (double v : rel_l2_displacement) m = std::max(m, v);
    return m;
  }
  double worst_l2_acceleration() const {
    double m = 0.0;
    for (double v : rel_l2_acceleration) m = std::max(m, v);
    return m;
  }
};

inline ReconstructionReport reconstruction_report(const dyn::StateHistory& fom_history,
                                                  const dyn::StateHistory& rom_lifted,
                                                  const std::vector<int>& sensor_dofs) {
  if (fom_history.sample_count() != rom_lifted.sample_count())
    throw ConfigError("reconstruction_report: mismatched sample counts");
  ReconstructionReport rep;
  const Mat acc_fom = dyn::sensor_accelerations(fom_history);
  const Mat acc_rom = dyn::sensor_accelerations(rom_lifted);
  for (int dof : sensor_dofs) {
    const Vec ud = fom_history.displacement.row(dof).transpose();
    const Vec ud_r = rom_lifted.displacement.row(dof).transpose();
    const Vec ua = acc_fom.row(dof).transpose();
    const Vec ua_r = acc_rom.row(dof).transpose();
    rep.rel_l2_displacement.push_back(relative_l2(ud, ud_r));
    rep.rel_l2_acceleration.push_back(relative_l2(ua, ua_r));
    const double dmax = ud.cwiseAbs().maxCoeff();
    const double amax = ua.cwiseAbs().maxCoeff();
    rep.rel_max_displacement.push_back(
        dmax > 0.0 ? (ud - ud_r).cwiseAbs().maxCoeff() / dmax : 0.0);
    rep.rel_max_acceleration.push_back(
        amax > 0.0 ? (ua - ua_r).cwiseAbs().maxCoeff() / amax : 0.0);
  }
  return rep;
}

}  // namespace romshm::rom
