#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/fem/mesh.hpp"

namespace romshm::fem {

/// One sampled operating/damage condition of the portal frame.
struct ParamPoint {
  int g = 0;                  // damage class, 0 = undamaged
  double amplitude = 0.0;     // load amplitude A (Pa)
  double load_frequency = 0.0;  // f_load (Hz)
  double damage_level = 0.0;  // delta in [0, 1)

  void validate() const {
    if (g < 0) throw ConfigError("param point: damage class must be >= 0");
    if (!(damage_level >= 0.0 && damage_level < 1.0))
      throw ConfigError("param point: damage level must be in [0, 1)");
    if (g == 0 && damage_level != 0.0)
      throw ConfigError("param point: damage level must be 0 for the undamaged class");
  }
};

/// q(t) = A |sin(2 pi f t)| — the scalar time modulation of the portal load.
inline double load_modulation(double t, const ParamPoint& eta) {
  return eta.amplitude * std::abs(std::sin(2.0 * M_PI * eta.load_frequency * t));
}

/// Consistent nodal forces of a unit pressure (1 Pa, +x direction) on the
/// given edges of the left column face. This is the single spatial load
/// basis vector f' of the affine decomposition; the full load is
/// f(t) = A |sin(2 pi f t)| * f'.
inline Vec portal_load_basis(const Mesh2D& mesh, const std::vector<std::array<int, 2>>& edges) {
  if (edges.empty()) throw ConfigError("portal load: empty loaded edge set");
  Vec f = Vec::Zero(mesh.dof_count());
  for (const auto& e : edges) {
    const double len = (mesh.nodes.col(e[0]) - mesh.nodes.col(e[1])).norm();
    const double half = 0.5 * len * mesh.thickness;
    f[2 * e[0]] += half;
    f[2 * e[1]] += half;
  }
  return f;
}

/// f(t) for the portal frame on the full dof set.
inline Vec load_vector_portal(const Mesh2D& mesh, const std::vector<std::array<int, 2>>& edges,
                              double t, const ParamPoint& eta) {
  return load_modulation(t, eta) * portal_load_basis(mesh, edges);
}

// ---------------------------------------------------------------------------
// Moving-load signal generator (train passage over sleepers).
// ---------------------------------------------------------------------------

/// Pressure footprint under one sleeper: load spreads 4:1 through the ballast
/// onto a 0.55 m x 2.1 m surface.
constexpr double kSleeperLoadedArea = 0.55 * 2.1;  // m^2

namespace detail {
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }
}  // namespace detail

/// Time modulation of axle alpha over sleeper xi: a triangular hat that peaks
/// at 1 when the axle crosses the sleeper axis, vanishes at the adjacent
/// sleeper axes, and is gated to zero outside that window.
inline double axle_time_modulation(double sleeper_x, double spacing, double axle_offset,
                                   double speed_m_s, double t) {
  const double t_prev = (sleeper_x - spacing + axle_offset) / speed_m_s;
  const double t_next = (sleeper_x + spacing + axle_offset) / speed_m_s;
  const double t_peak = (sleeper_x + axle_offset) / speed_m_s;
  const double gate =
      detail::heaviside(t - t_prev) - detail::heaviside(t - t_next);
  if (gate == 0.0) return 0.0;
  // Clamped so roundoff at the gate edges cannot produce a negative value.
  return gate * std::max(0.0, 1.0 - std::abs(t - t_peak) / (spacing / speed_m_s));
}

/// Per-sleeper pressure p^xi(t) = sum_alpha p_max * A^xi_alpha(t, gamma).
/// Sleeper positions must be uniformly spaced; speed is given in km/h as in
/// the train specification.
inline Vec moving_load_signal(const std::vector<double>& sleeper_positions,
                              const std::vector<double>& axle_offsets, double speed_kmh,
                              double axle_load_n, double t) {
  if (!(speed_kmh > 0.0)) throw ConfigError("moving load: speed must be > 0");
  if (sleeper_positions.size() < 2) throw ConfigError("moving load: need at least two sleepers");
  if (axle_offsets.empty()) throw ConfigError("moving load: need at least one axle");
  const double spacing = sleeper_positions[1] - sleeper_positions[0];
  for (std::size_t i = 1; i + 1 < sleeper_positions.size(); ++i)
    if (std::abs((sleeper_positions[i + 1] - sleeper_positions[i]) - spacing) > 1e-9)
      throw ConfigError("moving load: sleepers must be uniformly spaced");
  const double speed = speed_kmh / 3.6;
  const double p_max = axle_load_n / kSleeperLoadedArea;
  Vec p = Vec::Zero(static_cast<Eigen::Index>(sleeper_positions.size()));
  for (std::size_t xi = 0; xi < sleeper_positions.size(); ++xi)
    for (double x0 : axle_offsets)
      p[static_cast<Eigen::Index>(xi)] +=
          p_max * axle_time_modulation(sleeper_positions[xi], spacing, x0, speed, t);
  return p;
}

}  // namespace romshm::fem
