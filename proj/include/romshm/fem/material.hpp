#pragma once

#include "romshm/common.hpp"

namespace romshm::fem {

/// Linear isotropic material under plane stress.
struct Material {
  double young_modulus = 0.0;  // Pa
  double poisson_ratio = 0.0;
  double density = 0.0;  // kg/m^3

  void validate() const {
    if (!(young_modulus > 0.0)) throw ConfigError("material: young_modulus must be > 0");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
      throw ConfigError("material: poisson_ratio must be in [0, 0.5)");
    if (!(density > 0.0)) throw ConfigError("material: density must be > 0");
  }

  /// Plane-stress constitutive matrix (3x3, Voigt order xx, yy, xy).
  Eigen::Matrix3d plane_stress_matrix() const {
    const double e = young_modulus;
    const double nu = poisson_ratio;
    Eigen::Matrix3d d;
    d << 1.0, nu, 0.0,
         nu, 1.0, 0.0,
         0.0, 0.0, (1.0 - nu) / 2.0;
    return (e / (1.0 - nu * nu)) * d;
  }
};

}  // namespace romshm::fem
