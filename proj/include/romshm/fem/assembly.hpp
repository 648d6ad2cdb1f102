#pragma once

#include <vector>

#include "romshm/common.hpp"
#include "romshm/fem/material.hpp"
#include "romshm/fem/mesh.hpp"
#include "romshm/io/container.hpp"

namespace romshm::fem {

/// Maps the full dof set to the free dof set obtained by eliminating the
/// constrained rows/columns (clamped supports).
struct DofMap {
  std::vector<int> full_to_free;  // -1 for fixed dofs
  std::vector<int> free_to_full;

  static DofMap from_mesh(const Mesh2D& mesh) {
    DofMap dm;
    dm.full_to_free.assign(mesh.dof_count(), 0);
    for (int d : mesh.fixed_dofs) dm.full_to_free[d] = -1;
    for (int d = 0; d < mesh.dof_count(); ++d)
      if (dm.full_to_free[d] == 0) {
        dm.full_to_free[d] = static_cast<int>(dm.free_to_full.size());
        dm.free_to_full.push_back(d);
      }
    return dm;
  }

  int free_count() const { return static_cast<int>(free_to_full.size()); }

  SpMat constrain(const SpMat& a) const {
    std::vector<Triplet> trips;
    trips.reserve(a.nonZeros());
    for (int k = 0; k < a.outerSize(); ++k)
      for (SpMat::InnerIterator it(a, k); it; ++it) {
        const int r = full_to_free[static_cast<int>(it.row())];
        const int c = full_to_free[static_cast<int>(it.col())];
        if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
      }
    SpMat out(free_count(), free_count());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  }

  Vec constrain(const Vec& v) const {
    Vec out(free_count());
    for (int i = 0; i < free_count(); ++i) out[i] = v[free_to_full[i]];
    return out;
  }

  Vec expand(const Vec& v) const {
    Vec out = Vec::Zero(full_to_free.size());
    for (int i = 0; i < free_count(); ++i) out[free_to_full[i]] = v[i];
    return out;
  }
};

namespace detail {

inline Eigen::Matrix<double, 2, 3> element_coords(const Mesh2D& mesh, int e) {
  Eigen::Matrix<double, 2, 3> c;
  for (int k = 0; k < 3; ++k) c.col(k) = mesh.nodes.col(mesh.elements[e][k]);
  return c;
}

}  // namespace detail

/// Constant-strain-triangle stiffness, K_e = t * A * B^T D B.
inline Eigen::Matrix<double, 6, 6> cst_stiffness(const Eigen::Matrix<double, 2, 3>& c,
                                                 const Eigen::Matrix3d& d, double thickness) {
  const double x1 = c(0, 0), y1 = c(1, 0);
  const double x2 = c(0, 1), y2 = c(1, 1);
  const double x3 = c(0, 2), y3 = c(1, 2);
  const double area2 = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
  if (area2 <= 0.0) throw NumericalError("cst_stiffness: non-positive element area");
  const double b1 = y2 - y3, b2 = y3 - y1, b3 = y1 - y2;
  const double c1 = x3 - x2, c2 = x1 - x3, c3 = x2 - x1;
  Eigen::Matrix<double, 3, 6> b;
  b << b1, 0, b2, 0, b3, 0,
       0, c1, 0, c2, 0, c3,
       c1, b1, c2, b2, c3, b3;
  b /= area2;
  return thickness * (0.5 * area2) * b.transpose() * d * b;
}

/// Consistent CST mass: (rho t A / 12) [2 1 1; 1 2 1; 1 1 2] per direction.
inline Eigen::Matrix<double, 6, 6> cst_mass(const Eigen::Matrix<double, 2, 3>& c, double density,
                                            double thickness) {
  const double x1 = c(0, 0), y1 = c(1, 0);
  const double x2 = c(0, 1), y2 = c(1, 1);
  const double x3 = c(0, 2), y3 = c(1, 2);
  const double area = 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
  if (area <= 0.0) throw NumericalError("cst_mass: non-positive element area");
  const double m = density * thickness * area / 12.0;
  Eigen::Matrix<double, 6, 6> me = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double v = m * (i == j ? 2.0 : 1.0);
      me(2 * i, 2 * j) = v;
      me(2 * i + 1, 2 * j + 1) = v;
    }
  return me;
}

namespace detail {

template <typename ElementMatrixFn>
SpMat assemble(const Mesh2D& mesh, ElementMatrixFn&& element_matrix,
               int only_subdomain = -1) {
  std::vector<Triplet> trips;
  trips.reserve(mesh.element_count() * 36);
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (only_subdomain >= 0 && mesh.subdomain_id[e] != only_subdomain) continue;
    const auto me = element_matrix(e);
    const auto& el = mesh.elements[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj)
            trips.emplace_back(2 * el[i] + di, 2 * el[j] + dj, me(2 * i + di, 2 * j + dj));
  }
  SpMat a(mesh.dof_count(), mesh.dof_count());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

}  // namespace detail

/// Consistent mass matrix on the full dof set.
inline SpMat assemble_mass(const Mesh2D& mesh, const Material& material) {
  material.validate();
  return detail::assemble(mesh, [&](int e) {
    return cst_mass(detail::element_coords(mesh, e), material.density, mesh.thickness);
  });
}

/// Per-subdomain stiffness components K_p, p = 0..G. K_p assembles only the
/// elements of subdomain p, so sum_p K_p is the undamaged global stiffness.
inline std::vector<SpMat> assemble_stiffness_components(const Mesh2D& mesh,
                                                        const Material& material) {
  material.validate();
  const Eigen::Matrix3d d = material.plane_stress_matrix();
  const int g = mesh.subdomain_count();
  std::vector<SpMat> components;
  components.reserve(g + 1);
  for (int p = 0; p <= g; ++p)
    components.push_back(detail::assemble(
        mesh,
        [&](int e) { return cst_stiffness(detail::element_coords(mesh, e), d, mesh.thickness); },
        p));
  return components;
}

/// Damage coefficients psi_p(g, delta): 1 - delta on the damaged subdomain,
/// 1 elsewhere. Subdomain 0 never takes damage.
inline std::vector<double> damage_coefficients(int component_count, int g, double delta) {
  if (g < 0 || g >= component_count)
    throw ConfigError("stiffness_at: damage class out of range");
  if (!(delta >= 0.0 && delta < 1.0))
    throw ConfigError("stiffness_at: damage level must be in [0, 1)");
  std::vector<double> psi(component_count, 1.0);
  if (g != 0) psi[g] = 1.0 - delta;
  return psi;
}

/// K(g, delta) = sum_p psi_p K_p.
inline SpMat stiffness_at(const std::vector<SpMat>& components, int g, double delta) {
  const auto psi = damage_coefficients(static_cast<int>(components.size()), g, delta);
  SpMat k = psi[0] * components[0];
  for (std::size_t p = 1; p < components.size(); ++p) k += psi[p] * components[p];
  return k;
}

/// Full-order arrays after constraint elimination: mass, affine stiffness
/// components and the spatial load basis vectors.
struct FomArrays {
  SpMat mass;                   // free x free
  std::vector<SpMat> stiffness_components;  // p = 0..G, free x free
  std::vector<Vec> load_basis;  // spatial load patterns, free-dof size
  DofMap dof_map;

  int dof_count() const { return static_cast<int>(mass.rows()); }
  int damage_class_count() const { return static_cast<int>(stiffness_components.size()); }

  SpMat stiffness_at(int g, double delta) const {
    return fem::stiffness_at(stiffness_components, g, delta);
  }

  void save(io::Archive& a, const std::string& prefix = "fom/") const {
    a.put_scalar(prefix + "dof_count", dof_count());
    a.put_scalar(prefix + "component_count", damage_class_count());
    a.put_scalar(prefix + "load_basis_count", static_cast<double>(load_basis.size()));
    save_sparse(a, prefix + "mass", mass);
    for (std::size_t p = 0; p < stiffness_components.size(); ++p)
      save_sparse(a, prefix + "stiffness_" + std::to_string(p), stiffness_components[p]);
    for (std::size_t p = 0; p < load_basis.size(); ++p)
      a.put_vector(prefix + "load_basis_" + std::to_string(p), load_basis[p]);
    a.put_indices(prefix + "free_to_full",
                  std::vector<std::int64_t>(dof_map.free_to_full.begin(),
                                            dof_map.free_to_full.end()));
    a.put_indices(prefix + "full_to_free",
                  std::vector<std::int64_t>(dof_map.full_to_free.begin(),
                                            dof_map.full_to_free.end()));
  }

  static FomArrays load(const io::Archive& a, const std::string& prefix = "fom/") {
    FomArrays f;
    const int n = static_cast<int>(a.get_scalar(prefix + "dof_count"));
    const int pc = static_cast<int>(a.get_scalar(prefix + "component_count"));
    const int lc = static_cast<int>(a.get_scalar(prefix + "load_basis_count"));
    f.mass = load_sparse(a, prefix + "mass", n);
    for (int p = 0; p < pc; ++p)
      f.stiffness_components.push_back(load_sparse(a, prefix + "stiffness_" + std::to_string(p), n));
    for (int p = 0; p < lc; ++p)
      f.load_basis.push_back(a.get_vector(prefix + "load_basis_" + std::to_string(p)));
    for (auto v : a.get_indices(prefix + "free_to_full"))
      f.dof_map.free_to_full.push_back(static_cast<int>(v));
    for (auto v : a.get_indices(prefix + "full_to_free"))
      f.dof_map.full_to_free.push_back(static_cast<int>(v));
    return f;
  }

 private:
  static void save_sparse(io::Archive& a, const std::string& name, const SpMat& m) {
    std::vector<std::int64_t> rows, cols;
    std::vector<double> vals;
    rows.reserve(m.nonZeros());
    cols.reserve(m.nonZeros());
    vals.reserve(m.nonZeros());
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        rows.push_back(it.row());
        cols.push_back(it.col());
        vals.push_back(it.value());
      }
    a.put_indices(name + "/rows", rows);
    a.put_indices(name + "/cols", cols);
    Vec v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    a.put_vector(name + "/vals", v);
  }

  static SpMat load_sparse(const io::Archive& a, const std::string& name, int n) {
    const auto rows = a.get_indices(name + "/rows");
    const auto cols = a.get_indices(name + "/cols");
    const Vec vals = a.get_vector(name + "/vals");
    std::vector<Triplet> trips;
    trips.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      trips.emplace_back(static_cast<int>(rows[i]), static_cast<int>(cols[i]),
                         vals[static_cast<Eigen::Index>(i)]);
    SpMat m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }
};

/// Assemble the constrained full-order arrays for a mesh.
inline FomArrays build_fom_arrays(const Mesh2D& mesh, const Material& material,
                                  const std::vector<Vec>& full_load_basis) {
  mesh.validate();
  FomArrays f;
  f.dof_map = DofMap::from_mesh(mesh);
  f.mass = f.dof_map.constrain(assemble_mass(mesh, material));
  for (const auto& kp : assemble_stiffness_components(mesh, material))
    f.stiffness_components.push_back(f.dof_map.constrain(kp));
  for (const auto& b : full_load_basis) f.load_basis.push_back(f.dof_map.constrain(b));
  return f;
}

}  // namespace romshm::fem
