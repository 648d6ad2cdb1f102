#include <catch2/catch.hpp>

#include "romshm/fem/assembly.hpp"
#include "romshm/fem/mesh.hpp"

using namespace romshm;
using namespace romshm::fem;

namespace {

Mesh2D unit_right_triangle() {
  Mesh2D m;
  m.thickness = 1.0;
  m.nodes.resize(2, 3);
  m.nodes << 0.0, 1.0, 0.0,
             0.0, 0.0, 1.0;
  m.elements = {{0, 1, 2}};
  m.subdomain_id = {0};
  return m;
}

Material unit_material(double e = 1.0, double nu = 0.0, double rho = 1.0) {
  Material mat;
  mat.young_modulus = e;
  mat.poisson_ratio = nu;
  mat.density = rho;
  return mat;
}

PortalGeometry coarse_geometry() {
  PortalGeometry geo;
  geo.column_height = 4.0;
  geo.span = 3.0;
  geo.column_width = 0.4;
  geo.deck_depth = 0.5;
  geo.thickness = 0.1;
  geo.damage_boxes = {{0.0, 0.0, 0.4, 0.8},
                      {0.0, 2.7, 0.4, 3.5},
                      {3.4, 2.7, 3.8, 3.5},
                      {3.4, 0.0, 3.8, 0.8}};
  return geo;
}

}  // namespace

TEST_CASE("consistent CST mass matches the exact shape-function integral") {
  const Mesh2D m = unit_right_triangle();
  const SpMat mass = assemble_mass(m, unit_material());
  // Exact integral for linear shape functions: (A/12) [2 1 1; 1 2 1; 1 1 2]
  // per coordinate direction, A = 0.5.
  const double a12 = 0.5 / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expected = a12 * (i == j ? 2.0 : 1.0);
      REQUIRE(mass.coeff(2 * i, 2 * j) == Approx(expected).margin(1e-15));
      REQUIRE(mass.coeff(2 * i + 1, 2 * j + 1) == Approx(expected).margin(1e-15));
      REQUIRE(mass.coeff(2 * i, 2 * j + 1) == 0.0);
    }
}

TEST_CASE("rigid translation recovers the total structural mass") {
  const Mesh2D m = generate_portal_mesh(coarse_geometry(), 0.3);
  const Material mat = unit_material(3.0e10, 0.2, 2500.0);
  const SpMat mass = assemble_mass(m, mat);

  double total_area = 0.0;
  for (int e = 0; e < m.element_count(); ++e) total_area += m.element_area(e);
  const double total_mass = mat.density * m.thickness * total_area;

  Vec rx = Vec::Zero(m.dof_count());
  for (int i = 0; i < m.node_count(); ++i) rx[2 * i] = 1.0;
  REQUIRE(rx.dot(mass * rx) == Approx(total_mass).epsilon(1e-12));
}

TEST_CASE("mass is linear in the density") {
  const Mesh2D m = unit_right_triangle();
  const SpMat m1 = assemble_mass(m, unit_material(1.0, 0.0, 1.0));
  const SpMat m2 = assemble_mass(m, unit_material(1.0, 0.0, 2.0));
  REQUIRE((Mat(m2) - 2.0 * Mat(m1)).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-15));
}

TEST_CASE("single CST stiffness matches the strain-displacement construction") {
  const Mesh2D m = unit_right_triangle();
  const Material mat = unit_material(1.0, 0.0);
  const SpMat k = stiffness_at(assemble_stiffness_components(m, mat), 0, 0.0);

  // Independent route: write B for the unit right triangle from the shape
  // function gradients and form t A B^T D B directly.
  Eigen::Matrix<double, 3, 6> b;
  b << -1, 0, 1, 0, 0, 0,
        0, -1, 0, 0, 0, 1,
       -1, -1, 0, 1, 1, 0;
  Eigen::Matrix3d d;
  d << 1, 0, 0,
       0, 1, 0,
       0, 0, 0.5;
  const Mat expected = 1.0 * 0.5 * b.transpose() * d * b;
  REQUIRE((Mat(k) - expected).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-14));
}

TEST_CASE("stiffness components sum to the monolithic matrix and stay PSD") {
  const Mesh2D m = generate_portal_mesh(coarse_geometry(), 0.25);
  const Material mat = unit_material(3.0e10, 0.2, 2500.0);
  const auto components = assemble_stiffness_components(m, mat);
  REQUIRE(components.size() == 5);

  // One-shot assembly with every element in one subdomain.
  Mesh2D merged = m;
  merged.subdomain_id.assign(m.element_count(), 0);
  const SpMat monolithic = assemble_stiffness_components(merged, mat)[0];

  SpMat sum = components[0];
  for (std::size_t p = 1; p < components.size(); ++p) sum += components[p];
  const double scale = Mat(monolithic).cwiseAbs().maxCoeff();
  REQUIRE((Mat(sum) - Mat(monolithic)).cwiseAbs().maxCoeff() / scale < 1e-12);

  for (const auto& kp : components) {
    const Mat dense(kp);
    REQUIRE((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(dense, Eigen::EigenvaluesOnly);
    REQUIRE(eig.eigenvalues().minCoeff() > -1e-9 * scale);
  }
}

TEST_CASE("each component annihilates rigid motions restricted to its support") {
  // Two elements in different subdomains on a shared square.
  Mesh2D m = generate_rect_mesh(1.0, 1.0, 1, 1, 1.0);
  m.subdomain_id = {1, 2};
  const auto components = assemble_stiffness_components(m, unit_material(2.0, 0.3));

  for (int p = 1; p <= 2; ++p) {
    std::vector<bool> support(m.node_count(), false);
    for (int e = 0; e < m.element_count(); ++e)
      if (m.subdomain_id[e] == p)
        for (int n : m.elements[e]) support[n] = true;

    // Translations and an in-plane rotation, zeroed outside the support.
    Mat rigid = Mat::Zero(m.dof_count(), 3);
    for (int i = 0; i < m.node_count(); ++i) {
      if (!support[i]) continue;
      rigid(2 * i, 0) = 1.0;
      rigid(2 * i + 1, 1) = 1.0;
      rigid(2 * i, 2) = -m.nodes(1, i);
      rigid(2 * i + 1, 2) = m.nodes(0, i);
    }
    REQUIRE((Mat(components[p]) * rigid).cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("stiffness_at applies the affine damage law exactly") {
  const Mesh2D m = generate_portal_mesh(coarse_geometry(), 0.3);
  const Material mat = unit_material(3.0e10, 0.2, 2500.0);
  const auto components = assemble_stiffness_components(m, mat);

  const Mat undamaged(stiffness_at(components, 0, 0.0));
  Mat sum = Mat(components[0]);
  for (std::size_t p = 1; p < components.size(); ++p) sum += Mat(components[p]);
  REQUIRE((undamaged - sum).cwiseAbs().maxCoeff() == 0.0);

  // K(2, 0.25) = K_und - 0.25 K_2, exactly.
  const Mat damaged(stiffness_at(components, 2, 0.25));
  const Mat expected = undamaged - 0.25 * Mat(components[2]);
  REQUIRE((damaged - expected).cwiseAbs().maxCoeff() == Approx(0.0).margin(
      1e-12 * undamaged.cwiseAbs().maxCoeff()));

  REQUIRE_THROWS_AS(stiffness_at(components, 2, 1.0), ConfigError);
  REQUIRE_THROWS_AS(stiffness_at(components, 7, 0.1), ConfigError);
}

TEST_CASE("constrained mass and damaged stiffness stay positive definite") {
  const Mesh2D m = generate_portal_mesh(coarse_geometry(), 0.3);
  const Material mat = unit_material(3.0e10, 0.2, 2500.0);
  const FomArrays fom = build_fom_arrays(m, mat, {});
  Eigen::LLT<Mat> mass_llt(Mat(fom.mass));
  REQUIRE(mass_llt.info() == Eigen::Success);
  for (double delta : {0.0, 0.5, 0.99}) {
    Eigen::LLT<Mat> k_llt(Mat(fom.stiffness_at(3, delta)));
    REQUIRE(k_llt.info() == Eigen::Success);
  }
}

TEST_CASE("fundamental eigenvalue does not increase with the damage level") {
  const Mesh2D m = generate_portal_mesh(coarse_geometry(), 0.3);
  const Material mat = unit_material(3.0e10, 0.2, 2500.0);
  const FomArrays fom = build_fom_arrays(m, mat, {});

  auto smallest = [&](double delta) {
    const Mat k(fom.stiffness_at(2, delta));
    const Mat mm(fom.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> eig(k, mm, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()[0];
  };
  const double l0 = smallest(0.0);
  const double l1 = smallest(0.1);
  const double l2 = smallest(0.25);
  REQUIRE(l0 > 0.0);
  REQUIRE(l1 <= l0 * (1.0 + 1e-12));
  REQUIRE(l2 <= l1 * (1.0 + 1e-12));
}
