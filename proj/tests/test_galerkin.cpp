#include <catch2/catch.hpp>

#include <chrono>

#include "romshm/fem/assembly.hpp"
#include "romshm/fem/mesh.hpp"
#include "romshm/rom/galerkin.hpp"

using namespace romshm;
using namespace romshm::rom;

namespace {

fem::FomArrays small_fom() {
  fem::PortalGeometry geo;
  geo.column_height = 4.0;
  geo.span = 3.0;
  geo.column_width = 0.4;
  geo.deck_depth = 0.5;
  geo.thickness = 0.1;
  geo.damage_boxes = {{0.0, 0.0, 0.4, 0.8},
                      {0.0, 2.7, 0.4, 3.5},
                      {3.4, 2.7, 3.8, 3.5},
                      {3.4, 0.0, 3.8, 0.8}};
  const auto mesh = fem::generate_portal_mesh(geo, 0.3);
  const auto edges = fem::portal_loaded_edges(mesh, geo);
  fem::Material mat;
  mat.young_modulus = 3.0e10;
  mat.poisson_ratio = 0.2;
  mat.density = 2500.0;
  return fem::build_fom_arrays(mesh, mat, {fem::portal_load_basis(mesh, edges)});
}

PodBasis identity_basis(int n) {
  PodBasis b;
  b.basis = Mat::Identity(n, n);
  b.singular_values = Vec::Ones(n);
  b.eps_tol = 1e-12;
  return b;
}

}  // namespace

TEST_CASE("identity basis reproduces the full arrays") {
  const auto fom = small_fom();
  const RomArrays rom = project(fom, identity_basis(fom.dof_count()));
  REQUIRE((rom.mass_r - Mat(fom.mass)).cwiseAbs().maxCoeff() <
          1e-12 * Mat(fom.mass).cwiseAbs().maxCoeff());
  for (int p = 0; p < fom.damage_class_count(); ++p)
    REQUIRE((rom.stiffness_r[p] - Mat(fom.stiffness_components[p])).cwiseAbs().maxCoeff() <=
            1e-12 * (1.0 + Mat(fom.stiffness_components[p]).cwiseAbs().maxCoeff()));
  REQUIRE((rom.load_r[0] - fom.load_basis[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projected mass stays symmetric positive definite") {
  const auto fom = small_fom();
  // A thin orthonormal basis from QR of a random block.
  Rng rng(8);
  Mat block(fom.dof_count(), 12);
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i) block(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(block);
  PodBasis basis;
  basis.basis = Mat(qr.householderQ()).leftCols(12);
  const RomArrays rom = project(fom, basis);

  REQUIRE((rom.mass_r - rom.mass_r.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * rom.mass_r.cwiseAbs().maxCoeff());
  Eigen::LLT<Mat> llt(rom.mass_r);
  REQUIRE(llt.info() == Eigen::Success);
}

TEST_CASE("quadratic forms agree for vectors in the basis span") {
  const auto fom = small_fom();
  Rng rng(13);
  Mat block(fom.dof_count(), 8);
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i) block(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(block);
  PodBasis basis;
  basis.basis = Mat(qr.householderQ()).leftCols(8);
  const RomArrays rom = project(fom, basis);

  const Mat k_full(fom.stiffness_at(2, 0.17));
  const Mat k_red = rom.stiffness_at(2, 0.17);
  for (int trial = 0; trial < 5; ++trial) {
    Vec coeffs(8);
    for (int i = 0; i < 8; ++i) coeffs[i] = rng.gaussian();
    const Vec v = basis.basis * coeffs;
    const double full = v.dot(k_full * v);
    const double reduced = coeffs.dot(k_red * coeffs);
    REQUIRE(std::abs(full - reduced) < 1e-10 * std::abs(full));
  }
}

TEST_CASE("reduced affine assembly matches the projected full assembly") {
  const auto fom = small_fom();
  Rng rng(99);
  Mat block(fom.dof_count(), 6);
  for (int j = 0; j < block.cols(); ++j)
    for (int i = 0; i < block.rows(); ++i) block(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(block);
  PodBasis basis;
  basis.basis = Mat(qr.householderQ()).leftCols(6);
  const RomArrays rom = project(fom, basis);

  const Mat direct = basis.basis.transpose() * Mat(fom.stiffness_at(3, 0.21)) * basis.basis;
  const Mat affine = rom.stiffness_at(3, 0.21);
  REQUIRE((direct - affine).cwiseAbs().maxCoeff() < 1e-9 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("reduced stiffness assembly cost is independent of the mesh size") {
  // Project two meshes of very different size onto bases of equal width and
  // time the affine reduced assembly; the cost must not track the mesh.
  auto build = [](double element_size) {
    fem::PortalGeometry geo;
    geo.column_height = 6.0;
    geo.span = 6.0;
    geo.column_width = 0.245;
    geo.deck_depth = 0.4;
    geo.thickness = 0.1;
    geo.damage_boxes = {{0.0, 0.0, 0.245, 1.2},
                        {0.0, 4.4, 0.245, 5.6},
                        {6.245, 4.4, 6.49, 5.6},
                        {6.245, 0.0, 6.49, 1.2}};
    const auto mesh = fem::generate_portal_mesh(geo, element_size);
    fem::Material mat;
    mat.young_modulus = 3.0e10;
    mat.poisson_ratio = 0.2;
    mat.density = 2500.0;
    return fem::build_fom_arrays(mesh, mat, {});
  };
  auto reduce = [](const fem::FomArrays& fom) {
    Rng rng(4);
    Mat block(fom.dof_count(), 40);
    for (int j = 0; j < block.cols(); ++j)
      for (int i = 0; i < block.rows(); ++i) block(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Mat> qr(block);
    PodBasis basis;
    basis.basis = Mat(qr.householderQ()).leftCols(40);
    return project(fom, basis);
  };
  const RomArrays coarse = reduce(build(0.35));
  const RomArrays fine = reduce(build(0.085));

  auto time_assembly = [](const RomArrays& rom) {
    using clock = std::chrono::high_resolution_clock;
    volatile double sink = 0.0;
    const auto t0 = clock::now();
    for (int rep = 0; rep < 400; ++rep) sink += rom.stiffness_at(2, 0.2)(0, 0);
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  time_assembly(coarse);  // warm-up
  const double t_coarse = time_assembly(coarse);
  const double t_fine = time_assembly(fine);
  REQUIRE(t_fine / t_coarse < 1.5);
  REQUIRE(t_coarse / t_fine < 1.5);
}

TEST_CASE("full-identity basis makes the ROM reproduce the FOM trajectory") {
  const auto fom = small_fom();
  const auto basis = identity_basis(fom.dof_count());
  const RomArrays rom = project(fom, basis);
  fem::ParamPoint eta{2, 3.0e4, 70.0, 0.2};

  const auto reduced = rom_solve(rom, eta, 5e-3, 60);
  const auto lifted = lift(basis, reduced);

  const SpMat k = fom.stiffness_at(eta.g, eta.damage_level);
  const Vec zero = Vec::Zero(fom.dof_count());
  const auto direct = dyn::integrate(
      fom.mass, k, [&](double t) { return Vec(fem::load_modulation(t, eta) * fom.load_basis[0]); },
      zero, zero, 5e-3, 60);

  const double scale = direct.displacement.cwiseAbs().maxCoeff();
  REQUIRE((lifted.displacement - direct.displacement).cwiseAbs().maxCoeff() < 1e-9 * scale);
}

TEST_CASE("reconstruction report is zero for identical inputs") {
  dyn::StateHistory h;
  h.dt = 0.01;
  h.displacement = Mat::Random(4, 20);
  h.velocity = Mat::Zero(4, 20);
  h.acceleration = Mat::Random(4, 20);
  const auto rep = reconstruction_report(h, h, {0, 2});
  REQUIRE(rep.worst_l2_displacement() == 0.0);
  REQUIRE(rep.worst_l2_acceleration() == 0.0);
}

TEST_CASE("error metric equals the hand-computed norm ratio on a toy series") {
  dyn::StateHistory a, b;
  a.dt = b.dt = 1.0;
  a.displacement.resize(1, 3);
  a.displacement << 3.0, 0.0, 4.0;  // norm 5
  b.displacement.resize(1, 3);
  b.displacement << 3.0, 1.0, 4.0;  // difference norm 1
  a.velocity = b.velocity = Mat::Zero(1, 3);
  a.acceleration = Mat::Zero(1, 3);
  b.acceleration = Mat::Zero(1, 3);
  const auto rep = reconstruction_report(a, b, {0});
  REQUIRE(rep.rel_l2_displacement[0] == Approx(1.0 / 5.0));
  REQUIRE(rep.rel_max_displacement[0] == Approx(1.0 / 4.0));
}

TEST_CASE("mismatched sample counts are rejected") {
  dyn::StateHistory a, b;
  a.dt = b.dt = 1.0;
  a.displacement = Mat::Zero(1, 3);
  b.displacement = Mat::Zero(1, 4);
  a.acceleration = Mat::Zero(1, 3);
  b.acceleration = Mat::Zero(1, 4);
  REQUIRE_THROWS_AS(reconstruction_report(a, b, {0}), ConfigError);
}
