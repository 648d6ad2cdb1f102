#include <catch2/catch.hpp>

#include "romshm/fem/mesh.hpp"

using namespace romshm;
using namespace romshm::fem;

namespace {
PortalGeometry test_geometry() {
  PortalGeometry geo;
  geo.column_height = 4.0;
  geo.span = 3.0;
  geo.column_width = 0.4;
  geo.deck_depth = 0.5;
  geo.thickness = 0.1;
  geo.damage_boxes = {{0.0, 0.0, 0.4, 0.8},      // left base
                      {0.0, 2.7, 0.4, 3.5},      // left top
                      {3.4, 2.7, 3.8, 3.5},      // right top
                      {3.4, 0.0, 3.8, 0.8}};     // right base
  return geo;
}
}  // namespace

TEST_CASE("unit square with one cell gives the minimal triangulation") {
  const Mesh2D m = generate_rect_mesh(1.0, 1.0, 1, 1, 1.0);
  REQUIRE(m.node_count() == 4);
  REQUIRE(m.element_count() == 2);
  for (int s : m.subdomain_id) REQUIRE(s == 0);
  for (int e = 0; e < m.element_count(); ++e) REQUIRE(m.element_area(e) == Approx(0.5));
}

TEST_CASE("portal mesh is a valid partitioned triangulation with clamped bases") {
  const auto geo = test_geometry();
  const Mesh2D m = generate_portal_mesh(geo, 0.2);
  REQUIRE_NOTHROW(m.validate());
  REQUIRE(m.element_count() > 0);
  REQUIRE(m.subdomain_count() == 4);

  // Every subdomain id appears and ids partition the element set.
  std::vector<int> counts(5, 0);
  for (int s : m.subdomain_id) {
    REQUIRE(s >= 0);
    REQUIRE(s <= 4);
    counts[s]++;
  }
  for (int p = 0; p <= 4; ++p) REQUIRE(counts[p] > 0);

  // Fixed dofs sit exactly on the base line.
  REQUIRE(!m.fixed_dofs.empty());
  for (int d : m.fixed_dofs) REQUIRE(m.nodes(1, d / 2) == 0.0);

  // Nodes above the base are free.
  int base_nodes = 0;
  for (int i = 0; i < m.node_count(); ++i)
    if (m.nodes(1, i) == 0.0) base_nodes++;
  REQUIRE(static_cast<int>(m.fixed_dofs.size()) == 2 * base_nodes);
}

TEST_CASE("halving the target element size grows the element count about 4x") {
  const auto geo = test_geometry();
  const Mesh2D coarse = generate_portal_mesh(geo, 0.2);
  const Mesh2D fine = generate_portal_mesh(geo, 0.1);
  const double ratio = static_cast<double>(fine.element_count()) / coarse.element_count();
  REQUIRE(ratio > 3.0);
  REQUIRE(ratio < 5.0);
}

TEST_CASE("degenerate geometry is rejected") {
  auto geo = test_geometry();
  geo.column_width = 0.0;
  REQUIRE_THROWS_AS(generate_portal_mesh(geo, 0.2), ConfigError);
  geo = test_geometry();
  geo.thickness = 0.0;
  REQUIRE_THROWS_AS(generate_portal_mesh(geo, 0.2), ConfigError);
  REQUIRE_THROWS_AS(generate_portal_mesh(test_geometry(), 0.0), ConfigError);
}

TEST_CASE("mesh serialization round-trips through the container") {
  const Mesh2D m = generate_portal_mesh(test_geometry(), 0.25);
  io::Archive a;
  m.save(a);
  const Mesh2D back = Mesh2D::load(a);
  REQUIRE(back.nodes == m.nodes);
  REQUIRE(back.elements == m.elements);
  REQUIRE(back.subdomain_id == m.subdomain_id);
  REQUIRE(back.fixed_dofs == m.fixed_dofs);
  REQUIRE(back.thickness == m.thickness);
}
