#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "romshm/common.hpp"
#include "romshm/io/container.hpp"

namespace romshm::fem {

/// Axis-aligned box, used for damage subdomains and sensor placement.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

/// Single-storey frame: two columns carrying a deck. The damage boxes define
/// the candidate subdomains Omega_1..Omega_G; everything outside them is the
/// never-damaged background (subdomain 0).
struct PortalGeometry {
  double column_height = 0.0;  // total height H, base to deck top (m)
  double span = 0.0;           // clear opening between column inner faces (m)
  double column_width = 0.0;   // in-plane column width (m)
  double deck_depth = 0.0;     // deck depth (m)
  double thickness = 0.0;      // out-of-plane thickness (m)
  std::vector<Box> damage_boxes;

  double total_width() const { return span + 2.0 * column_width; }

  void validate() const {
    if (!(column_height > 0.0) || !(span > 0.0) || !(column_width > 0.0) ||
        !(deck_depth > 0.0) || !(thickness > 0.0))
      throw ConfigError("portal geometry: all dimensions must be > 0");
    if (deck_depth >= column_height)
      throw ConfigError("portal geometry: deck depth must be smaller than column height");
  }
};

struct Mesh2D {
  Mat nodes;                               // 2 x n_nodes coordinates (m)
  std::vector<std::array<int, 3>> elements;  // CCW 3-node triangles
  std::vector<int> subdomain_id;           // per element, 0 = background
  std::vector<int> fixed_dofs;             // constrained dof indices (2i, 2i+1 layout)
  double thickness = 0.0;

  int node_count() const { return static_cast<int>(nodes.cols()); }
  int element_count() const { return static_cast<int>(elements.size()); }
  int dof_count() const { return 2 * node_count(); }

  double element_area(int e) const {
    const auto& el = elements[e];
    const double x1 = nodes(0, el[0]), y1 = nodes(1, el[0]);
    const double x2 = nodes(0, el[1]), y2 = nodes(1, el[1]);
    const double x3 = nodes(0, el[2]), y3 = nodes(1, el[2]);
    return 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
  }

  int subdomain_count() const {
    int g = 0;
    for (int s : subdomain_id) g = std::max(g, s);
    return g;
  }

  /// Nearest node to (x, y).
  int nearest_node(double x, double y) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < node_count(); ++i) {
      const double dx = nodes(0, i) - x, dy = nodes(1, i) - y;
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  void validate() const {
    if (thickness <= 0.0) throw ConfigError("mesh: thickness must be > 0");
    if (elements.size() != subdomain_id.size())
      throw ConfigError("mesh: subdomain ids must match element count");
    const int n = node_count();
    for (std::size_t e = 0; e < elements.size(); ++e) {
      for (int k = 0; k < 3; ++k)
        if (elements[e][k] < 0 || elements[e][k] >= n)
          throw ConfigError("mesh: element references invalid node");
      if (element_area(static_cast<int>(e)) <= 0.0)
        throw NumericalError("mesh: element " + std::to_string(e) + " has non-positive area");
      if (subdomain_id[e] < 0) throw ConfigError("mesh: negative subdomain id");
    }
    std::set<int> seen;
    for (int d : fixed_dofs) {
      if (d < 0 || d >= dof_count()) throw ConfigError("mesh: fixed dof out of range");
      if (!seen.insert(d).second) throw ConfigError("mesh: duplicate fixed dof");
    }
  }

  void save(io::Archive& a, const std::string& prefix = "mesh/") const {
    a.put_matrix(prefix + "nodes", nodes);
    std::vector<std::int64_t> conn;
    conn.reserve(elements.size() * 3);
    for (const auto& el : elements)
      for (int k : el) conn.push_back(k);
    a.put_indices(prefix + "elements", conn);
    a.put_indices(prefix + "subdomain_id",
                  std::vector<std::int64_t>(subdomain_id.begin(), subdomain_id.end()));
    a.put_indices(prefix + "fixed_dofs",
                  std::vector<std::int64_t>(fixed_dofs.begin(), fixed_dofs.end()));
    a.put_scalar(prefix + "thickness", thickness);
  }

  static Mesh2D load(const io::Archive& a, const std::string& prefix = "mesh/") {
    Mesh2D m;
    m.nodes = a.get_matrix(prefix + "nodes");
    const auto conn = a.get_indices(prefix + "elements");
    m.elements.resize(conn.size() / 3);
    for (std::size_t e = 0; e < m.elements.size(); ++e)
      m.elements[e] = {static_cast<int>(conn[3 * e]), static_cast<int>(conn[3 * e + 1]),
                       static_cast<int>(conn[3 * e + 2])};
    for (auto s : a.get_indices(prefix + "subdomain_id"))
      m.subdomain_id.push_back(static_cast<int>(s));
    for (auto d : a.get_indices(prefix + "fixed_dofs"))
      m.fixed_dofs.push_back(static_cast<int>(d));
    m.thickness = a.get_scalar(prefix + "thickness");
    return m;
  }
};

/// Structured rectangle mesh, nx-by-ny cells split into two triangles each.
/// All elements are assigned to subdomain 0 and no dofs are fixed.
inline Mesh2D generate_rect_mesh(double width, double height, int nx, int ny,
                                 double thickness) {
  if (nx < 1 || ny < 1) throw ConfigError("rect mesh: need at least one cell per direction");
  Mesh2D m;
  m.thickness = thickness;
  m.nodes.resize(2, (nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int id = j * (nx + 1) + i;
      m.nodes(0, id) = width * i / nx;
      m.nodes(1, id) = height * j / ny;
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int n00 = j * (nx + 1) + i;
      const int n10 = n00 + 1;
      const int n01 = n00 + (nx + 1);
      const int n11 = n01 + 1;
      m.elements.push_back({n00, n10, n11});
      m.elements.push_back({n00, n11, n01});
    }
  m.subdomain_id.assign(m.elements.size(), 0);
  return m;
}

namespace detail {

/// Breakpoints covering [lo, hi] bands with spacing close to h, band edges kept.
inline std::vector<double> band_breakpoints(const std::vector<double>& edges, double h) {
  std::vector<double> pts;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    const double lo = edges[b], hi = edges[b + 1];
    const int n = std::max(1, static_cast<int>(std::round((hi - lo) / h)));
    for (int i = 0; i < n; ++i) pts.push_back(lo + (hi - lo) * i / n);
  }
  pts.push_back(edges.back());
  return pts;
}

}  // namespace detail

/// Structured triangulation of the portal frame. Cells are kept when their
/// center lies inside one of the columns or the deck; the diagonal split is
/// fixed so the mesh is deterministic for a given geometry and element size.
inline Mesh2D generate_portal_mesh(const PortalGeometry& geo, double target_element_size) {
  geo.validate();
  if (!(target_element_size > 0.0))
    throw ConfigError("portal mesh: target element size must be > 0");

  const double h = target_element_size;
  const double wc = geo.column_width;
  const double wt = geo.total_width();
  const double ht = geo.column_height;
  const double dd = geo.deck_depth;

  const auto xs = detail::band_breakpoints({0.0, wc, wt - wc, wt}, h);
  const auto ys = detail::band_breakpoints({0.0, ht - dd, ht}, h);
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;

  auto inside = [&](double x, double y) {
    const bool in_column = (x <= wc || x >= wt - wc) && y <= ht;
    const bool in_deck = y >= ht - dd && y <= ht;
    return in_column || in_deck;
  };

  // Mark kept cells and used grid nodes.
  std::vector<char> keep(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<int> node_id(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]);
      const double cy = 0.5 * (ys[j] + ys[j + 1]);
      if (inside(cx, cy)) keep[static_cast<std::size_t>(j) * nx + i] = 1;
    }

  Mesh2D m;
  m.thickness = geo.thickness;
  int next_id = 0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0 && !used; ++dj)
        for (int di = -1; di <= 0 && !used; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && ci < nx && cj >= 0 && cj < ny &&
              keep[static_cast<std::size_t>(cj) * nx + ci])
            used = true;
        }
      if (used) node_id[static_cast<std::size_t>(j) * (nx + 1) + i] = next_id++;
    }

  m.nodes.resize(2, next_id);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int id = node_id[static_cast<std::size_t>(j) * (nx + 1) + i];
      if (id >= 0) {
        m.nodes(0, id) = xs[i];
        m.nodes(1, id) = ys[j];
      }
    }

  auto subdomain_of = [&](double cx, double cy) {
    for (std::size_t p = 0; p < geo.damage_boxes.size(); ++p)
      if (geo.damage_boxes[p].contains(cx, cy)) return static_cast<int>(p) + 1;
    return 0;
  };

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!keep[static_cast<std::size_t>(j) * nx + i]) continue;
      const int n00 = node_id[static_cast<std::size_t>(j) * (nx + 1) + i];
      const int n10 = node_id[static_cast<std::size_t>(j) * (nx + 1) + i + 1];
      const int n01 = node_id[static_cast<std::size_t>(j + 1) * (nx + 1) + i];
      const int n11 = node_id[static_cast<std::size_t>(j + 1) * (nx + 1) + i + 1];
      const double cx = 0.5 * (xs[i] + xs[i + 1]);
      const double cy = 0.5 * (ys[j] + ys[j + 1]);
      const int sd = subdomain_of(cx, cy);
      m.elements.push_back({n00, n10, n11});
      m.elements.push_back({n00, n11, n01});
      m.subdomain_id.push_back(sd);
      m.subdomain_id.push_back(sd);
    }

  // Clamped supports at the column bases.
  for (int i = 0; i < m.node_count(); ++i)
    if (m.nodes(1, i) == 0.0) {
      m.fixed_dofs.push_back(2 * i);
      m.fixed_dofs.push_back(2 * i + 1);
    }

  m.validate();
  return m;
}

/// Boundary edges of the left column outer face (x = 0) spanning the deck
/// depth; this is where the portal load acts. Returns node index pairs.
inline std::vector<std::array<int, 2>> portal_loaded_edges(const Mesh2D& mesh,
                                                           const PortalGeometry& geo) {
  const double y_lo = geo.column_height - geo.deck_depth;
  const double y_hi = geo.column_height;
  const double tol = 1e-9;
  std::vector<int> face_nodes;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (std::abs(mesh.nodes(0, i)) < tol && mesh.nodes(1, i) >= y_lo - tol &&
        mesh.nodes(1, i) <= y_hi + tol)
      face_nodes.push_back(i);
  std::sort(face_nodes.begin(), face_nodes.end(), [&](int a, int b) {
    return mesh.nodes(1, a) < mesh.nodes(1, b);
  });
  std::vector<std::array<int, 2>> edges;
  for (std::size_t k = 0; k + 1 < face_nodes.size(); ++k)
    edges.push_back({face_nodes[k], face_nodes[k + 1]});
  if (edges.empty()) throw ConfigError("portal mesh: loaded edge set is empty");
  return edges;
}

}  // namespace romshm::fem
