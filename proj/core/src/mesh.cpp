#include "hrom/mesh.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

double signed_area(const std::array<Eigen::Vector2d, 3>& v) {
  return 0.5 * ((v[1].x() - v[0].x()) * (v[2].y() - v[0].y()) -
                (v[2].x() - v[0].x()) * (v[1].y() - v[0].y()));
}

// Wrapped lattice key of an edge: vertex ids taken modulo the grid period,
// sorted so both sides of an edge hash identically.
using EdgeKey = std::array<long, 4>;

EdgeKey make_key(const Triangle& t, int local_edge, int nx, int ny) {
  const auto& a = t.lattice[local_edge];
  const auto& b = t.lattice[(local_edge + 1) % 3];
  long ka = ((a[0] % nx) + nx) % nx + static_cast<long>(nx) * (((a[1] % ny) + ny) % ny);
  long kb = ((b[0] % nx) + nx) % nx + static_cast<long>(nx) * (((b[1] % ny) + ny) % ny);
  if (ka > kb) std::swap(ka, kb);
  return {ka, kb, 0, 0};
}

bool same_unwrapped_segment(const Triangle& ta, int ea, const Triangle& tb, int eb) {
  const auto& a0 = ta.lattice[ea];
  const auto& a1 = ta.lattice[(ea + 1) % 3];
  const auto& b0 = tb.lattice[eb];
  const auto& b1 = tb.lattice[(eb + 1) % 3];
  auto eq = [](const std::array<int, 2>& p, const std::array<int, 2>& q) {
    return p[0] == q[0] && p[1] == q[1];
  };
  return (eq(a0, b0) && eq(a1, b1)) || (eq(a0, b1) && eq(a1, b0));
}

}  // namespace

std::array<Eigen::Vector2d, 2> edge_endpoints(const Triangle& t, int local_edge) {
  return {t.vertex[local_edge], t.vertex[(local_edge + 1) % 3]};
}

Eigen::Vector2d edge_outward_normal(const Triangle& t, int local_edge) {
  const Eigen::Vector2d tangent =
      t.vertex[(local_edge + 1) % 3] - t.vertex[local_edge];
  Eigen::Vector2d n(tangent.y(), -tangent.x());
  return n / n.norm();
}

EdgeClassification classify_edges(const Mesh& mesh) {
  EdgeClassification out;
  std::map<EdgeKey, std::pair<int, int>> open;  // key -> first (element, edge)

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Triangle& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      EdgeKey key = make_key(t, k, mesh.nx, mesh.ny);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::make_pair(e, k));
        continue;
      }
      const auto [e0, k0] = it->second;
      open.erase(it);
      const Triangle& t0 = mesh.elements[e0];
      const auto p0 = edge_endpoints(t0, k0);
      const auto p1 = edge_endpoints(t, k);
      const double len0 = (p0[1] - p0[0]).norm();
      const double len1 = (p1[1] - p1[0]).norm();
      if (std::abs(len0 - len1) > 1e-12 * (len0 + len1)) {
        throw MeshError("periodic edge pair with unequal lengths");
      }
      if (same_unwrapped_segment(t0, k0, t, k)) {
        InteriorEdge edge;
        edge.left_element = e0;  // first seen has the lower element index
        edge.left_edge = k0;
        edge.right_element = e;
        edge.right_edge = k;
        edge.length = len0;
        edge.normal = edge_outward_normal(t0, k0);
        out.interior.push_back(edge);
      } else {
        PeriodicPair pair;
        // Fixed normal belongs to the edge with the larger element index.
        if (e > e0) {
          pair.major_element = e;
          pair.major_edge = k;
          pair.minor_element = e0;
          pair.minor_edge = k0;
        } else {
          pair.major_element = e0;
          pair.major_edge = k0;
          pair.minor_element = e;
          pair.minor_edge = k;
        }
        const Triangle& tmaj = mesh.elements[pair.major_element];
        const Triangle& tmin = mesh.elements[pair.minor_element];
        pair.length = len0;
        pair.normal = edge_outward_normal(tmaj, pair.major_edge);
        const auto emaj = edge_endpoints(tmaj, pair.major_edge);
        const auto emin = edge_endpoints(tmin, pair.minor_edge);
        pair.shift = 0.5 * (emin[0] + emin[1]) - 0.5 * (emaj[0] + emaj[1]);
        out.periodic.push_back(pair);
      }
    }
  }
  if (!open.empty()) {
    throw MeshError("unmatched boundary edge: grid is not periodically conforming");
  }
  return out;
}

Mesh build_periodic_mesh(double xmin, double xmax, double ymin, double ymax,
                         int nx, int ny) {
  if (!(xmax > xmin) || !(ymax > ymin)) {
    throw ConfigError("build_periodic_mesh: empty domain box");
  }
  if (nx < 2 || ny < 2) {
    throw ConfigError("build_periodic_mesh: nx and ny must be at least 2");
  }

  Mesh mesh;
  mesh.xmin = xmin;
  mesh.xmax = xmax;
  mesh.ymin = ymin;
  mesh.ymax = ymax;
  mesh.nx = nx;
  mesh.ny = ny;

  const double hx = (xmax - xmin) / nx;
  const double hy = (ymax - ymin) / ny;

  mesh.elements.reserve(2 * static_cast<size_t>(nx) * ny);
  auto corner = [&](int i, int j) {
    return Eigen::Vector2d(xmin + i * hx, ymin + j * hy);
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Cell split along the lower-left to upper-right diagonal.
      Triangle lower;
      lower.vertex = {corner(i, j), corner(i + 1, j), corner(i + 1, j + 1)};
      lower.lattice = {{{i, j}, {i + 1, j}, {i + 1, j + 1}}};
      Triangle upper;
      upper.vertex = {corner(i, j), corner(i + 1, j + 1), corner(i, j + 1)};
      upper.lattice = {{{i, j}, {i + 1, j + 1}, {i, j + 1}}};
      for (Triangle* t : {&lower, &upper}) {
        t->area = signed_area(t->vertex);
        if (!(t->area > 0.0)) throw MeshError("degenerate or inverted triangle");
      }
      mesh.elements.push_back(lower);
      mesh.elements.push_back(upper);
    }
  }

  EdgeClassification cls = classify_edges(mesh);
  mesh.interior_edges = std::move(cls.interior);
  mesh.periodic_pairs = std::move(cls.periodic);
  return mesh;
}

}  // namespace hrom
