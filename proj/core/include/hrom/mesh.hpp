#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace hrom {

/// Triangle of a structured periodic grid. Vertices are counter-clockwise and
/// carry their (i,j) lattice indices so edge identification is exact integer
/// arithmetic, not floating point matching.
struct Triangle {
  std::array<Eigen::Vector2d, 3> vertex;
  std::array<std::array<int, 2>, 3> lattice;  // unwrapped (i,j), i in [0,nx], j in [0,ny]
  double area = 0.0;
};

/// Edge shared by two triangles inside the domain. The normal points from
/// `left` (the lower element index) into `right`.
struct InteriorEdge {
  int left_element = -1;
  int left_edge = -1;
  int right_element = -1;
  int right_edge = -1;
  double length = 0.0;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
};

/// Pair of boundary edges identified by periodicity. `major` is the edge with
/// the larger element index (it lies on the x=xmax or y=ymax side); its outward
/// normal is the fixed normal of the pair. A point x on the major edge
/// corresponds to x + shift on the minor edge.
struct PeriodicPair {
  int major_element = -1;
  int major_edge = -1;
  int minor_element = -1;
  int minor_edge = -1;
  double length = 0.0;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  Eigen::Vector2d shift = Eigen::Vector2d::Zero();
};

struct Mesh {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  int nx = 0, ny = 0;
  std::vector<Triangle> elements;
  std::vector<InteriorEdge> interior_edges;
  std::vector<PeriodicPair> periodic_pairs;

  int element_count() const { return static_cast<int>(elements.size()); }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double domain_area() const { return width() * height(); }
};

struct EdgeClassification {
  std::vector<InteriorEdge> interior;
  std::vector<PeriodicPair> periodic;
};

/// Uniform triangulation of [xmin,xmax]x[ymin,ymax] with nx*ny cells, each cell
/// split along its lower-left to upper-right diagonal; 2*nx*ny elements in
/// row-major cell order. Throws ConfigError for nx,ny < 2 or empty boxes and
/// MeshError if the periodic identification fails.
Mesh build_periodic_mesh(double xmin, double xmax, double ymin, double ymax,
                         int nx, int ny);

/// Recomputes the interior/periodic edge classification of a mesh from its
/// element lattice indices. Every edge must end up interior or in exactly one
/// periodic pair; an unmatched boundary edge raises MeshError.
EdgeClassification classify_edges(const Mesh& mesh);

/// Endpoints of local edge k (from vertex k to vertex k+1 mod 3).
std::array<Eigen::Vector2d, 2> edge_endpoints(const Triangle& t, int local_edge);

/// Outward unit normal of local edge k for a counter-clockwise triangle.
Eigen::Vector2d edge_outward_normal(const Triangle& t, int local_edge);

}  // namespace hrom
