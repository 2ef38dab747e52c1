#include "hrom/dg_space.hpp"

#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

LineRule gauss_legendre_01(int n) {
  if (n < 1) throw ConfigError("gauss_legendre_01: need at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Nodes on [-1,1] by Newton iteration on P_n, then mapped to [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.points(n - 1 - i) = 0.5 * (x + 1.0);
    rule.weights(n - 1 - i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

namespace {

void append_orbit3(std::vector<Eigen::Vector2d>& pts, std::vector<double>& wts,
                   double a, double w) {
  const double b = 1.0 - 2.0 * a;
  pts.emplace_back(a, a);
  pts.emplace_back(b, a);
  pts.emplace_back(a, b);
  wts.insert(wts.end(), 3, w);
}

TriangleRule pack(std::vector<Eigen::Vector2d> pts, std::vector<double> wts,
                  int degree) {
  TriangleRule rule;
  rule.degree = degree;
  rule.points.resize(2, static_cast<long>(pts.size()));
  rule.weights.resize(static_cast<long>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(static_cast<long>(i)) = pts[i];
    rule.weights(static_cast<long>(i)) = 0.5 * wts[i];  // area of reference triangle
  }
  return rule;
}

TriangleRule collapsed_rule(int degree) {
  // x = u, y = v(1-u); the (1-u) Jacobian raises the u-degree by one.
  const LineRule gu = gauss_legendre_01((degree + 3) / 2 + 1);
  const LineRule gv = gauss_legendre_01((degree + 2) / 2 + 1);
  TriangleRule rule;
  rule.degree = degree;
  const long n = gu.points.size() * gv.points.size();
  rule.points.resize(2, n);
  rule.weights.resize(n);
  long q = 0;
  for (long i = 0; i < gu.points.size(); ++i) {
    for (long j = 0; j < gv.points.size(); ++j, ++q) {
      const double u = gu.points(i);
      const double v = gv.points(j);
      rule.points.col(q) = Eigen::Vector2d(u, v * (1.0 - u));
      rule.weights(q) = gu.weights(i) * gv.weights(j) * (1.0 - u);
    }
  }
  return rule;
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> wts;
  switch (degree) {
    case 0:
    case 1:
      pts.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      wts.push_back(1.0);
      return pack(pts, wts, 1);
    case 2:
      append_orbit3(pts, wts, 1.0 / 6.0, 1.0 / 3.0);
      return pack(pts, wts, 2);
    case 3:
    case 4:
      append_orbit3(pts, wts, 0.445948490915965, 0.223381589678011);
      append_orbit3(pts, wts, 0.091576213509771, 0.109951743655322);
      return pack(pts, wts, 4);
    case 5: {
      const double s = std::sqrt(15.0);
      pts.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      wts.push_back(9.0 / 40.0);
      append_orbit3(pts, wts, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
      append_orbit3(pts, wts, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
      return pack(pts, wts, 5);
    }
    default:
      return collapsed_rule(degree);
  }
}

MassMatrix::MassMatrix(std::vector<Eigen::MatrixXd> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigError("MassMatrix: no blocks");
  block_size_ = static_cast<int>(blocks_[0].rows());
  llt_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    llt_.emplace_back(b);
    if (llt_.back().info() != Eigen::Success) {
      throw MeshError("MassMatrix: singular local block (degenerate triangle)");
    }
  }
  dim_ = static_cast<long>(blocks_.size()) * block_size_;
}

void MassMatrix::check_length(long n) const {
  if (n != dim_ && n != 2 * dim_) {
    throw ConfigError("MassMatrix: vector length is neither N nor 2N");
  }
}

namespace {
template <typename Op>
Eigen::VectorXd blockwise(const Eigen::VectorXd& x, long dim, int bs, Op&& op) {
  Eigen::VectorXd out(x.size());
  const long halves = x.size() / dim;
  for (long h = 0; h < halves; ++h) {
    for (long e = 0; e * bs < dim; ++e) {
      out.segment(h * dim + e * bs, bs) = op(e, x.segment(h * dim + e * bs, bs));
    }
  }
  return out;
}
}  // namespace

Eigen::VectorXd MassMatrix::apply(const Eigen::VectorXd& x) const {
  check_length(x.size());
  return blockwise(x, dim_, block_size_, [&](long e, const auto& seg) {
    return blocks_[e] * seg;
  });
}

Eigen::VectorXd MassMatrix::solve(const Eigen::VectorXd& x) const {
  check_length(x.size());
  return blockwise(x, dim_, block_size_, [&](long e, const auto& seg) {
    return llt_[e].solve(seg);
  });
}

Eigen::VectorXd MassMatrix::apply_cholesky_t(const Eigen::VectorXd& x) const {
  check_length(x.size());
  return blockwise(x, dim_, block_size_, [&](long e, const auto& seg) {
    return llt_[e].matrixU() * seg;
  });
}

Eigen::VectorXd MassMatrix::solve_cholesky_t(const Eigen::VectorXd& x) const {
  check_length(x.size());
  return blockwise(x, dim_, block_size_, [&](long e, const auto& seg) {
    return llt_[e].matrixU().solve(seg);
  });
}

Eigen::MatrixXd MassMatrix::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (long c = 0; c < x.cols(); ++c) out.col(c) = apply(Eigen::VectorXd(x.col(c)));
  return out;
}

Eigen::MatrixXd MassMatrix::apply_cholesky_t(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (long c = 0; c < x.cols(); ++c)
    out.col(c) = apply_cholesky_t(Eigen::VectorXd(x.col(c)));
  return out;
}

Eigen::MatrixXd MassMatrix::solve_cholesky_t(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (long c = 0; c < x.cols(); ++c)
    out.col(c) = solve_cholesky_t(Eigen::VectorXd(x.col(c)));
  return out;
}

double MassMatrix::weighted_norm(const Eigen::VectorXd& x) const {
  return std::sqrt(x.dot(apply(x)));
}

Eigen::SparseMatrix<double, Eigen::RowMajor> MassMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(blocks_.size() * block_size_ * block_size_);
  for (size_t e = 0; e < blocks_.size(); ++e) {
    const long base = static_cast<long>(e) * block_size_;
    for (int i = 0; i < block_size_; ++i)
      for (int j = 0; j < block_size_; ++j)
        trips.emplace_back(base + i, base + j, blocks_[e](i, j));
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(dim_, dim_);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

DgSpace::DgSpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
  if (degree < 1) throw ConfigError("DgSpace: polynomial degree must be >= 1");
  local_dim_ = (degree + 1) * (degree + 2) / 2;
  dimension_ = static_cast<long>(mesh.element_count()) * local_dim_;

  // Lattice nodes and monomials share the (i,j) enumeration; the nodal basis
  // is recovered from the inverse Vandermonde.
  exponents_.clear();
  std::vector<Eigen::Vector2d> nodes;
  for (int j = 0; j <= degree; ++j) {
    for (int i = 0; i + j <= degree; ++i) {
      exponents_.emplace_back(i, j);
      nodes.emplace_back(double(i) / degree, double(j) / degree);
    }
  }
  Eigen::MatrixXd vander(local_dim_, local_dim_);
  for (int l = 0; l < local_dim_; ++l)
    for (int k = 0; k < local_dim_; ++k)
      vander(l, k) = std::pow(nodes[l].x(), exponents_[k].first) *
                     std::pow(nodes[l].y(), exponents_[k].second);
  coeffs_ = vander.fullPivLu().inverse();

  // Degree 4q covers the quartic energy density and the cubic form tested
  // against the basis; never below 2q+2 so quadratic potentials stay exact.
  volume_rule_ = triangle_rule(std::max(4 * degree, 2 * degree + 2));
  edge_rule_ = gauss_legendre_01(degree + 2);

  const long nq = volume_rule_.points.cols();
  basis_table_.resize(local_dim_, nq);
  grad_xi_table_.resize(local_dim_, nq);
  grad_eta_table_.resize(local_dim_, nq);
  for (long q = 0; q < nq; ++q) {
    const auto p = volume_rule_.points.col(q);
    basis_table_.col(q) = basis_at(p.x(), p.y());
    const Eigen::MatrixXd g = basis_gradient_at(p.x(), p.y());
    grad_xi_table_.col(q) = g.row(0).transpose();
    grad_eta_table_.col(q) = g.row(1).transpose();
  }

  jac_.reserve(mesh.element_count());
  jac_inv_t_.reserve(mesh.element_count());
  det_.reserve(mesh.element_count());
  for (const Triangle& t : mesh.elements) {
    Eigen::Matrix2d J;
    J.col(0) = t.vertex[1] - t.vertex[0];
    J.col(1) = t.vertex[2] - t.vertex[0];
    jac_.push_back(J);
    jac_inv_t_.push_back(J.inverse().transpose());
    det_.push_back(J.determinant());
  }
}

Eigen::VectorXd DgSpace::basis_at(double xi, double eta) const {
  Eigen::VectorXd mono(local_dim_);
  for (int k = 0; k < local_dim_; ++k)
    mono(k) = std::pow(xi, exponents_[k].first) * std::pow(eta, exponents_[k].second);
  return coeffs_.transpose() * mono;
}

Eigen::MatrixXd DgSpace::basis_gradient_at(double xi, double eta) const {
  Eigen::VectorXd dxi(local_dim_), deta(local_dim_);
  for (int k = 0; k < local_dim_; ++k) {
    const int a = exponents_[k].first;
    const int b = exponents_[k].second;
    dxi(k) = a == 0 ? 0.0 : a * std::pow(xi, a - 1) * std::pow(eta, b);
    deta(k) = b == 0 ? 0.0 : b * std::pow(eta, b - 1) * std::pow(xi, a);
  }
  Eigen::MatrixXd g(2, local_dim_);
  g.row(0) = (coeffs_.transpose() * dxi).transpose();
  g.row(1) = (coeffs_.transpose() * deta).transpose();
  return g;
}

Eigen::Vector2d DgSpace::to_physical(int element, double xi, double eta) const {
  return mesh_->elements[element].vertex[0] + jac_[element] * Eigen::Vector2d(xi, eta);
}

Eigen::Vector2d DgSpace::to_reference(int element, const Eigen::Vector2d& x) const {
  return jac_[element].inverse() * (x - mesh_->elements[element].vertex[0]);
}

bool DgSpace::contains(int element, const Eigen::Vector2d& x, double tol) const {
  const Eigen::Vector2d r = to_reference(element, x);
  return r.x() >= -tol && r.y() >= -tol && r.x() + r.y() <= 1.0 + tol;
}

Eigen::Vector2d DgSpace::edge_reference_point(int local_edge, double s) const {
  static const Eigen::Vector2d ref[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const Eigen::Vector2d& a = ref[local_edge];
  const Eigen::Vector2d& b = ref[(local_edge + 1) % 3];
  return a + s * (b - a);
}

MassMatrix assemble_mass_matrix(const DgSpace& space) {
  const int nq = space.local_dim();
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();
  Eigen::MatrixXd ref_block = Eigen::MatrixXd::Zero(nq, nq);
  for (long q = 0; q < rule.weights.size(); ++q) {
    ref_block += rule.weights(q) * phi.col(q) * phi.col(q).transpose();
  }
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(space.mesh().element_count());
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    blocks.push_back(space.map_determinant(e) * ref_block);
  }
  return MassMatrix(std::move(blocks));
}

Eigen::VectorXd l2_project(const DgSpace& space, const MassMatrix& mass,
                           const ScalarField& f) {
  const int nq = space.local_dim();
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();
  Eigen::VectorXd rhs(space.dimension());
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    Eigen::VectorXd local = Eigen::VectorXd::Zero(nq);
    for (long q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector2d x =
          space.to_physical(e, rule.points(0, q), rule.points(1, q));
      local += rule.weights(q) * space.map_determinant(e) * f(x.x(), x.y()) * phi.col(q);
    }
    rhs.segment(space.dof(e, 0), nq) = local;
  }
  return mass.solve(rhs);
}

double evaluate_field(const DgSpace& space, const Eigen::VectorXd& coefficients,
                      const Eigen::Vector2d& point, int element_hint) {
  if (element_hint < 0 || element_hint >= space.mesh().element_count()) {
    throw LookupError("evaluate_field: element hint out of range");
  }
  if (!space.contains(element_hint, point)) {
    throw LookupError("evaluate_field: point outside the hinted element");
  }
  const Eigen::Vector2d r = space.to_reference(element_hint, point);
  const Eigen::VectorXd phi = space.basis_at(r.x(), r.y());
  return phi.dot(coefficients.segment(space.dof(element_hint, 0), space.local_dim()));
}

double l2_error_against(const DgSpace& space, const Eigen::VectorXd& coefficients,
                        const ScalarField& f) {
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();
  double acc = 0.0;
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const auto local = coefficients.segment(space.dof(e, 0), space.local_dim());
    for (long q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector2d x =
          space.to_physical(e, rule.points(0, q), rule.points(1, q));
      const double diff = phi.col(q).dot(local) - f(x.x(), x.y());
      acc += rule.weights(q) * space.map_determinant(e) * diff * diff;
    }
  }
  return std::sqrt(acc);
}

}  // namespace hrom
