#include "hrom/sipg.hpp"

#include <algorithm>
#include <set>

#include "hrom/errors.hpp"

namespace hrom {

namespace {

// Values and normal derivatives of both traces at the edge quadrature points.
// Row layout: the 2*n_q "jump coordinates" are [phi_left; -phi_right].
struct EdgeTraces {
  Eigen::MatrixXd jump;      // 2n_q x n_qp, signed values
  Eigen::MatrixXd avg_dn;    // 2n_q x n_qp, 0.5 * grad phi . n per side
};

EdgeTraces edge_traces(const DgSpace& space, int left_elem, int left_edge,
                       int right_elem, const Eigen::Vector2d& normal,
                       const Eigen::Vector2d& shift) {
  const int nq = space.local_dim();
  const auto& rule = space.edge_rule();
  const long npts = rule.points.size();
  EdgeTraces tr;
  tr.jump.resize(2 * nq, npts);
  tr.avg_dn.resize(2 * nq, npts);
  const auto ends = edge_endpoints(space.mesh().elements[left_elem], left_edge);
  for (long q = 0; q < npts; ++q) {
    const double s = rule.points(q);
    const Eigen::Vector2d ref_l = space.edge_reference_point(left_edge, s);
    const Eigen::Vector2d x = ends[0] + s * (ends[1] - ends[0]);
    const Eigen::Vector2d ref_r = space.to_reference(right_elem, x + shift);

    tr.jump.col(q).head(nq) = space.basis_at(ref_l.x(), ref_l.y());
    tr.jump.col(q).tail(nq) = -space.basis_at(ref_r.x(), ref_r.y());
    const Eigen::MatrixXd gl =
        space.inverse_map_t(left_elem) * space.basis_gradient_at(ref_l.x(), ref_l.y());
    const Eigen::MatrixXd gr =
        space.inverse_map_t(right_elem) * space.basis_gradient_at(ref_r.x(), ref_r.y());
    tr.avg_dn.col(q).head(nq) = 0.5 * gl.transpose() * normal;
    tr.avg_dn.col(q).tail(nq) = 0.5 * gr.transpose() * normal;
  }
  return tr;
}

void scatter_edge_block(const DgSpace& space, int left_elem, int right_elem,
                        const Eigen::MatrixXd& local,
                        std::vector<Eigen::Triplet<double>>& trips) {
  const int nq = space.local_dim();
  auto global = [&](int a) {
    return a < nq ? space.dof(left_elem, a) : space.dof(right_elem, a - nq);
  };
  for (int i = 0; i < 2 * nq; ++i)
    for (int j = 0; j < 2 * nq; ++j)
      trips.emplace_back(global(i), global(j), local(i, j));
}

struct LocalState {
  Eigen::VectorXd r;  // values of r_h at the volume quadrature points
  Eigen::VectorXd s;
};

LocalState local_values(const OperatorSet& ops, const Eigen::VectorXd& z, int e) {
  const DgSpace& space = ops.space();
  const int nq = space.local_dim();
  const long N = space.dimension();
  LocalState st;
  st.r = space.basis_table().transpose() * z.segment(space.dof(e, 0), nq);
  st.s = space.basis_table().transpose() * z.segment(N + space.dof(e, 0), nq);
  return st;
}

}  // namespace

Eigen::SparseMatrix<double, Eigen::RowMajor> assemble_stiffness(
    const DgSpace& space, const Physics& physics) {
  if (!(physics.kappa > 0.0)) {
    throw ConfigError("assemble_stiffness: penalty parameter kappa must be positive");
  }
  const Mesh& mesh = space.mesh();
  const int nq = space.local_dim();
  const double alpha = physics.alpha;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.element_count() * nq * nq +
                (mesh.interior_edges.size() + mesh.periodic_pairs.size()) * 4 * nq * nq);

  const auto& vrule = space.volume_rule();
  const auto& phi = space.basis_table();
  for (int e = 0; e < mesh.element_count(); ++e) {
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nq, nq);
    const Eigen::Matrix2d jit = space.inverse_map_t(e);
    const double det = space.map_determinant(e);
    for (long q = 0; q < vrule.weights.size(); ++q) {
      Eigen::MatrixXd grad(2, nq);
      grad.row(0) = space.grad_xi_table().col(q).transpose();
      grad.row(1) = space.grad_eta_table().col(q).transpose();
      grad = jit * grad;
      local += (vrule.weights(q) * det * alpha) * grad.transpose() * grad;
      if (physics.potential) {
        const Eigen::Vector2d x =
            space.to_physical(e, vrule.points(0, q), vrule.points(1, q));
        local += (vrule.weights(q) * det * physics.potential(x.x(), x.y())) *
                 phi.col(q) * phi.col(q).transpose();
      }
    }
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j)
        trips.emplace_back(space.dof(e, i), space.dof(e, j), local(i, j));
  }

  const auto& erule = space.edge_rule();
  auto assemble_edge = [&](int left_elem, int left_edge, int right_elem,
                           double length, const Eigen::Vector2d& normal,
                           const Eigen::Vector2d& shift) {
    const EdgeTraces tr =
        edge_traces(space, left_elem, left_edge, right_elem, normal, shift);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(2 * nq, 2 * nq);
    const double penalty = physics.kappa * alpha / length;
    for (long q = 0; q < erule.points.size(); ++q) {
      const double w = erule.weights(q) * length;
      const auto jump = tr.jump.col(q);
      const auto dn = tr.avg_dn.col(q);
      local -= (w * alpha) * (dn * jump.transpose() + jump * dn.transpose());
      local += (w * penalty) * jump * jump.transpose();
    }
    scatter_edge_block(space, left_elem, right_elem, local, trips);
  };

  for (const InteriorEdge& edge : mesh.interior_edges) {
    assemble_edge(edge.left_element, edge.left_edge, edge.right_element,
                  edge.length, edge.normal, Eigen::Vector2d::Zero());
  }
  for (const PeriodicPair& pair : mesh.periodic_pairs) {
    assemble_edge(pair.major_element, pair.major_edge, pair.minor_element,
                  pair.length, pair.normal, pair.shift);
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> a(space.dimension(), space.dimension());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

OperatorSet::OperatorSet(const DgSpace& space, Physics physics)
    : space_(&space),
      physics_(std::move(physics)),
      mass_(assemble_mass_matrix(space)),
      stiffness_(assemble_stiffness(space, physics_)) {}

OperatorSet assemble_operators(const DgSpace& space, const Physics& physics) {
  return OperatorSet(space, physics);
}

Eigen::VectorXd OperatorSet::apply_stiffness(const Eigen::VectorXd& z) const {
  const long N = dimension();
  if (z.size() == N) return stiffness_ * z;
  if (z.size() != 2 * N) throw ConfigError("apply_stiffness: bad vector length");
  Eigen::VectorXd out(2 * N);
  out.head(N) = stiffness_ * z.head(N);
  out.tail(N) = stiffness_ * z.tail(N);
  return out;
}

Eigen::VectorXd nonlinear_vector(const OperatorSet& ops, const Eigen::VectorXd& z,
                                 EvalStats* stats) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  if (z.size() != 2 * N) throw ConfigError("nonlinear_vector: state must have length 2N");
  const int nq = space.local_dim();
  const double beta = ops.physics().beta;
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * N);
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const LocalState st = local_values(ops, z, e);
    const double det = space.map_determinant(e);
    Eigen::VectorXd br = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd bs = Eigen::VectorXd::Zero(nq);
    for (long q = 0; q < rule.weights.size(); ++q) {
      const double mod2 = st.r(q) * st.r(q) + st.s(q) * st.s(q);
      const double w = rule.weights(q) * det * beta * mod2;
      br += (w * st.r(q)) * phi.col(q);
      bs += (w * st.s(q)) * phi.col(q);
    }
    b.segment(space.dof(e, 0), nq) = br;
    b.segment(N + space.dof(e, 0), nq) = bs;
  }
  if (stats) {
    stats->full_nonlinear_evals += 1;
    stats->elements_touched += space.mesh().element_count();
  }
  return b;
}

void for_each_nonlinear_block(
    const OperatorSet& ops, const Eigen::VectorXd& z,
    const std::function<void(int, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                             const Eigen::MatrixXd&)>& visit) {
  const DgSpace& space = ops.space();
  const int nq = space.local_dim();
  const double beta = ops.physics().beta;
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();
  Eigen::MatrixXd drr(nq, nq), dss(nq, nq), drs(nq, nq);
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const LocalState st = local_values(ops, z, e);
    const double det = space.map_determinant(e);
    drr.setZero();
    dss.setZero();
    drs.setZero();
    for (long q = 0; q < rule.weights.size(); ++q) {
      const double r = st.r(q);
      const double s = st.s(q);
      const double w = rule.weights(q) * det * beta;
      const Eigen::MatrixXd outer = phi.col(q) * phi.col(q).transpose();
      drr += (w * (3.0 * r * r + s * s)) * outer;
      dss += (w * (r * r + 3.0 * s * s)) * outer;
      drs += (w * 2.0 * r * s) * outer;
    }
    visit(e, drr, dss, drs);
  }
}

Eigen::SparseMatrix<double, Eigen::RowMajor> nonlinear_jacobian(
    const OperatorSet& ops, const Eigen::VectorXd& z) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  const int nq = space.local_dim();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(space.mesh().element_count() * 4 * nq * nq);
  for_each_nonlinear_block(
      ops, z,
      [&](int e, const Eigen::MatrixXd& drr, const Eigen::MatrixXd& dss,
          const Eigen::MatrixXd& drs) {
        const long base = space.dof(e, 0);
        for (int i = 0; i < nq; ++i) {
          for (int j = 0; j < nq; ++j) {
            trips.emplace_back(base + i, base + j, drr(i, j));
            trips.emplace_back(N + base + i, N + base + j, dss(i, j));
            trips.emplace_back(base + i, N + base + j, drs(i, j));
            trips.emplace_back(N + base + i, base + j, drs(i, j));
          }
        }
      });
  Eigen::SparseMatrix<double, Eigen::RowMajor> jac(2 * N, 2 * N);
  jac.setFromTriplets(trips.begin(), trips.end());
  return jac;
}

Eigen::MatrixXd nonlinear_jacobian_times(const OperatorSet& ops,
                                         const Eigen::VectorXd& z,
                                         const Eigen::MatrixXd& w) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  const int nq = space.local_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(w.rows(), w.cols());
  for_each_nonlinear_block(
      ops, z,
      [&](int e, const Eigen::MatrixXd& drr, const Eigen::MatrixXd& dss,
          const Eigen::MatrixXd& drs) {
        const long base = space.dof(e, 0);
        const auto wr = w.middleRows(base, nq);
        const auto ws = w.middleRows(N + base, nq);
        out.middleRows(base, nq) = drr * wr + drs * ws;
        out.middleRows(N + base, nq) = drs * wr + dss * ws;
      });
  return out;
}

Eigen::VectorXd sampled_nonlinearity(const OperatorSet& ops,
                                     const std::vector<long>& rows,
                                     const Eigen::VectorXd& z, EvalStats* stats) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  const int nq = space.local_dim();
  const double beta = ops.physics().beta;
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();

  Eigen::VectorXd out(static_cast<long>(rows.size()));
  std::set<int> touched;
  for (size_t idx = 0; idx < rows.size(); ++idx) {
    const long row = rows[idx];
    if (row < 0 || row >= 2 * N) throw LookupError("sampled_nonlinearity: row out of range");
    const bool imag_block = row >= N;
    const long local_row = imag_block ? row - N : row;
    const int e = static_cast<int>(local_row / nq);
    const int a = static_cast<int>(local_row % nq);
    touched.insert(e);
    const LocalState st = local_values(ops, z, e);
    const double det = space.map_determinant(e);
    double acc = 0.0;
    for (long q = 0; q < rule.weights.size(); ++q) {
      const double mod2 = st.r(q) * st.r(q) + st.s(q) * st.s(q);
      const double zq = imag_block ? st.s(q) : st.r(q);
      acc += rule.weights(q) * det * beta * mod2 * zq * phi(a, q);
    }
    out(static_cast<long>(idx)) = acc;
  }
  if (stats) {
    stats->sampled_entries += static_cast<long long>(rows.size());
    stats->elements_touched += static_cast<long long>(touched.size());
  }
  return out;
}

Eigen::MatrixXd sampled_jacobian_times(const OperatorSet& ops,
                                       const std::vector<long>& rows,
                                       const Eigen::VectorXd& z,
                                       const Eigen::MatrixXd& w) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  const int nq = space.local_dim();
  const double beta = ops.physics().beta;
  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();

  Eigen::MatrixXd out(static_cast<long>(rows.size()), w.cols());
  for (size_t idx = 0; idx < rows.size(); ++idx) {
    const long row = rows[idx];
    const bool imag_block = row >= N;
    const long local_row = imag_block ? row - N : row;
    const int e = static_cast<int>(local_row / nq);
    const int a = static_cast<int>(local_row % nq);
    const LocalState st = local_values(ops, z, e);
    const double det = space.map_determinant(e);
    Eigen::VectorXd row_r = Eigen::VectorXd::Zero(nq);
    Eigen::VectorXd row_s = Eigen::VectorXd::Zero(nq);
    for (long q = 0; q < rule.weights.size(); ++q) {
      const double r = st.r(q);
      const double s = st.s(q);
      const double w0 = rule.weights(q) * det * beta * phi(a, q);
      if (imag_block) {
        row_r += (w0 * 2.0 * r * s) * phi.col(q);
        row_s += (w0 * (r * r + 3.0 * s * s)) * phi.col(q);
      } else {
        row_r += (w0 * (3.0 * r * r + s * s)) * phi.col(q);
        row_s += (w0 * 2.0 * r * s) * phi.col(q);
      }
    }
    const long base = space.dof(e, 0);
    out.row(static_cast<long>(idx)) =
        row_r.transpose() * w.middleRows(base, nq) +
        row_s.transpose() * w.middleRows(N + base, nq);
  }
  return out;
}

Eigen::VectorXd energy_gradient(const OperatorSet& ops, const Eigen::VectorXd& z,
                                EvalStats* stats) {
  return ops.apply_stiffness(z) + nonlinear_vector(ops, z, stats);
}

}  // namespace hrom
