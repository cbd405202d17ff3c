#include "sgfem/interpolation.hpp"

#include <Eigen/LU>

#include <algorithm>

namespace sgfem {

namespace {

BaryGradMatrix cell_bary_gradients(const Mesh& m, int cell) {
  const int d = m.dim();
  const auto verts = m.cell(cell);
  const Vec3 x0 = m.vertex(verts[0]);
  Mat3 jac(d, d);
  for (int k = 0; k < d; ++k) jac.col(k) = m.vertex(verts[k + 1]) - x0;
  const Mat3 jinv = jac.inverse();
  BaryGradMatrix g(d + 1, d);
  for (int k = 0; k < d; ++k) g.row(k + 1) = jinv.row(k);
  g.row(0) = -jinv.colwise().sum();
  return g;
}

int local_index(std::span<const int> verts, int v) {
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (verts[i] == v) return static_cast<int>(i);
  }
  return -1;
}

bool face_contains(std::span<const int> face, int v) {
  return std::find(face.begin(), face.end(), v) != face.end();
}

}  // namespace

DiscreteField::DiscreteField(const Mesh& m, const DofMap& dofs, Eigen::VectorXd full)
    : mesh_(&m), dofs_(&dofs), full_(std::move(full)) {
  if (static_cast<std::size_t>(full_.size()) != dofs.num_dofs()) {
    throw Error("discrete field: coefficient vector has wrong size");
  }
}

Eigen::VectorXd DiscreteField::cell_coefficients(int cell) const {
  std::vector<int> gl(static_cast<std::size_t>(dofs_->cell_local()));
  dofs_->cell_dofs(mesh_->cell(cell), gl);
  Eigen::VectorXd out(static_cast<Eigen::Index>(gl.size()));
  for (std::size_t i = 0; i < gl.size(); ++i) out[static_cast<Eigen::Index>(i)] = full_[gl[i]];
  return out;
}

void DiscreteField::eval(int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) const {
  const int d = mesh_->dim();
  const ElementBasis basis = ElementBasis::build(*mesh_, cell);
  const int n = basis.ndof();
  const Eigen::VectorXd coef = cell_coefficients(cell);
  jets.resize(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) {
    const BasisEval e = basis.eval_bary(points[q], DofSet::Vertex);
    FieldJet& j = jets[q];
    j.value.setZero(d);
    j.grad.setZero(d, d);
    for (int c = 0; c < d; ++c) {
      const auto cc = coef.segment(c * n, n);
      j.value[c] = e.value.dot(cc);
      j.grad.row(c) = (e.grad * cc).transpose();
      j.hess[c].setZero(d, d);
      for (int a = 0; a < n; ++a) j.hess[c] += cc[a] * e.hess[a];
    }
  }
}

CellJetFunction DiscreteField::evaluator() const {
  return [this](int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) { eval(cell, points, jets); };
}

void P2Field::eval(const Mesh& m, int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) const {
  const int d = dim;
  const int nv = d + 1;
  const auto verts = m.cell(cell);
  const auto edges = m.cell_edges(cell);
  const BaryGradMatrix g = cell_bary_gradients(m, cell);
  jets.resize(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) {
    const Bary& l = points[q];
    FieldJet& j = jets[q];
    j.value.setZero(d);
    j.grad.setZero(d, d);
    for (int c = 0; c < d; ++c) {
      double val = 0.0;
      Eigen::Vector4d dl = Eigen::Vector4d::Zero();
      Eigen::Matrix4d hl = Eigen::Matrix4d::Zero();
      for (int i = 0; i < nv; ++i) {
        const double w = vertex_values(verts[i], c);
        val += w * l[i] * (2.0 * l[i] - 1.0);
        dl[i] += w * (4.0 * l[i] - 1.0);
        hl(i, i) += 4.0 * w;
      }
      int p = 0;
      for (int i = 0; i < nv; ++i) {
        for (int k = i + 1; k < nv; ++k, ++p) {
          const double w = edge_values(edges[p], c);
          val += 4.0 * w * l[i] * l[k];
          dl[i] += 4.0 * w * l[k];
          dl[k] += 4.0 * w * l[i];
          hl(i, k) += 4.0 * w;
          hl(k, i) += 4.0 * w;
        }
      }
      j.value[c] = val;
      j.grad.row(c) = (g.transpose() * dl.head(nv)).transpose();
      j.hess[c] = g.transpose() * hl.topLeftCorner(nv, nv) * g;
    }
  }
}

CellJetFunction P2Field::evaluator(const Mesh& m) const {
  return [this, &m](int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) {
    eval(m, cell, points, jets);
  };
}

P2Field scott_zhang(const Mesh& m, const std::function<Vec3(const Vec3&)>& trace) {
  const int d = m.dim();
  const QuadratureRule& r = rule(d - 1, 10);
  const int nfv = d;                        // vertices per face
  const int nn = nfv + nfv * (nfv - 1) / 2;  // P2 nodes per face

  // Face Lagrange basis at the quadrature points; node order: face vertices,
  // then vertex pairs lexicographically.
  Eigen::MatrixXd theta(nn, static_cast<Eigen::Index>(r.size()));
  double wsum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const Bary& mu = r.points[q];
    int k = 0;
    for (int i = 0; i < nfv; ++i) theta(k++, static_cast<Eigen::Index>(q)) = mu[i] * (2.0 * mu[i] - 1.0);
    for (int i = 0; i < nfv; ++i) {
      for (int j = i + 1; j < nfv; ++j) theta(k++, static_cast<Eigen::Index>(q)) = 4.0 * mu[i] * mu[j];
    }
    wsum += r.weights[q];
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(r.size()));
  for (std::size_t q = 0; q < r.size(); ++q) w[static_cast<Eigen::Index>(q)] = r.weights[q] / wsum;
  const Eigen::MatrixXd mass = theta * w.asDiagonal() * theta.transpose();
  // Row z of dual = coefficients of psi_z against the weighted samples.
  const Eigen::MatrixXd dual = mass.inverse() * theta * w.asDiagonal();

  auto node_value = [&](int face, int node) {
    const auto fv = m.face(face);
    std::vector<Vec3> x(static_cast<std::size_t>(nfv));
    for (int i = 0; i < nfv; ++i) x[i] = m.vertex(fv[i]);
    Vec3 acc = Vec3::Zero(d);
    for (std::size_t q = 0; q < r.size(); ++q) {
      Vec3 p = Vec3::Zero(d);
      for (int i = 0; i < nfv; ++i) p += r.points[q][i] * x[i];
      acc += dual(node, static_cast<Eigen::Index>(q)) * trace(p);
    }
    return acc;
  };

  P2Field out;
  out.dim = d;
  out.vertex_values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.num_vertices()), d);
  out.edge_values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.num_edges()), d);

  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const int vi = static_cast<int>(v);
    if (m.is_boundary_vertex(vi)) continue;
    int best = -1;
    for (int c : m.vertex_cells(vi)) {
      for (int f : m.cell_faces(c)) {
        if (face_contains(m.face(f), vi) && (best < 0 || f < best)) best = f;
      }
    }
    const int node = local_index(m.face(best), vi);
    out.vertex_values.row(static_cast<Eigen::Index>(v)) = node_value(best, node).transpose();
  }

  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const int ei = static_cast<int>(e);
    if (m.is_boundary_edge(ei)) continue;
    const auto ab = m.edge(ei);
    int best = -1;
    for (int c : m.vertex_cells(ab[0])) {
      for (int f : m.cell_faces(c)) {
        const auto fv = m.face(f);
        if (face_contains(fv, ab[0]) && face_contains(fv, ab[1]) && (best < 0 || f < best)) best = f;
      }
    }
    const auto fv = m.face(best);
    int ia = local_index(fv, ab[0]);
    int ib = local_index(fv, ab[1]);
    if (ia > ib) std::swap(ia, ib);
    const int node = nfv + ia * (2 * nfv - ia - 1) / 2 + (ib - ia - 1);
    out.edge_values.row(static_cast<Eigen::Index>(e)) = node_value(best, node).transpose();
  }
  return out;
}

int interpolation_cell(const Mesh& m, const BoundaryNodeClass& cls, int vertex) {
  switch (cls.kind[vertex]) {
    case NodeKind::Interior: return m.vertex_cells(vertex).front();
    case NodeKind::Flat:
      for (int c : m.vertex_cells(vertex)) {
        for (int f : m.cell_faces(c)) {
          if (m.is_boundary_face(f) && face_contains(m.face(f), vertex)) return c;
        }
      }
      throw Error("interpolant: flat vertex " + std::to_string(vertex) + " has no boundary cell");
    default: return -1;
  }
}

Eigen::VectorXd regularize(const Mesh& m, const DofMap& dofs, const BoundaryNodeClass& cls, const P2Field& w,
                           InterpolantVariant variant) {
  const int d = m.dim();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.num_dofs()));
  std::vector<FieldJet> jets;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const int vi = static_cast<int>(v);
    const NodeKind kind = cls.kind[v];
    if (kind == NodeKind::Sharp) continue;
    if (kind == NodeKind::Flat && variant == InterpolantVariant::Clamped) continue;
    const int ka = interpolation_cell(m, cls, vi);
    Bary at = Bary::Zero(d + 1);
    at[local_index(m.cell(ka), vi)] = 1.0;
    w.eval(m, ka, std::span<const Bary>(&at, 1), jets);
    for (int c = 0; c < d; ++c) {
      full[dofs.global(vi, c, 0)] = kind == NodeKind::Interior ? w.vertex_values(static_cast<Eigen::Index>(v), c) : 0.0;
      for (int s = 0; s < d; ++s) full[dofs.global(vi, c, 1 + s)] = jets[0].grad(c, s);
    }
  }
  return full;
}

Eigen::VectorXd regularized_interpolant(const Mesh& m, const DofMap& dofs, const FieldFunction& v,
                                        InterpolantVariant variant) {
  const BoundaryNodeClass cls = classify_boundary_nodes(m);
  const P2Field w = scott_zhang(m, [&](const Vec3& x) { return v.value(x); });
  return regularize(m, dofs, cls, w, variant);
}

Eigen::VectorXd nodal_interpolant(const Mesh& m, const DofMap& dofs, const FieldFunction& v, bool clamp) {
  const int d = m.dim();
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.num_dofs()));
  for (std::size_t a = 0; a < m.num_vertices(); ++a) {
    const int ai = static_cast<int>(a);
    if (clamp && m.is_boundary_vertex(ai)) continue;
    const FieldJet j = v.jet(m.vertex(ai));
    for (int c = 0; c < d; ++c) {
      full[dofs.global(ai, c, 0)] = j.value[c];
      for (int s = 0; s < d; ++s) full[dofs.global(ai, c, 1 + s)] = j.grad(c, s);
    }
  }
  return full;
}

}  // namespace sgfem
