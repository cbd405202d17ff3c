#include "sgfem/assembly.hpp"

#include "sgfem/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sgfem {

DofMap::DofMap(const Mesh& m, bool clamped) : dim_(m.dim()), num_vertices_(m.num_vertices()) {
  const int pv = per_vertex();
  free_of_.assign(num_vertices_ * pv, -1);
  for (std::size_t v = 0; v < num_vertices_; ++v) {
    if (clamped && m.is_boundary_vertex(static_cast<int>(v))) continue;
    for (int k = 0; k < pv; ++k) {
      const int g = static_cast<int>(v) * pv + k;
      free_of_[g] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(g);
    }
  }
}

void DofMap::cell_dofs(std::span<const int> cell_vertices, std::span<int> out) const {
  const int nv = dim_ + 1;
  for (int c = 0; c < dim_; ++c) {
    for (int lv = 0; lv < nv; ++lv) {
      for (int s = 0; s <= dim_; ++s) {
        out[c * nv * nv + lv * nv + s] = global(cell_vertices[lv], c, s);
      }
    }
  }
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free) const {
  if (static_cast<std::size_t>(free.size()) != num_free()) throw Error("dofmap: free vector has wrong size");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_dofs()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) full[free_dofs_[i]] = free[static_cast<Eigen::Index>(i)];
  return full;
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const {
  if (static_cast<std::size_t>(full.size()) != num_dofs()) throw Error("dofmap: full vector has wrong size");
  Eigen::VectorXd free(static_cast<Eigen::Index>(num_free()));
  for (std::size_t i = 0; i < free_dofs_.size(); ++i) free[static_cast<Eigen::Index>(i)] = full[free_dofs_[i]];
  return free;
}

namespace {

int default_stiffness_degree(int dim) { return dim == 2 ? 6 : 8; }

double weight_scale(const ElementBasis& basis, const QuadratureRule& r) {
  return basis.volume() / r.reference_measure();
}

// Runs compute(cell, slot) in parallel over a batch, then consume(cell, slot)
// sequentially in cell order.
template <typename Slot, typename Compute, typename Consume>
void batched(std::size_t ncells, std::size_t batch, Compute compute, Consume consume) {
  batch = std::max<std::size_t>(batch, 1);
  std::vector<Slot> slots(std::min(batch, ncells));
  for (std::size_t start = 0; start < ncells; start += batch) {
    const std::size_t stop = std::min(ncells, start + batch);
    parallel_for(start, stop, [&](std::size_t c) { compute(static_cast<int>(c), slots[c - start]); });
    for (std::size_t c = start; c < stop; ++c) consume(static_cast<int>(c), slots[c - start]);
  }
}

struct LocalSlot {
  Eigen::MatrixXd mat;
  Eigen::VectorXd vec;
};

}  // namespace

void local_stiffness(const ElementBasis& basis, const MaterialParams& p, int degree, Eigen::MatrixXd& out) {
  const int d = basis.dim();
  const int n = basis.ndof();
  const int dn = d * n;
  const QuadratureRule& r = rule(d, degree);
  const auto& table = frame_table(r);
  const double scale = weight_scale(basis, r);
  const int rows = d + 1;

  // Y stacks, per point and component c, the row G_c (d_c phi_a) and the rows
  // iota * H_ic (d_i d_c phi_a); a_h blocks follow from W = Y^T Y.
  Eigen::MatrixXd y(static_cast<Eigen::Index>(r.size()) * rows, dn);
  for (std::size_t q = 0; q < r.size(); ++q) {
    const BasisEval e = basis.eval_frame(table[q], DofSet::Vertex);
    const double sw = std::sqrt(r.weights[q] * scale);
    const Eigen::Index r0 = static_cast<Eigen::Index>(q) * rows;
    for (int c = 0; c < d; ++c) {
      for (int a = 0; a < n; ++a) {
        y(r0, c * n + a) = sw * e.grad(c, a);
        for (int i = 0; i < d; ++i) y(r0 + 1 + i, c * n + a) = sw * p.iota * e.hess[a](i, c);
      }
    }
  }
  Eigen::MatrixXd w(dn, dn);
  w.setZero();
  w.selfadjointView<Eigen::Upper>().rankUpdate(y.transpose());
  w.triangularView<Eigen::StrictlyLower>() = w.transpose();

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < d; ++e) diag += w.block(e * n, e * n, n, n);

  out.resize(dn, dn);
  for (int c = 0; c < d; ++c) {
    for (int c2 = c; c2 < d; ++c2) {
      auto blk = out.block(c * n, c2 * n, n, n);
      blk = p.mu * w.block(c2 * n, c * n, n, n) + p.lambda * w.block(c * n, c2 * n, n, n);
      if (c == c2) blk += p.mu * diag;
    }
  }
  // Exact symmetry: mirror the upper triangle.
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
}

void local_energy_norm(const ElementBasis& basis, double iota, int degree, Eigen::MatrixXd& out) {
  const int d = basis.dim();
  const int n = basis.ndof();
  const QuadratureRule& r = rule(d, degree);
  const auto& table = frame_table(r);
  const double scale = weight_scale(basis, r);
  const int rows = 1 + d + d * (d + 1) / 2;

  Eigen::MatrixXd z(static_cast<Eigen::Index>(r.size()) * rows, n);
  for (std::size_t q = 0; q < r.size(); ++q) {
    const BasisEval e = basis.eval_frame(table[q], DofSet::Vertex);
    const double sw = std::sqrt(r.weights[q] * scale);
    const Eigen::Index r0 = static_cast<Eigen::Index>(q) * rows;
    for (int a = 0; a < n; ++a) {
      int k = 0;
      z(r0 + k++, a) = sw * e.value[a];
      for (int i = 0; i < d; ++i) z(r0 + k++, a) = sw * e.grad(i, a);
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) z(r0 + k++, a) = sw * iota * e.hess[a](i, j);
      }
    }
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  g.selfadjointView<Eigen::Upper>().rankUpdate(z.transpose());
  g.triangularView<Eigen::StrictlyLower>() = g.transpose();
  out = Eigen::MatrixXd::Zero(d * n, d * n);
  for (int c = 0; c < d; ++c) out.block(c * n, c * n, n, n) = g;
}

SparseMatrix assemble_matrix(const Mesh& m, const DofMap& dofs, const LocalMatrixKernel& kernel,
                             const AssemblyOptions& opt) {
  const int pv = dofs.per_vertex();
  const std::size_t nv = m.num_vertices();
  const auto nfree = static_cast<Eigen::Index>(dofs.num_free());

  // Vertex adjacency through shared cells, sorted.
  std::vector<std::vector<int>> nbrs(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    auto& list = nbrs[v];
    for (int c : m.vertex_cells(static_cast<int>(v))) {
      for (int w : m.cell(c)) list.push_back(w);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  // Column-compressed pattern over free dofs; rows ascend because free
  // indices follow global order.
  std::vector<int> outer(static_cast<std::size_t>(nfree) + 1, 0);
  std::vector<int> inner;
  for (Eigen::Index j = 0; j < nfree; ++j) {
    const int v = dofs.free_dofs()[static_cast<std::size_t>(j)] / pv;
    for (int w : nbrs[static_cast<std::size_t>(v)]) {
      for (int k = 0; k < pv; ++k) {
        const int fi = dofs.free_index(w * pv + k);
        if (fi >= 0) inner.push_back(fi);
      }
    }
    outer[static_cast<std::size_t>(j) + 1] = static_cast<int>(inner.size());
  }
  nbrs.clear();

  SparseMatrix a(nfree, nfree);
  a.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), a.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), a.innerIndexPtr());
  std::fill(a.valuePtr(), a.valuePtr() + inner.size(), 0.0);
  double* values = a.valuePtr();

  const int nl = dofs.cell_local();
  std::vector<int> gl(static_cast<std::size_t>(nl));
  std::vector<int> fl(static_cast<std::size_t>(nl));
  batched<LocalSlot>(
      m.num_cells(), opt.batch,
      [&](int c, LocalSlot& slot) {
        const ElementBasis basis = ElementBasis::build(m, c);
        kernel(basis, slot.mat);
        if (!slot.mat.allFinite()) throw Error("assembly: non-finite local matrix on cell " + std::to_string(c));
      },
      [&](int c, LocalSlot& slot) {
        dofs.cell_dofs(m.cell(c), gl);
        for (int i = 0; i < nl; ++i) fl[i] = dofs.free_index(gl[i]);
        for (int j = 0; j < nl; ++j) {
          const int col = fl[j];
          if (col < 0) continue;
          const int* begin = inner.data() + outer[col];
          const int* end = inner.data() + outer[col + 1];
          for (int i = 0; i < nl; ++i) {
            const int row = fl[i];
            if (row < 0) continue;
            const int* pos = std::lower_bound(begin, end, row);
            values[pos - inner.data()] += slot.mat(i, j);
          }
        }
      });
  return a;
}

Eigen::VectorXd assemble_load(const Mesh& m, const DofMap& dofs, const std::function<Vec3(const Vec3&)>& f,
                              const AssemblyOptions& opt) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.num_free()));
  if (!f) return b;
  const int d = m.dim();
  const QuadratureRule& r = rule(d, opt.load_degree);
  const auto& table = frame_table(r);
  const int nl = dofs.cell_local();
  std::vector<int> gl(static_cast<std::size_t>(nl));
  batched<LocalSlot>(
      m.num_cells(), opt.batch,
      [&](int c, LocalSlot& slot) {
        const ElementBasis basis = ElementBasis::build(m, c);
        const int n = basis.ndof();
        const double scale = weight_scale(basis, r);
        slot.vec = Eigen::VectorXd::Zero(nl);
        for (std::size_t q = 0; q < r.size(); ++q) {
          const BasisEval e = basis.eval_frame(table[q], DofSet::Vertex);
          const Vec3 fx = f(basis.to_physical(r.points[q]));
          const double w = r.weights[q] * scale;
          for (int k = 0; k < d; ++k) slot.vec.segment(k * n, n) += (w * fx[k]) * e.value;
        }
        if (!slot.vec.allFinite()) throw Error("assembly: non-finite load on cell " + std::to_string(c));
      },
      [&](int c, LocalSlot& slot) {
        dofs.cell_dofs(m.cell(c), gl);
        for (int i = 0; i < nl; ++i) {
          const int fi = dofs.free_index(gl[i]);
          if (fi >= 0) b[fi] += slot.vec[i];
        }
      });
  return b;
}

SparseSystem assemble(const Mesh& m, const DofMap& dofs, const MaterialParams& p, const FieldFunction* source,
                      const AssemblyOptions& opt) {
  p.validate();
  if (source && source->dim() != m.dim()) throw Error("assembly: field and mesh dimensions differ");
  const int degree = opt.stiffness_degree > 0 ? opt.stiffness_degree : default_stiffness_degree(m.dim());
  SparseSystem sys;
  sys.A = assemble_matrix(
      m, dofs, [&](const ElementBasis& basis, Eigen::MatrixXd& out) { local_stiffness(basis, p, degree, out); },
      opt);
  std::function<Vec3(const Vec3&)> f;
  if (source) f = [&](const Vec3& x) { return source->source(p, x); };
  sys.b = assemble_load(m, dofs, f, opt);
  return sys;
}

SparseMatrix assemble_energy_norm(const Mesh& m, const DofMap& dofs, double iota) {
  return assemble_matrix(m, dofs, [&](const ElementBasis& basis, Eigen::MatrixXd& out) {
    local_energy_norm(basis, iota, 10, out);
  });
}

double symmetry_defect(const SparseMatrix& a) {
  if (a.nonZeros() == 0) return 0.0;
  const SparseMatrix t = a.transpose();
  const double scale = a.coeffs().cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const SparseMatrix diff = a - t;
  return diff.nonZeros() ? diff.coeffs().cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace sgfem
