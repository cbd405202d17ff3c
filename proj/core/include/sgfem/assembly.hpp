#pragma once

#include "sgfem/element.hpp"
#include "sgfem/mesh.hpp"
#include "sgfem/model.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <span>
#include <vector>

namespace sgfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Global numbering of the vertex unknowns (value and gradient of every
/// displacement component). Global id = (vertex * d + component) * (d + 1) + slot,
/// slot 0 the value and slots 1..d the gradient.
class DofMap {
 public:
  /// With `clamped`, every unknown at a boundary vertex is constrained.
  explicit DofMap(const Mesh& m, bool clamped = true);

  int dim() const { return dim_; }
  int per_vertex() const { return dim_ * (dim_ + 1); }
  /// Scalar local dofs per cell and component, (d + 1)^2.
  int scalar_local() const { return (dim_ + 1) * (dim_ + 1); }
  /// Vector local dofs per cell, d (d + 1)^2.
  int cell_local() const { return dim_ * scalar_local(); }

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_dofs() const { return free_of_.size(); }
  std::size_t num_free() const { return free_dofs_.size(); }

  int global(int vertex, int component, int slot) const {
    return (vertex * dim_ + component) * (dim_ + 1) + slot;
  }
  /// Position among the free dofs, or -1 for a constrained dof.
  int free_index(int g) const { return free_of_[g]; }
  bool is_constrained(int g) const { return free_of_[g] < 0; }
  std::span<const int> free_dofs() const { return free_dofs_; }

  /// Global ids of the cell-local vector dofs; local index
  /// component * (d+1)^2 + local_vertex * (d+1) + slot.
  void cell_dofs(std::span<const int> cell_vertices, std::span<int> out) const;

  /// Scatters a free-dof vector into a full vector (constrained dofs = 0).
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  /// Restriction of a full vector to the free dofs.
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;

 private:
  int dim_;
  std::size_t num_vertices_;
  std::vector<int> free_of_;
  std::vector<int> free_dofs_;
};

/// Stiffness matrix and load restricted to the free dofs. A stores both
/// triangles and is exactly symmetric.
struct SparseSystem {
  SparseMatrix A;
  Eigen::VectorXd b;
};

/// Integration degrees; stiffness rules are exact for the element spaces.
struct AssemblyOptions {
  int stiffness_degree = 0;  // 0: 6 in 2D, 8 in 3D
  int load_degree = 10;
  /// Cells per batch of parallel local computations.
  std::size_t batch = 2048;
};

/// Local matrix of a cell in the cell_dofs ordering, filled given the basis.
using LocalMatrixKernel = std::function<void(const ElementBasis&, Eigen::MatrixXd&)>;

/// Generic symmetric assembly over free dofs: local matrices are computed in
/// parallel batches and added in cell order, so the result does not depend
/// on the worker count.
SparseMatrix assemble_matrix(const Mesh& m, const DofMap& dofs, const LocalMatrixKernel& kernel,
                             const AssemblyOptions& opt = {});

/// Local stiffness matrix of a_h on one cell.
void local_stiffness(const ElementBasis& basis, const MaterialParams& p, int degree, Eigen::MatrixXd& out);

/// Local matrix of the energy inner product
/// (v, w) + (grad v, grad w) + iota^2 (D^2 v, D^2 w) with the multi-index
/// Hessian convention of hessian_norm_sq.
void local_energy_norm(const ElementBasis& basis, double iota, int degree, Eigen::MatrixXd& out);

/// Load vector (f, v) over free dofs; f = nullptr gives zero.
Eigen::VectorXd assemble_load(const Mesh& m, const DofMap& dofs,
                              const std::function<Vec3(const Vec3&)>& f, const AssemblyOptions& opt = {});

/// A and b for a_h(u_h, v) = (f, v). `source` = nullptr means f = 0.
SparseSystem assemble(const Mesh& m, const DofMap& dofs, const MaterialParams& p,
                      const FieldFunction* source, const AssemblyOptions& opt = {});

/// Energy-norm Gram matrix over free dofs (quadrature degree 10).
SparseMatrix assemble_energy_norm(const Mesh& m, const DofMap& dofs, double iota);

/// max |A - A^T| / max |A|.
double symmetry_defect(const SparseMatrix& a);

}  // namespace sgfem
