#pragma once

#include "sgfem/assembly.hpp"
#include "sgfem/mesh.hpp"
#include "sgfem/model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sgfem {

/// Evaluates a piecewise-smooth vector field on one cell at barycentric
/// points: jets[q] receives value, gradient and Hessians at points[q].
using CellJetFunction =
    std::function<void(int cell, std::span<const Bary> points, std::vector<FieldJet>& jets)>;

/// Field of the nonconforming space given by a full global dof vector.
class DiscreteField {
 public:
  DiscreteField(const Mesh& m, const DofMap& dofs, Eigen::VectorXd full);

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofmap() const { return *dofs_; }
  const Eigen::VectorXd& coefficients() const { return full_; }

  /// Local vector coefficients in DofMap::cell_dofs order.
  Eigen::VectorXd cell_coefficients(int cell) const;
  void eval(int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) const;
  /// Vertex value and gradient of component c stored in the dofs.
  double vertex_value(int v, int c) const { return full_[dofs_->global(v, c, 0)]; }

  CellJetFunction evaluator() const;

 private:
  const Mesh* mesh_;
  const DofMap* dofs_;
  Eigen::VectorXd full_;
};

/// Continuous piecewise quadratic Lagrange field: values at vertices and at
/// edge midpoints (row = node, column = component).
struct P2Field {
  int dim = 0;
  Eigen::MatrixXd vertex_values;
  Eigen::MatrixXd edge_values;

  void eval(const Mesh& m, int cell, std::span<const Bary> points, std::vector<FieldJet>& jets) const;
  CellJetFunction evaluator(const Mesh& m) const;
};

/// Scott-Zhang interpolant into the quadratic Lagrange space with vanishing
/// trace. Each node uses the L2(F)-dual basis on one face F containing it:
/// the lowest-index such face, restricted to boundary faces for boundary
/// nodes (whose value is then exactly 0). `trace` is evaluated on faces only.
P2Field scott_zhang(const Mesh& m, const std::function<Vec3(const Vec3&)>& trace);

enum class InterpolantVariant {
  /// Nodal rules by boundary class (interior / flat / sharp).
  Regularized,
  /// Like Regularized but every boundary vertex dof is zero (X_h^0).
  Clamped,
};

/// Cell K_a used for the gradient at vertex a: the lowest-index cell of the
/// star (interior) or the lowest-index cell with a boundary face through a
/// (flat); -1 for sharp vertices.
int interpolation_cell(const Mesh& m, const BoundaryNodeClass& cls, int vertex);

/// Pi_h w for a quadratic Lagrange field w, as a full dof vector.
Eigen::VectorXd regularize(const Mesh& m, const DofMap& dofs, const BoundaryNodeClass& cls, const P2Field& w,
                           InterpolantVariant variant);

/// I_h v = Pi_h (Pi_C v) as a full dof vector over an unclamped DofMap
/// layout (same numbering as the clamped one).
Eigen::VectorXd regularized_interpolant(const Mesh& m, const DofMap& dofs, const FieldFunction& v,
                                        InterpolantVariant variant);

/// Plain nodal interpolant: v(a) and grad v(a) at every vertex, zero at
/// boundary vertices when `clamp` is set.
Eigen::VectorXd nodal_interpolant(const Mesh& m, const DofMap& dofs, const FieldFunction& v, bool clamp);

}  // namespace sgfem
