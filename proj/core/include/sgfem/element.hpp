#pragma once

#include "sgfem/mesh.hpp"
#include "sgfem/quadrature.hpp"
#include "sgfem/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace sgfem {

inline constexpr int kMaxFrame = 20;  // 12 in 2D, 20 in 3D
inline constexpr int kMaxDofs = 16;   // 9 in 2D, 16 in 3D

/// Values and barycentric derivatives of the local polynomial frame at one
/// point: P2 monomials lambda_i lambda_j (i <= j), the antisymmetric cubics
/// lambda_i^2 lambda_j - lambda_i lambda_j^2 (i < j) and b_K lambda_k with
/// the full bubble b_K = prod lambda_i.
struct FrameEval {
  using Values = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxFrame, 1>;
  using Grads = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, kMaxFrame>;
  using Hessians = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, kMaxFrame>;

  Values value;    // nf
  Grads grad;      // (d+1) x nf, d/dlambda
  Hessians hess;   // (d+1)^2 x nf, column-major flattened d2/dlambda2
};

/// Number of frame functions for dimension d.
int frame_size(int dim);

/// Evaluates the frame at barycentric point `bary` (d + 1 entries).
FrameEval eval_frame(int dim, const Bary& bary);

/// Frame evaluated at every point of a cached quadrature rule. The rule's
/// dimension selects the frame dimension.
const std::vector<FrameEval>& frame_table(const QuadratureRule& rule);

using BaryGradMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 3>;
using CoeffMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxFrame, kMaxDofs>;
using DofMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDofs, kMaxDofs>;

/// Values, gradients and Hessians of all local shape functions at a point.
struct BasisEval {
  using Values = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDofs, 1>;
  using Grads = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, kMaxDofs>;

  int n = 0;
  Values value;                  // n
  Grads grad;                    // d x n
  std::array<Mat3, kMaxDofs> hess;  // symmetric d x d, first n used
};

/// Which dual basis the shape functions belong to.
enum class DofSet {
  /// Specht/NZT functionals: p(a_i) for every vertex, then (e_ij . grad p)(a_i)
  /// grouped by base vertex i with targets j ascending.
  Element,
  /// Per-vertex unknowns (p(a), d_1 p(a), ..., d_d p(a)), vertex-major. These
  /// are the globally shared unknowns of the conforming-at-vertices space.
  Vertex,
};

enum class DofKind { Value, EdgeDerivative };

struct DofDescriptor {
  DofKind kind;
  int vertex;  // local base vertex a_i
  int target;  // local target vertex a_j for edge derivatives, else -1
};

/// Shape functions of the Specht triangle (d = 2, 9 dofs) or the NZT
/// tetrahedron (d = 3, 16 dofs) on one physical cell.
///
/// P_K = Z_K + b_K P1(K); the (d+1)^2 dofs and d+1 face constraints
///   1/|f_i| int_{f_i} d_n p = 1/d sum_{k != i} d_n p(a_k)
/// fix a unique basis. Built per cell, not mapped from a reference element:
/// the constraints involve physical normal derivatives.
class ElementBasis {
 public:
  /// Throws sgfem::Error (with the cell id) when the local system is
  /// singular or its condition estimate exceeds 1e12.
  static ElementBasis build(const Mesh& m, int cell);

  int dim() const { return dim_; }
  int cell() const { return cell_; }
  int ndof() const { return (dim_ + 1) * (dim_ + 1); }
  int frame_size() const { return sgfem::frame_size(dim_); }
  const std::vector<DofDescriptor>& dofs() const { return dofs_; }

  /// Frame coefficients of each basis function (frame x ndof).
  const CoeffMatrix& coefficients(DofSet set = DofSet::Element) const {
    return set == DofSet::Element ? coeffs_ : vertex_coeffs_;
  }
  /// Maps per-vertex unknowns to element dofs: l = T g.
  const DofMatrix& local_from_vertex() const { return local_from_vertex_; }

  /// Row m is grad lambda_m.
  const BaryGradMatrix& bary_gradients() const { return bary_grad_; }
  const Vec3& vertex(int i) const { return vertices_[i]; }
  double volume() const { return volume_; }
  double diameter() const { return diameter_; }
  double condition_estimate() const { return condition_; }

  Bary to_barycentric(const Vec3& x) const;
  Vec3 to_physical(const Bary& b) const;

  /// Exact evaluation at a physical point. Containment is not checked; the
  /// shape functions are polynomials.
  BasisEval eval(const Vec3& x, DofSet set = DofSet::Element) const;
  BasisEval eval_bary(const Bary& b, DofSet set = DofSet::Element) const;
  BasisEval eval_frame(const FrameEval& f, DofSet set = DofSet::Element) const;

  /// dof_j(phi_i) evaluated from physical values and gradients at the
  /// vertices (row j, column i). Identity up to rounding.
  Eigen::MatrixXd duality_matrix() const;

  /// Relative residual of each face constraint (row: face, column: basis
  /// function), using the geometric face normal and a degree-8 face rule.
  Eigen::MatrixXd constraint_residuals() const;

 private:
  int dim_ = 0;
  int cell_ = -1;
  std::array<Vec3, 4> vertices_;
  BaryGradMatrix bary_grad_;
  double volume_ = 0.0;
  double diameter_ = 0.0;
  double condition_ = 0.0;
  std::vector<DofDescriptor> dofs_;
  CoeffMatrix coeffs_;
  CoeffMatrix vertex_coeffs_;
  DofMatrix local_from_vertex_;
};

struct ScalarJet {
  double value = 0.0;
  Vec3 grad;
};
using ScalarFunction = std::function<ScalarJet(const Vec3&)>;

/// Element dof vector [v(a_i); (e_ij . grad v)(a_i)] in DofSet::Element order.
Eigen::VectorXd interpolate_local(const ElementBasis& basis, const ScalarFunction& v);

}  // namespace sgfem
