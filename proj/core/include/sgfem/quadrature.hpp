#pragma once

#include "sgfem/types.hpp"

#include <vector>

namespace sgfem {

/// Quadrature rule on the reference simplex of dimension 1, 2 or 3.
///
/// Points are stored in barycentric coordinates (dim + 1 entries each), so
/// the same rule applies to any simplex: on a physical simplex K the weights
/// are multiplied by |K| / |reference|. Weights are positive and sum to the
/// reference measure 1/dim!.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;
  std::vector<Bary> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double reference_measure() const;
};

inline constexpr int kMaxQuadratureDegree = 10;

/// Smallest available rule on the reference dim-simplex that integrates
/// polynomials of total degree <= degree exactly. Rules are conical
/// (collapsed) products of Gauss-Jacobi rules, computed once and cached.
/// Throws sgfem::Error for degree < 1, degree > 10 or dim outside 1..3.
const QuadratureRule& rule(int dim, int degree);

/// Gauss-Jacobi rule on [0, 1] for the weight (1 - t)^alpha with n points.
void gauss_jacobi01(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sgfem
