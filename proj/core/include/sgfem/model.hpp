#pragma once

#include "sgfem/types.hpp"

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>

namespace sgfem {

struct MaterialParams {
  double lambda = 10.0;
  double mu = 1.0;
  double iota = 1.0;

  /// Throws sgfem::Error unless mu > 0 and 0 < iota <= 1.
  void validate() const;
};

/// Third-order tensor T_ijk for d <= 3, stored as T[i](j, k).
using Tensor3 = std::array<Mat3, 3>;

/// Symmetric part of a displacement gradient, grad(k, j) = d_j v_k.
Mat3 strain(const Mat3& grad);

/// (grad eps)_ijk = 1/2 (d_i d_j v_k + d_i d_k v_j) from per-component
/// Hessians (hessians[k] = Hessian of v_k).
Tensor3 strain_gradient(std::span<const Mat3> hessians);

struct StrainState {
  Mat3 eps;
  Tensor3 grad_eps;
};

/// Full contraction sum_ijk T_ijk S_ijk.
double contract(const Tensor3& t, const Tensor3& s, int dim);

struct EnergyDensities {
  double e0 = 0.0;  // C eps_s : eps_t
  double e1 = 0.0;  // D grad eps_s : grad eps_t
};

EnergyDensities energy_densities(const MaterialParams& p, const StrainState& s, const StrainState& t);

/// |D^2 v|^2 summed over components and multi-indices |alpha| = 2, so each
/// mixed partial counts once: sum_i H_ii^2 + sum_{i<j} H_ij^2.
double hessian_norm_sq(std::span<const Mat3> hessians);

/// |grad eps(v)|^2 for the given per-component Hessians.
double strain_gradient_norm_sq(std::span<const Mat3> hessians);

/// Pointwise value, gradient (grad(k, j) = d_j u_k) and Hessians of a
/// vector field.
struct FieldJet {
  Vec3 value;
  Mat3 grad;
  std::array<Mat3, 3> hess;
};

using MultiIndex = std::array<int, 3>;

/// Vector field on (0,1)^d with closed-form partial derivatives up to
/// order 4. The load is f = (iota^2 Lap - I)(mu Lap u + (lambda + mu) grad div u).
class FieldFunction {
 public:
  virtual ~FieldFunction() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  /// d^alpha u_c (x) for |alpha| <= 4.
  virtual double partial(int c, const MultiIndex& alpha, const Vec3& x) const = 0;

  Vec3 value(const Vec3& x) const;
  virtual FieldJet jet(const Vec3& x) const;
  virtual Vec3 source(const MaterialParams& p, const Vec3& x) const;
};

/// 1D factor g with derivatives g, g', g'', g''', g''''.
using Factor = std::function<std::array<double, 5>(double)>;

/// u_c(x) = prod_i g_c(x_i).
class SeparableField : public FieldFunction {
 public:
  SeparableField(int dim, std::string name, std::array<Factor, 3> factors);

  int dim() const override { return dim_; }
  std::string name() const override { return name_; }
  double partial(int c, const MultiIndex& alpha, const Vec3& x) const override;
  /// Evaluate every factor once per point instead of once per partial.
  FieldJet jet(const Vec3& x) const override;
  Vec3 source(const MaterialParams& p, const Vec3& x) const override;

 private:
  struct Table {
    std::array<std::array<std::array<double, 5>, 3>, 3> g;  // g[c][i] = factor jet of u_c in x_i
    double partial(int dim, int c, const MultiIndex& alpha) const;
  };
  Table tabulate(const Vec3& x) const;

  int dim_;
  std::string name_;
  std::array<Factor, 3> factors_;
};

/// exp(cos 2 pi x) - e, cos 2 pi x - 1 and x^2 (x - 1)^2 products; the third
/// component is dropped in 2D.
std::unique_ptr<FieldFunction> smooth_example(int dim);

/// Boundary-layer field built from phi(x) below; see layer_phi.
std::unique_ptr<FieldFunction> layer_example(int dim, double iota);

/// ι -> 0 limit of layer_example: the same products with phi = 0.
std::unique_ptr<FieldFunction> layer_limit(int dim);

/// phi(x) = pi iota (cosh(1/(2 iota)) - cosh((2x-1)/(2 iota))) / sinh(1/(2 iota))
/// and its first four derivatives, evaluated in an overflow-free form.
std::array<double, 5> layer_phi(double x, double iota);

std::unique_ptr<FieldFunction> make_example(const std::string& id, int dim, double iota);

}  // namespace sgfem
