#pragma once

#include "sgfem/analysis.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sgfem {

/// 1 - 1/sqrt(2): the sharp algebraic Korn constant (multi-index Hessian norm).
double korn_constant_sharp();

struct KornReport {
  int dim = 0;
  std::size_t samples = 0;
  double min_random = 0.0;       // min ratio over random Hessians
  double min_adversarial = 0.0;  // after Rayleigh-quotient descent
  double min_exact = 0.0;        // smallest eigenvalue of the quadratic forms
};

/// |grad eps|^2 / |D^2 v|^2 over random per-component symmetric Hessians
/// (zero samples skipped), plus a gradient descent on the Rayleigh quotient
/// and the exact minimum from a symmetric eigensolver.
KornReport verify_algebraic_korn(int dim, std::size_t samples, std::uint64_t seed);

struct ElementSuiteReport {
  int dim = 0;
  int cells = 0;
  double max_duality = 0.0;       // max |D - I|
  double max_constraint = 0.0;    // max relative face constraint residual
  double max_reproduction = 0.0;  // max relative sup error of P2 reproduction
  double max_condition = 0.0;
};

/// Random shape-regular simplices with diameters spread over [1e-3, 1].
std::vector<double> random_simplex(int dim, std::mt19937_64& rng, double max_ratio = 8.0);

ElementSuiteReport verify_element(int dim, int cells, std::uint64_t seed);

struct CoercivityReport {
  double min_sampled = 0.0;  // over random free-dof vectors
  double min_exact = 0.0;    // smallest generalized eigenvalue (dense, small systems)
  double bound = 0.0;        // mu / (2 + 2 C_p^2), C_p = 1/pi
  std::size_t dofs = 0;
};

/// Rayleigh quotient a_h(v, v) / |||v|||^2 on the clamped space.
CoercivityReport verify_coercivity(const Mesh& m, const MaterialParams& p, int samples, std::uint64_t seed);

struct InterpolationLevel {
  int n = 0;
  double h1 = 0.0;  // ||v - I_h v||_{H1_h}
  double h2 = 0.0;  // |v - I_h v|_{H2_h}
  double sz_h1 = 0.0;  // ||v - Pi_C v||_{H1}
};

/// Errors of I_h (regularized variant) for `example` on structured meshes.
std::vector<InterpolationLevel> verify_interpolation(const std::string& example, int dim, double iota,
                                                     const std::vector<int>& n);

}  // namespace sgfem
