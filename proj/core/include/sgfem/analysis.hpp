#pragma once

#include "sgfem/interpolation.hpp"
#include "sgfem/solve.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sgfem {

/// Squared error integrals of a piecewise field against an exact field.
struct ErrorNorms {
  double l2 = 0.0;         // ||u - v||_{L2}
  double h1 = 0.0;         // |u - v|_{H1}, broken
  double h2 = 0.0;         // |u - v|_{H2,h}, broken, multi-index convention
  double energy = 0.0;     // (||.||_{H1}^2 + iota^2 |.|_{H2,h}^2)^{1/2}
  double exact_energy = 0.0;  // |||u|||
  double energy_rel = 0.0;    // energy / exact_energy

  /// Full broken H1 norm (L2 and H1 seminorm).
  double h1_full() const;
};

/// Cellwise quadrature (default degree 10) of the differences of values,
/// gradients and Hessians between `u` and the field given by `v`.
/// v = nullptr measures u itself (the errors of the zero field).
ErrorNorms error_norms(const Mesh& m, const FieldFunction& u, const CellJetFunction& v, double iota,
                       int degree = 10);

/// log2(e[k-1] / e[k]) for k >= 1; element 0 is NaN.
std::vector<double> rates(const std::vector<double>& errors);

/// (sum_K h_K^2 inf_{g in P1(K)} ||f - g||_{L2(K)}^2)^{1/2}, summed over components.
double oscillation(const Mesh& m, const std::function<Vec3(const Vec3&)>& f, int degree = 10);

struct ErrorRow {
  int n = 0;  // cells per side
  double h = 0.0;
  std::size_t dofs = 0;  // free unknowns
  ErrorNorms err;
  double rate = 0.0;  // NaN on the first level
  SolveReport solve;
  double osc = 0.0;
  /// |||u - I_h^0 u||| when the interpolant audit ran, else NaN.
  double interp_energy = 0.0;
};

struct ErrorReport {
  std::string example;
  int dim = 0;
  MaterialParams params;
  std::vector<ErrorRow> rows;
};

struct StudyOptions {
  std::string example = "smooth";
  int dim = 2;
  MaterialParams params;
  /// Mesh resolutions, each the double of the previous one (uniform refinement).
  std::vector<int> n;
  SolveOptions solver;
  AssemblyOptions assembly;
  bool audit = false;  // compute Osc(f) and |||u - I_h^0 u|||
  /// Progress messages (level done); may be empty.
  std::function<void(const ErrorRow&)> progress;
};

/// Resolutions n0, 2 n0, ... for `levels` levels.
std::vector<int> level_sequence(int n0, int levels);

/// Base mesh for a resolution: structured square/cube.
Mesh unit_mesh(int dim, int n);

/// generate -> assemble -> solve -> error norms on uniformly refined meshes.
/// Errors are rethrown with the level in the message.
ErrorReport convergence_study(const StudyOptions& opt);

/// Galerkin solve of one problem; returns the full dof vector.
struct SolveResult {
  Eigen::VectorXd full;
  SolveReport report;
  double energy = 0.0;  // a_h(u_h, u_h) = b . x
  std::size_t free = 0;
};
SolveResult solve_problem(const Mesh& m, const DofMap& dofs, const MaterialParams& p, const FieldFunction* source,
                          const SolveOptions& sopt, const AssemblyOptions& aopt = {});

/// CSV: h,dofs,L2,H1,H2broken,energy_rel,rate (%.6e; first rate blank).
void write_csv(std::ostream& out, const ErrorReport& r);
/// Markdown rendering: one column per h, rows for the relative energy error
/// and the rate.
void write_markdown(std::ostream& out, const ErrorReport& r);

}  // namespace sgfem
