#pragma once

#include "sgfem/assembly.hpp"

#include <string>
#include <vector>

namespace sgfem {

enum class SolverMethod { Auto, Direct, CG };

SolverMethod parse_solver(const std::string& name);
std::string to_string(SolverMethod m);

struct SolveOptions {
  SolverMethod method = SolverMethod::Auto;
  /// Relative residual target ||Ax - b|| / ||b||.
  double tol = 1e-10;
  int max_iterations = 0;  // 0: 10 n for CG
  /// Auto picks the direct solver up to this many unknowns.
  std::size_t direct_limit = 300000;
};

struct SolveReport {
  SolverMethod method = SolverMethod::Direct;
  int iterations = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
};

/// Solves A x = b for SPD A. Direct: supernodal sparse Cholesky; CG: Jacobi
/// preconditioned conjugate gradients. Throws sgfem::Error on a failed
/// factorization ("not SPD") or CG stagnation (message lists the residual
/// history).
Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& opt,
                      SolveReport* report = nullptr);

inline Eigen::VectorXd solve(const SparseSystem& sys, const SolveOptions& opt, SolveReport* report = nullptr) {
  return solve(sys.A, sys.b, opt, report);
}

}  // namespace sgfem
