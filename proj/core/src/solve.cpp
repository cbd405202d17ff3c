#include "sgfem/solve.hpp"

#include <Eigen/CholmodSupport>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace sgfem {

SolverMethod parse_solver(const std::string& name) {
  if (name == "auto") return SolverMethod::Auto;
  if (name == "direct") return SolverMethod::Direct;
  if (name == "cg") return SolverMethod::CG;
  throw Error("unknown solver '" + name + "' (expected direct, cg or auto)");
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Direct: return "direct";
    case SolverMethod::CG: return "cg";
    default: return "auto";
  }
}

namespace {

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = (b - a * x).norm();
  return nb > 0.0 ? nr / nb : nr;
}

Eigen::VectorXd solve_direct(const SparseMatrix& a, const Eigen::VectorXd& b) {
  Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
  llt.compute(a);
  if (llt.info() != Eigen::Success) throw Error("solve: matrix is not SPD (Cholesky factorization failed)");
  Eigen::VectorXd x = llt.solve(b);
  if (llt.info() != Eigen::Success || !x.allFinite()) throw Error("solve: Cholesky solve failed");
  return x;
}

Eigen::VectorXd solve_cg(const SparseMatrix& a, const Eigen::VectorXd& b, double tol, int max_it, int& iterations) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd inv_diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) throw Error("solve: matrix is not SPD (non-positive diagonal)");
    inv_diag[i] = 1.0 / d;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  const double nb = b.norm();
  std::vector<double> history;
  if (nb == 0.0) {
    iterations = 0;
    return x;
  }
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  Eigen::VectorXd ap(n);
  double rz = r.dot(z);
  for (int it = 1; it <= max_it; ++it) {
    ap.noalias() = a * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw Error("solve: matrix is not SPD (non-positive curvature in CG)");
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rel = r.norm() / nb;
    history.push_back(rel);
    if (rel <= tol) {
      iterations = it;
      return x;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  std::ostringstream msg;
  msg << "solve: CG did not reach tolerance " << tol << " in " << max_it << " iterations; residual history:";
  const std::size_t stride = std::max<std::size_t>(1, history.size() / 20);
  for (std::size_t i = 0; i < history.size(); i += stride) msg << ' ' << i + 1 << ':' << history[i];
  msg << ' ' << history.size() << ':' << history.back();
  throw Error(msg.str());
}

}  // namespace

Eigen::VectorXd solve(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& opt, SolveReport* report) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw Error("solve: dimension mismatch");
  const auto start = std::chrono::steady_clock::now();
  SolverMethod method = opt.method;
  if (method == SolverMethod::Auto) {
    method = static_cast<std::size_t>(b.size()) <= opt.direct_limit ? SolverMethod::Direct : SolverMethod::CG;
  }
  Eigen::VectorXd x;
  int iterations = 0;
  if (b.size() == 0) {
    x.resize(0);
  } else if (method == SolverMethod::Direct) {
    x = solve_direct(a, b);
    iterations = 1;
  } else {
    const int max_it = opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(10 * b.size());
    x = solve_cg(a, b, opt.tol, max_it, iterations);
  }
  const double rel = b.size() ? relative_residual(a, x, b) : 0.0;
  if (method == SolverMethod::Direct && !(rel <= std::max(opt.tol, 1e-8))) {
    std::ostringstream msg;
    msg << "solve: direct residual " << rel << " above tolerance";
    throw Error(msg.str());
  }
  if (report) {
    report->method = method;
    report->iterations = iterations;
    report->relative_residual = rel;
    report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return x;
}

}  // namespace sgfem
