#include "sgfem/analysis.hpp"
#include "sgfem/solve.hpp"

#include <gtest/gtest.h>

using namespace sgfem;

namespace {

SparseMatrix diag2() {
  SparseMatrix a(2, 2);
  a.insert(0, 0) = 2.0;
  a.insert(1, 1) = 2.0;
  a.makeCompressed();
  return a;
}

}  // namespace

TEST(Solve, Diagonal2x2) {
  Eigen::VectorXd b(2);
  b << 2, 4;
  for (SolverMethod m : {SolverMethod::Direct, SolverMethod::CG, SolverMethod::Auto}) {
    SolveOptions o;
    o.method = m;
    const Eigen::VectorXd x = solve(diag2(), b, o);
    EXPECT_NEAR(x[0], 1.0, 1e-14);
    EXPECT_NEAR(x[1], 2.0, 1e-14);
  }
}

TEST(Solve, ZeroRhs) {
  for (SolverMethod m : {SolverMethod::Direct, SolverMethod::CG}) {
    SolveOptions o;
    o.method = m;
    SolveReport r;
    const Eigen::VectorXd x = solve(diag2(), Eigen::VectorXd::Zero(2), o, &r);
    EXPECT_EQ(x.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Solve, NotSpdReported) {
  SparseMatrix a(2, 2);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = -1.0;
  a.makeCompressed();
  SolveOptions o;
  o.method = SolverMethod::Direct;
  EXPECT_THROW(solve(a, Eigen::VectorXd::Ones(2), o), Error);
}

TEST(Solve, CgStagnationReportsHistory) {
  const Mesh m = generate_unit_square(8);
  const DofMap d(m);
  MaterialParams p;
  p.iota = 1e-2;
  const SparseSystem sys = assemble(m, d, p, smooth_example(2).get());
  SolveOptions o;
  o.method = SolverMethod::CG;
  o.tol = 1e-14;
  o.max_iterations = 3;
  try {
    solve(sys, o);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(Solve, ParseNames) {
  EXPECT_EQ(parse_solver("direct"), SolverMethod::Direct);
  EXPECT_EQ(parse_solver("cg"), SolverMethod::CG);
  EXPECT_EQ(parse_solver("auto"), SolverMethod::Auto);
  EXPECT_THROW(parse_solver("gmres"), Error);
  EXPECT_EQ(to_string(SolverMethod::CG), "cg");
}

TEST(Solve, DirectAndCgAgree) {
  const Mesh m = generate_unit_square(8);
  const DofMap d(m);
  MaterialParams p;
  p.iota = 1e-2;
  const SparseSystem sys = assemble(m, d, p, smooth_example(2).get());
  SolveOptions direct;
  direct.method = SolverMethod::Direct;
  SolveOptions cg;
  cg.method = SolverMethod::CG;
  cg.tol = 1e-12;
  SolveReport rd, rc;
  const Eigen::VectorXd xd = solve(sys, direct, &rd);
  const Eigen::VectorXd xc = solve(sys, cg, &rc);
  EXPECT_LT((xd - xc).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(rd.relative_residual, 1e-10);
  EXPECT_LE(rc.relative_residual, 1e-12);
  EXPECT_GT(rc.iterations, 0);
  EXPECT_EQ(rd.method, SolverMethod::Direct);
}

TEST(Solve, GalerkinEnergyIdentity) {
  const Mesh m = generate_unit_square(8);
  const DofMap d(m);
  MaterialParams p;
  p.iota = 1e-2;
  SolveOptions o;
  o.method = SolverMethod::Direct;
  const SparseSystem sys = assemble(m, d, p, smooth_example(2).get());
  const Eigen::VectorXd x = solve(sys, o);
  const double ax = x.dot(sys.A * x);
  EXPECT_NEAR(ax, sys.b.dot(x), 1e-10 * ax);
  EXPECT_GT(ax, 0.0);
}
