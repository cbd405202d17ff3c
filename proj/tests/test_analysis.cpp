#include "sgfem/analysis.hpp"
#include "sgfem/verification.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sgfem;

namespace {

// Continuous piecewise linear hat of the vertex (1/2, 1/2) on the n = 2
// square mesh (diagonals along (1, 1)); zero on the boundary and piecewise
// linear on every refinement. Components (phi, -2 phi).
class Hat : public FieldFunction {
 public:
  int dim() const override { return 2; }
  std::string name() const override { return "hat"; }
  double partial(int c, const MultiIndex& a, const Vec3& x) const override {
    if (a[0] + a[1] + a[2] != 0) throw Error("hat: only values are provided");
    const double u = (x[0] - 0.5) / 0.5, v = (x[1] - 0.5) / 0.5;
    const double phi = std::max(0.0, 1.0 - std::max({std::abs(u), std::abs(v), std::abs(u - v)}));
    return (c == 0 ? 1.0 : -2.0) * phi;
  }
};

// Global quadratic in every component (not vanishing on the boundary).
class Quadratic : public FieldFunction {
 public:
  explicit Quadratic(int d) : d_(d) {}
  int dim() const override { return d_; }
  std::string name() const override { return "quadratic"; }
  double partial(int c, const MultiIndex& a, const Vec3& x) const override {
    // u_c = 1 + c x1 + x1 x2 + 0.5 x_d^2
    const int order = a[0] + a[1] + a[2];
    const int last = d_ - 1;
    if (order == 0) return 1 + c * x[0] + x[0] * x[1] + 0.5 * x[last] * x[last];
    double v = 0.0;
    if (order == 1) {
      if (a[0] == 1) v += c + x[1];
      if (a[1] == 1) v += x[0];
      if (a[last] == 1) v += x[last];
      return v;
    }
    if (order == 2) {
      if (a[0] == 1 && a[1] == 1) v += 1.0;
      if (a[last] == 2) v += 1.0;
      return v;
    }
    return 0.0;
  }

 private:
  int d_;
};

}  // namespace

TEST(Analysis, RatesOfGeometricSequence) {
  const std::vector<double> r = rates({1.0, 0.25, 1.0 / 16});
  EXPECT_TRUE(std::isnan(r[0]));
  EXPECT_EQ(r[1], 2.0);
  EXPECT_EQ(r[2], 2.0);
}

TEST(Analysis, ZeroFieldRelativeErrorIsOne) {
  const Mesh m = generate_unit_square(4);
  const auto u = smooth_example(2);
  const ErrorNorms e = error_norms(m, *u, nullptr, 1e-2);
  EXPECT_DOUBLE_EQ(e.energy_rel, 1.0);
  EXPECT_DOUBLE_EQ(e.energy, e.exact_energy);
}

TEST(Analysis, QuadraticReproducedByInterpolant) {
  for (int d = 2; d <= 3; ++d) {
    const Mesh m = unit_mesh(d, 2);
    const DofMap dofs(m, false);
    const Quadratic u(d);
    const DiscreteField ih(m, dofs, nodal_interpolant(m, dofs, u, false));
    const ErrorNorms e = error_norms(m, u, ih.evaluator(), 1.0);
    EXPECT_LE(e.energy_rel, 1e-9);
  }
}

TEST(Analysis, ScottZhangReproducesZeroTraceP2) {
  const Mesh m = generate_unit_square(4);
  const Hat u;
  const P2Field w = scott_zhang(m, [&](const Vec3& x) { return u.value(x); });
  // Nodal values of the hat are the oracle.
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const Vec3 expect = u.value(m.vertex(static_cast<int>(v)));
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(w.vertex_values(v, c), expect[c], 1e-12);
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto ev = m.edge(static_cast<int>(e));
    const Vec3 expect = u.value(0.5 * (m.vertex(ev[0]) + m.vertex(ev[1])));
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(w.edge_values(e, c), expect[c], 1e-12);
  }
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    if (m.is_boundary_vertex(static_cast<int>(v))) EXPECT_EQ(w.vertex_values.row(v).cwiseAbs().maxCoeff(), 0.0);
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(static_cast<int>(e))) EXPECT_EQ(w.edge_values.row(e).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Analysis, ScottZhangSecondOrder) {
  const auto u = smooth_example(2);
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const Mesh m = generate_unit_square(n);
    const P2Field w = scott_zhang(m, [&](const Vec3& x) { return u->value(x); });
    const double e = error_norms(m, *u, w.evaluator(m), 1.0).h1_full();
    if (prev > 0.0) {
      EXPECT_GT(prev / e, 3.4);
      EXPECT_LT(prev / e, 4.6);
    }
    prev = e;
  }
}

TEST(Analysis, RegularizedInterpolantRules) {
  const Mesh m = generate_unit_square(4);
  const DofMap dofs(m, false);
  const BoundaryNodeClass cls = classify_boundary_nodes(m);
  const auto u = smooth_example(2);
  const Eigen::VectorXd x = regularized_interpolant(m, dofs, *u, InterpolantVariant::Regularized);
  const Eigen::VectorXd x0 = regularized_interpolant(m, dofs, *u, InterpolantVariant::Clamped);
  // Interior values come from the Scott-Zhang field, not from u itself.
  const P2Field w = scott_zhang(m, [&](const Vec3& y) { return u->value(y); });
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    const int vi = static_cast<int>(v);
    for (int c = 0; c < 2; ++c) {
      if (cls.kind[v] == NodeKind::Interior) {
        EXPECT_EQ(x[dofs.global(vi, c, 0)], w.vertex_values(vi, c));
        EXPECT_GE(interpolation_cell(m, cls, vi), 0);
        continue;
      }
      EXPECT_EQ(x[dofs.global(vi, c, 0)], 0.0);
      for (int s = 0; s < 3; ++s) EXPECT_EQ(x0[dofs.global(vi, c, s)], 0.0);
      if (cls.kind[v] == NodeKind::Sharp) {
        EXPECT_EQ(interpolation_cell(m, cls, vi), -1);
        for (int s = 1; s < 3; ++s) EXPECT_EQ(x[dofs.global(vi, c, s)], 0.0);
      }
    }
  }
  const Eigen::VectorXd z = regularized_interpolant(m, dofs, SeparableField(2, "zero", {[](double) {
                                                                               return std::array<double, 5>{};
                                                                             },
                                                                             [](double) {
                                                                               return std::array<double, 5>{};
                                                                             },
                                                                             [](double) {
                                                                               return std::array<double, 5>{};
                                                                             }}),
                                                    InterpolantVariant::Regularized);
  EXPECT_EQ(z.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Analysis, InterpolationRates) {
  const auto levels = verify_interpolation("smooth", 2, 1.0, {8, 16, 32});
  ASSERT_EQ(levels.size(), 3u);
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double r1 = levels[k - 1].h1 / levels[k].h1;
    const double r2 = levels[k - 1].h2 / levels[k].h2;
    EXPECT_GT(r1, 3.4);
    EXPECT_LT(r1, 4.6);
    EXPECT_GT(r2, 1.7);
    EXPECT_LT(r2, 2.3);
  }
}

TEST(Analysis, CoercivityOnSmallMesh) {
  for (double iota : {1.0, 1e-2, 1e-6}) {
    MaterialParams p;
    p.iota = iota;
    const CoercivityReport r = verify_coercivity(generate_unit_square(4), p, 200, 5);
    EXPECT_GE(r.min_sampled, p.mu / 4);
    EXPECT_GE(r.min_exact, r.bound);
    EXPECT_GE(r.min_sampled, r.min_exact * (1 - 1e-12));
  }
}

TEST(Analysis, ConvergenceStudyRefinesAndReports) {
  StudyOptions o;
  o.dim = 2;
  o.params.iota = 1.0;
  o.n = {4, 8, 16};
  o.solver.method = SolverMethod::Direct;
  o.audit = true;
  const ErrorReport r = convergence_study(o);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(std::isnan(r.rows[0].rate));
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    EXPECT_NEAR(r.rows[k].h, 0.5 * r.rows[k - 1].h, 1e-15);
    EXPECT_EQ(r.rows[k].rate, std::log2(r.rows[k - 1].err.energy_rel / r.rows[k].err.energy_rel));
  }
  for (const ErrorRow& row : r.rows) {
    EXPECT_TRUE(std::isfinite(row.osc));
    EXPECT_LE(row.err.energy, 5 * (row.interp_energy + row.osc));
  }
  std::ostringstream csv;
  write_csv(csv, r);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "h,dofs,L2,H1,H2broken,energy_rel,rate");
  EXPECT_EQ(first.back(), ',');
  o.n = {4};
  EXPECT_THROW(convergence_study(o), Error);
}
