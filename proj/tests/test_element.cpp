#include "sgfem/element.hpp"
#include "sgfem/verification.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sgfem;

namespace {

Mesh single_cell(int dim) {
  if (dim == 2) return Mesh(2, {0.1, 0.2, 1.3, 0.1, 0.5, 1.1}, {0, 1, 2});
  return Mesh(3, {0.1, 0.0, 0.2, 1.2, 0.1, 0.0, 0.3, 1.1, 0.1, 0.2, 0.3, 1.0}, {0, 1, 2, 3});
}

Vec3 random_inside(int dim, std::mt19937_64& rng, const ElementBasis& b) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Bary l(dim + 1);
  for (int i = 0; i <= dim; ++i) l[i] = g(rng);
  l /= l.sum();
  return b.to_physical(l);
}

struct Quadratic {
  double c0;
  Vec3 b;
  Mat3 a;
  ScalarJet operator()(const Vec3& x) const {
    ScalarJet j;
    j.value = c0 + b.dot(x) + x.dot(a * x);
    j.grad = b + 2.0 * a * x;
    return j;
  }
};

Quadratic random_quadratic(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Quadratic q{n(rng), Vec3(dim), Mat3(dim, dim)};
  for (int i = 0; i < dim; ++i) q.b[i] = n(rng);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) q.a(i, j) = q.a(j, i) = n(rng);
  }
  return q;
}

}  // namespace

class ElementDim : public ::testing::TestWithParam<int> {};

TEST_P(ElementDim, Counts) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  // P2 has (d+1)(d+2)/2 functions, plus one antisymmetric cubic per edge and
  // d+1 bubble terms; d+1 face constraints leave (d+1)^2 dofs.
  const int p2 = (d + 1) * (d + 2) / 2;
  const int edges = d * (d + 1) / 2;
  EXPECT_EQ(b.frame_size(), p2 + edges + (d + 1));
  EXPECT_EQ(b.frame_size() - (d + 1), b.ndof());
  EXPECT_EQ(b.ndof(), d == 2 ? 9 : 16);
}

TEST_P(ElementDim, DualityAndConstraints) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  const int n = b.ndof();
  EXPECT_LT((b.duality_matrix() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(b.constraint_residuals().maxCoeff(), 1e-10);
}

TEST_P(ElementDim, ConstantReproduction) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  const Eigen::VectorXd dofs = interpolate_local(b, [&](const Vec3&) {
    ScalarJet j;
    j.value = 1.0;
    j.grad = Vec3::Zero(d);
    return j;
  });
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const BasisEval e = b.eval(random_inside(d, rng, b));
    EXPECT_NEAR(e.value.dot(dofs), 1.0, 1e-12);
  }
}

TEST_P(ElementDim, LinearDofs) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  const Eigen::VectorXd dofs = interpolate_local(b, [&](const Vec3& x) {
    ScalarJet j;
    j.value = x[0];
    j.grad = Vec3::Unit(d, 0);
    return j;
  });
  for (int r = 0; r < b.ndof(); ++r) {
    const DofDescriptor& dd = b.dofs()[r];
    const double expect = dd.kind == DofKind::Value ? b.vertex(dd.vertex)[0]
                                                    : b.vertex(dd.target)[0] - b.vertex(dd.vertex)[0];
    EXPECT_DOUBLE_EQ(dofs[r], expect);
  }
  const Eigen::VectorXd zero = interpolate_local(b, [&](const Vec3&) {
    ScalarJet j;
    j.value = 0.0;
    j.grad = Vec3::Zero(d);
    return j;
  });
  EXPECT_EQ(zero.cwiseAbs().maxCoeff(), 0.0);
}

TEST_P(ElementDim, QuadraticReproduction) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Quadratic q = random_quadratic(d, rng);
    const Eigen::VectorXd dofs = interpolate_local(b, q);
    for (int t = 0; t < 20; ++t) {
      const Vec3 x = random_inside(d, rng, b);
      const BasisEval e = b.eval(x);
      const ScalarJet exact = q(x);
      EXPECT_NEAR(e.value.dot(dofs), exact.value, 1e-10);
      EXPECT_LT((e.grad * dofs - exact.grad).norm(), 1e-9);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double h = 0.0;
          for (int k = 0; k < b.ndof(); ++k) h += e.hess[k](i, j) * dofs[k];
          EXPECT_NEAR(h, 2.0 * q.a(i, j), 1e-8);
        }
      }
    }
  }
}

TEST_P(ElementDim, GradientsMatchFiniteDifferences) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  std::mt19937_64 rng(5);
  const double step = 1e-5;
  for (int t = 0; t < 5; ++t) {
    const Vec3 x = random_inside(d, rng, b);
    const BasisEval e = b.eval(x);
    for (int i = 0; i < d; ++i) {
      const Vec3 dx = step * Vec3::Unit(d, i);
      const BasisEval ep = b.eval(x + dx);
      const BasisEval em = b.eval(x - dx);
      for (int k = 0; k < b.ndof(); ++k) {
        const double fd = (ep.value[k] - em.value[k]) / (2 * step);
        const double scale = std::max(1.0, e.grad.col(k).cwiseAbs().maxCoeff());
        EXPECT_NEAR(e.grad(i, k), fd, 1e-6 * scale);
        for (int j = 0; j < d; ++j) {
          const double fdh = (ep.grad(j, k) - em.grad(j, k)) / (2 * step);
          const double hs = std::max(1.0, e.hess[k].cwiseAbs().maxCoeff());
          EXPECT_NEAR(e.hess[k](i, j), fdh, 1e-5 * hs);
        }
      }
    }
  }
}

TEST_P(ElementDim, VertexSetMatchesChangeOfVariables) {
  const int d = GetParam();
  const ElementBasis b = ElementBasis::build(single_cell(d), 0);
  std::mt19937_64 rng(9);
  const Quadratic q = random_quadratic(d, rng);
  // Per-vertex unknowns (value, gradient) fed through the vertex set.
  Eigen::VectorXd g((d + 1) * (d + 1));
  for (int i = 0; i <= d; ++i) {
    const ScalarJet j = q(b.vertex(i));
    g[i * (d + 1)] = j.value;
    g.segment(i * (d + 1) + 1, d) = j.grad;
  }
  const Vec3 x = random_inside(d, rng, b);
  EXPECT_NEAR(b.eval(x, DofSet::Vertex).value.dot(g), q(x).value, 1e-10);
}

TEST_P(ElementDim, RandomSimplexSuite) {
  const int d = GetParam();
  const ElementSuiteReport r = verify_element(d, 100, 20240917);
  EXPECT_EQ(r.cells, 100);
  EXPECT_LT(r.max_duality, 1e-10);
  EXPECT_LT(r.max_constraint, 1e-10);
  EXPECT_LT(r.max_reproduction, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Dims, ElementDim, ::testing::Values(2, 3));

TEST(Element, RejectsNearlyDegenerateCell) {
  EXPECT_THROW(
      {
        const Mesh m(2, {0, 0, 1, 0, 0.5, 1e-13}, {0, 1, 2});
        (void)ElementBasis::build(m, 0);
      },
      Error);
}
