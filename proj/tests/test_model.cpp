#include "sgfem/model.hpp"
#include "sgfem/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sgfem;

namespace {

constexpr double kPi = std::numbers::pi;

Mat3 mat2(double a, double b, double c, double d) {
  Mat3 m(2, 2);
  m << a, b, c, d;
  return m;
}

std::array<Mat3, 3> random_hessians(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::array<Mat3, 3> h;
  for (int k = 0; k < d; ++k) {
    h[k].resize(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) h[k](i, j) = h[k](j, i) = n(rng);
    }
  }
  return h;
}

// Fourth-order central differences built only from point values.
struct FiniteDifferenceOperator {
  const FieldFunction& u;
  MaterialParams p;
  double h;

  double d1(const std::function<double(const Vec3&)>& g, const Vec3& x, int i) const {
    const Vec3 e = h * Vec3::Unit(x.size(), i);
    return (g(x - 2 * e) - 8 * g(x - e) + 8 * g(x + e) - g(x + 2 * e)) / (12 * h);
  }
  double d2(const std::function<double(const Vec3&)>& g, const Vec3& x, int i) const {
    const Vec3 e = h * Vec3::Unit(x.size(), i);
    return (-g(x - 2 * e) + 16 * g(x - e) - 30 * g(x) + 16 * g(x + e) - g(x + 2 * e)) / (12 * h * h);
  }
  double dij(const std::function<double(const Vec3&)>& g, const Vec3& x, int i, int j) const {
    if (i == j) return d2(g, x, i);
    return d1([&](const Vec3& y) { return d1(g, y, j); }, x, i);
  }
  // (mu Lap u + (lambda + mu) grad div u)_k
  double lu(const Vec3& x, int k) const {
    const int d = u.dim();
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      s += p.mu * dij([&](const Vec3& y) { return u.value(y)[k]; }, x, j, j);
      s += (p.lambda + p.mu) * dij([&](const Vec3& y) { return u.value(y)[j]; }, x, k, j);
    }
    return s;
  }
  double source(const Vec3& x, int k) const {
    double lap = 0.0;
    for (int i = 0; i < u.dim(); ++i) lap += d2([&](const Vec3& y) { return lu(y, k); }, x, i);
    return p.iota * p.iota * lap - lu(x, k);
  }
};

double phi_direct(double x, double iota) {
  return kPi * iota * (std::cosh(0.5 / iota) - std::cosh((2 * x - 1) / (2 * iota))) / std::sinh(0.5 / iota);
}

}  // namespace

TEST(Model, StrainExamples) {
  EXPECT_EQ(strain(Mat3::Identity(2, 2)), Mat3::Identity(2, 2));
  EXPECT_EQ(strain(mat2(0, 1, -1, 0)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(strain(mat2(1, 2, 0, 3)), mat2(1, 1, 1, 3));
}

TEST(Model, StrainGradientIndexPattern) {
  std::array<Mat3, 2> h = {mat2(1, 0, 0, 0), Mat3::Zero(2, 2)};
  const Tensor3 t = strain_gradient(std::span<const Mat3>(h.data(), 2));
  // t[i](j, k) = eps_{jk,i}
  EXPECT_EQ(t[0](0, 0), 1.0);
  EXPECT_EQ(t[0](0, 1), 0.0);
  EXPECT_EQ(t[0](1, 0), 0.0);
  EXPECT_EQ(t[1](0, 0), 0.0);
  double total = 0.0;
  for (int i = 0; i < 2; ++i) total += t[i].cwiseAbs().sum();
  EXPECT_EQ(total, 1.0);

  std::array<Mat3, 2> z = {Mat3::Zero(2, 2), Mat3::Zero(2, 2)};
  const Tensor3 t0 = strain_gradient(std::span<const Mat3>(z.data(), 2));
  EXPECT_EQ(t0[0].cwiseAbs().sum() + t0[1].cwiseAbs().sum(), 0.0);
}

TEST(Model, StrainGradientMatchesDefinition) {
  std::mt19937_64 rng(1);
  for (int d = 2; d <= 3; ++d) {
    const auto h = random_hessians(d, rng);
    const Tensor3 t = strain_gradient(std::span<const Mat3>(h.data(), d));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) EXPECT_NEAR(t[i](j, k), 0.5 * (h[k](i, j) + h[j](i, k)), 1e-15);
      }
    }
  }
}

TEST(Model, HessianNormCountsEachMultiIndexOnce) {
  std::array<Mat3, 1> h = {mat2(1, 2, 2, 3)};
  EXPECT_DOUBLE_EQ(hessian_norm_sq(std::span<const Mat3>(h.data(), 1)), 1.0 + 4.0 + 9.0);
}

TEST(Model, KornQuarterBound) {
  std::mt19937_64 rng(7);
  for (int d = 2; d <= 3; ++d) {
    for (int s = 0; s < 2000; ++s) {
      const auto h = random_hessians(d, rng);
      const std::span<const Mat3> hs(h.data(), d);
      EXPECT_GE(strain_gradient_norm_sq(hs), 0.25 * hessian_norm_sq(hs));
    }
  }
}

TEST(Model, KornSuiteSharpConstant) {
  const double sharp = 1.0 - 1.0 / std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(korn_constant_sharp(), sharp);
  const KornReport r2 = verify_algebraic_korn(2, 20000, 3);
  EXPECT_GE(r2.min_random, sharp - 1e-12);
  EXPECT_NEAR(r2.min_adversarial, sharp, 1e-2);
  EXPECT_NEAR(r2.min_exact, sharp, 1e-12);
  const KornReport r3 = verify_algebraic_korn(3, 20000, 3);
  EXPECT_GE(r3.min_random, 0.25);
  EXPECT_GE(r3.min_exact, 0.25);
}

TEST(Model, KornAdversarialPair) {
  // |grad eps|^2 splits into b^2 + (b + d)^2 / 2 with b = d12 v1, d = d11 v2;
  // the smaller eigenvector of [[3/2, 1/2], [1/2, 1/2]] is (1, -(1 + sqrt 2)).
  std::array<Mat3, 2> h = {mat2(0, 1, 1, 0), mat2(-(1.0 + std::sqrt(2.0)), 0, 0, 0)};
  const std::span<const Mat3> hs(h.data(), 2);
  EXPECT_NEAR(strain_gradient_norm_sq(hs) / hessian_norm_sq(hs), korn_constant_sharp(), 1e-12);
}

TEST(Model, EnergyDensities) {
  MaterialParams p;
  StrainState s{Mat3::Identity(2, 2), {}};
  for (auto& m : s.grad_eps) m = Mat3::Zero(2, 2);
  const EnergyDensities e = energy_densities(p, s, s);
  EXPECT_DOUBLE_EQ(e.e0, 4 * p.lambda + 4 * p.mu);
  EXPECT_EQ(e.e1, 0.0);

  StrainState z{Mat3::Zero(2, 2), s.grad_eps};
  const EnergyDensities ez = energy_densities(p, z, z);
  EXPECT_EQ(ez.e0, 0.0);
  EXPECT_EQ(ez.e1, 0.0);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int d = 2; d <= 3; ++d) {
    for (int t = 0; t < 200; ++t) {
      Mat3 g(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = n(rng);
      }
      const auto h = random_hessians(d, rng);
      StrainState r{strain(g), strain_gradient(std::span<const Mat3>(h.data(), d))};
      const EnergyDensities er = energy_densities(p, r, r);
      EXPECT_GE(er.e0, 2 * p.mu * r.eps.squaredNorm() * (1 - 1e-14));
      EXPECT_GE(er.e1, 2 * p.mu * contract(r.grad_eps, r.grad_eps, d) * (1 - 1e-14));
    }
  }
}

TEST(Model, ParamsValidation) {
  MaterialParams p;
  EXPECT_NO_THROW(p.validate());
  p.iota = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p.iota = 1.0;
  p.mu = 0.0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Model, SmoothExampleClamped) {
  for (int d = 2; d <= 3; ++d) {
    const auto u = smooth_example(d);
    EXPECT_EQ(u->value(Vec3::Zero(d)).cwiseAbs().maxCoeff(), 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit;
    for (int s = 0; s < 20; ++s) {
      Vec3 x(d);
      for (int i = 0; i < d; ++i) x[i] = unit(rng);
      x[s % d] = (s / d) % 2 ? 1.0 : 0.0;
      const FieldJet j = u->jet(x);
      EXPECT_LT(j.value.cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT(j.grad.cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Model, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  const double h = 1e-4;
  for (int d = 2; d <= 3; ++d) {
    for (const std::string id : {"smooth", "layer"}) {
      const auto u = make_example(id, d, 0.3);
      Vec3 x(d);
      for (int i = 0; i < d; ++i) x[i] = unit(rng);
      for (int c = 0; c < d; ++c) {
        for (int i = 0; i < d; ++i) {
          // Each partial of order 1..4 against the difference of order - 1.
          MultiIndex a = {0, 0, 0};
          for (int order = 1; order <= 4; ++order) {
            MultiIndex lower = a;
            ++a[i];
            const Vec3 e = h * Vec3::Unit(d, i);
            const double fd = (u->partial(c, lower, x + e) - u->partial(c, lower, x - e)) / (2 * h);
            const double v = u->partial(c, a, x);
            EXPECT_NEAR(v, fd, 1e-5 * std::max(1.0, std::abs(v))) << id << " c " << c << " i " << i;
          }
        }
      }
    }
  }
}

TEST(Model, SmoothSourceMatchesFiniteDifferenceOperator) {
  MaterialParams p;
  p.iota = 1e-2;
  const auto u = smooth_example(2);
  const FiniteDifferenceOperator fd{*u, p, 1e-2};
  Vec3 x(2);
  x << 0.3, 0.7;
  const Vec3 f = u->source(p, x);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(f[k], fd.source(x, k), 1e-5 * f.norm());
}

TEST(Model, LayerSourceMatchesFiniteDifferenceOperator) {
  MaterialParams p;
  p.iota = 0.5;
  const auto u = layer_example(3, p.iota);
  const FiniteDifferenceOperator fd{*u, p, 1e-2};
  Vec3 x(3);
  x << 0.3, 0.7, 0.45;
  const Vec3 f = u->source(p, x);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(f[k], fd.source(x, k), 1e-5 * f.norm());
}

TEST(Model, LayerPhi) {
  for (double iota : {1.0, 1e-2, 1e-6, 1e-8}) {
    EXPECT_EQ(layer_phi(0.0, iota)[0], 0.0);
    EXPECT_EQ(layer_phi(1.0, iota)[0], 0.0);
    for (double v : layer_phi(0.3, iota)) EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(layer_phi(0.5, iota)[0], kPi * iota);
  }
  const double iota = 1e-2;
  // cosh(50) - 1 and sinh(50) are representable, so the definition is usable here.
  const double direct = kPi * iota * (std::cosh(50.0) - 1.0) / std::sinh(50.0);
  EXPECT_NEAR(layer_phi(0.5, iota)[0], direct, 1e-12 * direct);
  EXPECT_NEAR(layer_phi(0.5, iota)[0], kPi * iota * (1.0 - 1.0 / std::cosh(50.0)), 1e-16);
  for (double x : {0.05, 0.3, 0.5, 0.8}) {
    for (double io : {1.0, 0.2, 1e-2}) EXPECT_NEAR(layer_phi(x, io)[0], phi_direct(x, io), 1e-14);
  }
}

TEST(Model, LayerApproachesLimit) {
  Vec3 x(2);
  x << 0.5, 0.5;
  const auto u0 = layer_limit(2);
  for (double iota : {1e-2, 1e-4, 1e-6}) {
    const auto u = layer_example(2, iota);
    EXPECT_LE((u->value(x) - u0->value(x)).cwiseAbs().maxCoeff(), 10 * kPi * iota);
  }
  // The limit keeps zero boundary values.
  Vec3 b(2);
  b << 0.0, 0.4;
  EXPECT_EQ(u0->value(b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, UnknownExample) { EXPECT_THROW(make_example("wave", 2, 1.0), Error); }
