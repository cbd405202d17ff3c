#include "sgfem/model.hpp"

#include <cmath>
#include <numbers>

namespace sgfem {

void MaterialParams::validate() const {
  if (!(mu > 0.0)) throw Error("material: mu must be positive");
  if (!(iota > 0.0 && iota <= 1.0)) throw Error("material: iota must lie in (0, 1]");
  if (!std::isfinite(lambda)) throw Error("material: lambda must be finite");
}

Mat3 strain(const Mat3& grad) { return 0.5 * (grad + grad.transpose()); }

Tensor3 strain_gradient(std::span<const Mat3> hessians) {
  const int d = static_cast<int>(hessians.size());
  Tensor3 t;
  for (int i = 0; i < d; ++i) {
    t[i].resize(d, d);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) t[i](j, k) = 0.5 * (hessians[k](i, j) + hessians[j](i, k));
    }
  }
  return t;
}

double contract(const Tensor3& t, const Tensor3& s, int dim) {
  double r = 0.0;
  for (int i = 0; i < dim; ++i) r += t[i].cwiseProduct(s[i]).sum();
  return r;
}

EnergyDensities energy_densities(const MaterialParams& p, const StrainState& s, const StrainState& t) {
  const int d = static_cast<int>(s.eps.rows());
  EnergyDensities e;
  e.e0 = p.lambda * s.eps.trace() * t.eps.trace() + 2.0 * p.mu * s.eps.cwiseProduct(t.eps).sum();
  double div = 0.0;
  for (int i = 0; i < d; ++i) div += s.grad_eps[i].trace() * t.grad_eps[i].trace();
  e.e1 = p.lambda * div + 2.0 * p.mu * contract(s.grad_eps, t.grad_eps, d);
  return e;
}

double hessian_norm_sq(std::span<const Mat3> hessians) {
  double r = 0.0;
  for (const Mat3& h : hessians) {
    for (int i = 0; i < h.rows(); ++i) {
      for (int j = i; j < h.cols(); ++j) r += h(i, j) * h(i, j);
    }
  }
  return r;
}

double strain_gradient_norm_sq(std::span<const Mat3> hessians) {
  const Tensor3 t = strain_gradient(hessians);
  return contract(t, t, static_cast<int>(hessians.size()));
}

Vec3 FieldFunction::value(const Vec3& x) const {
  const int d = dim();
  Vec3 v(d);
  for (int c = 0; c < d; ++c) v[c] = partial(c, {0, 0, 0}, x);
  return v;
}

namespace {

// Shared by the generic path and SeparableField's tabulated one;
// pd(c, alpha) returns d^alpha u_c at the evaluation point.
template <class Partial>
FieldJet jet_from(int d, const Vec3& value, Partial&& pd) {
  FieldJet j;
  j.value = value;
  j.grad.resize(d, d);
  for (int c = 0; c < d; ++c) {
    j.hess[c].resize(d, d);
    for (int a = 0; a < d; ++a) {
      MultiIndex ia = {0, 0, 0};
      ++ia[a];
      j.grad(c, a) = pd(c, ia);
      for (int b = a; b < d; ++b) {
        MultiIndex iab = ia;
        ++iab[b];
        j.hess[c](a, b) = j.hess[c](b, a) = pd(c, iab);
      }
    }
  }
  return j;
}

template <class Partial>
Vec3 source_from(int d, const MaterialParams& p, Partial&& pd) {
  auto idx = [](std::initializer_list<int> axes) {
    MultiIndex m = {0, 0, 0};
    for (int a : axes) ++m[a];
    return m;
  };
  Vec3 f(d);
  for (int k = 0; k < d; ++k) {
    // L u_k = mu sum_j d_jj u_k + (lambda + mu) sum_j d_kj u_j
    double lu = 0.0;
    double lap_lu = 0.0;
    for (int j = 0; j < d; ++j) {
      lu += p.mu * pd(k, idx({j, j})) + (p.lambda + p.mu) * pd(j, idx({k, j}));
      for (int i = 0; i < d; ++i) {
        lap_lu += p.mu * pd(k, idx({i, i, j, j})) + (p.lambda + p.mu) * pd(j, idx({i, i, k, j}));
      }
    }
    f[k] = p.iota * p.iota * lap_lu - lu;
  }
  return f;
}

}  // namespace

FieldJet FieldFunction::jet(const Vec3& x) const {
  return jet_from(dim(), value(x), [&](int c, const MultiIndex& a) { return partial(c, a, x); });
}

Vec3 FieldFunction::source(const MaterialParams& p, const Vec3& x) const {
  return source_from(dim(), p, [&](int c, const MultiIndex& a) { return partial(c, a, x); });
}

SeparableField::SeparableField(int dim, std::string name, std::array<Factor, 3> factors)
    : dim_(dim), name_(std::move(name)), factors_(std::move(factors)) {
  if (dim != 2 && dim != 3) throw Error("field: dimension must be 2 or 3");
}

double SeparableField::partial(int c, const MultiIndex& alpha, const Vec3& x) const {
  double r = 1.0;
  for (int i = 0; i < dim_; ++i) {
    if (alpha[i] > 4) throw Error("field: derivative order above 4");
    r *= factors_[c](x[i])[alpha[i]];
  }
  return r;
}

SeparableField::Table SeparableField::tabulate(const Vec3& x) const {
  Table t;
  for (int c = 0; c < dim_; ++c) {
    for (int i = 0; i < dim_; ++i) t.g[c][i] = factors_[c](x[i]);
  }
  return t;
}

double SeparableField::Table::partial(int dim, int c, const MultiIndex& alpha) const {
  double r = 1.0;
  for (int i = 0; i < dim; ++i) r *= g[c][i][alpha[i]];
  return r;
}

FieldJet SeparableField::jet(const Vec3& x) const {
  const Table t = tabulate(x);
  Vec3 v(dim_);
  for (int c = 0; c < dim_; ++c) v[c] = t.partial(dim_, c, {0, 0, 0});
  return jet_from(dim_, v, [&](int c, const MultiIndex& a) { return t.partial(dim_, c, a); });
}

Vec3 SeparableField::source(const MaterialParams& p, const Vec3& x) const {
  const Table t = tabulate(x);
  return source_from(dim_, p, [&](int c, const MultiIndex& a) { return t.partial(dim_, c, a); });
}

namespace {

constexpr double kPi = std::numbers::pi;

// Derivatives of exp(h) from those of h (Faa di Bruno).
std::array<double, 5> exp_of(const std::array<double, 5>& h) {
  const double g = std::exp(h[0]);
  const double h1 = h[1], h2 = h[2], h3 = h[3], h4 = h[4];
  return {g, h1 * g, (h2 + h1 * h1) * g, (h3 + 3.0 * h1 * h2 + h1 * h1 * h1) * g,
          (h4 + 4.0 * h1 * h3 + 3.0 * h2 * h2 + 6.0 * h1 * h1 * h2 + h1 * h1 * h1 * h1) * g};
}

std::array<double, 5> cos_jet(double k, double x) {
  const double s = std::sin(k * x), c = std::cos(k * x);
  return {c, -k * s, -k * k * c, k * k * k * s, k * k * k * k * c};
}

std::array<double, 5> sin_jet(double k, double x) {
  const double s = std::sin(k * x), c = std::cos(k * x);
  return {s, k * c, -k * k * s, -k * k * k * c, k * k * k * k * s};
}

std::array<double, 5> minus(std::array<double, 5> a, const std::array<double, 5>& b) {
  for (int i = 0; i < 5; ++i) a[i] -= b[i];
  return a;
}

}  // namespace

std::array<double, 5> layer_phi(double x, double iota) {
  // Numerator and denominator of the cosh/sinh ratio scaled by 2 exp(-1/(2 iota)).
  // With a b = exp(-1/iota) the numerator factors as (1 - a)(1 - b).
  const double a = std::exp(-x / iota);
  const double b = std::exp(-(1.0 - x) / iota);
  const double den = -std::expm1(-1.0 / iota);
  const double i2 = iota * iota;
  const double value = kPi * iota * std::expm1(-x / iota) * std::expm1(-(1.0 - x) / iota) / den;
  return {value, kPi * (a - b) / den, -kPi * (a + b) / (iota * den),
          kPi * (a - b) / (i2 * den), -kPi * (a + b) / (i2 * iota * den)};
}

std::unique_ptr<FieldFunction> smooth_example(int dim) {
  const double w = 2.0 * kPi;
  Factor f1 = [w](double x) {
    auto g = exp_of(cos_jet(w, x));
    g[0] -= std::numbers::e;
    return g;
  };
  Factor f2 = [w](double x) {
    auto g = cos_jet(w, x);
    g[0] -= 1.0;
    return g;
  };
  Factor f3 = [](double x) {
    // x^4 - 2x^3 + x^2
    return std::array<double, 5>{x * x * (x - 1.0) * (x - 1.0), 4 * x * x * x - 6 * x * x + 2 * x,
                                 12 * x * x - 12 * x + 2, 24 * x - 12, 24};
  };
  return std::make_unique<SeparableField>(dim, "smooth", std::array<Factor, 3>{f1, f2, f3});
}

namespace {

std::array<Factor, 3> layer_factors(double iota, bool with_phi) {
  auto phi = [iota, with_phi](double x) {
    return with_phi ? layer_phi(x, iota) : std::array<double, 5>{0, 0, 0, 0, 0};
  };
  Factor f1 = [phi](double x) {
    auto g = exp_of(sin_jet(kPi, x));
    g[0] -= 1.0;
    return minus(g, phi(x));
  };
  Factor f2 = [phi](double x) { return minus(sin_jet(kPi, x), phi(x)); };
  Factor f3 = [phi](double x) {
    const std::array<double, 5> q = {-kPi * x * (x - 1.0), -kPi * (2.0 * x - 1.0), -2.0 * kPi, 0.0, 0.0};
    return minus(q, phi(x));
  };
  return {f1, f2, f3};
}

}  // namespace

std::unique_ptr<FieldFunction> layer_example(int dim, double iota) {
  if (!(iota > 0.0 && iota <= 1.0)) throw Error("layer example: iota must lie in (0, 1]");
  return std::make_unique<SeparableField>(dim, "layer", layer_factors(iota, true));
}

std::unique_ptr<FieldFunction> layer_limit(int dim) {
  return std::make_unique<SeparableField>(dim, "layer-limit", layer_factors(1.0, false));
}

std::unique_ptr<FieldFunction> make_example(const std::string& id, int dim, double iota) {
  if (id == "smooth") return smooth_example(dim);
  if (id == "layer") return layer_example(dim, iota);
  throw Error("unknown example '" + id + "' (expected smooth or layer)");
}

}  // namespace sgfem
