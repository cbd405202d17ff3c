#include "sgfem/verification.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace sgfem {

double korn_constant_sharp() { return 1.0 - 1.0 / std::numbers::sqrt2; }

namespace {

// Per-component symmetric Hessians from their unique entries (i <= j).
std::array<Mat3, 3> hessians_from(const Eigen::VectorXd& x, int d) {
  std::array<Mat3, 3> h;
  int k = 0;
  for (int c = 0; c < d; ++c) {
    h[c].resize(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) h[c](i, j) = h[c](j, i) = x[k++];
    }
  }
  return h;
}

double korn_numerator(const Eigen::VectorXd& x, int d) {
  const auto h = hessians_from(x, d);
  return strain_gradient_norm_sq(std::span<const Mat3>(h.data(), static_cast<std::size_t>(d)));
}

}  // namespace

KornReport verify_algebraic_korn(int dim, std::size_t samples, std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw Error("korn: dimension must be 2 or 3");
  const int d = dim;
  const int nx = d * d * (d + 1) / 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  KornReport rep;
  rep.dim = d;
  rep.min_random = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(nx);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int k = 0; k < nx; ++k) x[k] = normal(rng);
    const auto h = hessians_from(x, d);
    const std::span<const Mat3> hs(h.data(), static_cast<std::size_t>(d));
    const double den = hessian_norm_sq(hs);
    if (den == 0.0) continue;
    rep.min_random = std::min(rep.min_random, strain_gradient_norm_sq(hs) / den);
    ++rep.samples;
  }

  // Matrix of the numerator form by polarization; the denominator is |x|^2.
  Eigen::MatrixXd p(nx, nx);
  for (int a = 0; a < nx; ++a) {
    for (int b = a; b < nx; ++b) {
      Eigen::VectorXd ea = Eigen::VectorXd::Unit(nx, a);
      Eigen::VectorXd eb = Eigen::VectorXd::Unit(nx, b);
      const double v = 0.5 * (korn_numerator(ea + eb, d) - korn_numerator(ea, d) - korn_numerator(eb, d));
      p(a, b) = p(b, a) = a == b ? korn_numerator(ea, d) : v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p, Eigen::EigenvaluesOnly);
  rep.min_exact = eig.eigenvalues()[0];

  // Projected gradient descent of the Rayleigh quotient on the unit sphere.
  for (int k = 0; k < nx; ++k) x[k] = normal(rng);
  x.normalize();
  double rho = x.dot(p * x);
  for (int it = 0; it < 5000; ++it) {
    const Eigen::VectorXd g = p * x - rho * x;
    if (g.norm() < 1e-14) break;
    x -= 0.5 * g;
    x.normalize();
    rho = x.dot(p * x);
  }
  rep.min_adversarial = korn_numerator(x, d) / x.squaredNorm();
  return rep;
}

std::vector<double> random_simplex(int dim, std::mt19937_64& rng, double max_ratio) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::vector<double> coords(static_cast<std::size_t>(dim * (dim + 1)));
    for (double& c : coords) c = unit(rng);
    std::vector<int> cells(static_cast<std::size_t>(dim + 1));
    for (int i = 0; i <= dim; ++i) cells[i] = i;
    try {
      const Mesh m(dim, coords, cells);
      if (m.cell_diameter(0) / m.cell_inball_diameter(0) > max_ratio) continue;
    } catch (const Error&) {
      continue;
    }
    const double scale = std::pow(10.0, -3.0 * unit(rng));
    const double shift = unit(rng);
    for (double& c : coords) c = shift + scale * c;
    return coords;
  }
}

ElementSuiteReport verify_element(int dim, int cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ElementSuiteReport rep;
  rep.dim = dim;
  const QuadratureRule& r = rule(dim, 6);
  for (int t = 0; t < cells; ++t) {
    std::vector<double> coords = random_simplex(dim, rng);
    std::vector<int> conn(static_cast<std::size_t>(dim + 1));
    for (int i = 0; i <= dim; ++i) conn[i] = i;
    const Mesh m(dim, coords, conn);
    const ElementBasis basis = ElementBasis::build(m, 0);
    const int n = basis.ndof();
    rep.cells += 1;
    rep.max_condition = std::max(rep.max_condition, basis.condition_estimate());
    rep.max_duality =
        std::max(rep.max_duality, (basis.duality_matrix() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
    rep.max_constraint = std::max(rep.max_constraint, basis.constraint_residuals().maxCoeff());

    // Random quadratic in scaled local coordinates.
    const Vec3 x0 = basis.vertex(0);
    const double h = basis.diameter();
    const double c0 = normal(rng);
    Vec3 b(dim);
    Mat3 a(dim, dim);
    for (int i = 0; i < dim; ++i) b[i] = normal(rng);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) a(i, j) = a(j, i) = normal(rng);
    }
    auto quad = [&](const Vec3& x) {
      const Vec3 y = (x - x0) / h;
      ScalarJet j;
      j.value = c0 + b.dot(y) + y.dot(a * y);
      j.grad = (b + 2.0 * a * y) / h;
      return j;
    };
    const Eigen::VectorXd dofs = interpolate_local(basis, quad);
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) {
      const BasisEval e = basis.eval_bary(r.points[q]);
      const double exact = quad(basis.to_physical(r.points[q])).value;
      err = std::max(err, std::abs(e.value.dot(dofs) - exact));
      ref = std::max(ref, std::abs(exact));
    }
    rep.max_reproduction = std::max(rep.max_reproduction, err / ref);
  }
  return rep;
}

CoercivityReport verify_coercivity(const Mesh& m, const MaterialParams& p, int samples, std::uint64_t seed) {
  const DofMap dofs(m);
  const SparseSystem sys = assemble(m, dofs, p, nullptr);
  const SparseMatrix norm = assemble_energy_norm(m, dofs, p.iota);
  CoercivityReport rep;
  rep.dofs = dofs.num_free();
  const double cp = 1.0 / std::numbers::pi;
  rep.bound = p.mu / (2.0 + 2.0 * cp * cp);
  rep.min_sampled = std::numeric_limits<double>::infinity();
  rep.min_exact = std::numeric_limits<double>::quiet_NaN();
  if (rep.dofs == 0) return rep;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(rep.dofs));
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    rep.min_sampled = std::min(rep.min_sampled, v.dot(sys.A * v) / v.dot(norm * v));
  }
  if (rep.dofs <= 3000) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(sys.A);
    const Eigen::MatrixXd b = Eigen::MatrixXd(norm);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b, Eigen::EigenvaluesOnly);
    if (eig.info() == Eigen::Success) rep.min_exact = eig.eigenvalues()[0];
  }
  return rep;
}

std::vector<InterpolationLevel> verify_interpolation(const std::string& example, int dim, double iota,
                                                     const std::vector<int>& n) {
  const auto v = make_example(example, dim, iota);
  std::vector<InterpolationLevel> out;
  for (int k : n) {
    const Mesh m = unit_mesh(dim, k);
    const DofMap dofs(m);
    const BoundaryNodeClass cls = classify_boundary_nodes(m);
    const P2Field w = scott_zhang(m, [&](const Vec3& x) { return v->value(x); });
    const DiscreteField ih(m, dofs, regularize(m, dofs, cls, w, InterpolantVariant::Regularized));
    const ErrorNorms e = error_norms(m, *v, ih.evaluator(), iota);
    const ErrorNorms sz = error_norms(m, *v, w.evaluator(m), iota);
    out.push_back({k, e.h1_full(), e.h2, sz.h1_full()});
  }
  return out;
}

}  // namespace sgfem
