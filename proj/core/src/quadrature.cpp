#include "sgfem/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace sgfem {

double QuadratureRule::reference_measure() const {
  switch (dim) {
    case 1: return 1.0;
    case 2: return 0.5;
    default: return 1.0 / 6.0;
  }
}

void gauss_jacobi01(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on the Jacobi matrix of P_k^{(alpha, 0)} on [-1, 1].
  const double a = alpha;
  const double b = 0.0;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    jac(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1;
      const double t = 2.0 * m + a + b;
      const double off = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(off);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                     std::tgamma(a + b + 2.0);
  nodes.resize(n);
  weights.resize(n);
  // Map x in [-1, 1] to t = (1 + x)/2; (1 - x)^alpha dx = 2^(alpha+1) (1 - t)^alpha dt.
  const double scale = std::pow(2.0, -(a + 1.0));
  for (int k = 0; k < n; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    nodes[k] = 0.5 * (1.0 + eig.eigenvalues()[k]);
    weights[k] = mu0 * v0 * v0 * scale;
  }
}

namespace {

QuadratureRule build_rule(int dim, int degree) {
  const int n = (degree + 2) / 2;  // 2n - 1 >= degree
  QuadratureRule r;
  r.dim = dim;
  r.degree = 2 * n - 1;

  std::vector<double> x0, w0, x1, w1, x2, w2;
  gauss_jacobi01(n, 0, x0, w0);
  if (dim >= 2) gauss_jacobi01(n, 1, x1, w1);
  if (dim >= 3) gauss_jacobi01(n, 2, x2, w2);

  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      Bary p(2);
      p << 1.0 - x0[i], x0[i];
      r.points.push_back(p);
      r.weights.push_back(w0[i]);
    }
  } else if (dim == 2) {
    // x = u, y = (1 - u) v; dx dy = (1 - u) du dv.
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = x1[i];
        const double y = (1.0 - u) * x0[j];
        Bary p(3);
        p << 1.0 - u - y, u, y;
        r.points.push_back(p);
        r.weights.push_back(w1[i] * w0[j]);
      }
    }
  } else {
    // x = u, y = (1 - u) v, z = (1 - u)(1 - v) w; Jacobian (1 - u)^2 (1 - v).
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const double u = x2[i];
          const double y = (1.0 - u) * x1[j];
          const double z = (1.0 - u) * (1.0 - x1[j]) * x0[k];
          Bary p(4);
          p << 1.0 - u - y - z, u, y, z;
          r.points.push_back(p);
          r.weights.push_back(w2[i] * w1[j] * w0[k]);
        }
      }
    }
  }
  return r;
}

}  // namespace

const QuadratureRule& rule(int dim, int degree) {
  if (dim < 1 || dim > 3) throw Error("quadrature: dimension must be 1, 2 or 3");
  if (degree < 1) throw Error("quadrature: degree must be >= 1");
  if (degree > kMaxQuadratureDegree) {
    throw Error("quadrature: degree " + std::to_string(degree) + " exceeds maximum " +
                std::to_string(kMaxQuadratureDegree));
  }
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  const int n = (degree + 2) / 2;
  const auto key = std::make_pair(dim, n);
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_rule(dim, degree));
  return *slot;
}

}  // namespace sgfem
