#include "sgfem/element.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace sgfem {

namespace {

struct Monomial {
  double coef;
  std::array<int, 4> exponent;
};
using FramePoly = std::vector<Monomial>;

std::vector<FramePoly> make_frame(int dim) {
  const int nv = dim + 1;
  std::vector<FramePoly> frame;
  // P2 as homogeneous quadratics in the barycentric coordinates.
  for (int i = 0; i < nv; ++i) {
    for (int j = i; j < nv; ++j) {
      std::array<int, 4> e = {0, 0, 0, 0};
      ++e[i];
      ++e[j];
      frame.push_back({{1.0, e}});
    }
  }
  // Zienkiewicz cubics.
  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv; ++j) {
      std::array<int, 4> a = {0, 0, 0, 0};
      std::array<int, 4> b = {0, 0, 0, 0};
      a[i] = 2;
      a[j] = 1;
      b[i] = 1;
      b[j] = 2;
      frame.push_back({{1.0, a}, {-1.0, b}});
    }
  }
  // Bubble times P1.
  for (int k = 0; k < nv; ++k) {
    std::array<int, 4> e = {0, 0, 0, 0};
    for (int i = 0; i < nv; ++i) e[i] = 1;
    ++e[k];
    frame.push_back({{1.0, e}});
  }
  return frame;
}

const std::vector<FramePoly>& frame_polys(int dim) {
  static const std::vector<FramePoly> frame2 = make_frame(2);
  static const std::vector<FramePoly> frame3 = make_frame(3);
  return dim == 2 ? frame2 : frame3;
}

double falling(int e, int k) {
  double r = 1.0;
  for (int t = 0; t < k; ++t) r *= (e - t);
  return r;
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw Error("element: dimension must be 2 or 3");
}

}  // namespace

int frame_size(int dim) {
  check_dim(dim);
  return dim == 2 ? 12 : 20;
}

FrameEval eval_frame(int dim, const Bary& bary) {
  check_dim(dim);
  const int nv = dim + 1;
  const auto& polys = frame_polys(dim);
  const int nf = static_cast<int>(polys.size());

  double pw[4][6];
  for (int k = 0; k < nv; ++k) {
    pw[k][0] = 1.0;
    for (int p = 1; p < 6; ++p) pw[k][p] = pw[k][p - 1] * bary[k];
  }

  // d^{order} monomial / d lambda^{counts}
  auto derivative = [&](const std::array<int, 4>& e, const std::array<int, 4>& counts) {
    double r = 1.0;
    for (int k = 0; k < nv; ++k) {
      if (counts[k] > e[k]) return 0.0;
      r *= falling(e[k], counts[k]) * pw[k][e[k] - counts[k]];
    }
    return r;
  };

  FrameEval out;
  out.value.setZero(nf);
  out.grad.setZero(nv, nf);
  out.hess.setZero(nv * nv, nf);
  for (int f = 0; f < nf; ++f) {
    for (const auto& mono : polys[f]) {
      out.value[f] += mono.coef * derivative(mono.exponent, {0, 0, 0, 0});
      for (int i = 0; i < nv; ++i) {
        std::array<int, 4> ci = {0, 0, 0, 0};
        ci[i] = 1;
        out.grad(i, f) += mono.coef * derivative(mono.exponent, ci);
        for (int j = i; j < nv; ++j) {
          std::array<int, 4> cij = ci;
          ++cij[j];
          const double h = mono.coef * derivative(mono.exponent, cij);
          out.hess(i + nv * j, f) += h;
          if (j != i) out.hess(j + nv * i, f) += h;
        }
      }
    }
  }
  return out;
}

const std::vector<FrameEval>& frame_table(const QuadratureRule& rule) {
  static std::mutex mutex;
  static std::map<const QuadratureRule*, std::unique_ptr<std::vector<FrameEval>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[&rule];
  if (!slot) {
    slot = std::make_unique<std::vector<FrameEval>>();
    slot->reserve(rule.size());
    for (const auto& p : rule.points) slot->push_back(eval_frame(rule.dim, p));
  }
  return *slot;
}

ElementBasis ElementBasis::build(const Mesh& m, int cell) {
  const int dim = m.dim();
  const int nv = dim + 1;
  const int nf = sgfem::frame_size(dim);
  const int nd = nv * nv;
  const auto verts = m.cell(cell);

  ElementBasis b;
  b.dim_ = dim;
  b.cell_ = cell;
  for (int i = 0; i < nv; ++i) b.vertices_[i] = m.vertex(verts[i]);

  Mat3 jac(dim, dim);
  for (int k = 0; k < dim; ++k) jac.col(k) = b.vertices_[k + 1] - b.vertices_[0];
  const double det = jac.determinant();
  b.volume_ = std::abs(det) / (dim == 2 ? 2.0 : 6.0);
  const Mat3 jinv = jac.inverse();
  b.bary_grad_.resize(nv, dim);
  for (int k = 0; k < dim; ++k) b.bary_grad_.row(k + 1) = jinv.row(k);
  b.bary_grad_.row(0) = -jinv.colwise().sum();
  b.diameter_ = 0.0;
  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv; ++j) {
      b.diameter_ = std::max(b.diameter_, (b.vertices_[i] - b.vertices_[j]).norm());
    }
  }

  b.dofs_.clear();
  for (int i = 0; i < nv; ++i) b.dofs_.push_back({DofKind::Value, i, -1});
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (j != i) b.dofs_.push_back({DofKind::EdgeDerivative, i, j});
    }
  }

  // Rows: dof functionals, then the face constraints scaled by h_K.
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(nf, nf);
  std::array<FrameEval, 4> at_vertex;
  for (int i = 0; i < nv; ++i) {
    Bary e = Bary::Zero(nv);
    e[i] = 1.0;
    at_vertex[i] = sgfem::eval_frame(dim, e);
  }
  for (int r = 0; r < nd; ++r) {
    const auto& dof = b.dofs_[r];
    const FrameEval& fe = at_vertex[dof.vertex];
    if (dof.kind == DofKind::Value) {
      sys.row(r) = fe.value.transpose();
    } else {
      // e_ij . grad lambda_m = delta_mj - delta_mi.
      sys.row(r) = fe.grad.row(dof.target) - fe.grad.row(dof.vertex);
    }
  }

  const QuadratureRule& face_rule = rule(dim - 1, 5);
  for (int i = 0; i < nv; ++i) {
    const Vec3 normal = -b.bary_grad_.row(i).transpose() / b.bary_grad_.row(i).norm();
    // d_n p = sum_m dp/dlambda_m (n . grad lambda_m)
    const Bary dn_lambda = b.bary_grad_ * normal;
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(nf);
    double wsum = 0.0;
    for (std::size_t q = 0; q < face_rule.size(); ++q) {
      Bary p = Bary::Zero(nv);
      int k = 0;
      for (int j = 0; j < nv; ++j) {
        if (j != i) p[j] = face_rule.points[q][k++];
      }
      const FrameEval fe = sgfem::eval_frame(dim, p);
      mean += face_rule.weights[q] * (dn_lambda.transpose() * fe.grad);
      wsum += face_rule.weights[q];
    }
    mean /= wsum;
    Eigen::RowVectorXd vertex_mean = Eigen::RowVectorXd::Zero(nf);
    for (int k = 0; k < nv; ++k) {
      if (k != i) vertex_mean += dn_lambda.transpose() * at_vertex[k].grad;
    }
    vertex_mean /= dim;
    sys.row(nd + i) = b.diameter_ * (mean - vertex_mean);
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
  const double rcond = lu.rcond();
  b.condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > 1e-12)) {
    throw Error("element: singular or ill-conditioned local system on cell " + std::to_string(cell) +
                " (condition estimate " + std::to_string(b.condition_) + ")");
  }
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nf, nd);
  rhs.topRows(nd).setIdentity();
  const Eigen::MatrixXd coeffs = lu.solve(rhs);
  if (!coeffs.allFinite()) throw Error("element: non-finite basis on cell " + std::to_string(cell));
  b.coeffs_ = coeffs;

  // l = T g with g ordered (vertex, slot), slot 0 = value, 1..d = gradient.
  b.local_from_vertex_.setZero(nd, nd);
  for (int r = 0; r < nd; ++r) {
    const auto& dof = b.dofs_[r];
    if (dof.kind == DofKind::Value) {
      b.local_from_vertex_(r, dof.vertex * nv) = 1.0;
    } else {
      const Vec3 edge = b.vertices_[dof.target] - b.vertices_[dof.vertex];
      for (int s = 0; s < dim; ++s) b.local_from_vertex_(r, dof.vertex * nv + 1 + s) = edge[s];
    }
  }
  b.vertex_coeffs_ = b.coeffs_ * b.local_from_vertex_;
  return b;
}

Bary ElementBasis::to_barycentric(const Vec3& x) const {
  const int nv = dim_ + 1;
  Bary l(nv);
  const Vec3 rel = x - vertices_[0];
  for (int m = 1; m < nv; ++m) l[m] = bary_grad_.row(m).dot(rel);
  l[0] = 1.0 - l.tail(dim_).sum();
  return l;
}

Vec3 ElementBasis::to_physical(const Bary& b) const {
  Vec3 x = Vec3::Zero(dim_);
  for (int i = 0; i <= dim_; ++i) x += b[i] * vertices_[i];
  return x;
}

BasisEval ElementBasis::eval(const Vec3& x, DofSet set) const {
  return eval_frame(sgfem::eval_frame(dim_, to_barycentric(x)), set);
}

BasisEval ElementBasis::eval_bary(const Bary& b, DofSet set) const {
  return eval_frame(sgfem::eval_frame(dim_, b), set);
}

BasisEval ElementBasis::eval_frame(const FrameEval& f, DofSet set) const {
  const int nv = dim_ + 1;
  const int nd = ndof();
  const CoeffMatrix& c = coefficients(set);

  BasisEval out;
  out.n = nd;
  out.value.noalias() = c.transpose().lazyProduct(f.value);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, kMaxDofs> grad_l;
  grad_l.noalias() = f.grad.lazyProduct(c);
  out.grad.noalias() = bary_grad_.transpose().lazyProduct(grad_l);

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, kMaxDofs> hess_l;
  hess_l.noalias() = f.hess.lazyProduct(c);
  for (int k = 0; k < nd; ++k) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>>
        hl(hess_l.col(k).data(), nv, nv);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 3> tmp;
    tmp.noalias() = hl.lazyProduct(bary_grad_);
    Mat3& h = out.hess[k];
    h.resize(dim_, dim_);
    for (int r = 0; r < dim_; ++r) {
      for (int s = r; s < dim_; ++s) {
        const double v = bary_grad_.col(r).dot(tmp.col(s));
        h(r, s) = v;
        h(s, r) = v;
      }
    }
  }
  return out;
}

Eigen::MatrixXd ElementBasis::duality_matrix() const {
  const int nd = ndof();
  Eigen::MatrixXd dual(nd, nd);
  std::array<BasisEval, 4> at;
  for (int i = 0; i <= dim_; ++i) at[i] = eval(vertices_[i]);
  for (int r = 0; r < nd; ++r) {
    const auto& dof = dofs_[r];
    const BasisEval& e = at[dof.vertex];
    for (int k = 0; k < nd; ++k) {
      if (dof.kind == DofKind::Value) {
        dual(r, k) = e.value[k];
      } else {
        const Vec3 edge = vertices_[dof.target] - vertices_[dof.vertex];
        dual(r, k) = edge.dot(e.grad.col(k));
      }
    }
  }
  return dual;
}

Eigen::MatrixXd ElementBasis::constraint_residuals() const {
  const int nv = dim_ + 1;
  const int nd = ndof();
  Eigen::MatrixXd res(nv, nd);
  const QuadratureRule& face_rule = rule(dim_ - 1, 8);
  for (int i = 0; i < nv; ++i) {
    std::array<Vec3, 3> fv;
    int k = 0;
    for (int j = 0; j < nv; ++j) {
      if (j != i) fv[k++] = vertices_[j];
    }
    // Outward unit normal from face geometry.
    Vec3 normal(dim_);
    if (dim_ == 2) {
      const Vec3 t = fv[1] - fv[0];
      normal << t[1], -t[0];
    } else {
      const Eigen::Vector3d u = fv[1] - fv[0];
      const Eigen::Vector3d w = fv[2] - fv[0];
      normal = u.cross(w);
    }
    normal /= normal.norm();
    if (normal.dot(fv[0] - vertices_[i]) < 0) normal = -normal;

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(nd);
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(nd);
    double wsum = 0.0;
    // Face points in barycentric form; physical round trips lose digits on
    // small cells far from the origin.
    auto face_point = [&](const Bary& fb) {
      Bary p = Bary::Zero(nv);
      int k2 = 0;
      for (int j = 0; j < nv; ++j) {
        if (j != i) p[j] = fb[k2++];
      }
      return p;
    };
    auto accumulate = [&](const Bary& p, Eigen::VectorXd& sum, double w) {
      const BasisEval e = eval_bary(p);
      sum += w * (e.grad.transpose() * normal);
      scale = scale.cwiseMax(e.grad.colwise().norm().transpose());
    };
    for (std::size_t q = 0; q < face_rule.size(); ++q) {
      accumulate(face_point(face_rule.points[q]), mean, face_rule.weights[q]);
      wsum += face_rule.weights[q];
    }
    mean /= wsum;
    Eigen::VectorXd vertex_mean = Eigen::VectorXd::Zero(nd);
    for (int j = 0; j < dim_; ++j) accumulate(face_point(Bary::Unit(dim_, j)), vertex_mean, 1.0);
    vertex_mean /= dim_;
    for (int c = 0; c < nd; ++c) {
      res(i, c) = std::abs(mean[c] - vertex_mean[c]) / std::max(scale[c], 1e-300);
    }
  }
  return res;
}

Eigen::VectorXd interpolate_local(const ElementBasis& basis, const ScalarFunction& v) {
  const int nd = basis.ndof();
  Eigen::VectorXd out(nd);
  std::array<ScalarJet, 4> at;
  for (int i = 0; i <= basis.dim(); ++i) at[i] = v(basis.vertex(i));
  for (int r = 0; r < nd; ++r) {
    const auto& dof = basis.dofs()[r];
    if (dof.kind == DofKind::Value) {
      out[r] = at[dof.vertex].value;
    } else {
      const Vec3 edge = basis.vertex(dof.target) - basis.vertex(dof.vertex);
      out[r] = edge.dot(at[dof.vertex].grad);
    }
  }
  return out;
}

}  // namespace sgfem
