#include "sgfem/analysis.hpp"

#include "sgfem/parallel.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

namespace sgfem {

double ErrorNorms::h1_full() const { return std::sqrt(l2 * l2 + h1 * h1); }

namespace {

struct CellSums {
  double l2 = 0, h1 = 0, h2 = 0;
  double ul2 = 0, uh1 = 0, uh2 = 0;
};

void cell_point(const Mesh& m, int cell, const Bary& b, Vec3& x) {
  const auto verts = m.cell(cell);
  x = Vec3::Zero(m.dim());
  for (int i = 0; i <= m.dim(); ++i) x += b[i] * m.vertex(verts[i]);
}

}  // namespace

ErrorNorms error_norms(const Mesh& m, const FieldFunction& u, const CellJetFunction& v, double iota, int degree) {
  if (u.dim() != m.dim()) throw Error("error norms: field and mesh dimensions differ");
  const int d = m.dim();
  const QuadratureRule& r = rule(d, degree);
  std::vector<CellSums> sums(m.num_cells());
  parallel_for(0, m.num_cells(), [&](std::size_t ci) {
    const int c = static_cast<int>(ci);
    std::vector<FieldJet> vh;
    if (v) v(c, r.points, vh);
    const double scale = m.cell_volume(c) / r.reference_measure();
    CellSums& s = sums[ci];
    for (std::size_t q = 0; q < r.size(); ++q) {
      Vec3 x;
      cell_point(m, c, r.points[q], x);
      const FieldJet ue = u.jet(x);
      const double w = r.weights[q] * scale;
      std::array<Mat3, 3> dh;
      for (int k = 0; k < d; ++k) dh[k] = v ? Mat3(ue.hess[k] - vh[q].hess[k]) : ue.hess[k];
      const Vec3 dv = v ? Vec3(ue.value - vh[q].value) : ue.value;
      const Mat3 dg = v ? Mat3(ue.grad - vh[q].grad) : ue.grad;
      s.l2 += w * dv.squaredNorm();
      s.h1 += w * dg.squaredNorm();
      s.h2 += w * hessian_norm_sq(std::span<const Mat3>(dh.data(), static_cast<std::size_t>(d)));
      s.ul2 += w * ue.value.squaredNorm();
      s.uh1 += w * ue.grad.squaredNorm();
      s.uh2 += w * hessian_norm_sq(std::span<const Mat3>(ue.hess.data(), static_cast<std::size_t>(d)));
    }
  });
  CellSums t;
  for (const CellSums& s : sums) {
    t.l2 += s.l2;
    t.h1 += s.h1;
    t.h2 += s.h2;
    t.ul2 += s.ul2;
    t.uh1 += s.uh1;
    t.uh2 += s.uh2;
  }
  ErrorNorms e;
  const double i2 = iota * iota;
  e.l2 = std::sqrt(t.l2);
  e.h1 = std::sqrt(t.h1);
  e.h2 = std::sqrt(t.h2);
  e.energy = std::sqrt(t.l2 + t.h1 + i2 * t.h2);
  e.exact_energy = std::sqrt(t.ul2 + t.uh1 + i2 * t.uh2);
  e.energy_rel = e.exact_energy > 0.0 ? e.energy / e.exact_energy : std::numeric_limits<double>::quiet_NaN();
  return e;
}

std::vector<double> rates(const std::vector<double>& errors) {
  std::vector<double> out(errors.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k < errors.size(); ++k) out[k] = std::log2(errors[k - 1] / errors[k]);
  return out;
}

double oscillation(const Mesh& m, const std::function<Vec3(const Vec3&)>& f, int degree) {
  const int d = m.dim();
  const int nv = d + 1;
  const QuadratureRule& r = rule(d, degree);
  std::vector<double> per_cell(m.num_cells());
  parallel_for(0, m.num_cells(), [&](std::size_t ci) {
    const int c = static_cast<int>(ci);
    const double scale = m.cell_volume(c) / r.reference_measure();
    const auto nq = static_cast<Eigen::Index>(r.size());
    Eigen::MatrixXd lam(nv, nq);
    Eigen::MatrixXd fv(d, nq);
    Eigen::VectorXd w(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      Vec3 x;
      cell_point(m, c, r.points[q], x);
      lam.col(q) = r.points[q];
      fv.col(q) = f(x);
      w[q] = r.weights[q] * scale;
    }
    const Eigen::MatrixXd mass = lam * w.asDiagonal() * lam.transpose();
    const Eigen::MatrixXd rhs = lam * w.asDiagonal() * fv.transpose();  // nv x d
    const Eigen::MatrixXd coef = mass.ldlt().solve(rhs);
    const Eigen::MatrixXd res = fv - coef.transpose() * lam;
    const double h = m.cell_diameter(c);
    per_cell[ci] = h * h * res.colwise().squaredNorm().dot(w);
  });
  double total = 0.0;
  for (double v : per_cell) total += v;
  return std::sqrt(total);
}

std::vector<int> level_sequence(int n0, int levels) {
  if (n0 < 1) throw Error("initial resolution must be >= 1");
  std::vector<int> n;
  for (int k = 0; k < levels; ++k) n.push_back(n0 << k);
  return n;
}

Mesh unit_mesh(int dim, int n) {
  if (dim == 2) return generate_unit_square(n);
  if (dim == 3) return generate_unit_cube(n);
  throw Error("dimension must be 2 or 3");
}

SolveResult solve_problem(const Mesh& m, const DofMap& dofs, const MaterialParams& p, const FieldFunction* source,
                          const SolveOptions& sopt, const AssemblyOptions& aopt) {
  const SparseSystem sys = assemble(m, dofs, p, source, aopt);
  SolveResult out;
  const Eigen::VectorXd x = solve(sys, sopt, &out.report);
  out.energy = sys.b.dot(x);
  out.full = dofs.expand(x);
  out.free = dofs.num_free();
  return out;
}

ErrorReport convergence_study(const StudyOptions& opt) {
  opt.params.validate();
  if (opt.n.size() < 2) throw Error("convergence study needs at least 2 levels");
  const auto u = make_example(opt.example, opt.dim, opt.params.iota);
  ErrorReport rep;
  rep.example = opt.example;
  rep.dim = opt.dim;
  rep.params = opt.params;

  std::unique_ptr<Mesh> mesh;
  for (std::size_t k = 0; k < opt.n.size(); ++k) {
    const int n = opt.n[k];
    try {
      if (k > 0 && n == 2 * opt.n[k - 1]) {
        mesh = std::make_unique<Mesh>(refine_uniform(*mesh));
      } else {
        mesh = std::make_unique<Mesh>(unit_mesh(opt.dim, n));
      }
      const DofMap dofs(*mesh);
      const SolveResult sol = solve_problem(*mesh, dofs, opt.params, u.get(), opt.solver, opt.assembly);
      const DiscreteField uh(*mesh, dofs, sol.full);

      ErrorRow row;
      row.n = n;
      row.h = mesh->max_cell_diameter();
      row.dofs = sol.free;
      row.err = error_norms(*mesh, *u, uh.evaluator(), opt.params.iota);
      row.solve = sol.report;
      row.osc = std::numeric_limits<double>::quiet_NaN();
      row.interp_energy = std::numeric_limits<double>::quiet_NaN();
      if (opt.audit) {
        row.osc = oscillation(*mesh, [&](const Vec3& x) { return u->source(opt.params, x); });
        const DiscreteField ih(*mesh, dofs,
                               regularized_interpolant(*mesh, dofs, *u, InterpolantVariant::Clamped));
        row.interp_energy = error_norms(*mesh, *u, ih.evaluator(), opt.params.iota).energy;
      }
      row.rate = rep.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : std::log2(rep.rows.back().err.energy_rel / row.err.energy_rel);
      rep.rows.push_back(row);
      if (opt.progress) opt.progress(rep.rows.back());
    } catch (const std::exception& e) {
      throw Error("level " + std::to_string(k) + " (n = " + std::to_string(n) + "): " + e.what());
    }
  }
  return rep;
}

namespace {

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string sci_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const ErrorReport& r) {
  out << "h,dofs,L2,H1,H2broken,energy_rel,rate\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const ErrorRow& row = r.rows[k];
    out << sci(row.h) << ',' << row.dofs << ',' << sci(row.err.l2) << ',' << sci(row.err.h1) << ','
        << sci(row.err.h2) << ',' << sci(row.err.energy_rel) << ',';
    if (k > 0) out << sci(row.rate);
    out << '\n';
  }
}

void write_markdown(std::ostream& out, const ErrorReport& r) {
  out << "Relative energy error, example " << r.example << ", d = " << r.dim << ", lambda = " << r.params.lambda
      << ", mu = " << r.params.mu << "\n\n";
  out << "| iota \\ h |";
  for (const ErrorRow& row : r.rows) out << " 1/" << row.n << " |";
  out << "\n|---|";
  for (std::size_t k = 0; k < r.rows.size(); ++k) out << "---|";
  out << "\n| " << sci_short(r.params.iota) << " |";
  for (const ErrorRow& row : r.rows) out << ' ' << sci_short(row.err.energy_rel) << " |";
  out << "\n| rate |";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    if (k == 0) {
      out << " |";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.2f |", r.rows[k].rate);
      out << buf;
    }
  }
  out << '\n';
}

}  // namespace sgfem
