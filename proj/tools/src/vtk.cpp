#include "vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace sgfem::tools {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace

void write_vtk(std::ostream& out, const DiscreteField& u, const std::string& title) {
  const Mesh& m = u.mesh();
  const DofMap& dofs = u.dofmap();
  const int d = m.dim();
  const std::size_t nv = m.num_vertices();
  const std::size_t nc = m.num_cells();

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec3 x = m.vertex(static_cast<int>(v));
    for (int k = 0; k < 3; ++k) out << (k ? " " : "") << (k < d ? num(x[k]) : "0");
    out << '\n';
  }
  out << "CELLS " << nc << ' ' << nc * static_cast<std::size_t>(d + 2) << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    out << d + 1;
    for (int v : m.cell(static_cast<int>(c))) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << (d == 2 ? 5 : 10) << '\n';

  const Eigen::VectorXd& a = u.coefficients();
  out << "POINT_DATA " << nv << "\nVECTORS displacement double\n";
  for (std::size_t v = 0; v < nv; ++v) {
    for (int k = 0; k < 3; ++k) {
      out << (k ? " " : "") << (k < d ? num(a[dofs.global(static_cast<int>(v), k, 0)]) : "0");
    }
    out << '\n';
  }
  out << "SCALARS grad_magnitude double 1\nLOOKUP_TABLE default\n";
  for (std::size_t v = 0; v < nv; ++v) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) {
      for (int k = 1; k <= d; ++k) {
        const double g = a[dofs.global(static_cast<int>(v), c, k)];
        s += g * g;
      }
    }
    out << num(std::sqrt(s)) << '\n';
  }
}

void write_vtk_file(const std::string& path, const DiscreteField& u, const std::string& title) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_vtk(f, u, title);
  if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace sgfem::tools
