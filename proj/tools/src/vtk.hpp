#pragma once

#include "sgfem/interpolation.hpp"

#include <ostream>
#include <string>

namespace sgfem::tools {

/// Legacy ASCII VTK unstructured grid with point data "displacement"
/// (padded to 3 components) and "grad_magnitude" (Frobenius norm of the
/// vertex displacement gradient).
void write_vtk(std::ostream& out, const DiscreteField& u, const std::string& title);
void write_vtk_file(const std::string& path, const DiscreteField& u, const std::string& title);

}  // namespace sgfem::tools
