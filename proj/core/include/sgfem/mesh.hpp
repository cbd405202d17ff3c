#pragma once

#include "sgfem/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sgfem {

/// Conforming simplicial mesh in 2D (triangles) or 3D (tetrahedra).
///
/// Immutable after construction. The constructor reorients negatively
/// oriented cells, rejects degenerate ones and builds the face, edge and
/// vertex-star tables eagerly. Local face i of a cell is the facet opposite
/// local vertex i.
class Mesh {
 public:
  Mesh(int dim, std::vector<double> coordinates, std::vector<int> cells);

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }

  std::size_t num_vertices() const { return coords_.size() / dim_; }
  std::size_t num_cells() const { return cells_.size() / (dim_ + 1); }
  std::size_t num_faces() const { return face_cells_.size(); }
  std::size_t num_edges() const { return edges_.size() / 2; }

  Vec3 vertex(int v) const;
  std::span<const double> coordinates() const { return coords_; }
  std::span<const int> cell(int c) const {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<const int> cell_connectivity() const { return cells_; }

  /// Sorted vertex ids of face f (dim entries).
  std::span<const int> face(int f) const {
    return {faces_.data() + static_cast<std::size_t>(f) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  /// Faces of cell c; entry i is opposite local vertex i.
  std::span<const int> cell_faces(int c) const {
    return {cell_faces_.data() + static_cast<std::size_t>(c) * (dim_ + 1),
            static_cast<std::size_t>(dim_ + 1)};
  }
  /// The one or two cells sharing face f; second entry is -1 on the boundary.
  const std::array<int, 2>& face_cells(int f) const { return face_cells_[f]; }

  /// Sorted vertex pair of edge e.
  std::array<int, 2> edge(int e) const { return {edges_[2 * e], edges_[2 * e + 1]}; }
  /// Edge id of the vertex pair, or -1.
  int find_edge(int a, int b) const;
  /// Edges of cell c in lexicographic local order (01, 02, ..., 23).
  std::span<const int> cell_edges(int c) const {
    const std::size_t ne = static_cast<std::size_t>(dim_ * (dim_ + 1) / 2);
    return {cell_edges_.data() + static_cast<std::size_t>(c) * ne, ne};
  }
  /// Face id with the given (unsorted) vertex set, or -1.
  int find_face(std::span<const int> vertices) const;

  /// Cells containing vertex v, ascending.
  std::span<const int> vertex_cells(int v) const {
    return {star_.data() + star_offsets_[v],
            static_cast<std::size_t>(star_offsets_[v + 1] - star_offsets_[v])};
  }
  /// Boundary edges incident to vertex v, ascending.
  std::span<const int> vertex_boundary_edges(int v) const {
    return {vbedges_.data() + vbedge_offsets_[v],
            static_cast<std::size_t>(vbedge_offsets_[v + 1] - vbedge_offsets_[v])};
  }

  bool is_boundary_face(int f) const { return face_cells_[f][1] < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(int e) const { return boundary_edge_[e] != 0; }
  /// True if cell c has a facet on the boundary.
  bool is_boundary_cell(int c) const;

  double cell_volume(int c) const;
  /// Signed volume with the stored vertex order (positive for every cell).
  double signed_volume(int c) const;
  /// Cell diameter h_K (longest edge).
  double cell_diameter(int c) const;
  /// Diameter of the inscribed ball rho_K.
  double cell_inball_diameter(int c) const;
  /// Measure of face f (edge length in 2D, triangle area in 3D).
  double face_measure(int f) const;

  double max_cell_diameter() const;
  /// max_K h_K / rho_K.
  double shape_regularity() const;

 private:
  void build_entities();

  int dim_;
  std::vector<double> coords_;
  std::vector<int> cells_;

  std::vector<int> faces_;
  std::vector<int> cell_faces_;
  std::vector<std::array<int, 2>> face_cells_;
  std::vector<int> edges_;
  std::vector<int> cell_edges_;
  std::vector<int> star_offsets_, star_;
  std::vector<int> vbedge_offsets_, vbedges_;
  std::vector<std::uint8_t> boundary_vertex_, boundary_edge_;
};

/// Structured mesh of (0,1)^2 with 2 n^2 right triangles; every square is
/// cut along the diagonal from (i, j) to (i+1, j+1).
Mesh generate_unit_square(int n);

/// Structured mesh of (0,1)^3 with 6 n^3 tetrahedra (Kuhn split of each
/// subcube along its main diagonal).
Mesh generate_unit_cube(int n);

/// Regular (red) refinement: every simplex is split into 2^d children.
/// In 3D the interior octahedron is cut along its shortest diagonal; ties
/// go to the diagonal most aligned with (1,1,1), which reproduces the Kuhn
/// mesh of twice the resolution when applied to generate_unit_cube.
Mesh refine_uniform(const Mesh& m);

enum class NodeKind : std::uint8_t { Interior, Flat, Sharp };

/// Flat/sharp labelling of boundary vertices.
struct BoundaryNodeClass {
  std::vector<NodeKind> kind;
  /// For sharp vertices, d boundary edge ids with linearly independent
  /// directions; empty otherwise.
  std::vector<std::vector<int>> sharp_edges;

  std::size_t count(NodeKind k) const;
};

/// Labels every boundary vertex. A vertex is flat when its boundary edges
/// span a (d-1)-dimensional space and sharp when they span R^d.
/// Throws sgfem::Error naming the vertex otherwise.
BoundaryNodeClass classify_boundary_nodes(const Mesh& m);

/// Text format: "dim nv nc", nv lines of dim coordinates, nc lines of
/// dim + 1 zero-based vertex indices. Negatively oriented cells are fixed
/// by swapping two indices.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& m);
void write_mesh_file(const std::string& path, const Mesh& m);

}  // namespace sgfem
