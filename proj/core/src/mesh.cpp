#include "sgfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace sgfem {

namespace {

struct KeyHash {
  std::size_t operator()(const std::array<int, 3>& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : k) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

double signed_measure(int dim, const std::vector<double>& coords, std::span<const int> cell) {
  Mat3 jac(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int r = 0; r < dim; ++r) {
      jac(r, k) = coords[cell[k + 1] * dim + r] - coords[cell[0] * dim + r];
    }
  }
  return jac.determinant() / (dim == 2 ? 2.0 : 6.0);
}

// Local vertex pairs of the cell edges in lexicographic order.
constexpr std::array<std::array<int, 2>, 6> kEdgePairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::vector<std::array<int, 2>> local_edges(int dim) {
  std::vector<std::array<int, 2>> out;
  for (const auto& p : kEdgePairs) {
    if (p[1] <= dim) out.push_back(p);
  }
  return out;
}

}  // namespace

Mesh::Mesh(int dim, std::vector<double> coordinates, std::vector<int> cells)
    : dim_(dim), coords_(std::move(coordinates)), cells_(std::move(cells)) {
  if (dim_ != 2 && dim_ != 3) throw Error("mesh: dimension must be 2 or 3");
  if (coords_.size() % dim_ != 0) throw Error("mesh: coordinate array size not a multiple of dim");
  const int nv = dim_ + 1;
  if (cells_.size() % nv != 0) throw Error("mesh: connectivity size not a multiple of dim+1");
  const int nverts = static_cast<int>(coords_.size() / dim_);
  for (int v : cells_) {
    if (v < 0 || v >= nverts) {
      throw Error("mesh: vertex index " + std::to_string(v) + " out of range");
    }
  }
  for (std::size_t c = 0; c < num_cells(); ++c) {
    auto cell_span = std::span<int>(cells_.data() + c * nv, nv);
    const double vol = signed_measure(dim_, coords_, cell_span);
    double h = 0.0;
    for (int i = 0; i < nv; ++i) {
      for (int j = i + 1; j < nv; ++j) {
        double s = 0.0;
        for (int r = 0; r < dim_; ++r) {
          const double diff = coords_[cell_span[i] * dim_ + r] - coords_[cell_span[j] * dim_ + r];
          s += diff * diff;
        }
        h = std::max(h, std::sqrt(s));
      }
    }
    if (!(std::abs(vol) > 1e-14 * std::pow(h, dim_))) {
      throw Error("mesh: degenerate cell " + std::to_string(c));
    }
    if (vol < 0) std::swap(cell_span[nv - 2], cell_span[nv - 1]);
  }
  build_entities();
}

void Mesh::build_entities() {
  const int nv = dim_ + 1;
  const std::size_t ncells = num_cells();
  const std::size_t nverts = num_vertices();

  // Faces, numbered by first appearance in cell order.
  std::unordered_map<std::array<int, 3>, int, KeyHash> face_ids;
  face_ids.reserve(ncells * nv);
  cell_faces_.assign(ncells * nv, -1);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto verts = cell(static_cast<int>(c));
    for (int i = 0; i < nv; ++i) {
      std::array<int, 3> key = {-1, -1, -1};
      int k = 0;
      for (int j = 0; j < nv; ++j) {
        if (j != i) key[k++] = verts[j];
      }
      std::sort(key.begin(), key.begin() + dim_);
      auto [it, inserted] = face_ids.try_emplace(key, static_cast<int>(face_cells_.size()));
      if (inserted) {
        face_cells_.push_back({static_cast<int>(c), -1});
        faces_.insert(faces_.end(), key.begin(), key.begin() + dim_);
      } else {
        auto& fc = face_cells_[it->second];
        if (fc[1] >= 0) {
          throw Error("mesh: face shared by more than two cells (cell " + std::to_string(c) + ")");
        }
        fc[1] = static_cast<int>(c);
      }
      cell_faces_[c * nv + i] = it->second;
    }
  }

  // Edges.
  const auto pairs = local_edges(dim_);
  std::unordered_map<std::uint64_t, int> edge_ids;
  edge_ids.reserve(ncells * pairs.size());
  cell_edges_.assign(ncells * pairs.size(), -1);
  for (std::size_t c = 0; c < ncells; ++c) {
    const auto verts = cell(static_cast<int>(c));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      int a = verts[pairs[p][0]];
      int b = verts[pairs[p][1]];
      if (a > b) std::swap(a, b);
      const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
      auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(edges_.size() / 2));
      if (inserted) {
        edges_.push_back(a);
        edges_.push_back(b);
      }
      cell_edges_[c * pairs.size() + p] = it->second;
    }
  }

  // Vertex stars.
  star_offsets_.assign(nverts + 1, 0);
  for (int v : cells_) ++star_offsets_[v + 1];
  std::partial_sum(star_offsets_.begin(), star_offsets_.end(), star_offsets_.begin());
  star_.assign(cells_.size(), -1);
  {
    std::vector<int> fill(star_offsets_.begin(), star_offsets_.end() - 1);
    for (std::size_t c = 0; c < ncells; ++c) {
      for (int v : cell(static_cast<int>(c))) star_[fill[v]++] = static_cast<int>(c);
    }
  }

  // Boundary flags.
  boundary_vertex_.assign(nverts, 0);
  boundary_edge_.assign(num_edges(), 0);
  for (std::size_t f = 0; f < num_faces(); ++f) {
    if (!is_boundary_face(static_cast<int>(f))) continue;
    const auto fv = face(static_cast<int>(f));
    for (int v : fv) boundary_vertex_[v] = 1;
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) {
        boundary_edge_[find_edge(fv[i], fv[j])] = 1;
      }
    }
  }

  vbedge_offsets_.assign(nverts + 1, 0);
  for (std::size_t e = 0; e < num_edges(); ++e) {
    if (!boundary_edge_[e]) continue;
    ++vbedge_offsets_[edges_[2 * e] + 1];
    ++vbedge_offsets_[edges_[2 * e + 1] + 1];
  }
  std::partial_sum(vbedge_offsets_.begin(), vbedge_offsets_.end(), vbedge_offsets_.begin());
  vbedges_.assign(vbedge_offsets_.back(), -1);
  {
    std::vector<int> fill(vbedge_offsets_.begin(), vbedge_offsets_.end() - 1);
    for (std::size_t e = 0; e < num_edges(); ++e) {
      if (!boundary_edge_[e]) continue;
      vbedges_[fill[edges_[2 * e]]++] = static_cast<int>(e);
      vbedges_[fill[edges_[2 * e + 1]]++] = static_cast<int>(e);
    }
  }
}

Vec3 Mesh::vertex(int v) const {
  Vec3 x(dim_);
  for (int r = 0; r < dim_; ++r) x[r] = coords_[static_cast<std::size_t>(v) * dim_ + r];
  return x;
}

int Mesh::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  const auto pairs = local_edges(dim_);
  for (int c : vertex_cells(a)) {
    const auto verts = cell(c);
    const auto ce = cell_edges(c);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      int x = verts[pairs[p][0]];
      int y = verts[pairs[p][1]];
      if (x > y) std::swap(x, y);
      if (x == a && y == b) return ce[p];
    }
  }
  return -1;
}

int Mesh::find_face(std::span<const int> vertices) const {
  if (static_cast<int>(vertices.size()) != dim_) return -1;
  std::array<int, 3> key = {-1, -1, -1};
  std::copy(vertices.begin(), vertices.end(), key.begin());
  std::sort(key.begin(), key.begin() + dim_);
  for (int c : vertex_cells(key[0])) {
    for (int f : cell_faces(c)) {
      const auto fv = face(f);
      if (std::equal(fv.begin(), fv.end(), key.begin())) return f;
    }
  }
  return -1;
}

bool Mesh::is_boundary_cell(int c) const {
  for (int f : cell_faces(c)) {
    if (is_boundary_face(f)) return true;
  }
  return false;
}

double Mesh::signed_volume(int c) const { return signed_measure(dim_, coords_, cell(c)); }

double Mesh::cell_volume(int c) const { return std::abs(signed_volume(c)); }

double Mesh::cell_diameter(int c) const {
  const auto verts = cell(c);
  double h = 0.0;
  for (int i = 0; i <= dim_; ++i) {
    for (int j = i + 1; j <= dim_; ++j) {
      h = std::max(h, (vertex(verts[i]) - vertex(verts[j])).norm());
    }
  }
  return h;
}

double Mesh::face_measure(int f) const {
  const auto fv = face(f);
  const Vec3 a = vertex(fv[0]);
  if (dim_ == 2) return (vertex(fv[1]) - a).norm();
  const Eigen::Vector3d u = vertex(fv[1]) - a;
  const Eigen::Vector3d w = vertex(fv[2]) - a;
  return 0.5 * u.cross(w).norm();
}

double Mesh::cell_inball_diameter(int c) const {
  double area = 0.0;
  for (int f : cell_faces(c)) area += face_measure(f);
  return 2.0 * dim_ * cell_volume(c) / area;
}

double Mesh::max_cell_diameter() const {
  double h = 0.0;
  for (std::size_t c = 0; c < num_cells(); ++c) h = std::max(h, cell_diameter(static_cast<int>(c)));
  return h;
}

double Mesh::shape_regularity() const {
  double gamma = 0.0;
  for (std::size_t c = 0; c < num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    gamma = std::max(gamma, cell_diameter(ci) / cell_inball_diameter(ci));
  }
  return gamma;
}

Mesh generate_unit_square(int n) {
  if (n < 1) throw Error("generate_unit_square: n must be >= 1");
  const int np = n + 1;
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(np) * np * 2);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      coords.push_back(static_cast<double>(i) / n);
      coords.push_back(static_cast<double>(j) / n);
    }
  }
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(n) * n * 6);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * np + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + np;
      const int v11 = v01 + 1;
      cells.insert(cells.end(), {v00, v10, v11});
      cells.insert(cells.end(), {v00, v11, v01});
    }
  }
  return Mesh(2, std::move(coords), std::move(cells));
}

Mesh generate_unit_cube(int n) {
  if (n < 1) throw Error("generate_unit_cube: n must be >= 1");
  const int np = n + 1;
  auto id = [np](int i, int j, int k) { return (k * np + j) * np + i; };
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(np) * np * np * 3);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) {
        coords.push_back(static_cast<double>(i) / n);
        coords.push_back(static_cast<double>(j) / n);
        coords.push_back(static_cast<double>(k) / n);
      }
    }
  }
  std::array<int, 3> perm = {0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(n) * n * n * 24);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> x = {i, j, k};
          cells.push_back(id(x[0], x[1], x[2]));
          for (int step = 0; step < 3; ++step) {
            ++x[p[step]];
            cells.push_back(id(x[0], x[1], x[2]));
          }
        }
      }
    }
  }
  return Mesh(3, std::move(coords), std::move(cells));
}

Mesh refine_uniform(const Mesh& m) {
  const int dim = m.dim();
  const int nv = static_cast<int>(m.num_vertices());
  std::vector<double> coords(m.coordinates().begin(), m.coordinates().end());
  coords.reserve(coords.size() + m.num_edges() * dim);
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto [a, b] = m.edge(static_cast<int>(e));
    for (int r = 0; r < dim; ++r) {
      coords.push_back(0.5 * (coords[a * dim + r] + coords[b * dim + r]));
    }
  }

  std::vector<int> cells;
  cells.reserve(m.cell_connectivity().size() * (dim == 2 ? 4 : 8));
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    const auto v = m.cell(ci);
    const auto ce = m.cell_edges(ci);
    if (dim == 2) {
      // Local edge order: 01, 02, 12.
      const int m01 = nv + ce[0];
      const int m02 = nv + ce[1];
      const int m12 = nv + ce[2];
      cells.insert(cells.end(), {v[0], m01, m02});
      cells.insert(cells.end(), {m01, v[1], m12});
      cells.insert(cells.end(), {m02, m12, v[2]});
      cells.insert(cells.end(), {m01, m12, m02});
      continue;
    }
    // Local edge order: 01, 02, 03, 12, 13, 23.
    int mid[4][4];
    for (int p = 0; p < 6; ++p) {
      const auto [a, b] = kEdgePairs[p];
      mid[a][b] = mid[b][a] = nv + ce[p];
    }
    cells.insert(cells.end(), {v[0], mid[0][1], mid[0][2], mid[0][3]});
    cells.insert(cells.end(), {mid[0][1], v[1], mid[1][2], mid[1][3]});
    cells.insert(cells.end(), {mid[0][2], mid[1][2], v[2], mid[2][3]});
    cells.insert(cells.end(), {mid[0][3], mid[1][3], mid[2][3], v[3]});

    // Split the interior octahedron along one of its three diagonals.
    constexpr std::array<std::array<int, 4>, 3> kDiagonals = {
        {{0, 2, 1, 3}, {0, 3, 1, 2}, {0, 1, 2, 3}}};
    auto point = [&](int id) {
      Eigen::Vector3d x;
      for (int r = 0; r < 3; ++r) x[r] = coords[static_cast<std::size_t>(id) * 3 + r];
      return x;
    };
    int best = 0;
    double best_len = 0.0;
    double best_align = 0.0;
    for (int k = 0; k < 3; ++k) {
      const auto& dg = kDiagonals[k];
      const Eigen::Vector3d dir = point(mid[dg[2]][dg[3]]) - point(mid[dg[0]][dg[1]]);
      const double len = dir.norm();
      const double align = std::abs(dir.sum()) / len;
      const bool shorter = len < best_len * (1.0 - 1e-10);
      const bool tie = std::abs(len - best_len) <= 1e-10 * best_len;
      if (k == 0 || shorter || (tie && align > best_align + 1e-12)) {
        best = k;
        best_len = len;
        best_align = align;
      }
    }
    const auto& dg = kDiagonals[best];
    const int a = dg[0], b = dg[1], cc = dg[2], d = dg[3];
    const int mab = mid[a][b];
    const int mcd = mid[cc][d];
    // Equator cycle: ac - ad - bd - bc.
    const std::array<int, 4> ring = {mid[a][cc], mid[a][d], mid[b][d], mid[b][cc]};
    for (int k = 0; k < 4; ++k) {
      cells.insert(cells.end(), {mab, mcd, ring[k], ring[(k + 1) % 4]});
    }
  }
  return Mesh(dim, std::move(coords), std::move(cells));
}

std::size_t BoundaryNodeClass::count(NodeKind k) const {
  return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), k));
}

BoundaryNodeClass classify_boundary_nodes(const Mesh& m) {
  const int dim = m.dim();
  BoundaryNodeClass out;
  out.kind.assign(m.num_vertices(), NodeKind::Interior);
  out.sharp_edges.assign(m.num_vertices(), {});
  constexpr double kRankTol = 1e-10;

  auto rank_of = [&](const std::vector<Vec3>& dirs) {
    if (dirs.empty()) return 0;
    Eigen::MatrixXd mat(dim, static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t k = 0; k < dirs.size(); ++k) mat.col(static_cast<Eigen::Index>(k)) = dirs[k];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
    lu.setThreshold(kRankTol);
    return static_cast<int>(lu.rank());
  };

  for (std::size_t vi = 0; vi < m.num_vertices(); ++vi) {
    const int v = static_cast<int>(vi);
    if (!m.is_boundary_vertex(v)) continue;
    std::vector<Vec3> dirs;
    const auto bedges = m.vertex_boundary_edges(v);
    for (int e : bedges) {
      const auto [a, b] = m.edge(e);
      const Vec3 dir = m.vertex(b) - m.vertex(a);
      dirs.push_back(dir / dir.norm());
    }
    const int rank = rank_of(dirs);
    if (rank == dim - 1) {
      out.kind[vi] = NodeKind::Flat;
    } else if (rank == dim) {
      out.kind[vi] = NodeKind::Sharp;
      std::vector<Vec3> chosen;
      for (std::size_t k = 0; k < dirs.size() && static_cast<int>(chosen.size()) < dim; ++k) {
        chosen.push_back(dirs[k]);
        if (rank_of(chosen) < static_cast<int>(chosen.size())) {
          chosen.pop_back();
        } else {
          out.sharp_edges[vi].push_back(bedges[k]);
        }
      }
    } else {
      throw Error("classify_boundary_nodes: vertex " + std::to_string(v) +
                  " has boundary edges of rank " + std::to_string(rank));
    }
  }
  return out;
}

Mesh read_mesh(std::istream& in) {
  int dim = 0;
  long long nv = 0, nc = 0;
  if (!(in >> dim >> nv >> nc)) throw Error("read_mesh: malformed header");
  if ((dim != 2 && dim != 3) || nv < 0 || nc < 0) throw Error("read_mesh: invalid header values");
  std::vector<double> coords(static_cast<std::size_t>(nv) * dim);
  for (auto& x : coords) {
    if (!(in >> x)) throw Error("read_mesh: truncated vertex block");
  }
  std::vector<int> cells(static_cast<std::size_t>(nc) * (dim + 1));
  for (auto& v : cells) {
    if (!(in >> v)) throw Error("read_mesh: truncated cell block");
  }
  return Mesh(dim, std::move(coords), std::move(cells));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_mesh: cannot open " + path);
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& m) {
  const int dim = m.dim();
  out << dim << ' ' << m.num_vertices() << ' ' << m.num_cells() << '\n';
  out << std::setprecision(17);
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    for (int r = 0; r < dim; ++r) {
      out << (r ? " " : "") << m.coordinates()[v * dim + r];
    }
    out << '\n';
  }
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto verts = m.cell(static_cast<int>(c));
    for (int i = 0; i <= dim; ++i) out << (i ? " " : "") << verts[i];
    out << '\n';
  }
}

void write_mesh_file(const std::string& path, const Mesh& m) {
  std::ofstream out(path);
  if (!out) throw Error("write_mesh: cannot open " + path);
  write_mesh(out, m);
  if (!out) throw Error("write_mesh: write failed for " + path);
}

}  // namespace sgfem
