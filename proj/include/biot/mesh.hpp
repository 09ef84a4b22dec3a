#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

namespace biot {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class DisplacementBc { Dirichlet, Traction };
enum class PressureBc { Pressure, Flux };

/// Tag of one boundary facet. Every boundary edge belongs to exactly one
/// displacement part (Gamma_d or Gamma_t) and one pressure part (Gamma_p or Gamma_f).
struct BoundaryTag {
  DisplacementBc displacement = DisplacementBc::Dirichlet;
  PressureBc pressure = PressureBc::Pressure;
};

enum class BcPreset {
  AllDirichlet,  // Gamma_d = Gamma_p = whole boundary
  LeftOpen,      // Gamma_d = boundary points with x < 1, Gamma_p = whole boundary
};

struct Edge {
  std::array<int, 2> v{};  // v[0] < v[1]
};

struct BoundaryEdge {
  int edge = -1;  // index into TriMesh::edges
  BoundaryTag tag;
};

struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

/// Structured triangulation of the unit square: N x N squares, each bisected
/// along its lower-left to upper-right diagonal. Immutable once built.
///
/// Vertex (i, j) sits at (i/N, j/N) with index j*(N+1) + i, i.e. vertices are
/// ordered lexicographically by (y, x). Cells are counter-clockwise. Edges are
/// sorted by their (min vertex, max vertex) pair; cell_edges[c][k] is the edge
/// opposite local vertex k.
struct TriMesh {
  int n_div = 0;
  BcPreset preset = BcPreset::AllDirichlet;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<double> cell_areas;
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> cell_edges;
  std::vector<BoundaryEdge> boundary_edges;

  [[nodiscard]] std::size_t n_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t n_cells() const { return cells.size(); }
  [[nodiscard]] std::size_t n_edges() const { return edges.size(); }
  [[nodiscard]] double measure() const;
  [[nodiscard]] Point barycenter(int cell) const;
};

/// Throws std::invalid_argument for n_div < 1.
[[nodiscard]] std::shared_ptr<const TriMesh> build_unit_square(int n_div, BcPreset preset);

/// Cells whose barycenter lies in the closed rectangle.
[[nodiscard]] std::vector<int> locate_region(const TriMesh& mesh, const Rect& region);

/// Debug listing: "v x y" lines, then "c a b c" lines, then "b v0 v1 D|T P|F" lines.
void write_mesh_listing(const TriMesh& mesh, std::ostream& out);

}  // namespace biot
