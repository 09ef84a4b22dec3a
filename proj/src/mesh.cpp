#include "biot/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace biot {

double TriMesh::measure() const {
  double sum = 0.0;
  for (double a : cell_areas) sum += a;
  return sum;
}

Point TriMesh::barycenter(int cell) const {
  const auto& c = cells[static_cast<std::size_t>(cell)];
  Point p;
  for (int k = 0; k < 3; ++k) {
    p.x += vertices[static_cast<std::size_t>(c[static_cast<std::size_t>(k)])].x;
    p.y += vertices[static_cast<std::size_t>(c[static_cast<std::size_t>(k)])].y;
  }
  p.x /= 3.0;
  p.y /= 3.0;
  return p;
}

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

std::shared_ptr<const TriMesh> build_unit_square(int n_div, BcPreset preset) {
  if (n_div < 1) {
    throw std::invalid_argument("build_unit_square: N must be >= 1, got " + std::to_string(n_div));
  }
  auto mesh = std::make_shared<TriMesh>();
  mesh->n_div = n_div;
  mesh->preset = preset;
  const int np = n_div + 1;
  const double h = 1.0 / n_div;

  mesh->vertices.reserve(static_cast<std::size_t>(np) * np);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      // exact endpoints so that boundary detection by coordinate is reliable
      mesh->vertices.push_back({i == n_div ? 1.0 : i * h, j == n_div ? 1.0 : j * h});
    }
  }

  auto vid = [np](int i, int j) { return j * np + i; };
  mesh->cells.reserve(2 * static_cast<std::size_t>(n_div) * n_div);
  for (int j = 0; j < n_div; ++j) {
    for (int i = 0; i < n_div; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh->cells.push_back({v00, v10, v11});
      mesh->cells.push_back({v00, v11, v01});
    }
  }

  mesh->cell_areas.reserve(mesh->cells.size());
  for (const auto& c : mesh->cells) {
    const double a = signed_area(mesh->vertices[static_cast<std::size_t>(c[0])],
                                 mesh->vertices[static_cast<std::size_t>(c[1])],
                                 mesh->vertices[static_cast<std::size_t>(c[2])]);
    if (!(a > 0.0)) throw std::logic_error("build_unit_square: non-positive cell orientation");
    mesh->cell_areas.push_back(a);
  }

  // Edge numbering sorted by vertex pair.
  std::map<std::pair<int, int>, int> edge_index;
  for (const auto& c : mesh->cells) {
    for (int k = 0; k < 3; ++k) {
      int a = c[static_cast<std::size_t>((k + 1) % 3)];
      int b = c[static_cast<std::size_t>((k + 2) % 3)];
      if (a > b) std::swap(a, b);
      edge_index.emplace(std::make_pair(a, b), 0);
    }
  }
  int next = 0;
  mesh->edges.reserve(edge_index.size());
  for (auto& [key, idx] : edge_index) {
    idx = next++;
    mesh->edges.push_back({{key.first, key.second}});
  }

  std::map<int, int> edge_use;
  mesh->cell_edges.reserve(mesh->cells.size());
  for (const auto& c : mesh->cells) {
    std::array<int, 3> ce{};
    for (int k = 0; k < 3; ++k) {
      int a = c[static_cast<std::size_t>((k + 1) % 3)];
      int b = c[static_cast<std::size_t>((k + 2) % 3)];
      if (a > b) std::swap(a, b);
      const int e = edge_index.at({a, b});
      ce[static_cast<std::size_t>(k)] = e;
      ++edge_use[e];
    }
    mesh->cell_edges.push_back(ce);
  }

  for (const auto& [e, count] : edge_use) {
    if (count != 1) continue;
    const auto& ed = mesh->edges[static_cast<std::size_t>(e)];
    const Point& p0 = mesh->vertices[static_cast<std::size_t>(ed.v[0])];
    const Point& p1 = mesh->vertices[static_cast<std::size_t>(ed.v[1])];
    BoundaryTag tag;
    if (preset == BcPreset::LeftOpen && p0.x == 1.0 && p1.x == 1.0) {
      tag.displacement = DisplacementBc::Traction;
    }
    tag.pressure = PressureBc::Pressure;
    mesh->boundary_edges.push_back({e, tag});
  }
  return mesh;
}

std::vector<int> locate_region(const TriMesh& mesh, const Rect& region) {
  if (region.x0 < 0.0 || region.y0 < 0.0 || region.x1 > 1.0 || region.y1 > 1.0 || region.x0 > region.x1 ||
      region.y0 > region.y1) {
    throw std::invalid_argument("locate_region: rectangle must lie within the unit square");
  }
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(mesh.n_cells()); ++c) {
    const Point b = mesh.barycenter(c);
    if (b.x >= region.x0 && b.x <= region.x1 && b.y >= region.y0 && b.y <= region.y1) out.push_back(c);
  }
  return out;
}

void write_mesh_listing(const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (const auto& c : mesh.cells) out << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& be : mesh.boundary_edges) {
    const auto& e = mesh.edges[static_cast<std::size_t>(be.edge)];
    out << "b " << e.v[0] << ' ' << e.v[1] << ' '
        << (be.tag.displacement == DisplacementBc::Dirichlet ? 'D' : 'T') << ' '
        << (be.tag.pressure == PressureBc::Pressure ? 'P' : 'F') << '\n';
  }
}

}  // namespace biot
