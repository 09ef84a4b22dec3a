#include "biot/elements.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace biot {

const char* family_name(Family f) {
  switch (f) {
    case Family::P1: return "P1";
    case Family::P2: return "P2";
    case Family::Mini: return "P1+B";
  }
  return "?";
}

const QuadratureRule& degree4_rule() {
  static const QuadratureRule rule = [] {
    QuadratureRule q;
    q.degree = 4;
    constexpr double a = 0.4459484909159648863183293;
    constexpr double wa = 0.223381589678011465695007;
    constexpr double b = 0.09157621350977074345957146;
    constexpr double wb = 0.1099517436553218676383263;
    for (auto [c, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
      const double d = 1.0 - 2.0 * c;
      q.points.push_back({d, c, c});
      q.points.push_back({c, d, c});
      q.points.push_back({c, c, d});
      for (int k = 0; k < 3; ++k) q.weights.push_back(0.5 * w);
    }
    return q;
  }();
  return rule;
}

int local_node_count(Family family) {
  switch (family) {
    case Family::P1: return 3;
    case Family::P2: return 6;
    case Family::Mini: return 4;
  }
  return 0;
}

BasisValues eval_basis(Family family, const std::array<double, 3>& l) {
  static constexpr std::array<std::array<double, 2>, 3> dl{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};
  BasisValues out;
  const int n = local_node_count(family);
  out.values.resize(static_cast<std::size_t>(n));
  out.ref_grads.resize(static_cast<std::size_t>(n));
  switch (family) {
    case Family::P1:
      for (std::size_t k = 0; k < 3; ++k) {
        out.values[k] = l[k];
        out.ref_grads[k] = dl[k];
      }
      break;
    case Family::P2:
      for (std::size_t k = 0; k < 3; ++k) {
        out.values[k] = l[k] * (2.0 * l[k] - 1.0);
        const double s = 4.0 * l[k] - 1.0;
        out.ref_grads[k] = {s * dl[k][0], s * dl[k][1]};
      }
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t i = (k + 1) % 3, j = (k + 2) % 3;
        out.values[3 + k] = 4.0 * l[i] * l[j];
        out.ref_grads[3 + k] = {4.0 * (l[i] * dl[j][0] + l[j] * dl[i][0]), 4.0 * (l[i] * dl[j][1] + l[j] * dl[i][1])};
      }
      break;
    case Family::Mini: {
      for (std::size_t k = 0; k < 3; ++k) {
        out.values[k] = l[k];
        out.ref_grads[k] = dl[k];
      }
      out.values[3] = 27.0 * l[0] * l[1] * l[2];
      std::array<double, 2> g{0.0, 0.0};
      for (std::size_t d = 0; d < 2; ++d) {
        g[d] = 27.0 * (dl[0][d] * l[1] * l[2] + l[0] * dl[1][d] * l[2] + l[0] * l[1] * dl[2][d]);
      }
      out.ref_grads[3] = g;
      break;
    }
  }
  return out;
}

CellGeometry cell_geometry(const TriMesh& mesh, int cell) {
  const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
  const Point& p0 = mesh.vertices[static_cast<std::size_t>(c[0])];
  const Point& p1 = mesh.vertices[static_cast<std::size_t>(c[1])];
  const Point& p2 = mesh.vertices[static_cast<std::size_t>(c[2])];
  CellGeometry g;
  g.origin = p0;
  g.col0 = {p1.x - p0.x, p1.y - p0.y};
  g.col1 = {p2.x - p0.x, p2.y - p0.y};
  const double det = g.col0[0] * g.col1[1] - g.col1[0] * g.col0[1];
  g.area = 0.5 * det;
  // J = [col0 col1]; J^{-T} = (1/det) [[ J11, -J10 ], [ -J01, J00 ]]
  g.jit = {{{g.col1[1] / det, -g.col0[1] / det}, {-g.col1[0] / det, g.col0[0] / det}}};
  return g;
}

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, Family family, int value_dim)
    : mesh_(std::move(mesh)), family_(family), value_dim_(value_dim), local_nodes_(local_node_count(family)) {
  const auto& m = *mesh_;
  const int nv = static_cast<int>(m.n_vertices());
  const int nc = static_cast<int>(m.n_cells());
  switch (family_) {
    case Family::P1: n_nodes_ = nv; break;
    case Family::P2: n_nodes_ = nv + static_cast<int>(m.n_edges()); break;
    case Family::Mini: n_nodes_ = nv + nc; break;
  }

  node_coords_.resize(static_cast<std::size_t>(n_nodes_));
  for (int v = 0; v < nv; ++v) node_coords_[static_cast<std::size_t>(v)] = m.vertices[static_cast<std::size_t>(v)];
  if (family_ == Family::P2) {
    for (std::size_t e = 0; e < m.n_edges(); ++e) {
      const Point& a = m.vertices[static_cast<std::size_t>(m.edges[e].v[0])];
      const Point& b = m.vertices[static_cast<std::size_t>(m.edges[e].v[1])];
      node_coords_[static_cast<std::size_t>(nv) + e] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
  } else if (family_ == Family::Mini) {
    for (int c = 0; c < nc; ++c) node_coords_[static_cast<std::size_t>(nv + c)] = m.barycenter(c);
  }

  cell_nodes_.reserve(static_cast<std::size_t>(nc) * local_nodes_);
  for (int c = 0; c < nc; ++c) {
    const auto& cv = m.cells[static_cast<std::size_t>(c)];
    for (int v : cv) cell_nodes_.push_back(v);
    if (family_ == Family::P2) {
      for (int e : m.cell_edges[static_cast<std::size_t>(c)]) cell_nodes_.push_back(nv + e);
    } else if (family_ == Family::Mini) {
      cell_nodes_.push_back(nv + c);
    }
  }
  cell_dofs_.reserve(cell_nodes_.size() * static_cast<std::size_t>(value_dim_));
  for (int node : cell_nodes_) {
    for (int d = 0; d < value_dim_; ++d) cell_dofs_.push_back(value_dim_ * node + d);
  }
}

std::shared_ptr<const FeSpace> make_space(std::shared_ptr<const TriMesh> mesh, Family family, int value_dim) {
  if (!mesh) throw std::invalid_argument("make_space: null mesh");
  const bool ok = (value_dim == 1 && (family == Family::P1 || family == Family::P2)) ||
                  (value_dim == 2 && (family == Family::P1 || family == Family::P2 || family == Family::Mini));
  if (!ok) {
    throw std::invalid_argument(std::string("make_space: unsupported combination ") + family_name(family) +
                                " with value_dim " + std::to_string(value_dim));
  }
  return std::make_shared<const FeSpace>(std::move(mesh), family, value_dim);
}

std::vector<int> dirichlet_dofs(const FeSpace& space, BcRole which) {
  if (which == BcRole::Displacement && space.value_dim() != 2) {
    throw std::invalid_argument("dirichlet_dofs: displacement role needs a vector space");
  }
  if (which == BcRole::Pressure && space.value_dim() != 1) {
    throw std::invalid_argument("dirichlet_dofs: pressure role needs a scalar space");
  }
  const TriMesh& m = space.mesh();
  const int nv = static_cast<int>(m.n_vertices());
  std::set<int> nodes;
  for (const auto& be : m.boundary_edges) {
    const bool tagged = which == BcRole::Displacement ? be.tag.displacement == DisplacementBc::Dirichlet
                                                      : be.tag.pressure == PressureBc::Pressure;
    if (!tagged) continue;
    const auto& e = m.edges[static_cast<std::size_t>(be.edge)];
    nodes.insert(e.v[0]);
    nodes.insert(e.v[1]);
    if (space.family() == Family::P2) nodes.insert(nv + be.edge);
  }
  std::vector<int> dofs;
  dofs.reserve(nodes.size() * static_cast<std::size_t>(space.value_dim()));
  for (int n : nodes) {
    for (int d = 0; d < space.value_dim(); ++d) dofs.push_back(space.value_dim() * n + d);
  }
  return dofs;
}

}  // namespace biot
