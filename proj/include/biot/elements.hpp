#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "biot/mesh.hpp"

namespace biot {

enum class Family {
  P1,
  P2,
  Mini,  // P1 enriched with the cubic cell bubble; velocity only
};

const char* family_name(Family f);

/// Quadrature on the reference triangle. Points are barycentric coordinates
/// (l0, l1, l2); weights sum to the reference area 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Symmetric 6-point rule, exact for polynomials of total degree <= 4.
const QuadratureRule& degree4_rule();

/// Scalar shape functions of one family at one point. Gradients are with
/// respect to the reference coordinates (xi, eta) = (l1, l2).
struct BasisValues {
  std::vector<double> values;
  std::vector<std::array<double, 2>> ref_grads;
};

/// Local node order: P1 = (v0, v1, v2); P2 = (v0, v1, v2, e0, e1, e2) with e_k
/// the edge opposite v_k; Mini = (v0, v1, v2, bubble). The bubble is
/// 27*l0*l1*l2, equal to 1 at the barycenter.
[[nodiscard]] BasisValues eval_basis(Family family, const std::array<double, 3>& bary);

[[nodiscard]] int local_node_count(Family family);

/// Finite element space over a TriMesh with its global dof map.
///
/// Scalar nodes are numbered vertices first (in mesh order), then edges (P2)
/// or cell bubbles (Mini). For value_dim = 2 the dofs are interleaved:
/// dof = 2*node + component. Local dofs of a cell follow the same rule,
/// local dof = value_dim*local_node + component.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const TriMesh> mesh, Family family, int value_dim);

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] int value_dim() const { return value_dim_; }
  [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int n_nodes() const { return n_nodes_; }
  [[nodiscard]] int n_dofs() const { return n_nodes_ * value_dim_; }
  [[nodiscard]] int dofs_per_cell() const { return local_nodes_ * value_dim_; }
  [[nodiscard]] int local_nodes() const { return local_nodes_; }

  [[nodiscard]] std::span<const int> cell_nodes(int cell) const {
    return {cell_nodes_.data() + static_cast<std::size_t>(cell) * local_nodes_,
            static_cast<std::size_t>(local_nodes_)};
  }
  [[nodiscard]] std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * dofs_per_cell(),
            static_cast<std::size_t>(dofs_per_cell())};
  }
  /// Coordinates of a scalar node; bubble nodes use the cell barycenter.
  [[nodiscard]] const Point& node_coord(int node) const { return node_coords_[static_cast<std::size_t>(node)]; }
  [[nodiscard]] const Point& dof_coord(int dof) const { return node_coord(dof / value_dim_); }

 private:
  std::shared_ptr<const TriMesh> mesh_;
  Family family_;
  int value_dim_;
  int local_nodes_;
  int n_nodes_ = 0;
  std::vector<int> cell_nodes_;
  std::vector<int> cell_dofs_;
  std::vector<Point> node_coords_;
};

/// Throws std::invalid_argument for unsupported (family, value_dim) pairs.
[[nodiscard]] std::shared_ptr<const FeSpace> make_space(std::shared_ptr<const TriMesh> mesh, Family family,
                                                        int value_dim);

enum class BcRole { Displacement, Pressure };

/// Dofs supported on the closure of the tagged Dirichlet boundary part
/// (Gamma_d for Displacement, Gamma_p for Pressure). Sorted, unique.
[[nodiscard]] std::vector<int> dirichlet_dofs(const FeSpace& space, BcRole which);

/// Geometry of one cell: affine map Jacobian data for gradient transforms.
struct CellGeometry {
  double area = 0.0;
  // inverse-transpose Jacobian: grad_x = jit * grad_ref
  std::array<std::array<double, 2>, 2> jit{};
  Point origin;
  std::array<double, 2> col0{}, col1{};

  [[nodiscard]] std::array<double, 2> physical_grad(const std::array<double, 2>& g) const {
    return {jit[0][0] * g[0] + jit[0][1] * g[1], jit[1][0] * g[0] + jit[1][1] * g[1]};
  }
  [[nodiscard]] Point map(const std::array<double, 3>& bary) const {
    return {origin.x + col0[0] * bary[1] + col1[0] * bary[2], origin.y + col0[1] * bary[1] + col1[1] * bary[2]};
  }
};

[[nodiscard]] CellGeometry cell_geometry(const TriMesh& mesh, int cell);

}  // namespace biot
