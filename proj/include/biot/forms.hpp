#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "biot/elements.hpp"
#include "biot/sparse.hpp"

namespace biot {

/// Scalar coefficient: one constant or one value per cell.
class CoefficientField {
 public:
  CoefficientField() = default;
  static CoefficientField constant(double value);
  static CoefficientField piecewise(std::vector<double> per_cell);
  /// value on cells in `cells`, `outside` elsewhere
  static CoefficientField band(const TriMesh& mesh, const std::vector<int>& cells, double inside, double outside);

  [[nodiscard]] bool is_constant() const { return per_cell_.empty(); }
  [[nodiscard]] double constant_value() const { return value_; }
  [[nodiscard]] double at(int cell) const {
    return per_cell_.empty() ? value_ : per_cell_[static_cast<std::size_t>(cell)];
  }
  [[nodiscard]] const std::vector<double>& per_cell() const { return per_cell_; }
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double max_value() const;
  /// Same field with every value multiplied by s.
  [[nodiscard]] CoefficientField scaled(double s) const;
  /// Pointwise reciprocal.
  [[nodiscard]] CoefficientField reciprocal() const;

 private:
  double value_ = 1.0;
  std::vector<double> per_cell_;
};

/// (eps(u), eps(v)) on a vector space.
[[nodiscard]] SparseMat assemble_eps_eps(const FeSpace& v);

/// (w grad u, grad v) on a scalar or vector space. With `admissible` set, a
/// non-positive weight is rejected.
[[nodiscard]] SparseMat assemble_grad_grad(const FeSpace& v, const CoefficientField& weight = CoefficientField::constant(1.0),
                                           bool admissible = true);

/// B[q, v] = (div phi_v, psi_q); rows follow Q, columns follow V.
[[nodiscard]] SparseMat assemble_div(const FeSpace& v, const FeSpace& q);

/// (w p, q) on a scalar space.
[[nodiscard]] SparseMat assemble_mass(const FeSpace& q, const CoefficientField& weight = CoefficientField::constant(1.0));

/// Integrals of the scalar basis functions, (phi_i, 1).
[[nodiscard]] Vec integrate_basis(const FeSpace& q);

[[nodiscard]] Vec assemble_load(const FeSpace& v, const std::function<std::array<double, 2>(const Point&)>& f);
[[nodiscard]] Vec assemble_load(const FeSpace& q, const std::function<double(const Point&)>& g);

/// Symmetric elimination of homogeneous Dirichlet dofs: rows and columns of
/// the constrained dofs are cleared, the diagonal set to 1 and the rhs to 0.
[[nodiscard]] std::pair<SparseMat, Vec> apply_dirichlet(const SparseMat& mat, const Vec& rhs,
                                                        const std::vector<int>& dofs);
[[nodiscard]] SparseMat apply_dirichlet(const SparseMat& mat, const std::vector<int>& dofs);

/// Clears the given rows and columns of a (possibly rectangular) coupling block.
[[nodiscard]] SparseMat clear_rows_cols(const SparseMat& mat, const std::vector<int>& rows,
                                        const std::vector<int>& cols);

}  // namespace biot
