#include "biot/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace biot {

CoefficientField CoefficientField::constant(double value) {
  CoefficientField f;
  f.value_ = value;
  return f;
}

CoefficientField CoefficientField::piecewise(std::vector<double> per_cell) {
  if (per_cell.empty()) throw std::invalid_argument("CoefficientField: empty per-cell list");
  CoefficientField f;
  f.per_cell_ = std::move(per_cell);
  f.value_ = std::numeric_limits<double>::quiet_NaN();
  return f;
}

CoefficientField CoefficientField::band(const TriMesh& mesh, const std::vector<int>& cells, double inside,
                                        double outside) {
  std::vector<double> v(mesh.n_cells(), outside);
  for (int c : cells) v[static_cast<std::size_t>(c)] = inside;
  return piecewise(std::move(v));
}

double CoefficientField::min_value() const {
  return per_cell_.empty() ? value_ : *std::min_element(per_cell_.begin(), per_cell_.end());
}

double CoefficientField::max_value() const {
  return per_cell_.empty() ? value_ : *std::max_element(per_cell_.begin(), per_cell_.end());
}

CoefficientField CoefficientField::scaled(double s) const {
  if (per_cell_.empty()) return constant(s * value_);
  std::vector<double> v(per_cell_);
  for (double& x : v) x *= s;
  return piecewise(std::move(v));
}

CoefficientField CoefficientField::reciprocal() const {
  if (per_cell_.empty()) return constant(1.0 / value_);
  std::vector<double> v(per_cell_);
  for (double& x : v) x = 1.0 / x;
  return piecewise(std::move(v));
}

namespace {

struct Tabulation {
  std::vector<BasisValues> at_qp;
};

const Tabulation& tabulate(Family f) {
  static const std::array<Tabulation, 3> tabs = [] {
    std::array<Tabulation, 3> t;
    const auto& rule = degree4_rule();
    for (Family fam : {Family::P1, Family::P2, Family::Mini}) {
      auto& tab = t[static_cast<std::size_t>(fam)];
      for (const auto& p : rule.points) tab.at_qp.push_back(eval_basis(fam, p));
    }
    return t;
  }();
  return tabs[static_cast<std::size_t>(f)];
}

// Physical gradients of all local scalar basis functions at each quadrature point.
std::vector<std::vector<std::array<double, 2>>> physical_grads(const Tabulation& tab, const CellGeometry& g) {
  std::vector<std::vector<std::array<double, 2>>> out(tab.at_qp.size());
  for (std::size_t q = 0; q < tab.at_qp.size(); ++q) {
    out[q].reserve(tab.at_qp[q].ref_grads.size());
    for (const auto& rg : tab.at_qp[q].ref_grads) out[q].push_back(g.physical_grad(rg));
  }
  return out;
}

// Assembles a symmetric local matrix given by `entry(i, j, qp_grads, q)`; only the
// upper triangle is evaluated and mirrored so the element matrix is exactly symmetric.
template <class Entry>
SparseMat assemble_symmetric(const FeSpace& space, const CoefficientField* weight, Entry&& entry) {
  const TriMesh& mesh = space.mesh();
  const auto& tab = tabulate(space.family());
  const auto& rule = degree4_rule();
  const int nd = space.dofs_per_cell();
  std::vector<Triplet> trip;
  trip.reserve(mesh.n_cells() * static_cast<std::size_t>(nd * nd));
  std::vector<double> local(static_cast<std::size_t>(nd * nd));
  for (int c = 0; c < static_cast<int>(mesh.n_cells()); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto grads = physical_grads(tab, g);
    const double scale = 2.0 * g.area;  // reference weights sum to 1/2
    for (int i = 0; i < nd; ++i) {
      for (int j = i; j < nd; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
          s += rule.weights[q] * entry(i, j, tab.at_qp[q], grads[q]);
        }
        s *= scale;
        if (weight != nullptr && !weight->is_constant()) s *= weight->at(c);
        local[static_cast<std::size_t>(i * nd + j)] = s;
        local[static_cast<std::size_t>(j * nd + i)] = s;
      }
    }
    const auto dofs = space.cell_dofs(c);
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        trip.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                          local[static_cast<std::size_t>(i * nd + j)]);
      }
    }
  }
  SparseMat out(space.n_dofs(), space.n_dofs());
  out.setFromTriplets(trip.begin(), trip.end());
  if (weight != nullptr && weight->is_constant()) out *= weight->constant_value();
  return out;
}

void check_weight(const CoefficientField& w, const char* what) {
  if (!(w.min_value() > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": coefficient must be strictly positive");
  }
}

}  // namespace

SparseMat assemble_eps_eps(const FeSpace& v) {
  if (v.value_dim() != 2) throw std::invalid_argument("assemble_eps_eps: vector space required");
  return assemble_symmetric(v, nullptr, [](int i, int j, const BasisValues&, const auto& grads) {
    const int a = i / 2, c = i % 2, b = j / 2, d = j % 2;
    const auto& ga = grads[static_cast<std::size_t>(a)];
    const auto& gb = grads[static_cast<std::size_t>(b)];
    double val = 0.5 * ga[static_cast<std::size_t>(d)] * gb[static_cast<std::size_t>(c)];
    if (c == d) val += 0.5 * (ga[0] * gb[0] + ga[1] * gb[1]);
    return val;
  });
}

SparseMat assemble_grad_grad(const FeSpace& v, const CoefficientField& weight, bool admissible) {
  if (admissible) check_weight(weight, "assemble_grad_grad");
  const int vd = v.value_dim();
  return assemble_symmetric(v, &weight, [vd](int i, int j, const BasisValues&, const auto& grads) {
    if (i % vd != j % vd) return 0.0;
    const auto& ga = grads[static_cast<std::size_t>(i / vd)];
    const auto& gb = grads[static_cast<std::size_t>(j / vd)];
    return ga[0] * gb[0] + ga[1] * gb[1];
  });
}

SparseMat assemble_mass(const FeSpace& q, const CoefficientField& weight) {
  if (q.value_dim() != 1) throw std::invalid_argument("assemble_mass: scalar space required");
  check_weight(weight, "assemble_mass");
  return assemble_symmetric(q, &weight, [](int i, int j, const BasisValues& b, const auto&) {
    return b.values[static_cast<std::size_t>(i)] * b.values[static_cast<std::size_t>(j)];
  });
}

SparseMat assemble_div(const FeSpace& v, const FeSpace& q) {
  if (v.value_dim() != 2 || q.value_dim() != 1) {
    throw std::invalid_argument("assemble_div: needs a vector trial space and a scalar test space");
  }
  if (&v.mesh() != &q.mesh()) throw std::invalid_argument("assemble_div: spaces live on different meshes");
  const TriMesh& mesh = v.mesh();
  const auto& tv = tabulate(v.family());
  const auto& tq = tabulate(q.family());
  const auto& rule = degree4_rule();
  const int nv = v.dofs_per_cell();
  const int nq = q.dofs_per_cell();
  std::vector<Triplet> trip;
  trip.reserve(mesh.n_cells() * static_cast<std::size_t>(nv * nq));
  for (int c = 0; c < static_cast<int>(mesh.n_cells()); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    const auto grads = physical_grads(tv, g);
    const double scale = 2.0 * g.area;
    const auto vdofs = v.cell_dofs(c);
    const auto qdofs = q.cell_dofs(c);
    for (int i = 0; i < nq; ++i) {
      for (int j = 0; j < nv; ++j) {
        const int a = j / 2, comp = j % 2;
        double s = 0.0;
        for (std::size_t k = 0; k < rule.weights.size(); ++k) {
          s += rule.weights[k] * grads[k][static_cast<std::size_t>(a)][static_cast<std::size_t>(comp)] *
               tq.at_qp[k].values[static_cast<std::size_t>(i)];
        }
        trip.emplace_back(qdofs[static_cast<std::size_t>(i)], vdofs[static_cast<std::size_t>(j)], s * scale);
      }
    }
  }
  SparseMat out(q.n_dofs(), v.n_dofs());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vec integrate_basis(const FeSpace& q) {
  if (q.value_dim() != 1) throw std::invalid_argument("integrate_basis: scalar space required");
  const auto& tab = tabulate(q.family());
  const auto& rule = degree4_rule();
  Vec out = Vec::Zero(q.n_dofs());
  for (int c = 0; c < static_cast<int>(q.mesh().n_cells()); ++c) {
    const double scale = 2.0 * q.mesh().cell_areas[static_cast<std::size_t>(c)];
    const auto dofs = q.cell_dofs(c);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < rule.weights.size(); ++k) s += rule.weights[k] * tab.at_qp[k].values[i];
      out[dofs[i]] += s * scale;
    }
  }
  return out;
}

Vec assemble_load(const FeSpace& v, const std::function<std::array<double, 2>(const Point&)>& f) {
  if (v.value_dim() != 2) throw std::invalid_argument("assemble_load: vector space required for a vector load");
  const auto& tab = tabulate(v.family());
  const auto& rule = degree4_rule();
  Vec out = Vec::Zero(v.n_dofs());
  for (int c = 0; c < static_cast<int>(v.mesh().n_cells()); ++c) {
    const CellGeometry g = cell_geometry(v.mesh(), c);
    const double scale = 2.0 * g.area;
    const auto dofs = v.cell_dofs(c);
    for (std::size_t k = 0; k < rule.weights.size(); ++k) {
      const auto fv = f(g.map(rule.points[k]));
      for (std::size_t j = 0; j < dofs.size(); ++j) {
        out[dofs[j]] += scale * rule.weights[k] * fv[j % 2] * tab.at_qp[k].values[j / 2];
      }
    }
  }
  return out;
}

Vec assemble_load(const FeSpace& q, const std::function<double(const Point&)>& gfun) {
  if (q.value_dim() != 1) throw std::invalid_argument("assemble_load: scalar space required for a scalar load");
  const auto& tab = tabulate(q.family());
  const auto& rule = degree4_rule();
  Vec out = Vec::Zero(q.n_dofs());
  for (int c = 0; c < static_cast<int>(q.mesh().n_cells()); ++c) {
    const CellGeometry g = cell_geometry(q.mesh(), c);
    const double scale = 2.0 * g.area;
    const auto dofs = q.cell_dofs(c);
    for (std::size_t k = 0; k < rule.weights.size(); ++k) {
      const double gv = gfun(g.map(rule.points[k]));
      for (std::size_t j = 0; j < dofs.size(); ++j) out[dofs[j]] += scale * rule.weights[k] * gv * tab.at_qp[k].values[j];
    }
  }
  return out;
}

namespace {

std::vector<char> mask_of(Eigen::Index n, const std::vector<int>& dofs) {
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  for (int d : dofs) {
    if (d < 0 || d >= n) throw std::out_of_range("constrained dof " + std::to_string(d) + " out of range");
    m[static_cast<std::size_t>(d)] = 1;
  }
  return m;
}

}  // namespace

SparseMat apply_dirichlet(const SparseMat& mat, const std::vector<int>& dofs) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("apply_dirichlet: square matrix required");
  const auto mask = mask_of(mat.rows(), dofs);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mat.nonZeros()));
  for (int r = 0; r < mat.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(mat, r); it; ++it) {
      if (mask[static_cast<std::size_t>(it.row())] || mask[static_cast<std::size_t>(it.col())]) continue;
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  SparseMat out(mat.rows(), mat.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

std::pair<SparseMat, Vec> apply_dirichlet(const SparseMat& mat, const Vec& rhs, const std::vector<int>& dofs) {
  if (rhs.size() != mat.rows()) throw std::invalid_argument("apply_dirichlet: rhs size mismatch");
  Vec b = rhs;
  for (int d : dofs) b[d] = 0.0;
  return {apply_dirichlet(mat, dofs), std::move(b)};
}

SparseMat clear_rows_cols(const SparseMat& mat, const std::vector<int>& rows, const std::vector<int>& cols) {
  const auto rmask = mask_of(mat.rows(), rows);
  const auto cmask = mask_of(mat.cols(), cols);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(mat.nonZeros()));
  for (int r = 0; r < mat.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(mat, r); it; ++it) {
      if (rmask[static_cast<std::size_t>(it.row())] || cmask[static_cast<std::size_t>(it.col())]) continue;
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  SparseMat out(mat.rows(), mat.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace biot
