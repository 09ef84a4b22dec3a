#pragma once

#include <memory>
#include <utility>

#include "biot/elements.hpp"
#include "biot/sparse.hpp"

namespace biot {

/// Mean-value data of a nodal scalar space without essential conditions:
/// m_i = (phi_i, 1_Omega) with 1_Omega = 1/sqrt(|Omega|); the all-ones vector w
/// is implicit. Satisfies M w = sqrt(|Omega|) m and m^T w = sqrt(|Omega|).
struct MeanVector {
  Vec m;
  double omega_sqrt = 1.0;

  /// w^T x
  [[nodiscard]] double sum(const Vec& x) const { return x.sum(); }
};

/// m is integrated directly from the basis functions. `constrained` lists
/// Dirichlet dofs of the space; a non-empty list is rejected because the
/// partition of unity no longer reproduces the constant.
[[nodiscard]] MeanVector build_mean_vector(const FeSpace& q, const std::vector<int>& constrained = {});

/// M_lambda = M + (1/lambda - 1) m m^T = V M V^T with V^{-1} = I + a m w^T,
/// a = (sqrt(lambda) - 1)/sqrt(|Omega|), and V = I - abar m m^T M^{-1},
/// abar = 1 - 1/sqrt(lambda).
class RankOneMass {
 public:
  RankOneMass(std::shared_ptr<const SparseMat> mass, MeanVector mean, double lambda);

  [[nodiscard]] const SparseMat& mass() const { return *mass_; }
  [[nodiscard]] const MeanVector& mean() const { return mean_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double abar() const { return abar_; }
  [[nodiscard]] Eigen::Index size() const { return mean_.m.size(); }

 private:
  std::shared_ptr<const SparseMat> mass_;
  MeanVector mean_;
  double lambda_;
  double a_;
  double abar_;
};

/// M x + (1/lambda - 1)(m^T x) m, never forming m m^T.
[[nodiscard]] Vec apply_Mlambda(const RankOneMass& r, const Vec& x);
/// x + a (w^T x) m
[[nodiscard]] Vec apply_Vlambda_inv(const RankOneMass& r, const Vec& x);
/// x + a (m^T x) w  (the transpose of V^{-1})
[[nodiscard]] Vec apply_Vlambda_inv_transpose(const RankOneMass& r, const Vec& x);
/// x - abar (m^T M^{-1} x) m, the inverse of apply_Vlambda_inv; M^{-1} supplied as an exact solve
[[nodiscard]] Vec apply_Vlambda(const RankOneMass& r, const LinearOp& mass_solve, const Vec& x);

[[nodiscard]] LinearOp mlambda_operator(std::shared_ptr<const RankOneMass> r);

enum class MassInner { Jacobi, ExactMass };

/// x -> V^{-T} D V^{-1} x with D = diag(M)^{-1} (Jacobi) or D = M^{-1}.
/// On P1 spaces the Jacobi variant uses the commuted form D (I + (lambda-1)/sqrt|Omega| m w^T).
/// Throws std::invalid_argument for lambda < 1.
[[nodiscard]] LinearOp build_QT_preconditioner(std::shared_ptr<const RankOneMass> r, MassInner inner,
                                               Family family);

/// The general composition V^{-T} D V^{-1} with an arbitrary inner D.
[[nodiscard]] LinearOp congruence_preconditioner(std::shared_ptr<const RankOneMass> r, LinearOp inner);

/// Splits x into its mean part (a constant function) and its mean-zero part.
[[nodiscard]] std::pair<Vec, Vec> project_mean(const Vec& x, const MeanVector& mean);

}  // namespace biot
