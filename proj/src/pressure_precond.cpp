#include "biot/pressure_precond.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "biot/forms.hpp"
#include "biot/krylov.hpp"

namespace biot {

MeanVector build_mean_vector(const FeSpace& q, const std::vector<int>& constrained) {
  if (!constrained.empty()) {
    throw std::invalid_argument("build_mean_vector: the pressure space must carry no essential boundary condition");
  }
  if (q.value_dim() != 1 || q.family() == Family::Mini) {
    throw std::invalid_argument("build_mean_vector: nodal scalar P1 or P2 space required");
  }
  MeanVector mv;
  mv.omega_sqrt = std::sqrt(q.mesh().measure());
  mv.m = integrate_basis(q) / mv.omega_sqrt;
  return mv;
}

RankOneMass::RankOneMass(std::shared_ptr<const SparseMat> mass, MeanVector mean, double lambda)
    : mass_(std::move(mass)), mean_(std::move(mean)), lambda_(lambda) {
  if (!(lambda_ >= 1.0)) {
    throw std::invalid_argument("RankOneMass: lambda must be >= 1, got " + std::to_string(lambda_));
  }
  if (mass_->rows() != mean_.m.size()) throw std::invalid_argument("RankOneMass: mass/mean size mismatch");
  const double s = std::sqrt(lambda_);
  a_ = (s - 1.0) / mean_.omega_sqrt;
  abar_ = 1.0 - 1.0 / s;
}

Vec apply_Mlambda(const RankOneMass& r, const Vec& x) {
  Vec y = r.mass() * x;
  y += (1.0 / r.lambda() - 1.0) * r.mean().m.dot(x) * r.mean().m;
  return y;
}

Vec apply_Vlambda_inv(const RankOneMass& r, const Vec& x) {
  return x + r.a() * x.sum() * r.mean().m;
}

Vec apply_Vlambda_inv_transpose(const RankOneMass& r, const Vec& x) {
  Vec y = x;
  y.array() += r.a() * r.mean().m.dot(x);
  return y;
}

Vec apply_Vlambda(const RankOneMass& r, const LinearOp& mass_solve, const Vec& x) {
  const Vec z = mass_solve(x);
  return x - r.abar() * r.mean().m.dot(z) * r.mean().m;
}

LinearOp mlambda_operator(std::shared_ptr<const RankOneMass> r) {
  const auto n = r->size();
  return LinearOp(
      n, n, [rr = std::move(r)](const Vec& in, Vec& out) { out = apply_Mlambda(*rr, in); }, true);
}

LinearOp congruence_preconditioner(std::shared_ptr<const RankOneMass> r, LinearOp inner) {
  const auto n = r->size();
  return LinearOp(
      n, n,
      [rr = std::move(r), d = std::move(inner)](const Vec& in, Vec& out) {
        const Vec t = d(apply_Vlambda_inv(*rr, in));
        out = apply_Vlambda_inv_transpose(*rr, t);
      },
      true);
}

LinearOp build_QT_preconditioner(std::shared_ptr<const RankOneMass> r, MassInner inner, Family family) {
  if (!(r->lambda() >= 1.0)) throw std::invalid_argument("build_QT_preconditioner: lambda must be >= 1");
  if (inner == MassInner::ExactMass) {
    auto solve = factorize(r->mass(), Definiteness::Spd, "Q_T mass");
    return congruence_preconditioner(std::move(r), std::move(solve));
  }
  if (family != Family::P1 && family != Family::P2) {
    throw std::invalid_argument("build_QT_preconditioner: Jacobi inner solve needs a nodal P1 or P2 space");
  }
  Vec dinv = r->mass().diagonal().cwiseInverse();
  if (family == Family::P2) return congruence_preconditioner(std::move(r), diagonal_operator(std::move(dinv)));

  // P1: D is proportional to diag(1/m_i), hence w m^T D = D m w^T and
  // V^{-T} D V^{-1} = D V^{-2} = D (I + (lambda - 1)/sqrt|Omega| m w^T).
  const double c = (r->lambda() - 1.0) / r->mean().omega_sqrt;
  const auto n = r->size();
  return LinearOp(
      n, n,
      [rr = std::move(r), d = std::move(dinv), c](const Vec& in, Vec& out) {
        out = d.cwiseProduct(in + c * in.sum() * rr->mean().m);
      },
      true);
}

std::pair<Vec, Vec> project_mean(const Vec& x, const MeanVector& mean) {
  if (x.size() != mean.m.size()) throw std::invalid_argument("project_mean: size mismatch");
  // (x, 1) = sqrt|Omega| m^T x, so the mean value is m^T x / sqrt|Omega|.
  const double avg = mean.m.dot(x) / mean.omega_sqrt;
  Vec xm = Vec::Constant(x.size(), avg);
  Vec x0 = x - xm;
  return {std::move(xm), std::move(x0)};
}

}  // namespace biot
