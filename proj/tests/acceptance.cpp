// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>
#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "biot/harness.hpp"

using namespace biot;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

struct PointResult {
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
  double cond = 0.0;
};

// Looser Lanczos stagnation test for the large sweeps.
constexpr double kSweepCondTol = 1e-6;

bool monotone(const std::vector<double>& h) {
  for (std::size_t k = 1; k < h.size(); ++k) {
    if (h[k] > h[k - 1] * (1.0 + 1e-12)) return false;
  }
  return true;
}

PointResult solve_point(const CaseSpec& spec, bool with_cond, double cond_tol = kSweepCondTol) {
  BlockSystem sys = build_case(spec);
  sys.rhs = manufactured_rhs(sys);
  const LinearOp a = sys.op(), b = sys.preconditioner();
  const MinresResult res = minres(a, b, sys.rhs, 1e-6, 5000);
  PointResult out;
  out.iterations = res.report.iterations;
  out.converged = res.report.converged;
  out.monotone = monotone(res.report.residual_history);
  if (with_cond) {
    ConditionOptions o;
    o.stagnation_tol = cond_tol;
    o.drop_null = sys.drop_null;
    o.excluded = sys.constrained();
    if (sys.null_mode) o.deflate.push_back(*sys.null_mode);
    out.cond = estimate_condition(a, b, o).cond;
  }
  return out;
}

std::shared_ptr<const FeSpace> scalar_space(int n, Family f) {
  return make_space(build_unit_square(n, BcPreset::AllDirichlet), f, 1);
}

double dense_cond(const DenseMat& a, const DenseMat& b) {
  const DenseMat binv = b.inverse();
  return spectrum_condition(dense_eig_oracle(a, DenseMat(0.5 * (binv + binv.transpose()))));
}

void criterion_mean_vector(Outcome& o) {
  double worst_identity = 0.0, worst_congruence = 0.0;
  for (Family f : {Family::P1, Family::P2}) {
    for (int n : {1, 2, 4, 8, 16, 32}) {
      auto q = scalar_space(n, f);
      auto mass = std::make_shared<const SparseMat>(assemble_mass(*q));
      const MeanVector mv = build_mean_vector(*q);
      const Vec w = Vec::Ones(q->n_dofs());
      const double e1 = (*mass * w - mv.omega_sqrt * mv.m).lpNorm<Eigen::Infinity>();
      const double e2 = std::abs(mv.m.dot(w) - mv.omega_sqrt);
      worst_identity = std::max({worst_identity, e1, e2});
      if (n > 8) continue;
      const LinearOp solve = factorize(*mass);
      for (double lambda : {1.0, 1e2, 1e4, 1e8}) {
        auto r = std::make_shared<const RankOneMass>(mass, mv, lambda);
        const LinearOp v(r->size(), r->size(), [&](const Vec& in, Vec& out) { out = apply_Vlambda(*r, solve, in); },
                         false);
        const DenseMat vd = materialize(v);
        const DenseMat ml = materialize(mlambda_operator(r));
        const double rel = (ml - vd * DenseMat(*mass) * vd.transpose()).norm() / ml.norm();
        worst_congruence = std::max(worst_congruence, rel);
      }
    }
  }
  o.require(worst_identity <= 1e-13, "mean-vector identity");
  o.require(worst_congruence <= 1e-12, "congruence");
  o.detail << "max identity error " << worst_identity << ", max congruence error " << worst_congruence;
}

void criterion_lambda_invariance(Outcome& o) {
  double worst = 0.0;
  for (Family f : {Family::P1, Family::P2}) {
    for (int n : {4, 8, 16}) {
      auto q = scalar_space(n, f);
      auto mass = std::make_shared<const SparseMat>(assemble_mass(*q));
      const MeanVector mv = build_mean_vector(*q);
      std::vector<double> conds;
      for (double lambda : {1.0, 1e4, 1e8}) {
        auto r = std::make_shared<const RankOneMass>(mass, mv, lambda);
        conds.push_back(dense_cond(materialize(mlambda_operator(r)),
                                   materialize(build_QT_preconditioner(r, MassInner::Jacobi, f))));
      }
      const auto [lo, hi] = std::minmax_element(conds.begin(), conds.end());
      worst = std::max(worst, (*hi - *lo) / *lo);
    }
  }
  o.require(worst <= 1e-6, "cond varies with lambda");
  o.detail << "max relative spread " << worst;
}

void criterion_elasticity(Outcome& o) {
  double b2_max = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  for (int n : {8, 16, 32}) {
    std::map<double, double> b1;
    for (double lambda : {1.0, 1e2, 1e4, 1e6}) {
      const double c2 = solve_point({CaseId::Ex2b, n, lambda}, true, 1e-10).cond;
      b2_max = std::max(b2_max, c2);
      o.require(c2 <= 25.0, "B2 cond at N=" + std::to_string(n));
      if (lambda >= 1e2) b1[lambda] = solve_point({CaseId::Ex2a, n, lambda}, true, 1e-10).cond;
    }
    for (double lambda : {1e2, 1e4}) {
      const double ratio = b1[lambda * 100] / b1[lambda];
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
      o.require(ratio >= 50.0 && ratio <= 200.0, "B1 ratio at N=" + std::to_string(n));
    }
  }
  o.detail << "B2 max cond " << b2_max << ", B1 ratios in [" << ratio_lo << ", " << ratio_hi << "]";
}

void criterion_stokes_darcy(Outcome& o) {
  double worst = 0.0;
  for (int n : {8, 16, 32}) {
    for (double kappa : {1.0, 1e-2, 1e-4, 1e-6, 0.0}) {
      const double c = solve_point({CaseId::Ex1, n, 1.0, 1.0, {kappa, false}}, true).cond;
      worst = std::max(worst, c);
      o.require(std::isfinite(c) && c <= 15.0, "cond at N=" + std::to_string(n));
    }
  }
  o.detail << "max cond " << worst;
}

struct Envelope {
  double cond_lo = 1e300, cond_hi = 0.0;
  int it_hi = 0;
  bool all_monotone = true;
};

void check_envelope(Outcome& o, Envelope& env, const PointResult& p, const std::string& where) {
  env.cond_lo = std::min(env.cond_lo, p.cond);
  env.cond_hi = std::max(env.cond_hi, p.cond);
  env.it_hi = std::max(env.it_hi, p.iterations);
  env.all_monotone = env.all_monotone && p.monotone;
  o.require(p.converged && p.iterations <= 120, "iterations at " + where);
  o.require(p.cond >= 1.0 - 1e-9 && p.cond <= 30.0, "cond at " + where);
}

void criterion_total_pressure(Outcome& o) {
  for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case4}) {
    Envelope env;
    double worst_spread = 0.0;
    for (int n : {8, 16, 32}) {
      int lo = 1 << 30, hi = 0;
      for (double alpha : {1.0, 1e-2, 1e-4}) {
        for (double lambda : {1.0, 1e4, 1e8}) {
          for (double kappa : {1.0, 1e-4, 1e-8, 1e-12}) {
            const PointResult p = solve_point({id, n, lambda, alpha, {kappa, false}}, true);
            std::ostringstream where;
            where << "case " << case_name(id) << " N=" << n << " lambda=" << lambda << " alpha=" << alpha
                  << " kappa=" << kappa;
            check_envelope(o, env, p, where.str());
            lo = std::min(lo, p.iterations);
            hi = std::max(hi, p.iterations);
          }
        }
      }
      const double spread = static_cast<double>(hi) / std::max(lo, 1);
      worst_spread = std::max(worst_spread, spread);
      o.require(spread <= 3.0, "iteration spread for case " + case_name(id) + " N=" + std::to_string(n));
    }
    o.require(env.all_monotone, "monotone history");
    o.detail << "case " << case_name(id) << ": cond [" << env.cond_lo << ", " << env.cond_hi << "], max it "
             << env.it_hi << ", max spread " << worst_spread << "; ";
  }
}

void criterion_negative_control(Outcome& o) {
  const PointResult low = solve_point({CaseId::Ex3, 32, 1.0, 1.0, {1e-5, false}}, false);
  const PointResult high = solve_point({CaseId::Ex3, 32, 1e6, 1.0, {1e-5, false}}, false);
  const PointResult total = solve_point({CaseId::Case1, 32, 1e6, 1.0, {1e-5, false}}, true);
  o.require(low.converged && high.iterations >= 3 * low.iterations, "solid-pressure iteration growth");
  Envelope env;
  check_envelope(o, env, total, "case 1");
  o.detail << "solid pressure " << low.iterations << " -> " << high.iterations << (high.converged ? "" : " (capped)")
           << " iterations; case 1 " << total.iterations << " iterations, cond " << total.cond;
}

void criterion_band_kappa(Outcome& o) {
  Envelope env;
  for (double alpha : {1.0, 1e-2, 1e-4}) {
    for (double lambda : {1.0, 1e4, 1e8}) {
      for (double kappa : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        const PointResult p = solve_point({CaseId::Case1, 32, lambda, alpha, {kappa, true}}, true);
        std::ostringstream where;
        where << "lambda=" << lambda << " alpha=" << alpha << " band kappa=" << kappa;
        check_envelope(o, env, p, where.str());
      }
    }
  }
  o.require(env.all_monotone, "monotone history");
  o.detail << "cond [" << env.cond_lo << ", " << env.cond_hi << "], max it " << env.it_hi;
}

void criterion_inf_sup(Outcome& o) {
  for (Family f : {Family::P2, Family::Mini}) {
    std::vector<double> beta;
    for (int n : {4, 8, 16}) {
      auto mesh = build_unit_square(n, BcPreset::AllDirichlet);
      beta.push_back(discrete_inf_sup(*make_space(mesh, f, 2), *make_space(mesh, Family::P1, 1), true));
    }
    const auto [lo, hi] = std::minmax_element(beta.begin(), beta.end());
    o.require(*lo > 0.0, std::string(family_name(f)) + " positive");
    o.require((*hi - *lo) / *hi < 0.1, std::string(family_name(f)) + " variation");
    o.detail << family_name(f) << " beta " << beta[0] << " " << beta[1] << " " << beta[2] << "; ";
  }
}

void criterion_solver(Outcome& o) {
  const double rtol = 1e-6;
  double worst = 0.0;
  int systems = 0;
  bool all_monotone = true;
  const std::vector<CaseId> ids{CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4,
                                CaseId::Ex1,   CaseId::Ex2a,  CaseId::Ex2b,  CaseId::Ex3};
  for (CaseId id : ids) {
    for (int n : {4, 8, 16}) {
      for (double lambda : {1.0, 1e6}) {
        for (double kappa : {1.0, 1e-8}) {
          if (n == 16 && (lambda != 1e6 || kappa != 1e-8)) continue;
          CaseSpec spec{id, n, lambda, id == CaseId::Ex1 ? 1.0 : 1e-2, {kappa, false}};
          if (id == CaseId::Ex1) spec.lambda = 1.0;
          if (id == CaseId::Ex2a || id == CaseId::Ex2b || id == CaseId::Ex3) spec.alpha = 1.0;
          BlockSystem sys = build_case(spec);
          if (sys.size() > kDenseOracleCap) continue;
          sys.rhs = manufactured_rhs(sys);
          const LinearOp a = sys.op(), b = sys.preconditioner();
          const MinresResult res = minres(a, b, sys.rhs, rtol, 5000);
          all_monotone = all_monotone && monotone(res.report.residual_history);
          const DenseMat ad(sys.matrix());
          Vec x = ad.partialPivLu().solve(sys.rhs);
          if (sys.null_mode) x -= sys.null_mode->dot(x) * *sys.null_mode;
          const Vec d = a(res.x - x);
          const double rel = d.dot(b(d)) / sys.rhs.dot(b(sys.rhs));
          worst = std::max(worst, rel);
          ++systems;
          o.require(res.report.converged && rel <= 10.0 * rtol,
                    "case " + case_name(id) + " N=" + std::to_string(n));
        }
      }
    }
  }
  o.require(all_monotone, "monotone history");
  o.detail << systems << " systems, max relative B-weighted residual gap " << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 mean-vector identities and congruence", criterion_mean_vector},
      {"2 rank-one preconditioner lambda invariance", criterion_lambda_invariance},
      {"3 elasticity B1/B2 contrast", criterion_elasticity},
      {"4 Stokes-Darcy condition bound", criterion_stokes_darcy},
      {"5 total-pressure robustness grid", criterion_total_pressure},
      {"6 solid-pressure negative control", criterion_negative_control},
      {"7 banded kappa", criterion_band_kappa},
      {"8 discrete inf-sup stability", criterion_inf_sup},
      {"9 MinRes vs dense direct solve", criterion_solver},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
