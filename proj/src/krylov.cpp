#include "biot/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <json.hpp>

namespace biot {

std::string report_to_json(const SolveReport& report) {
  nlohmann::json j;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["cond_estimate"] = report.cond_estimate;
  j["ritz_min"] = report.ritz_min;
  j["ritz_max"] = report.ritz_max;
  j["residual_history"] = report.residual_history;
  return j.dump();
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& alpha, const std::vector<double>& offdiag) {
  const auto k = static_cast<Eigen::Index>(alpha.size());
  if (k == 0) return {};
  if (k == 1) return {alpha[0]};
  Vec d = Eigen::Map<const Vec>(alpha.data(), k);
  Vec e = Eigen::Map<const Vec>(offdiag.data(), k - 1);
  Eigen::SelfAdjointEigenSolver<DenseMat> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double spectrum_condition(const std::vector<double>& eig, int drop_null) {
  std::vector<double> mags;
  mags.reserve(eig.size());
  for (double t : eig) mags.push_back(std::abs(t));
  std::sort(mags.begin(), mags.end());
  if (static_cast<std::size_t>(drop_null) >= mags.size()) return std::numeric_limits<double>::quiet_NaN();
  return mags.back() / mags[static_cast<std::size_t>(drop_null)];
}

MinresResult minres(const LinearOp& a, const LinearOp& b, const Vec& rhs, double rtol, int max_iter) {
  const Eigen::Index n = rhs.size();
  if (a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
    throw std::invalid_argument("minres: operator and rhs sizes differ");
  }
  if (!rhs.allFinite()) throw SolverError(SolverError::Kind::NonFinite, "minres: non-finite right-hand side");

  MinresResult out;
  out.x = Vec::Zero(n);
  SolveReport& rep = out.report;

  Vec r1 = rhs;
  Vec y = b(r1);
  double beta1 = r1.dot(y);
  if (beta1 < 0.0) throw SolverError(SolverError::Kind::Breakdown, "minres: preconditioner is not positive definite");
  rep.residual_history.push_back(1.0);
  if (beta1 == 0.0) {
    rep.converged = true;
    return out;
  }
  beta1 = std::sqrt(beta1);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vec w = Vec::Zero(n), w1(n), w2 = Vec::Zero(n), v(n);
  Vec r2 = r1;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int itn = 1; itn <= max_iter; ++itn) {
    v = y / beta;
    a.apply(v, y);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1.swap(r2);
    r2 = y;
    y = b(r2);
    oldb = beta;
    const double bb = r2.dot(y);
    if (bb < 0.0) throw SolverError(SolverError::Kind::Breakdown, "minres: preconditioner is not positive definite");
    beta = std::sqrt(bb);
    rep.lanczos_alpha.push_back(alfa);
    rep.lanczos_beta.push_back(beta);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    const bool singular = gamma < eps * beta1;
    gamma = std::max(gamma, eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1.swap(w2);
    w2.swap(w);
    w = (v - oldeps * w1 - delta * w2) / gamma;
    out.x += phi * w;

    if (!std::isfinite(alfa) || !std::isfinite(beta) || !std::isfinite(phibar)) {
      throw SolverError(SolverError::Kind::NonFinite, "minres: non-finite value at iteration " + std::to_string(itn));
    }
    const double rel = (phibar / beta1) * (phibar / beta1);
    rep.residual_history.push_back(rel);
    rep.iterations = itn;
    if (rel <= rtol) {
      rep.converged = true;
      break;
    }
    if (singular || beta < 1e-14 * beta1) {
      throw SolverError(SolverError::Kind::Breakdown,
                        "minres: Lanczos breakdown at iteration " + std::to_string(itn) + " with relative residual " +
                            std::to_string(rel));
    }
  }

  if (!rep.lanczos_alpha.empty()) {
    std::vector<double> off(rep.lanczos_beta.begin(), rep.lanczos_beta.end() - 1);
    const auto ritz = tridiagonal_eigenvalues(rep.lanczos_alpha, off);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double t : ritz) {
      lo = std::min(lo, std::abs(t));
      hi = std::max(hi, std::abs(t));
    }
    rep.ritz_min = lo;
    rep.ritz_max = hi;
    rep.cond_estimate = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

using ColMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

template <class Solver>
LinearOp solver_operator(const SparseMat& mat, const std::string& name, const char* what) {
  auto solver = std::make_shared<Solver>();
  const ColMat cm = mat;
  solver->compute(cm);
  if (solver->info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::Factorization,
                      std::string("factorize: ") + what + " failed for block '" + name + "' (nonpositive pivot)");
  }
  const auto n = mat.rows();
  return LinearOp(
      n, n, [s = std::move(solver)](const Vec& in, Vec& out) { out = s->solve(in); }, true);
}

}  // namespace

LinearOp factorize(const SparseMat& mat, Definiteness kind, const std::string& name) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("factorize: square matrix required for " + name);
  if (kind == Definiteness::Spd) {
    return solver_operator<Eigen::SimplicialLLT<ColMat, Eigen::Lower, Eigen::AMDOrdering<int>>>(mat, name,
                                                                                                 "Cholesky");
  }
  return solver_operator<Eigen::SimplicialLDLT<ColMat, Eigen::Lower, Eigen::AMDOrdering<int>>>(mat, name, "LDL^T");
}

namespace {

struct Extremes {
  double min_abs = 0.0;
  double max_abs = 0.0;
  bool ok = false;
};

Extremes extremes_of(std::vector<double> ritz, int drop_null) {
  std::vector<double> mags;
  for (double t : ritz) mags.push_back(std::abs(t));
  std::sort(mags.begin(), mags.end());
  if (mags.size() <= static_cast<std::size_t>(drop_null)) return {};
  return {mags[static_cast<std::size_t>(drop_null)], mags.back(), true};
}

struct LanczosRun {
  std::vector<double> ritz;
  int steps = 0;
};

LanczosRun lanczos_probe(const LinearOp& a, const LinearOp& b, const ConditionOptions& opts, std::uint64_t seed) {
  const Eigen::Index n = a.rows();
  std::vector<char> excluded(static_cast<std::size_t>(n), 0);
  for (int i : opts.excluded) excluded[static_cast<std::size_t>(i)] = 1;
  const Eigen::Index free_dim = n - static_cast<Eigen::Index>(std::count(excluded.begin(), excluded.end(), 1));
  const int max_steps =
      opts.max_steps > 0 ? opts.max_steps : static_cast<int>(std::min<Eigen::Index>(free_dim, 1000));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec p(n);
  for (Eigen::Index i = 0; i < n; ++i) p[i] = excluded[static_cast<std::size_t>(i)] ? 0.0 : dist(rng);
  // z^T p = 0 keeps B p free of z in the B^{-1} inner product.
  auto deflate = [&](Vec& x) {
    for (const Vec& z : opts.deflate) x -= (z.dot(x) / z.squaredNorm()) * z;
  };
  deflate(p);
  const int drop = std::max(0, opts.drop_null - static_cast<int>(opts.deflate.size()));

  std::vector<Vec> vs, us;  // v = B u, v_i^T u_j = delta_ij
  std::vector<double> alpha, beta;
  Vec w = b(p);
  double bcur = std::sqrt(p.dot(w));
  if (!(bcur > 0.0)) throw SolverError(SolverError::Kind::Breakdown, "estimate_condition: degenerate start vector");
  vs.push_back(w / bcur);
  us.push_back(p / bcur);

  Extremes prev;
  int stable = 0;
  LanczosRun run;
  const double bscale = bcur;
  for (int k = 0; k < max_steps; ++k) {
    const Vec& v = vs.back();
    a.apply(v, p);
    const double al = v.dot(p);
    p -= al * us.back();
    if (k > 0) p -= beta.back() * us[us.size() - 2];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < vs.size(); ++j) p -= vs[j].dot(p) * us[j];
    }
    deflate(p);
    alpha.push_back(al);
    if (!std::isfinite(al)) throw SolverError(SolverError::Kind::NonFinite, "estimate_condition: non-finite Ritz data");
    w = b(p);
    const double bb = p.dot(w);
    const double bn = bb > 0.0 ? std::sqrt(bb) : 0.0;

    run.ritz = tridiagonal_eigenvalues(alpha, beta);
    run.steps = k + 1;
    const Extremes ex = extremes_of(run.ritz, drop);
    if (bn <= 1e-13 * bscale) return run;  // invariant subspace: Ritz values are exact
    if (prev.ok && ex.ok) {
      const double dmin = std::abs(ex.min_abs - prev.min_abs) / std::max(ex.min_abs, 1e-300);
      const double dmax = std::abs(ex.max_abs - prev.max_abs) / ex.max_abs;
      stable = (dmin < opts.stagnation_tol && dmax < opts.stagnation_tol) ? stable + 1 : 0;
      if (stable >= 3 && k >= 8 + drop) return run;
    }
    prev = ex;
    beta.push_back(bn);
    vs.push_back(w / bn);
    us.push_back(p / bn);
  }
  throw SolverError(SolverError::Kind::NotConverged,
                    "estimate_condition: Ritz values did not stagnate within " + std::to_string(max_steps) + " steps");
}

}  // namespace

ConditionEstimate estimate_condition(const LinearOp& a, const LinearOp& b, const ConditionOptions& opts) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols()) {
    throw std::invalid_argument("estimate_condition: operator sizes differ");
  }
  ConditionEstimate out;
  out.min_abs = std::numeric_limits<double>::infinity();
  for (int p = 0; p < std::max(1, opts.n_probe); ++p) {
    LanczosRun run = lanczos_probe(a, b, opts, opts.seed + static_cast<std::uint64_t>(p));
    const int drop = std::max(0, opts.drop_null - static_cast<int>(opts.deflate.size()));
    const Extremes ex = extremes_of(run.ritz, drop);
    if (!ex.ok) throw SolverError(SolverError::Kind::NotConverged, "estimate_condition: too few Ritz values");
    out.min_abs = std::min(out.min_abs, ex.min_abs);
    out.max_abs = std::max(out.max_abs, ex.max_abs);
    out.steps = std::max(out.steps, run.steps);
    if (p == 0) {
      std::vector<std::pair<double, double>> by_mag;
      for (double t : run.ritz) by_mag.emplace_back(std::abs(t), t);
      std::sort(by_mag.begin(), by_mag.end());
      for (std::size_t i = static_cast<std::size_t>(drop); i < by_mag.size(); ++i) {
        out.ritz_values.push_back(by_mag[i].second);
      }
      std::sort(out.ritz_values.begin(), out.ritz_values.end());
    }
  }
  out.cond = out.max_abs / out.min_abs;
  return out;
}

namespace {

DenseMat drop_indices(const DenseMat& m, const std::vector<int>& excluded) {
  if (excluded.empty()) return m;
  std::vector<char> ex(static_cast<std::size_t>(m.rows()), 0);
  for (int i : excluded) ex[static_cast<std::size_t>(i)] = 1;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!ex[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  DenseMat out(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace

std::vector<double> dense_eig_oracle(const DenseMat& a, const DenseMat& binv, const std::vector<int>& excluded) {
  if (a.rows() > kDenseOracleCap) {
    throw SolverError(SolverError::Kind::DimensionCap,
                      "dense_eig_oracle: dimension " + std::to_string(a.rows()) + " exceeds cap " +
                          std::to_string(kDenseOracleCap));
  }
  if (a.rows() != a.cols() || binv.rows() != a.rows() || binv.cols() != a.cols()) {
    throw std::invalid_argument("dense_eig_oracle: size mismatch");
  }
  const DenseMat ar = drop_indices(a, excluded);
  const DenseMat br = drop_indices(binv, excluded);
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat> es(ar, br, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) {
    throw SolverError(SolverError::Kind::Factorization, "dense_eig_oracle: Binv is not positive definite");
  }
  const Vec& ev = es.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> dense_eig_oracle(const SparseMat& a, const SparseMat& binv, const std::vector<int>& excluded) {
  if (a.rows() > kDenseOracleCap) {
    throw SolverError(SolverError::Kind::DimensionCap,
                      "dense_eig_oracle: dimension " + std::to_string(a.rows()) + " exceeds cap");
  }
  return dense_eig_oracle(DenseMat(a), DenseMat(binv), excluded);
}

}  // namespace biot
