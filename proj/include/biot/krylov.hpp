#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biot/sparse.hpp"

namespace biot {

/// Raised when the Lanczos process breaks down before convergence or when
/// the iteration produces non-finite numbers.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { Breakdown, NonFinite, NotConverged, Factorization, DimensionCap };
  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  /// (B r_k, r_k) / (B r_0, r_0), one entry per iteration (entry 0 is 1).
  std::vector<double> residual_history;
  /// Lanczos tridiagonal recorded during the solve.
  std::vector<double> lanczos_alpha;
  std::vector<double> lanczos_beta;
  double ritz_min = 0.0;  // smallest |theta|
  double ritz_max = 0.0;  // largest |theta|
  double cond_estimate = 0.0;
};

/// Flat JSON object: iterations, converged, cond_estimate, ritz_min, ritz_max, residual_history.
[[nodiscard]] std::string report_to_json(const SolveReport& report);

struct MinresResult {
  Vec x;
  SolveReport report;
};

/// Preconditioned MinRes for symmetric (possibly indefinite) A with symmetric
/// positive definite preconditioner B. Stops once
/// (B r_k, r_k) / (B r_0, r_0) <= rtol, or after max_iter iterations.
[[nodiscard]] MinresResult minres(const LinearOp& a, const LinearOp& b, const Vec& rhs, double rtol = 1e-6,
                                  int max_iter = 5000);

/// Ritz values of a symmetric tridiagonal matrix, sorted ascending.
[[nodiscard]] std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& alpha,
                                                          const std::vector<double>& offdiag);

enum class Definiteness { Spd, QuasiDefinite };

/// Exact solve through a sparse Cholesky (Spd) or LDL^T (QuasiDefinite)
/// factorization with fill-reducing ordering. `name` labels errors.
[[nodiscard]] LinearOp factorize(const SparseMat& mat, Definiteness kind = Definiteness::Spd,
                                 const std::string& name = "matrix");

struct ConditionOptions {
  int n_probe = 1;
  int drop_null = 0;
  int max_steps = 0;  // 0: min(free dimension, 1000)
  double stagnation_tol = 1e-10;
  std::uint64_t seed = 12345;
  /// Indices kept at zero in the start vector (decoupled constrained dofs).
  std::vector<int> excluded;
  /// Known kernel vectors of A, kept out of the Krylov space. Each one
  /// counts toward drop_null.
  std::vector<Vec> deflate;
};

struct ConditionEstimate {
  double cond = 0.0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  int steps = 0;
  /// Converged Ritz values sorted ascending (after dropping null modes).
  std::vector<double> ritz_values;
};

/// Lanczos with full reorthogonalization on BA in the B^{-1} inner product.
/// Runs until the extreme Ritz values stagnate, drops the `drop_null`
/// smallest-magnitude values and returns max|theta| / min|theta|.
[[nodiscard]] ConditionEstimate estimate_condition(const LinearOp& a, const LinearOp& b,
                                                   const ConditionOptions& opts = {});

/// Eigenvalues of A x = theta Binv x via dense symmetric-definite reduction.
/// Rows/columns listed in `excluded` are removed first. Sorted ascending.
[[nodiscard]] std::vector<double> dense_eig_oracle(const DenseMat& a, const DenseMat& binv,
                                                   const std::vector<int>& excluded = {});
[[nodiscard]] std::vector<double> dense_eig_oracle(const SparseMat& a, const SparseMat& binv,
                                                   const std::vector<int>& excluded = {});

/// max|theta| / min|theta| of a spectrum after dropping `drop_null` smallest magnitudes.
[[nodiscard]] double spectrum_condition(const std::vector<double>& eig, int drop_null = 0);

inline constexpr Eigen::Index kDenseOracleCap = 4000;

}  // namespace biot
