#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biot/systems.hpp"

namespace biot {

struct SweepConfig {
  CaseId case_id = CaseId::Case1;
  std::vector<int> n_list{8, 16, 32};
  std::vector<double> lambda_list{1.0};
  std::vector<double> alpha_list{1.0};
  std::vector<KappaSpec> kappa_list{KappaSpec{}};
  double rtol = 1e-6;
  int max_iter = 5000;
  bool estimate_cond = false;
  /// Relative Ritz-value change below which the condition estimate stops.
  double cond_tol = 1e-10;
  std::uint64_t seed = 0;
  MassInner qt_inner = MassInner::Jacobi;
  /// Accept parameters outside 1 <= lambda, 0 < alpha <= 1, 0 < kappa <= 1.
  bool allow_out_of_range = false;
  int threads = 1;

  /// Throws std::invalid_argument on empty lists or out-of-range values.
  void validate() const;
};

/// Flat JSON object with the SweepConfig fields. Kappa entries are numbers or
/// {"band": inner_value}. Missing fields keep their defaults.
[[nodiscard]] SweepConfig parse_sweep_config(const std::string& json_text);

struct ResultRow {
  std::string case_id;
  int n = 0;
  double lambda = 1.0;
  double alpha = 1.0;
  KappaSpec kappa;
  int iterations = 0;
  bool converged = false;
  std::optional<double> cond_estimate;
  double wall_time_ms = 0.0;
  long dof_count = 0;
  std::string error;  // empty unless the row failed

  bool operator==(const ResultRow&) const = default;
};

/// Grid points ordered N, alpha, lambda, kappa (outermost first). Axes a case
/// does not use (alpha outside the total-pressure cases, lambda for ex1) are
/// not swept. Rows come back in grid order regardless of `threads`.
[[nodiscard]] std::vector<ResultRow> run_sweep(const SweepConfig& config);

struct PointOptions {
  double rtol = 1e-6;
  int max_iter = 5000;
  bool estimate_cond = false;
  double cond_tol = 1e-10;
  std::uint64_t seed = 0;
};

/// Builds, fills the manufactured rhs, solves and optionally estimates cond(BA).
[[nodiscard]] ResultRow run_point(const CaseSpec& spec, const PointOptions& opts = {});

enum class TableFormat { Csv, Json, Markdown };
enum class TableLayout { Table1, Table2_3, Table4, Table6, Table7, Table8, Flat };

[[nodiscard]] TableFormat parse_format(const std::string& s);
[[nodiscard]] TableLayout parse_layout(const std::string& s);

/// Pivots rows into the chosen layout. JSON ignores the layout and always
/// emits the row list.
[[nodiscard]] std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format, TableLayout layout);
[[nodiscard]] std::vector<ResultRow> parse_rows_json(const std::string& text);

/// Load vector for f = (sin(pi x) sin(pi y), xy(1-x)(1-y)) and g = sin(pi x) y,
/// zero on constrained dofs, orthogonal to the null mode when there is one.
/// Each loaded field is scaled to an equal share of (B rhs, rhs) = 1. A nonzero
/// seed swaps in a uniform random vector.
[[nodiscard]] Vec manufactured_rhs(const BlockSystem& system, std::uint64_t seed = 0);

/// Writes A.mtx, rhs.mtx, the exact preconditioner blocks and manifest.json into `dir`.
void dump_system(const BlockSystem& system, const std::string& dir, const std::map<std::string, double>& params);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast structural checks on small meshes.
[[nodiscard]] std::vector<CheckResult> run_invariant_checks();

}  // namespace biot
