#include "biot/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/LU>
#include <json.hpp>

#include "biot/forms.hpp"
#include "biot/matrix_market.hpp"

namespace biot {

using nlohmann::json;

namespace {

bool is_biot(CaseId id) {
  return id == CaseId::Case1 || id == CaseId::Case2 || id == CaseId::Case3 || id == CaseId::Case4;
}

bool uses_lambda(CaseId id) { return id != CaseId::Ex1; }
bool uses_kappa(CaseId id) { return id != CaseId::Ex2a && id != CaseId::Ex2b; }

std::string num(double v) {
  if (v == 0.0) return "0";
  const double e = std::log10(std::abs(v));
  if (std::abs(e - std::round(e)) < 1e-12 && std::abs(e) >= 2) {
    std::ostringstream s;
    s << (v < 0 ? "-" : "") << "1e" << static_cast<int>(std::round(e));
    return s.str();
  }
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

void SweepConfig::validate() const {
  if (n_list.empty() || lambda_list.empty() || alpha_list.empty() || kappa_list.empty()) {
    throw std::invalid_argument("sweep config: N, lambda, alpha and kappa lists must be nonempty");
  }
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("sweep config: N must be >= 1");
  }
  if (!(rtol > 0.0) || max_iter < 1) throw std::invalid_argument("sweep config: rtol > 0 and max_iter >= 1 required");
  if (!(cond_tol > 0.0)) throw std::invalid_argument("sweep config: cond_tol must be positive");
  if (threads < 1) throw std::invalid_argument("sweep config: threads must be >= 1");
  for (const auto& k : kappa_list) {
    if (k.band && !is_biot(case_id)) throw std::invalid_argument("sweep config: kappa bands need a total-pressure case");
  }
  if (allow_out_of_range) return;
  if (uses_lambda(case_id)) {
    for (double l : lambda_list) {
      if (!(l >= 1.0)) throw std::invalid_argument("sweep config: lambda = " + num(l) + " < 1");
    }
  }
  if (is_biot(case_id)) {
    for (double a : alpha_list) {
      if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("sweep config: alpha = " + num(a) + " outside (0, 1]");
    }
  }
  if (uses_kappa(case_id)) {
    const double lo = case_id == CaseId::Ex1 ? 0.0 : std::numeric_limits<double>::min();
    for (const auto& k : kappa_list) {
      if (!(k.value >= lo && k.value <= 1.0)) {
        throw std::invalid_argument("sweep config: kappa = " + num(k.value) + " outside the admissible range");
      }
    }
  }
}

SweepConfig parse_sweep_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("sweep config: top-level JSON object expected");
  SweepConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "case") {
        c.case_id = parse_case(v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>()));
      } else if (key == "N_list") {
        c.n_list = v.get<std::vector<int>>();
      } else if (key == "lambda_list") {
        c.lambda_list = v.get<std::vector<double>>();
      } else if (key == "alpha_list") {
        c.alpha_list = v.get<std::vector<double>>();
      } else if (key == "kappa_list") {
        c.kappa_list.clear();
        for (const auto& e : v) {
          if (e.is_object()) {
            c.kappa_list.push_back(KappaSpec{e.at("band").get<double>(), true});
          } else {
            c.kappa_list.push_back(KappaSpec{e.get<double>(), false});
          }
        }
      } else if (key == "rtol") {
        c.rtol = v.get<double>();
      } else if (key == "max_iter") {
        c.max_iter = v.get<int>();
      } else if (key == "estimate_cond") {
        c.estimate_cond = v.get<bool>();
      } else if (key == "cond_tol") {
        c.cond_tol = v.get<double>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "qt_inner") {
        const auto s = v.get<std::string>();
        if (s == "jacobi") {
          c.qt_inner = MassInner::Jacobi;
        } else if (s == "mass") {
          c.qt_inner = MassInner::ExactMass;
        } else {
          throw std::invalid_argument("sweep config: qt_inner must be jacobi or mass");
        }
      } else if (key == "allow_out_of_range") {
        c.allow_out_of_range = v.get<bool>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else {
        throw std::invalid_argument("sweep config: unknown field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

Vec manufactured_rhs(const BlockSystem& system, std::uint64_t seed) {
  Vec rhs = Vec::Zero(system.size());
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs[i] = dist(rng);
  } else {
    constexpr double pi = std::numbers::pi;
    for (const auto& f : system.fields) {
      Vec part;
      if (f.role == FieldRole::Displacement) {
        part = assemble_load(*f.space, [](const Point& p) -> std::array<double, 2> {
          return {std::sin(pi * p.x) * std::sin(pi * p.y), p.x * p.y * (1.0 - p.x) * (1.0 - p.y)};
        });
      } else if (f.role == FieldRole::FluidPressure || f.role == FieldRole::Pressure) {
        part = assemble_load(*f.space, [](const Point& p) { return std::sin(pi * p.x) * p.y; });
      } else {
        continue;
      }
      rhs.segment(f.offset, f.size) = part;
    }
  }
  for (int d : system.constrained()) rhs[d] = 0.0;
  if (system.null_mode) rhs -= system.null_mode->dot(rhs) * *system.null_mode;
  // Every loaded field gets the same share of the B-norm.
  std::vector<std::pair<const Field*, double>> loaded;
  for (std::size_t i = 0; i < system.fields.size(); ++i) {
    const Field& f = system.fields[i];
    const Vec seg = rhs.segment(f.offset, f.size);
    const double n2 = system.precond_blocks[i].op(seg).dot(seg);
    if (n2 > 0.0) loaded.emplace_back(&f, n2);
  }
  for (const auto& [f, n2] : loaded) {
    rhs.segment(f->offset, f->size) /= std::sqrt(n2 * static_cast<double>(loaded.size()));
  }
  return rhs;
}

ResultRow run_point(const CaseSpec& spec, const PointOptions& po) {
  ResultRow row;
  row.case_id = case_name(spec.id);
  row.n = spec.n;
  row.lambda = spec.lambda;
  row.alpha = spec.alpha;
  row.kappa = spec.kappa;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    BlockSystem sys = build_case(spec);
    row.dof_count = static_cast<long>(sys.size());
    sys.rhs = manufactured_rhs(sys, po.seed);
    const LinearOp a = sys.op();
    const LinearOp b = sys.preconditioner();
    const MinresResult res = minres(a, b, sys.rhs, po.rtol, po.max_iter);
    row.iterations = res.report.iterations;
    row.converged = res.report.converged;
    if (po.estimate_cond) {
      ConditionOptions opts;
      opts.stagnation_tol = po.cond_tol;
      opts.drop_null = sys.drop_null;
      opts.excluded = sys.constrained();
      if (sys.null_mode) opts.deflate.push_back(*sys.null_mode);
      row.cond_estimate = estimate_condition(a, b, opts).cond;
    }
  } catch (const std::exception& e) {
    row.converged = false;
    row.error = e.what();
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::vector<ResultRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const std::vector<double> one{1.0};
  const auto& alphas = is_biot(config.case_id) ? config.alpha_list : one;
  const auto& lambdas = uses_lambda(config.case_id) ? config.lambda_list : one;
  const std::vector<KappaSpec> no_kappa{KappaSpec{}};
  const auto& kappas = uses_kappa(config.case_id) ? config.kappa_list : no_kappa;

  std::vector<CaseSpec> grid;
  for (int n : config.n_list) {
    for (double a : alphas) {
      for (double l : lambdas) {
        for (const auto& k : kappas) {
          CaseSpec s;
          s.id = config.case_id;
          s.n = n;
          s.lambda = l;
          s.alpha = a;
          s.kappa = k;
          s.qt_inner = config.qt_inner;
          grid.push_back(s);
        }
      }
    }
  }

  const PointOptions po{config.rtol, config.max_iter, config.estimate_cond, config.cond_tol, config.seed};
  std::vector<ResultRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rows[i] = run_point(grid[i], po);
    }
  };
  const int nt = std::min<int>(config.threads, static_cast<int>(grid.size()));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  if (s == "md" || s == "markdown") return TableFormat::Markdown;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv|json|md)");
}

TableLayout parse_layout(const std::string& s) {
  static const std::map<std::string, TableLayout> names{
      {"Table1", TableLayout::Table1}, {"Table2_3", TableLayout::Table2_3}, {"Table4", TableLayout::Table4},
      {"Table6", TableLayout::Table6}, {"Table7", TableLayout::Table7},     {"Table8", TableLayout::Table8},
      {"Flat", TableLayout::Flat}};
  const auto it = names.find(s);
  if (it == names.end()) throw std::invalid_argument("unknown layout '" + s + "'");
  return it->second;
}

namespace {

json row_to_json(const ResultRow& r) {
  json j;
  j["case"] = r.case_id;
  j["N"] = r.n;
  j["lambda"] = r.lambda;
  j["alpha"] = r.alpha;
  j["kappa"] = r.kappa.value;
  j["kappa_band"] = r.kappa.band;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["cond_estimate"] = r.cond_estimate ? json(*r.cond_estimate) : json(nullptr);
  j["wall_time_ms"] = r.wall_time_ms;
  j["dof_count"] = r.dof_count;
  j["error"] = r.error;
  return j;
}

ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.case_id = j.at("case").get<std::string>();
  r.n = j.at("N").get<int>();
  r.lambda = j.at("lambda").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.kappa = KappaSpec{j.at("kappa").get<double>(), j.at("kappa_band").get<bool>()};
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  if (!j.at("cond_estimate").is_null()) r.cond_estimate = j.at("cond_estimate").get<double>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.dof_count = j.at("dof_count").get<long>();
  r.error = j.at("error").get<std::string>();
  return r;
}

std::string cell_text(const ResultRow& r, bool with_cond) {
  if (!r.error.empty()) return "error";
  std::ostringstream s;
  s << (r.converged ? "" : ">") << r.iterations;
  if (with_cond && r.cond_estimate) s << " (" << std::fixed << std::setprecision(1) << *r.cond_estimate << ")";
  return s.str();
}

// A pivot key part: numeric value (for ordering) plus its display text.
struct KeyPart {
  double order;
  std::string text;
  bool operator<(const KeyPart& o) const { return order < o.order; }
  bool operator==(const KeyPart& o) const { return order == o.order && text == o.text; }
};
using Key = std::vector<KeyPart>;

struct Pivot {
  std::vector<std::string> row_headers;
  std::string col_axis;
  bool with_cond = true;
  std::function<Key(const ResultRow&)> row_key;
  std::function<Key(const ResultRow&)> col_key;
};

KeyPart by_n(const ResultRow& r) { return {static_cast<double>(r.n), std::to_string(r.n)}; }
KeyPart by_lambda(const ResultRow& r) { return {r.lambda, num(r.lambda)}; }
KeyPart by_alpha_desc(const ResultRow& r) { return {-r.alpha, num(r.alpha)}; }
KeyPart by_kappa_desc(const ResultRow& r) { return {-r.kappa.value, num(r.kappa.value)}; }
KeyPart by_case(const ResultRow& r) {
  return {static_cast<double>(static_cast<int>(parse_case(r.case_id))), "Case " + r.case_id};
}

Pivot pivot_for(TableLayout layout) {
  Pivot p;
  switch (layout) {
    case TableLayout::Table1:
      p.row_headers = {"kappa"};
      p.col_axis = "N";
      p.row_key = [](const ResultRow& r) { return Key{by_kappa_desc(r)}; };
      p.col_key = [](const ResultRow& r) { return Key{by_n(r)}; };
      break;
    case TableLayout::Table2_3:
      p.row_headers = {"lambda"};
      p.col_axis = "N";
      p.row_key = [](const ResultRow& r) { return Key{by_lambda(r)}; };
      p.col_key = [](const ResultRow& r) { return Key{by_n(r)}; };
      break;
    case TableLayout::Table4:
      p.row_headers = {"N", "lambda"};
      p.col_axis = "kappa";
      p.with_cond = false;
      p.row_key = [](const ResultRow& r) { return Key{by_n(r), by_lambda(r)}; };
      p.col_key = [](const ResultRow& r) { return Key{by_kappa_desc(r)}; };
      break;
    case TableLayout::Table6:
    case TableLayout::Table8:
      p.row_headers = {"N", "alpha", "lambda"};
      p.col_axis = layout == TableLayout::Table8 ? "kappa on band" : "kappa";
      p.row_key = [](const ResultRow& r) { return Key{by_n(r), by_alpha_desc(r), by_lambda(r)}; };
      p.col_key = [](const ResultRow& r) { return Key{by_kappa_desc(r)}; };
      break;
    case TableLayout::Table7:
      p.row_headers = {"kappa", "alpha", "lambda"};
      p.col_axis = "case / N";
      p.with_cond = false;
      p.row_key = [](const ResultRow& r) { return Key{by_kappa_desc(r), by_alpha_desc(r), by_lambda(r)}; };
      p.col_key = [](const ResultRow& r) { return Key{by_case(r), by_n(r)}; };
      break;
    case TableLayout::Flat:
      break;
  }
  return p;
}

std::string key_label(const Key& k) {
  std::string s;
  for (const auto& part : k) s += (s.empty() ? "" : " ") + part.text;
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string emit_flat(const std::vector<ResultRow>& rows, TableFormat format) {
  const std::vector<std::string> head{"case",       "N",            "lambda",    "alpha", "kappa", "kappa_band",
                                      "iterations", "converged",    "cond",      "wall_time_ms", "dof_count",
                                      "error"};
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    std::ostringstream cond, wall;
    if (r.cond_estimate) cond << std::setprecision(6) << *r.cond_estimate;
    wall << std::fixed << std::setprecision(1) << r.wall_time_ms;
    body.push_back({r.case_id, std::to_string(r.n), num(r.lambda), num(r.alpha), num(r.kappa.value),
                    r.kappa.band ? "1" : "0", std::to_string(r.iterations), r.converged ? "1" : "0",
                    r.cond_estimate ? cond.str() : "—", wall.str(), std::to_string(r.dof_count), r.error});
  }
  std::ostringstream out;
  if (format == TableFormat::Csv) {
    for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i];
    out << "\n";
    for (const auto& b : body) {
      for (std::size_t i = 0; i < b.size(); ++i) out << (i ? "," : "") << csv_escape(b[i]);
      out << "\n";
    }
  } else {
    out << "|";
    for (const auto& h : head) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < head.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& b : body) {
      out << "|";
      for (const auto& c : b) out << " " << c << " |";
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format, TableLayout layout) {
  if (format == TableFormat::Json) {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(row_to_json(r));
    return arr.dump(2) + "\n";
  }
  if (layout == TableLayout::Flat) return emit_flat(rows, format);

  const Pivot p = pivot_for(layout);
  std::vector<Key> rkeys, ckeys;
  std::map<std::pair<std::size_t, std::size_t>, const ResultRow*> cells;
  auto index_of = [](std::vector<Key>& keys, const Key& k) {
    auto it = std::find(keys.begin(), keys.end(), k);
    if (it != keys.end()) return static_cast<std::size_t>(it - keys.begin());
    keys.push_back(k);
    return keys.size() - 1;
  };
  for (const auto& r : rows) {
    index_of(rkeys, p.row_key(r));
    index_of(ckeys, p.col_key(r));
  }
  std::stable_sort(rkeys.begin(), rkeys.end());
  std::stable_sort(ckeys.begin(), ckeys.end());
  for (const auto& r : rows) cells[{index_of(rkeys, p.row_key(r)), index_of(ckeys, p.col_key(r))}] = &r;

  std::vector<std::string> head = p.row_headers;
  for (const auto& c : ckeys) head.push_back(key_label(c));
  std::ostringstream out;
  const char* sep = format == TableFormat::Csv ? "," : " | ";
  auto line = [&](const std::vector<std::string>& cols) {
    if (format == TableFormat::Markdown) out << "| ";
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? sep : "") << (format == TableFormat::Csv ? csv_escape(cols[i]) : cols[i]);
    }
    out << (format == TableFormat::Markdown ? " |\n" : "\n");
  };
  if (format == TableFormat::Markdown) out << "Columns: " << p.col_axis << "\n\n";
  line(head);
  if (format == TableFormat::Markdown) {
    out << "|";
    for (std::size_t i = 0; i < head.size(); ++i) out << "---|";
    out << "\n";
  }
  for (std::size_t i = 0; i < rkeys.size(); ++i) {
    std::vector<std::string> cols;
    bool same_prefix = i > 0;
    for (std::size_t k = 0; k < rkeys[i].size(); ++k) {
      same_prefix = same_prefix && rkeys[i][k] == rkeys[i - 1][k];
      const bool blank = format == TableFormat::Markdown && same_prefix && k + 1 < rkeys[i].size();
      cols.push_back(blank ? "" : rkeys[i][k].text);
    }
    for (std::size_t j = 0; j < ckeys.size(); ++j) {
      const auto it = cells.find({i, j});
      cols.push_back(it == cells.end() ? "—" : cell_text(*it->second, p.with_cond));
    }
    line(cols);
  }
  return out.str();
}

std::vector<ResultRow> parse_rows_json(const std::string& text) {
  std::vector<ResultRow> rows;
  try {
    for (const auto& j : json::parse(text)) rows.push_back(row_from_json(j));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("parse_rows_json: ") + e.what());
  }
  return rows;
}

void dump_system(const BlockSystem& system, const std::string& dir, const std::map<std::string, double>& params) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  json manifest;
  manifest["case"] = system.case_id;
  manifest["dimension"] = system.size();
  manifest["drop_null"] = system.drop_null;
  manifest["parameters"] = json(params);
  manifest["matrix"] = "A.mtx";
  write_matrix_market(system.matrix(), (root / "A.mtx").string(), MmSymmetry::Symmetric);

  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < system.rhs.size(); ++i) {
    if (system.rhs[i] != 0.0) t.emplace_back(static_cast<int>(i), 0, system.rhs[i]);
  }
  SparseMat rhs(system.size(), 1);
  rhs.setFromTriplets(t.begin(), t.end());
  write_matrix_market(rhs, (root / "rhs.mtx").string());
  manifest["rhs"] = "rhs.mtx";

  json fields = json::array();
  for (std::size_t i = 0; i < system.fields.size(); ++i) {
    const auto& f = system.fields[i];
    json jf;
    jf["name"] = f.name;
    jf["offset"] = f.offset;
    jf["size"] = f.size;
    jf["element"] = family_name(f.space->family());
    jf["constrained"] = f.constrained;
    const auto& pb = system.precond_blocks[i];
    jf["preconditioner"] = pb.description;
    if (pb.inverse_of) {
      const std::string file = "P_" + f.name + ".mtx";
      write_matrix_market(*pb.inverse_of, (root / file).string(), MmSymmetry::Symmetric);
      jf["preconditioner_inverts"] = file;
    }
    fields.push_back(jf);
  }
  manifest["fields"] = fields;
  std::ofstream out(root / "manifest.json");
  if (!out) throw std::runtime_error("dump_system: cannot write " + (root / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

std::vector<CheckResult> run_invariant_checks() {
  std::vector<CheckResult> out;
  auto record = [&](const std::string& name, auto&& body) {
    CheckResult c{name, false, ""};
    try {
      std::tie(c.passed, c.detail) = body();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(c);
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s << std::setprecision(3) << v;
    return s.str();
  };

  record("mean vector identities", [&] {
    double worst = 0.0;
    for (Family fam : {Family::P1, Family::P2}) {
      for (int n : {1, 2, 4, 8}) {
        auto q = make_space(build_unit_square(n, BcPreset::AllDirichlet), fam, 1);
        const MeanVector mv = build_mean_vector(*q);
        const Vec mw = assemble_mass(*q) * Vec::Ones(q->n_dofs());
        worst = std::max(worst, (mw - mv.omega_sqrt * mv.m).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(mv.m.sum() - mv.omega_sqrt));
      }
    }
    return std::pair{worst <= 1e-13, "max error " + fmt(worst)};
  });

  record("monolithic symmetry", [&] {
    double worst = 0.0;
    for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4, CaseId::Ex1, CaseId::Ex2a,
                      CaseId::Ex2b, CaseId::Ex3}) {
      CaseSpec s;
      s.id = id;
      s.n = 4;
      s.lambda = 1e8;
      s.alpha = 1e-4;
      s.kappa.value = id == CaseId::Ex1 ? 0.0 : 1e-12;
      const BlockSystem sys = build_case(s);
      worst = std::max(worst, max_asymmetry(sys.matrix()) / max_abs_entry(sys.matrix()));
    }
    return std::pair{worst <= 1e-13, "max relative asymmetry " + fmt(worst)};
  });

  record("MinRes agrees with a direct solve", [&] {
    double worst = 0.0;
    bool monotone = true;
    for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case4, CaseId::Ex2b}) {
      CaseSpec s;
      s.id = id;
      s.n = 4;
      s.lambda = 1e4;
      s.kappa.value = 1e-4;
      BlockSystem sys = build_case(s);
      sys.rhs = manufactured_rhs(sys);
      const auto res = minres(sys.op(), sys.preconditioner(), sys.rhs, 1e-10);
      const DenseMat a = DenseMat(sys.matrix());
      const Vec exact = a.partialPivLu().solve(sys.rhs);
      const Vec d = sys.op()(res.x - exact);
      worst = std::max(worst, std::sqrt(d.dot(sys.preconditioner()(d))));
      const auto& h = res.report.residual_history;
      for (std::size_t i = 1; i < h.size(); ++i) monotone = monotone && h[i] <= h[i - 1] * (1 + 1e-12);
    }
    return std::pair{worst <= 1e-4 && monotone,
                     "max B-residual of the difference " + fmt(worst) + (monotone ? "" : ", non-monotone history")};
  });

  record("rank-one preconditioner lambda invariance", [&] {
    auto q = make_space(build_unit_square(4, BcPreset::AllDirichlet), Family::P1, 1);
    auto mass = std::make_shared<const SparseMat>(assemble_mass(*q));
    const MeanVector mv = build_mean_vector(*q);
    std::vector<double> conds;
    for (double lambda : {1.0, 1e4, 1e8}) {
      auto r = std::make_shared<const RankOneMass>(mass, mv, lambda);
      const DenseMat ml = materialize(mlambda_operator(r));
      const DenseMat binv = materialize(build_QT_preconditioner(r, MassInner::Jacobi, Family::P1)).inverse();
      conds.push_back(spectrum_condition(dense_eig_oracle(ml, 0.5 * (binv + binv.transpose()))));
    }
    const double spread = (*std::max_element(conds.begin(), conds.end()) -
                           *std::min_element(conds.begin(), conds.end())) / conds[0];
    return std::pair{spread <= 1e-6, "relative spread " + fmt(spread)};
  });

  return out;
}

}  // namespace biot
