#include "biot/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace biot {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void write_matrix_market(const SparseMat& mat, std::ostream& out, MmSymmetry sym) {
  if (sym == MmSymmetry::Symmetric) {
    if (mat.rows() != mat.cols() || max_asymmetry(mat) != 0.0) {
      throw std::invalid_argument("write_matrix_market: symmetric format needs an exactly symmetric matrix");
    }
  }
  std::vector<Triplet> entries;
  for (int r = 0; r < mat.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(mat, r); it; ++it) {
      if (sym == MmSymmetry::Symmetric && it.col() > it.row()) continue;
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  out << "%%MatrixMarket matrix coordinate real " << (sym == MmSymmetry::Symmetric ? "symmetric" : "general")
      << '\n';
  out << mat.rows() << ' ' << mat.cols() << ' ' << entries.size() << '\n';
  out << std::setprecision(17);
  for (const auto& t : entries) out << t.row() + 1 << ' ' << t.col() + 1 << ' ' << t.value() << '\n';
}

void write_matrix_market(const SparseMat& mat, const std::string& path, MmSymmetry sym) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
  write_matrix_market(mat, f, sym);
}

SparseMat read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_matrix_market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw std::runtime_error("read_matrix_market: unsupported header '" + line + "'");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer") throw std::runtime_error("read_matrix_market: unsupported field " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw std::runtime_error("read_matrix_market: unsupported symmetry " + symmetry);
  }

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw std::runtime_error("read_matrix_market: bad size line '" + line + "'");
    }
  }
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error("read_matrix_market: truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols) throw std::runtime_error("read_matrix_market: index out of range");
    trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (symmetric && i != j) trip.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
  }
  SparseMat out(rows, cols);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMat read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_matrix_market: cannot open " + path);
  return read_matrix_market(f);
}

}  // namespace biot
