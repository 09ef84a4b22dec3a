#include "biot/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biot {

void LinearOp::apply(const Vec& in, Vec& out) const {
  if (!fn_) throw std::logic_error("LinearOp: apply on empty operator");
  if (in.size() != cols_) {
    throw std::invalid_argument("LinearOp: size mismatch (" + std::to_string(in.size()) + " vs " +
                                std::to_string(cols_) + ")");
  }
  fn_(in, out);
}

LinearOp as_operator(std::shared_ptr<const SparseMat> mat, bool symmetric) {
  const auto rows = mat->rows();
  const auto cols = mat->cols();
  return LinearOp(
      rows, cols, [m = std::move(mat)](const Vec& in, Vec& out) { out.noalias() = (*m) * in; }, symmetric);
}

LinearOp as_operator(const SparseMat& mat, bool symmetric) {
  return as_operator(std::make_shared<const SparseMat>(mat), symmetric);
}

LinearOp identity_operator(Eigen::Index n) {
  return LinearOp(n, n, [](const Vec& in, Vec& out) { out = in; }, true);
}

LinearOp diagonal_operator(Vec diag) {
  const auto n = diag.size();
  return LinearOp(
      n, n, [d = std::move(diag)](const Vec& in, Vec& out) { out = d.cwiseProduct(in); }, true);
}

LinearOp block_diagonal(std::vector<LinearOp> blocks) {
  Eigen::Index n = 0;
  bool sym = true;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw std::invalid_argument("block_diagonal: blocks must be square");
    n += b.rows();
    sym = sym && b.symmetric();
  }
  return LinearOp(
      n, n,
      [bs = std::move(blocks)](const Vec& in, Vec& out) {
        out.resize(in.size());
        Eigen::Index off = 0;
        Vec tmp;
        for (const auto& b : bs) {
          b.apply(in.segment(off, b.cols()), tmp);
          out.segment(off, b.rows()) = tmp;
          off += b.rows();
        }
      },
      sym);
}

DenseMat materialize(const LinearOp& op) {
  DenseMat out(op.rows(), op.cols());
  Vec e = Vec::Zero(op.cols());
  Vec col;
  for (Eigen::Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    out.col(j) = col;
    e[j] = 0.0;
  }
  return out;
}

SparseMat assemble_blocks(const std::vector<std::vector<std::optional<SparseMat>>>& blocks,
                          const std::vector<Eigen::Index>& row_sizes, const std::vector<Eigen::Index>& col_sizes) {
  Eigen::Index nr = 0, nc = 0;
  for (auto s : row_sizes) nr += s;
  for (auto s : col_sizes) nc += s;
  std::vector<Triplet> trip;
  Eigen::Index roff = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Eigen::Index coff = 0;
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      if (const auto& b = blocks[i][j]; b) {
        if (b->rows() != row_sizes[i] || b->cols() != col_sizes[j]) {
          throw std::invalid_argument("assemble_blocks: inconsistent block dimensions at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
        }
        for (int r = 0; r < b->outerSize(); ++r) {
          for (SparseMat::InnerIterator it(*b, r); it; ++it) {
            trip.emplace_back(static_cast<int>(roff + it.row()), static_cast<int>(coff + it.col()), it.value());
          }
        }
      }
      coff += col_sizes[j];
    }
    roff += row_sizes[i];
  }
  SparseMat out(nr, nc);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double max_asymmetry(const SparseMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("max_asymmetry: square matrix required");
  const SparseMat diff = a - SparseMat(a.transpose());
  double m = 0.0;
  for (int r = 0; r < diff.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(diff, r); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double max_abs_entry(const SparseMat& a) {
  double m = 0.0;
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMat::InnerIterator it(a, r); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

}  // namespace biot
