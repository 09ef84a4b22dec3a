#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace biot {

using Vec = Eigen::VectorXd;
using DenseMat = Eigen::MatrixXd;

/// Compressed sparse row storage; column indices sorted within each row.
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Type-erased linear map. Realized by matrices, factorization solves,
/// rank-one corrected operators and block-diagonal compositions.
class LinearOp {
 public:
  using ApplyFn = std::function<void(const Vec& in, Vec& out)>;

  LinearOp() = default;
  LinearOp(Eigen::Index rows, Eigen::Index cols, ApplyFn fn, bool symmetric)
      : rows_(rows), cols_(cols), fn_(std::move(fn)), symmetric_(symmetric) {}

  [[nodiscard]] Eigen::Index rows() const { return rows_; }
  [[nodiscard]] Eigen::Index cols() const { return cols_; }
  [[nodiscard]] bool symmetric() const { return symmetric_; }
  [[nodiscard]] bool valid() const { return static_cast<bool>(fn_); }

  void apply(const Vec& in, Vec& out) const;
  [[nodiscard]] Vec operator()(const Vec& in) const {
    Vec out;
    apply(in, out);
    return out;
  }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  ApplyFn fn_;
  bool symmetric_ = false;
};

[[nodiscard]] LinearOp as_operator(std::shared_ptr<const SparseMat> mat, bool symmetric);
[[nodiscard]] LinearOp as_operator(const SparseMat& mat, bool symmetric);
[[nodiscard]] LinearOp identity_operator(Eigen::Index n);
[[nodiscard]] LinearOp diagonal_operator(Vec diag);
[[nodiscard]] LinearOp block_diagonal(std::vector<LinearOp> blocks);

/// Dense image of op applied to the unit vectors.
[[nodiscard]] DenseMat materialize(const LinearOp& op);

/// Assemble a grid of optional blocks into one matrix. Missing blocks are zero.
[[nodiscard]] SparseMat assemble_blocks(const std::vector<std::vector<std::optional<SparseMat>>>& blocks,
                                        const std::vector<Eigen::Index>& row_sizes,
                                        const std::vector<Eigen::Index>& col_sizes);

/// max |A_ij - A_ji| over the stored pattern of a square matrix.
[[nodiscard]] double max_asymmetry(const SparseMat& a);
[[nodiscard]] double max_abs_entry(const SparseMat& a);

}  // namespace biot
