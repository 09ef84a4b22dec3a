#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "biot/forms.hpp"
#include "biot/matrix_market.hpp"
#include "biot/sparse.hpp"

using namespace biot;

namespace {

SparseMat from_dense(const DenseMat& d) { return d.sparseView(); }

Vec random_vec(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

TEST(LinearOp, Linearity) {
  auto q = make_space(build_unit_square(4, BcPreset::AllDirichlet), Family::P2, 1);
  const LinearOp op = as_operator(assemble_mass(*q), true);
  const Vec x = random_vec(op.cols(), 1), y = random_vec(op.cols(), 2);
  const Vec lhs = op(2.5 * x - 0.75 * y);
  const Vec rhs = 2.5 * op(x) - 0.75 * op(y);
  EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(LinearOp, BlockDiagonalAndMaterialize) {
  const LinearOp op = block_diagonal({diagonal_operator(Vec::Constant(2, 3.0)), identity_operator(3)});
  EXPECT_EQ(op.rows(), 5);
  DenseMat expected = DenseMat::Identity(5, 5);
  expected(0, 0) = expected(1, 1) = 3.0;
  EXPECT_EQ((materialize(op) - expected).norm(), 0.0);
}

TEST(LinearOp, SizeMismatchThrows) {
  const LinearOp op = identity_operator(3);
  Vec out;
  EXPECT_THROW(op.apply(Vec::Ones(4), out), std::invalid_argument);
}

TEST(Blocks, AssembleWithMissingBlocks) {
  DenseMat a(2, 2);
  a << 1, 2, 2, 5;
  DenseMat b(1, 2);
  b << 7, 8;
  std::vector<std::vector<std::optional<SparseMat>>> grid(2, std::vector<std::optional<SparseMat>>(2));
  grid[0][0] = from_dense(a);
  grid[1][0] = from_dense(b);
  grid[0][1] = SparseMat(from_dense(b).transpose());
  const DenseMat full(assemble_blocks(grid, {2, 1}, {2, 1}));
  DenseMat expected(3, 3);
  expected << 1, 2, 7, 2, 5, 8, 7, 8, 0;
  EXPECT_EQ((full - expected).norm(), 0.0);
  EXPECT_EQ(max_asymmetry(from_dense(full)), 0.0);
  EXPECT_EQ(max_abs_entry(from_dense(full)), 8.0);
}

TEST(Blocks, AsymmetryMeasured) {
  DenseMat a(2, 2);
  a << 1, 2, 2.5, 1;
  EXPECT_DOUBLE_EQ(max_asymmetry(from_dense(a)), 0.5);
}

TEST(MatrixMarket, GeneralRoundTrip) {
  auto mesh = build_unit_square(2, BcPreset::AllDirichlet);
  const SparseMat b = assemble_div(*make_space(mesh, Family::P2, 2), *make_space(mesh, Family::P1, 1));
  std::stringstream s;
  write_matrix_market(b, s);
  EXPECT_EQ(s.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  const SparseMat back = read_matrix_market(s);
  EXPECT_EQ(back.rows(), b.rows());
  EXPECT_EQ(back.cols(), b.cols());
  EXPECT_EQ(max_abs_entry(SparseMat(back - b)), 0.0);
}

TEST(MatrixMarket, SymmetricRoundTrip) {
  auto q = make_space(build_unit_square(3, BcPreset::AllDirichlet), Family::P2, 1);
  const SparseMat m = assemble_mass(*q);
  std::stringstream s;
  write_matrix_market(m, s, MmSymmetry::Symmetric);
  EXPECT_NE(s.str().find("symmetric"), std::string::npos);
  const SparseMat back = read_matrix_market(s);
  EXPECT_EQ(max_abs_entry(SparseMat(back - m)), 0.0);
}

TEST(MatrixMarket, SymmetricRequiresSymmetricInput) {
  DenseMat a(2, 2);
  a << 1, 2, 3, 4;
  std::stringstream s;
  EXPECT_THROW(write_matrix_market(from_dense(a), s, MmSymmetry::Symmetric), std::invalid_argument);
}

TEST(MatrixMarket, RejectsMalformed) {
  std::stringstream bad_header("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  EXPECT_THROW((void)read_matrix_market(bad_header), std::runtime_error);
  std::stringstream out_of_range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
  EXPECT_THROW((void)read_matrix_market(out_of_range), std::runtime_error);
  std::stringstream truncated("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n");
  EXPECT_THROW((void)read_matrix_market(truncated), std::runtime_error);
}

TEST(MatrixMarket, ReadsComments) {
  std::stringstream s("%%MatrixMarket matrix coordinate real symmetric\n% note\n2 2 2\n1 1 4\n2 1 -1\n");
  const DenseMat d(read_matrix_market(s));
  DenseMat expected(2, 2);
  expected << 4, -1, -1, 0;
  EXPECT_EQ((d - expected).norm(), 0.0);
}
