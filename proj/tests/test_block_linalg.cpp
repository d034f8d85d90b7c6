#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"

using namespace pdmm;
using namespace pdmm::testing;

TEST(BlockPartition, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(BlockPartition({}, {1}), DimensionError);
  EXPECT_THROW(BlockPartition({1}, {}), DimensionError);
  EXPECT_THROW(BlockPartition({0}, {1}), DimensionError);
  EXPECT_THROW(BlockPartition({2}, {1, -1}), DimensionError);
}

TEST(BlockVector, LengthMatchesSizes) {
  EXPECT_THROW(BlockVector({2, 3}, Vec::Zero(4)), DimensionError);
  BlockVector v({2, 3});
  EXPECT_EQ(v.size(), 5);
  v.block(1)[2] = 7.0;
  EXPECT_EQ(v.data()[4], 7.0);
  EXPECT_EQ(v.offset(1), 2);
}

TEST(BlockVector, ArithmeticRequiresConformingPartitions) {
  BlockVector a({2, 1}), b({1, 2});
  EXPECT_THROW(a += b, DimensionError);
}

TEST(BlockMatrix, SetBlockChecksShape) {
  BlockMatrix A(BlockPartition({2}, {3}));
  EXPECT_THROW(A.set_block(0, 0, Block::dense(Mat::Zero(3, 2))), DimensionError);
  EXPECT_THROW(A.set_block(1, 0, Block::identity(2)), DimensionError);
  EXPECT_THROW(A.set_block(0, 0, Block::identity(2)), DimensionError);
}

TEST(BlockMatrix, DegreeCountsStoredBlocks) {
  BlockMatrix A(BlockPartition({2, 2}, {2, 2, 2}));
  A.set_block(0, 0, Block::identity(2));
  A.set_block(0, 2, Block::identity(2));
  A.set_block(1, 1, Block::identity(2));
  EXPECT_EQ(A.degrees(), (std::vector<int>{2, 1}));
  EXPECT_EQ(A.row_pattern(0), (std::vector<int>{0, 2}));
  EXPECT_EQ(A.col_pattern(1), (std::vector<int>{1}));
  EXPECT_EQ(A.block(0, 1), nullptr);
}

TEST(BlockMatrix, EmptyRowRejected) {
  BlockMatrix A(BlockPartition({1, 1}, {1}));
  A.set_block(0, 0, Block::identity(1));
  EXPECT_THROW(A.require_no_empty_rows(), ValidationError);
}

TEST(RowBlockApply, ScalarBlock) {
  BlockMatrix A(BlockPartition({1}, {1}));
  A.set_block(0, 0, Block::dense(Mat::Constant(1, 1, 2.0)));
  BlockVector x({1}, Vec::Constant(1, 3.0));
  EXPECT_EQ(A.row_block_apply(x, 0)[0], 6.0);
}

TEST(RowBlockApply, AbsentBlockSkipped) {
  BlockMatrix A(BlockPartition({2}, {2, 2, 2}));
  A.set_block(0, 0, Block::identity(2));
  A.set_block(0, 2, Block::identity(2));
  Vec d(6);
  d << 1, 0, 9, 9, 0, 1;
  const Vec r = A.row_block_apply(BlockVector({2, 2, 2}, d), 0);
  EXPECT_EQ(r, Vec::Ones(2));
}

TEST(RowBlockApply, PartitionMismatchThrows) {
  BlockMatrix A(BlockPartition({2}, {2}));
  A.set_block(0, 0, Block::identity(2));
  EXPECT_THROW(A.row_block_apply(BlockVector({3}), 0), DimensionError);
}

TEST(RowBlockApply, MatchesDenseProduct) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BlockMatrix A = random_block_matrix(rng, 3, 3, 4);
    const BlockVector x = random_block_vector(rng, A.partition().col_sizes);
    const Vec dense = A.to_dense() * x.data();
    Vec stacked(dense.size());
    Index off = 0;
    for (int i = 0; i < 3; ++i) {
      const Vec r = A.row_block_apply(x, i);
      stacked.segment(off, r.size()) = r;
      off += r.size();
    }
    EXPECT_LE((stacked - dense).norm(), 1e-12 * std::max(1.0, dense.norm()));
  }
}

TEST(BlockMatrix, TransposeMatchesDense) {
  std::mt19937_64 rng(12);
  const BlockMatrix A = random_block_matrix(rng, 4, 3, 3);
  const BlockVector y = random_block_vector(rng, A.partition().row_sizes);
  EXPECT_LE((A.apply_transpose(y).data() - A.to_dense().transpose() * y.data()).norm(), 1e-12);
}

TEST(Block, StructuredKindsMatchDense) {
  std::mt19937_64 rng(13);
  const Block id = Block::identity(3, -2.0);
  const Block sel = Block::selection(5, {4, 0, 2}, -1.0);
  for (const Block* b : {&id, &sel}) {
    const Mat D = b->to_dense();
    const Vec x = random_vector(rng, b->cols());
    const Vec y = random_vector(rng, b->rows());
    EXPECT_LE((b->apply(x) - D * x).norm(), 1e-14);
    EXPECT_LE((b->apply_transpose(y) - D.transpose() * y).norm(), 1e-14);
    EXPECT_LE((b->gram() - D.transpose() * D).norm(), 1e-14);
  }
  EXPECT_THROW(Block::selection(3, {3}), DimensionError);
}

TEST(ColumnSpectralBound, Identity) {
  BlockMatrix A(BlockPartition({3}, {3}));
  A.set_block(0, 0, Block::identity(3));
  EXPECT_DOUBLE_EQ(A.column_spectral_bound(0), 1.0);
}

TEST(ColumnSpectralBound, Diagonal) {
  BlockMatrix A(BlockPartition({2}, {2}));
  Mat D(2, 2);
  D << 2, 0, 0, 1;
  A.set_block(0, 0, Block::dense(D));
  EXPECT_NEAR(A.column_spectral_bound(0), 4.0, 1e-12);
}

TEST(ColumnSpectralBound, MatchesDenseEigensolver) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    BlockMatrix A(BlockPartition({3, 3}, {4}));
    A.set_block(0, 0, Block::dense(random_matrix(rng, 3, 4)));
    A.set_block(1, 0, Block::dense(random_matrix(rng, 3, 4)));
    const Mat C = A.to_dense();
    Eigen::SelfAdjointEigenSolver<Mat> es(C.transpose() * C);
    EXPECT_NEAR(A.column_spectral_bound(0), es.eigenvalues().maxCoeff(), 1e-8 * es.eigenvalues().maxCoeff());
  }
}

TEST(ColumnSpectralBound, PowerIterationOnLargeBlock) {
  std::mt19937_64 rng(22);
  BlockMatrix A(BlockPartition({120}, {80}));
  A.set_block(0, 0, Block::dense(random_matrix(rng, 120, 80)));
  const Mat C = A.to_dense();
  Eigen::SelfAdjointEigenSolver<Mat> es(C.transpose() * C);
  EXPECT_NEAR(A.column_spectral_bound(0), es.eigenvalues().maxCoeff(), 1e-7 * es.eigenvalues().maxCoeff());
}

TEST(QuadraticForm, ConstantBlocksVanish) {
  BlockMatrix A(BlockPartition({2}, {2, 2, 2}));
  for (int j = 0; j < 3; ++j) A.set_block(0, j, Block::identity(2));
  ZVector z(A);
  for (size_t k = 0; k < 3; ++k) z.entry(0, k) = Vec::Constant(2, 1.5);
  EXPECT_NEAR(build_Q(A)(z), 0.0, 1e-14);
}

TEST(QuadraticForm, SingleEntryInDegreeTwoRow) {
  BlockMatrix A(BlockPartition({2}, {2, 2}));
  A.set_block(0, 0, Block::identity(2));
  A.set_block(0, 1, Block::identity(2));
  ZVector z(A);
  z.entry(0, 0) = Vec::Constant(2, 2.0);
  EXPECT_NEAR(build_Q(A)(z), 0.5 * 8.0, 1e-14);
}

TEST(QuadraticForm, QMatchesDenseMaterialization) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const BlockMatrix A = random_block_matrix(rng, 3, 4, 2);
    const ZVector z = random_z(rng, A);
    const Vec f = z.flatten(A);
    const Mat Q = build_Q(A).materialize();
    EXPECT_NEAR(build_Q(A)(z), f.dot(Q * f), 1e-10 * (1 + f.squaredNorm()));
  }
}

TEST(QuadraticForm, PtWithAllColumnsEqualsQWhenKCoversDegrees) {
  std::mt19937_64 rng(32);
  const BlockMatrix A = random_block_matrix(rng, 3, 4, 2);
  const ZVector z = random_z(rng, A);
  EXPECT_NEAR(build_Pt(A, {0, 1, 2, 3}, 4)(z), build_Q(A)(z), 1e-12);
}

TEST(QuadraticForm, PtSingleColumnVanishes) {
  std::mt19937_64 rng(33);
  const BlockMatrix A = random_block_matrix(rng, 3, 4, 2, 0.9);
  const ZVector z = random_z(rng, A);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(build_Pt(A, {j}, 1)(z), 0.0, 1e-12);
}

TEST(QuadraticForm, PtMatchesDenseMaterialization) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const BlockMatrix A = random_block_matrix(rng, 2, 3, 3, 0.8);
    std::vector<int> sel;
    for (int j = 0; j < 3; ++j)
      if (rng() % 2) sel.push_back(j);
    if (sel.empty()) sel.push_back(0);
    const int K = static_cast<int>(sel.size());
    const ZVector z = random_z(rng, A);
    const Vec f = z.flatten(A);
    EXPECT_NEAR(build_Pt(A, sel, K)(z), f.dot(build_Pt(A, sel, K).materialize() * f), 1e-10 * (1 + f.squaredNorm()));
  }
}

TEST(QuadraticForm, PositiveSemidefiniteOnRandomPatterns) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 2000; ++trial) {
    const int I = 1 + static_cast<int>(rng() % 6), J = 1 + static_cast<int>(rng() % 6);
    const BlockMatrix A = random_block_matrix(rng, I, J, 2);
    const ZVector z = random_z(rng, A);
    std::vector<int> sel;
    for (int j = 0; j < J; ++j)
      if (rng() % 2) sel.push_back(j);
    if (sel.empty()) sel.push_back(J - 1);
    EXPECT_GE(build_Q(A)(z), -1e-12);
    EXPECT_GE(build_Pt(A, sel, static_cast<int>(sel.size()))(z), -1e-12);
  }
}

TEST(QuadraticForm, QIdentityOnFeasibleReference) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const ToyQp q = default_toy(4, 2, 100 + trial);
    const Problem& p = q.problem;
    const BlockVector x = random_block_vector(rng, p.A.partition().col_sizes);
    const ZVector dz = ZVector::from(p.A, x) - ZVector::from(p.A, p.reference->x);
    const BlockVector r = p.residual(x);
    double rhs = 0.0;
    for (int i = 0; i < p.num_row_blocks(); ++i) {
      for (size_t k = 0; k < dz.row_count(i); ++k) rhs += dz.entry(i, k).squaredNorm();
      rhs -= r.block(i).squaredNorm() / p.A.degree(i);
    }
    EXPECT_NEAR(build_Q(p.A)(dz), rhs, 1e-10 * (1 + std::abs(rhs)));
  }
}
