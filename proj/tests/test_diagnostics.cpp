#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace pdmm;
using namespace pdmm::testing;

namespace {

void subsets(int J, int K, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == K) {
    out.push_back(cur);
    return;
  }
  for (int j = start; j < J; ++j) {
    cur.push_back(j);
    subsets(J, K, j + 1, cur, out);
    cur.pop_back();
  }
}

Solver make_solver(const Problem& p, int K, std::uint64_t seed = 1) {
  VariantOptions o;
  o.K = K;
  SolverConfig cfg = configure(Variant::pdmm, p, o);
  cfg.seed = seed;
  cfg.track_h = true;
  cfg.backward_step_init = true;
  return Solver(p, cfg);
}

}  // namespace

TEST(ResidualR, VanishesAtFeasibleFixedPoint) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 2, p.A.degrees()));
  EXPECT_LE(residual_R(p.A, p.a, p.reference->x, p.reference->x, 1.0, c.beta, {0, 3}, 2), 1e-24);
}

TEST(ResidualR, SingleBlockUnitDegreeRow) {
  BlockMatrix A(BlockPartition({2, 2}, {2, 2}));
  A.set_block(0, 0, Block::identity(2));
  A.set_block(1, 0, Block::identity(2));
  A.set_block(1, 1, Block::identity(2));
  BlockVector a({2, 2}), x_old({2, 2}), x_new({2, 2});
  x_new.block(0) << 1.0, 2.0;
  x_new.block(1) = x_old.block(1);
  const std::vector<double> beta = {0.7, 0.3};
  const double rho = 1.5;
  // Row 0 has d = 1 so its P_t term is zero; row 1 sees one selected block with K̃ = 1, also zero.
  const double expect = 0.5 * rho * (0.7 * 5.0 + 0.3 * 5.0);
  EXPECT_NEAR(residual_R(A, a, x_new, x_old, rho, beta, {0}, 1), expect, 1e-14);
}

TEST(ResidualR, MatchesDensePt) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockMatrix A = random_block_matrix(rng, 3, 4, 2, 0.7);
    const BlockVector a = random_block_vector(rng, A.partition().row_sizes);
    const BlockVector x_old = random_block_vector(rng, A.partition().col_sizes);
    BlockVector x_new = x_old;
    const std::vector<int> sel = {1, 3};
    for (int j : sel) x_new.block(j) += random_vector(rng, x_new.block_size(j));
    const std::vector<double> beta = {0.2, 0.4, 0.1};
    const Vec dz = (ZVector::from(A, x_new) - ZVector::from(A, x_old)).flatten(A);
    const BlockVector r = A.apply(x_new) - a;
    double expect = 0.5 * 1.2 * dz.dot(build_Pt(A, sel, 2).materialize() * dz);
    for (int i = 0; i < 3; ++i) expect += 0.5 * 1.2 * beta[static_cast<size_t>(i)] * r.block(i).squaredNorm();
    EXPECT_NEAR(residual_R(A, a, x_new, x_old, 1.2, beta, sel, 2), expect, 1e-10 * (1 + expect));
  }
}

TEST(Lyapunov, ZeroAtKktPoint) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  for (int K : {1, 3, 5}) {
    const TheoryConstants c = theory_constants(table1_step_sizes(5, K, p.A.degrees()));
    const KktPoint& k = *p.reference;
    EXPECT_NEAR(lyapunov_h(p, k.x, k.y, k.y, k, c, 1.0), 0.0, 1e-10);
  }
}

TEST(Lyapunov, FeasibleIterateDecomposition) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(4);
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 3, p.A.degrees()));
  // A feasible x: the reference plus a null-space direction.
  const Mat D = p.A.to_dense();
  const Mat N = Eigen::FullPivLU<Mat>(D).kernel();
  BlockVector x = p.reference->x;
  x.data() += N * random_vector(rng, N.cols());
  const BlockVector y = random_block_vector(rng, p.A.partition().row_sizes);
  const BlockVector yp = random_block_vector(rng, p.A.partition().row_sizes);
  double dual = 0.0;
  for (int i = 0; i < 2; ++i)
    dual += 3.0 / 5.0 / (2.0 * c.tau[static_cast<size_t>(i)]) * (p.reference->y.block(i) - yp.block(i)).squaredNorm();
  const double q_term = 0.5 * build_Q(p.A)(ZVector::from(p.A, p.reference->x) - ZVector::from(p.A, x));
  const double expect = dual + p.objective(x) - q.f_star + q_term;
  EXPECT_NEAR(lyapunov_h(p, x, y, yp, *p.reference, c, 1.0), expect, 1e-10 * (1 + std::abs(expect)));
}

TEST(Lyapunov, LowerBoundNearOptimum) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(5);
  for (int K : {1, 2, 3, 5}) {
    const TheoryConstants c = theory_constants(table1_step_sizes(5, K, p.A.degrees()));
    for (int trial = 0; trial < 50; ++trial) {
      BlockVector x = p.reference->x, yp = p.reference->y;
      x.data() += 1e-2 * random_vector(rng, x.size());
      yp.data() += 1e-2 * random_vector(rng, yp.size());
      // y and y_prev are linked by a full dual step at x.
      BlockVector y = yp;
      const BlockVector r = p.residual(x);
      for (int i = 0; i < p.num_row_blocks(); ++i) y.block(i) += c.tau[static_cast<size_t>(i)] * r.block(i);
      EXPECT_GE(lyapunov_h(p, x, y, yp, *p.reference, c, 1.0) + 1e-12, lyapunov_lower_bound(p, x, *p.reference, c, 1.0));
    }
  }
}

TEST(Lyapunov, InfeasibleReferenceRejected) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  KktPoint bad = *p.reference;
  bad.x.data()[0] += 1.0;
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 2, p.A.degrees()));
  EXPECT_THROW(lyapunov_h(p, bad.x, bad.y, bad.y, bad, c, 1.0), ValidationError);
}

TEST(Lyapunov, NonnegativeAlongSolves) {
  const ToyQp q = default_toy();
  for (int K = 1; K <= 5; ++K) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Solver solver = make_solver(q.problem, K, seed);
      SolverState s = solver.initial_state();
      for (int t = 0; t < 300; ++t) {
        const TraceRecord rec = solver.iterate(s);
        ASSERT_TRUE(rec.h.has_value());
        EXPECT_GE(*rec.h, -1e-9);
        EXPECT_GE(*rec.R, 0.0);
      }
    }
  }
}

TEST(Lyapunov, ExactExpectationDecreases) {
  // E[h(v*, v^{t+1}) + R(x^{t+1}) | v^t] ≤ h(v*, v^t), enumerating every K-subset from states along a path.
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  for (int K : {1, 2, 3, 4, 5}) {
    Solver solver = make_solver(p, K, 9);
    std::vector<std::vector<int>> subs;
    std::vector<int> cur;
    subsets(5, K, 0, cur, subs);
    SolverState s = solver.initial_state();
    const double h_init = solver.lyapunov(s, *p.reference);
    double worst = -1.0;
    for (int t = 0; t < 150; ++t) {
      const double h = solver.lyapunov(s, *p.reference);
      double eh = 0.0, eR = 0.0;
      for (const auto& sub : subs) {
        SolverState c = s;
        std::vector<Vec> fresh, deltas;
        for (int j : sub) fresh.push_back(solver.primal_update_exact(c, j));
        for (size_t k = 0; k < sub.size(); ++k) {
          deltas.push_back(fresh[k] - c.x.block(sub[k]));
          c.x.block(sub[k]) = fresh[k];
        }
        solver.residual_update(c, sub, deltas);
        c.y_prev = c.y;
        solver.dual_update(c, {0, 1});
        eh += solver.lyapunov(c, *p.reference) / static_cast<double>(subs.size());
        eR += residual_R_from_deltas(p.A, c.r, 1.0, solver.constants().beta, sub, K, deltas, {}) / static_cast<double>(subs.size());
      }
      worst = std::max(worst, (eh + eR - h) / h_init);
      solver.iterate(s);
    }
    EXPECT_LE(worst, 1e-12) << "K = " << K;
  }
}

TEST(AuxLagrangian, NonnegativeAtOptimalDual) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(6);
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 5, p.A.degrees()));
  for (int trial = 0; trial < 50; ++trial) {
    const BlockVector x = random_block_vector(rng, p.A.partition().col_sizes);
    // γ = τ isolates f(x) − f* + ⟨y*, Ax − a⟩, the convexity gap.
    EXPECT_GE(aux_lagrangian(p, x, p.reference->y, q.f_star, c.tau, c.tau, 1.0), -1e-12);
  }
}

TEST(AuxLagrangian, FeasibleIterateIsObjectiveGap) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(7);
  const Mat N = Eigen::FullPivLU<Mat>(p.A.to_dense()).kernel();
  BlockVector x = p.reference->x;
  x.data() += N * random_vector(rng, N.cols());
  const BlockVector y = random_block_vector(rng, p.A.partition().row_sizes);
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 2, p.A.degrees()));
  EXPECT_NEAR(aux_lagrangian(p, x, y, q.f_star, c.gamma, c.tau, 1.0), p.objective(x) - q.f_star, 1e-10);
}

TEST(AuxLagrangian, MatchesDenseExpression) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(8);
  const TheoryConstants c = theory_constants(table1_step_sizes(5, 3, p.A.degrees()));
  const Mat D = p.A.to_dense();
  for (int trial = 0; trial < 20; ++trial) {
    const BlockVector x = random_block_vector(rng, p.A.partition().col_sizes);
    const BlockVector y = random_block_vector(rng, p.A.partition().row_sizes);
    const Vec r = D * x.data() - p.a.data();
    double expect = p.objective(x) - q.f_star + y.data().dot(r);
    Index off = 0;
    for (int i = 0; i < 2; ++i) {
      const Index m = p.A.partition().row_sizes[static_cast<size_t>(i)];
      expect += 0.5 * 1.3 * (c.gamma[static_cast<size_t>(i)] - c.tau[static_cast<size_t>(i)]) * r.segment(off, m).squaredNorm();
      off += m;
    }
    EXPECT_NEAR(aux_lagrangian(p, x, y, q.f_star, c.gamma, c.tau, 1.3), expect, 1e-10 * (1 + std::abs(expect)));
  }
}

TEST(Ergodic, ConstantAndMidpoint) {
  BlockVector a({2}), b({2});
  a.data() << 1, 2;
  b.data() << 3, 6;
  EXPECT_EQ(ergodic_average({a, a, a}, 3), a);
  EXPECT_EQ(ergodic_average({a, b}, 2).data(), Vec(Eigen::Vector2d(2, 4)));
  EXPECT_THROW(ergodic_average({a}, 2), ConfigError);
  EXPECT_THROW(ErgodicAverage().mean(), ConfigError);
}

TEST(Ergodic, JensenOnConvexObjective) {
  const ToyQp q = default_toy();
  const Problem& p = q.problem;
  std::mt19937_64 rng(9);
  std::vector<BlockVector> xs;
  double mean_f = 0.0;
  for (int t = 0; t < 30; ++t) {
    xs.push_back(random_block_vector(rng, p.A.partition().col_sizes));
    mean_f += p.objective(xs.back()) / 30.0;
  }
  EXPECT_LE(p.objective(ergodic_average(xs, 30)), mean_f + 1e-12);
}

TEST(ResidualR, VanishesIffOptimalityHolds) {
  const ToyQp q = default_toy();
  Solver solver = make_solver(q.problem, 5);
  SolverState s = solver.initial_state();
  double first = 0.0, last = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const TraceRecord rec = solver.iterate(s);
    if (t == 0) first = *rec.R;
    last = *rec.R;
  }
  EXPECT_GT(first, 1e-3);
  EXPECT_LT(last, 1e-20);
  EXPECT_LT(q.problem.residual(s.x).norm(), 1e-10);
}
