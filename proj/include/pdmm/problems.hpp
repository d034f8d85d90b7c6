#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdmm/block_linalg.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/problem.hpp"
#include "pdmm/prox.hpp"
#include "pdmm/solver.hpp"

namespace pdmm {

namespace detail {

inline Mat gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols, double sigma = 1.0) {
  std::normal_distribution<double> g(0.0, sigma);
  Mat m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
  return m;
}

inline Vec gaussian_vector(std::mt19937_64& rng, Index n, double sigma = 1.0) {
  return gaussian_matrix(rng, n, 1, sigma);
}

}  // namespace detail

// ---------------------------------------------------------------- RPCA

struct RpcaInstance {
  Index m = 0;
  Index n = 0;
  Mat M;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  // Ground truth, present for synthetic instances.
  std::optional<Mat> low_rank;
  std::optional<Mat> sparse;
  std::optional<Mat> noise;
  // Generation parameters.
  int rank = 0;
  std::uint64_t seed = 0;
  double density = 0.0;
  double sparse_scale = 0.0;
  double noise_sigma = 0.0;
  double weight_factor = 0.0;
};

constexpr double kRpcaDensity = 0.05;
constexpr double kRpcaSparseScale = 1.0;
constexpr double kRpcaNoiseSigma = 1e-3;
constexpr double kRpcaWeightFactor = 0.15;

// γ2 = factor·max|M_kl|, γ3 = factor·‖M‖₂.
inline std::pair<double, double> rpca_default_weights(const Mat& M, double factor = kRpcaWeightFactor) {
  Eigen::BDCSVD<Mat> svd(M);
  const double spec = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return {factor * M.cwiseAbs().maxCoeff(), factor * spec};
}

inline RpcaInstance gen_rpca_synthetic(Index m, Index n, int rank, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("RPCA dimensions must be positive");
  if (rank < 0 || rank > std::min(m, n)) throw ConfigError("rank must lie in [0, min(m, n)]");
  std::mt19937_64 rng(splitmix64(seed ^ 0x5250434100000000ULL));
  RpcaInstance inst;
  inst.m = m;
  inst.n = n;
  inst.rank = rank;
  inst.seed = seed;
  inst.density = kRpcaDensity;
  inst.sparse_scale = kRpcaSparseScale;
  inst.noise_sigma = kRpcaNoiseSigma;
  inst.weight_factor = kRpcaWeightFactor;

  // Columns of P/√m and Q/√n are near-orthonormal, so σ(L) = O(1).
  const Mat P = detail::gaussian_matrix(rng, m, rank) / std::sqrt(static_cast<double>(m));
  const Mat Q = detail::gaussian_matrix(rng, n, rank) / std::sqrt(static_cast<double>(n));
  Mat L = P * Q.transpose();

  Mat S = Mat::Zero(m, n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < m; ++r) {
      if (u(rng) >= inst.density) continue;
      const double mag = 1.0 - u(rng);
      S(r, c) = inst.sparse_scale * (u(rng) < 0.5 ? -mag : mag);
    }
  Mat V = detail::gaussian_matrix(rng, m, n, inst.noise_sigma);

  inst.M = L + S + V;
  std::tie(inst.gamma2, inst.gamma3) = rpca_default_weights(inst.M, inst.weight_factor);
  inst.low_rank = std::move(L);
  inst.sparse = std::move(S);
  inst.noise = std::move(V);
  return inst;
}

inline Vec vectorize(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

inline Mat unvectorize(const Eigen::Ref<const Vec>& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("vector length does not match matrix shape");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// ½‖X1‖²_F + γ2‖X2‖₁ + γ3‖X3‖_* subject to X1 + X2 + X3 = M, blocks vectorized column-major.
inline Problem build_rpca(const Mat& M, double gamma2, double gamma3) {
  if (!(gamma2 > 0) || !(gamma3 > 0)) throw ConfigError("RPCA weights must be positive");
  const Index m = M.rows(), n = M.cols(), N = M.size();
  if (N == 0) throw DimensionError("RPCA matrix is empty");
  Problem p;
  p.name = "rpca";
  p.A = BlockMatrix(BlockPartition({N}, {N, N, N}));
  for (int j = 0; j < 3; ++j) p.A.set_block(0, j, Block::identity(N));
  p.a = BlockVector({N}, vectorize(M));
  p.f = {std::make_shared<SquaredFrobenius>(1.0, N), std::make_shared<L1Norm>(gamma2),
         std::make_shared<NuclearNorm>(gamma3, m, n)};
  p.validate();
  return p;
}

inline Problem build_rpca(const RpcaInstance& inst) { return build_rpca(inst.M, inst.gamma2, inst.gamma3); }

inline double rpca_objective(const Mat& X1, const Mat& X2, const Mat& X3, double gamma2, double gamma3) {
  Eigen::BDCSVD<Mat> svd(X3);
  return 0.5 * X1.squaredNorm() + gamma2 * X2.cwiseAbs().sum() + gamma3 * svd.singularValues().sum();
}

// ---------------------------------------------------------------- group lasso

struct GroupLassoInstance {
  Mat A_data;
  Vec b;
  int L = 0;
  Index group_size = 0;
  Index overlap = 0;
  std::vector<std::vector<Index>> groups;
  std::vector<double> weights;
  double lambda = 0.0;
  std::optional<Vec> x_true;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;

  Index num_features() const { return A_data.cols(); }
};

constexpr double kGroupLassoNoiseSigma = 1.0;

// Contiguous groups of the given size, consecutive groups sharing `overlap` indices.
inline std::vector<std::vector<Index>> overlapping_groups(int L, Index size, Index overlap) {
  std::vector<std::vector<Index>> g(static_cast<size_t>(L));
  for (int k = 0; k < L; ++k)
    for (Index e = 0; e < size; ++e) g[static_cast<size_t>(k)].push_back(k * (size - overlap) + e);
  return g;
}

inline GroupLassoInstance gen_group_lasso_synthetic(Index m, int L, Index size, Index overlap, std::uint64_t seed) {
  if (m < 1 || L < 1 || size < 1) throw ConfigError("group lasso dimensions must be positive");
  if (overlap < 0 || overlap >= size) throw ConfigError("overlap must lie in [0, group size)");
  std::mt19937_64 rng(splitmix64(seed ^ 0x474c415353000000ULL));
  GroupLassoInstance inst;
  const Index n = L * size - (L - 1) * overlap;
  inst.L = L;
  inst.group_size = size;
  inst.overlap = overlap;
  inst.groups = overlapping_groups(L, size, overlap);
  inst.weights.assign(static_cast<size_t>(L), 1.0 / L);
  inst.lambda = L / 5.0;
  inst.seed = seed;
  inst.noise_sigma = kGroupLassoNoiseSigma;
  Vec xt(n);
  for (Index k = 0; k < n; ++k) {
    const double j = static_cast<double>(k + 1);
    xt[k] = ((k + 1) % 2 == 0 ? 1.0 : -1.0) * std::exp(-(j - 1.0) / 100.0);
  }
  inst.A_data = detail::gaussian_matrix(rng, m, n);
  inst.b = inst.A_data * xt + detail::gaussian_vector(rng, m, inst.noise_sigma);
  inst.x_true = std::move(xt);
  return inst;
}

inline void validate_group_lasso(const GroupLassoInstance& inst) {
  const Index n = inst.num_features();
  if (inst.b.size() != inst.A_data.rows()) throw ValidationError("response length differs from design rows");
  if (static_cast<int>(inst.groups.size()) != inst.L || static_cast<int>(inst.weights.size()) != inst.L)
    throw ValidationError("group list or weight list length differs from L");
  if (!(inst.lambda > 0)) throw ValidationError("lambda must be positive");
  for (size_t g = 0; g < inst.groups.size(); ++g) {
    if (inst.groups[g].empty()) throw ValidationError("group " + std::to_string(g) + " is empty");
    for (Index k : inst.groups[g])
      if (k < 0 || k >= n) throw ValidationError("group " + std::to_string(g) + " index " + std::to_string(k) + " out of range");
    if (!(inst.weights[g] > 0)) throw ValidationError("group weights must be positive");
  }
}

// Blocks x_1..x_L (group copies) and w; rows x_g − U_gᵀw = 0, so every row has degree 2.
inline Problem build_group_lasso(const GroupLassoInstance& inst) {
  validate_group_lasso(inst);
  const int L = inst.L;
  const Index n = inst.num_features();
  std::vector<Index> rows, cols;
  for (const auto& g : inst.groups) {
    rows.push_back(static_cast<Index>(g.size()));
    cols.push_back(static_cast<Index>(g.size()));
  }
  cols.push_back(n);
  Problem p;
  p.name = "group_lasso";
  p.A = BlockMatrix(BlockPartition(rows, cols));
  for (int g = 0; g < L; ++g) {
    p.A.set_block(g, g, Block::identity(rows[static_cast<size_t>(g)]));
    p.A.set_block(g, L, Block::selection(n, inst.groups[static_cast<size_t>(g)], -1.0));
  }
  p.a = BlockVector(rows);
  for (int g = 0; g < L; ++g) p.f.push_back(std::make_shared<GroupL2Norm>(inst.weights[static_cast<size_t>(g)]));
  p.f.push_back(std::make_shared<LeastSquaresLoss>(inst.A_data, inst.b, 1.0 / (L * inst.lambda)));
  p.validate();
  return p;
}

// (1/2Lλ)‖A w − b‖² + Σ_g d_g‖w_g‖₂
inline double group_lasso_objective(const GroupLassoInstance& inst, const Vec& w) {
  double v = 0.5 / (inst.L * inst.lambda) * (inst.A_data * w - inst.b).squaredNorm();
  for (size_t g = 0; g < inst.groups.size(); ++g) {
    double sq = 0.0;
    for (Index k : inst.groups[g]) sq += w[k] * w[k];
    v += inst.weights[g] * std::sqrt(sq);
  }
  return v;
}

struct GroupLassoReference {
  Vec w;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Accelerated projected gradient on the dual
//   max_{‖v_g‖ ≤ d_g} min_w ℓ(w) + Σ_g ⟨v_g, U_gᵀ w⟩,
// whose inner minimizer is w(v) = H⁻¹(c − Σ_g U_g v_g). The primal value at
// w(v) minus the dual value certifies the gap.
inline GroupLassoReference group_lasso_reference(const GroupLassoInstance& inst, int max_iter = 1000000,
                                                 double gap_tol = 1e-13) {
  validate_group_lasso(inst);
  const Index n = inst.num_features();
  const double s = 1.0 / (inst.L * inst.lambda);
  const Mat H = s * inst.A_data.transpose() * inst.A_data;
  const Vec c = s * inst.A_data.transpose() * inst.b;
  Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success) throw NumericalError("design is rank deficient; dual oracle needs a strongly convex loss");
  Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
  Vec counts = Vec::Zero(n);
  for (const auto& g : inst.groups)
    for (Index k : g) counts[k] += 1.0;
  const double lip = counts.maxCoeff() / es.eigenvalues().minCoeff();

  const size_t G = inst.groups.size();
  auto scatter = [&](const std::vector<Vec>& v) {
    Vec u = Vec::Zero(n);
    for (size_t g = 0; g < G; ++g)
      for (size_t e = 0; e < inst.groups[g].size(); ++e) u[inst.groups[g][e]] += v[g][static_cast<Index>(e)];
    return u;
  };
  auto gather = [&](const Vec& w, size_t g) {
    Vec out(static_cast<Index>(inst.groups[g].size()));
    for (size_t e = 0; e < inst.groups[g].size(); ++e) out[static_cast<Index>(e)] = w[inst.groups[g][e]];
    return out;
  };
  auto project = [&](std::vector<Vec>& v) {
    for (size_t g = 0; g < G; ++g) {
      const double nv = v[g].norm();
      if (nv > inst.weights[g]) v[g] *= inst.weights[g] / nv;
    }
  };
  auto loss = [&](const Vec& w) { return 0.5 * s * (inst.A_data * w - inst.b).squaredNorm(); };
  auto dual_value = [&](const Vec& w, const Vec& u) { return loss(w) + u.dot(w); };

  std::vector<Vec> v(G), v_prev(G), mom(G);
  for (size_t g = 0; g < G; ++g) v[g] = mom[g] = Vec::Zero(static_cast<Index>(inst.groups[g].size()));
  v_prev = v;
  double theta = 1.0;
  double best_dual = -std::numeric_limits<double>::infinity();
  GroupLassoReference out;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec w_mom = llt.solve(c - scatter(mom));
    v_prev = v;
    for (size_t g = 0; g < G; ++g) v[g] = mom[g] + gather(w_mom, g) / lip;
    project(v);
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    // Gradient-based adaptive restart keeps the momentum monotone.
    double restart = 0.0;
    for (size_t g = 0; g < G; ++g) restart += (v[g] - v_prev[g]).dot(mom[g] - v[g]);
    if (restart > 0) {
      theta = 1.0;
      mom = v;
    } else {
      for (size_t g = 0; g < G; ++g) mom[g] = v[g] + ((theta - 1.0) / theta_next) * (v[g] - v_prev[g]);
      theta = theta_next;
    }
    if (it % 50 == 0 || it == max_iter) {
      const Vec u = scatter(v);
      const Vec w = llt.solve(c - u);
      const double d = dual_value(w, u);
      const double pr = group_lasso_objective(inst, w);
      if (d > best_dual) best_dual = d;
      out.w = w;
      out.primal = pr;
      out.dual = best_dual;
      out.gap = pr - best_dual;
      out.iterations = it;
      if (out.gap <= gap_tol * std::max(1.0, std::abs(pr))) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- toy QP

struct ToyQpSpec {
  int J = 3;
  int I = 2;
  Index block_size = 2;
  Index row_size = 2;
  double density = 0.7;
  std::uint64_t seed = 1;
  // a = 0, so the zero start is feasible.
  bool zero_rhs = false;
};

struct ToyQp {
  Problem problem;
  double f_star = 0.0;
};

// f_j = ½‖x_j − c_j‖²; x* = c − Aᵀy*, (AAᵀ) y* = A c − a.
inline ToyQp build_toy_qp(BlockMatrix A, BlockVector a, const BlockVector& centers) {
  ToyQp out;
  Problem& p = out.problem;
  p.name = "toy_qp";
  p.A = std::move(A);
  p.a = std::move(a);
  if (!centers.conforms(p.A.partition().col_sizes)) throw DimensionError("centers do not match the column partition");
  for (int j = 0; j < p.A.num_col_blocks(); ++j) p.f.push_back(std::make_shared<ShiftedSquaredNorm>(centers.block(j)));
  const Mat D = p.A.to_dense();
  const Mat G = D * D.transpose();
  Eigen::FullPivLU<Mat> lu(G);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw NumericalError("toy QP constraint matrix is rank deficient");
  Vec y = lu.solve(D * centers.data() - p.a.data());
  // One refinement step.
  y += lu.solve(D * centers.data() - p.a.data() - G * y);
  Vec x = centers.data() - D.transpose() * y;
  p.reference = KktPoint{BlockVector(p.A.partition().col_sizes, x), BlockVector(p.A.partition().row_sizes, y)};
  p.validate();
  out.f_star = p.objective(p.reference->x);
  return out;
}

inline ToyQp build_toy_qp(const ToyQpSpec& spec) {
  if (spec.J < 1 || spec.I < 1 || spec.block_size < 1 || spec.row_size < 1)
    throw ConfigError("toy QP dimensions must be positive");
  if (spec.I * spec.row_size > spec.J * spec.block_size)
    throw ConfigError("toy QP needs at least as many columns as rows");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(splitmix64(spec.seed * 0x100 + attempt));
    const BlockPartition part(std::vector<Index>(static_cast<size_t>(spec.I), spec.row_size),
                              std::vector<Index>(static_cast<size_t>(spec.J), spec.block_size));
    std::vector<std::vector<char>> mask(static_cast<size_t>(spec.I), std::vector<char>(static_cast<size_t>(spec.J), 0));
    for (auto& row : mask)
      for (auto& e : row) e = u(rng) < spec.density;
    // Every row and every column carries at least one block.
    for (int i = 0; i < spec.I; ++i) {
      bool any = false;
      for (char e : mask[static_cast<size_t>(i)]) any = any || e;
      if (!any) mask[static_cast<size_t>(i)][static_cast<size_t>(std::uniform_int_distribution<int>(0, spec.J - 1)(rng))] = 1;
    }
    for (int j = 0; j < spec.J; ++j) {
      bool any = false;
      for (int i = 0; i < spec.I; ++i) any = any || mask[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (!any) mask[static_cast<size_t>(std::uniform_int_distribution<int>(0, spec.I - 1)(rng))][static_cast<size_t>(j)] = 1;
    }
    BlockMatrix A(part);
    for (int i = 0; i < spec.I; ++i)
      for (int j = 0; j < spec.J; ++j)
        if (mask[static_cast<size_t>(i)][static_cast<size_t>(j)])
          A.set_block(i, j, Block::dense(detail::gaussian_matrix(rng, spec.row_size, spec.block_size)));
    BlockVector a(part.row_sizes, detail::gaussian_vector(rng, part.total_rows()));
    if (spec.zero_rhs) a.set_zero();
    BlockVector c(part.col_sizes, detail::gaussian_vector(rng, part.total_cols()));
    try {
      ToyQp q = build_toy_qp(std::move(A), std::move(a), c);
      q.problem.name = "toy_qp";
      return q;
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError("could not draw a toy QP with a full-rank constraint matrix");
}

// ‖x* − c + Aᵀy*‖ + ‖Ax* − a‖ for the toy QP.
inline double toy_qp_kkt_residual(const Problem& p, const BlockVector& x, const BlockVector& y) {
  double stat = 0.0;
  const BlockVector aty = p.A.apply_transpose(y);
  for (int j = 0; j < p.num_col_blocks(); ++j) {
    const Vec g = p.f[static_cast<size_t>(j)]->gradient(x.block(j));
    stat += (g + aty.block(j)).squaredNorm();
  }
  return std::sqrt(stat) + p.residual(x).norm();
}

}  // namespace pdmm
