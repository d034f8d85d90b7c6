#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdmm/block_linalg.hpp"
#include "pdmm/diagnostics.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/problem.hpp"
#include "pdmm/prox.hpp"
#include "pdmm/stepsize.hpp"
#include "pdmm/worker_pool.hpp"

namespace pdmm {

enum class UpdateMode { exact, linearized_f, linearized_penalty, linearized_both };
enum class SamplerScheme { uniform, cyclic };
enum class StopReason { tolerance, max_iter };

inline std::string to_string(UpdateMode m) {
  switch (m) {
    case UpdateMode::exact: return "exact";
    case UpdateMode::linearized_f: return "linearized-f";
    case UpdateMode::linearized_penalty: return "linearized-penalty";
    case UpdateMode::linearized_both: return "linearized-both";
  }
  return "?";
}

inline std::string to_string(SamplerScheme s) { return s == SamplerScheme::uniform ? "uniform" : "cyclic"; }
inline std::string to_string(StopReason s) { return s == StopReason::tolerance ? "tolerance" : "max_iter"; }

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, Trace trace) : NumericalError(what), trace_(std::move(trace)) {}
  const Trace& trace() const { return trace_; }

 private:
  Trace trace_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct SolverConfig {
  double rho = 1.0;
  StepSizes steps;
  UpdateMode mode = UpdateMode::exact;
  // Per-column proximal/Bregman weights; empty means all zero.
  std::vector<double> eta;
  SamplerScheme sampler = SamplerScheme::uniform;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  int max_iter = 1000;
  int refresh_interval = 100;
  bool track_R = true;
  bool track_h = false;
  bool record_time = false;
  int threads = 1;
  // Sequential sweep over all blocks with fresh residuals, τ = 1, ν = 0.
  bool gauss_seidel = false;
  // ŷ¹ = y¹ − νρr¹ instead of ŷ¹ = 0.
  bool backward_step_init = false;
  // Skip the step-size validity check (tuned presets, splitting-form special cases).
  bool allow_unchecked_steps = false;
  std::optional<ProximalTerms> proximal;
  double divergence_threshold = 1e12;
};

struct SolverState {
  BlockVector x;
  BlockVector y;
  BlockVector y_hat;
  BlockVector r;
  // y^{t−1}; kept only when h is tracked.
  BlockVector y_prev;
  int t = 0;
  std::mt19937_64 rng;
  std::vector<int> cycle;
  int cursor = 0;
};

struct SolveResult {
  SolverState state;
  Trace trace;
  StopReason stop_reason = StopReason::max_iter;
  int iterations = 0;
};

class Solver {
 public:
  Solver(const Problem& problem, SolverConfig cfg) : p_(problem), cfg_(std::move(cfg)) {
    p_.validate();
    J_ = p_.num_col_blocks();
    I_ = p_.num_row_blocks();
    if (!(cfg_.rho > 0)) throw ConfigError("rho must be positive");
    if (cfg_.steps.num_rows() != I_)
      throw ConfigError("step sizes cover " + std::to_string(cfg_.steps.num_rows()) + " rows, problem has " +
                        std::to_string(I_));
    if (cfg_.steps.J != J_) throw ConfigError("step sizes were computed for a different J");
    if (cfg_.steps.K < 1 || cfg_.steps.K > J_) throw ConfigError("K must lie in [1, J]");
    if (cfg_.steps.K_I < 1 || cfg_.steps.K_I > I_) throw ConfigError("K_I must lie in [1, I]");
    if (cfg_.eta.empty()) cfg_.eta.assign(static_cast<size_t>(J_), 0.0);
    if (static_cast<int>(cfg_.eta.size()) != J_) throw ConfigError("eta needs one entry per column block");
    for (double e : cfg_.eta)
      if (!(e >= 0)) throw ConfigError("eta must be nonnegative");
    if (cfg_.refresh_interval < 1) throw ConfigError("refresh interval must be positive");
    if (cfg_.max_iter < 1) throw ConfigError("max_iter must be positive");
    if (!cfg_.allow_unchecked_steps) {
      const ValidityReport rep = validity_check(cfg_.steps, J_, p_.A.degrees(), cfg_.proximal);
      if (!rep.ok()) {
        std::ostringstream os;
        os << "step sizes fail the validity check:";
        for (const auto& v : rep.violations) os << "\n  " << v;
        throw ConfigError(os.str());
      }
      steps_checked_ = true;
    }
    constants_ = theory_constants(cfg_.steps);
    kernels_.resize(static_cast<size_t>(J_));
    for (int j = 0; j < J_; ++j) prepare_kernel(j);
    pool_ = std::make_unique<WorkerPool>(effective_threads(cfg_.threads));
  }

  const SolverConfig& config() const { return cfg_; }
  const TheoryConstants& constants() const { return constants_; }
  const Problem& problem() const { return p_; }

  SolverState initial_state(const std::optional<KktPoint>& init = std::nullopt) const {
    SolverState s;
    s.x = init ? init->x : BlockVector(p_.A.partition().col_sizes);
    s.y = init ? init->y : BlockVector(p_.A.partition().row_sizes);
    if (!s.x.conforms(p_.A.partition().col_sizes) || !s.y.conforms(p_.A.partition().row_sizes))
      throw DimensionError("initial point does not match the partition");
    s.r = p_.residual(s.x);
    s.y_hat = BlockVector(p_.A.partition().row_sizes);
    if (init || cfg_.backward_step_init) {
      for (int i = 0; i < I_; ++i)
        s.y_hat.block(i) = s.y.block(i) - nu(i) * cfg_.rho * s.r.block(i);
    }
    // Virtual y⁰ consistent with the dual step, so y¹ − y⁰ = τρr¹.
    s.y_prev = s.y;
    for (int i = 0; i < I_; ++i) s.y_prev.block(i) -= tau(i) * cfg_.rho * s.r.block(i);
    s.rng.seed(splitmix64(cfg_.seed));
    return s;
  }

  // Indices of the primal blocks updated in the next iteration, ascending.
  std::vector<int> sample_blocks(SolverState& s) const {
    const int K = cfg_.steps.K;
    std::vector<int> out;
    if (K == J_) {
      out.resize(static_cast<size_t>(J_));
      std::iota(out.begin(), out.end(), 0);
      return out;
    }
    if (cfg_.sampler == SamplerScheme::uniform) return sample_subset(s.rng, J_, K);
    if (s.cycle.empty()) {
      s.cycle.resize(static_cast<size_t>(J_));
      std::iota(s.cycle.begin(), s.cycle.end(), 0);
      std::shuffle(s.cycle.begin(), s.cycle.end(), s.rng);
      s.cursor = 0;
    }
    for (int k = 0; k < K; ++k) out.push_back(s.cycle[static_cast<size_t>((s.cursor + k) % J_)]);
    s.cursor = (s.cursor + K) % J_;
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<int> sample_dual_rows(SolverState& s) const {
    const int KI = cfg_.steps.K_I;
    if (KI == I_) {
      std::vector<int> all(static_cast<size_t>(I_));
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    return sample_subset(s.rng, I_, KI);
  }

  // argmin f_j + ⟨(A_j^c)ᵀ(ŷ + ρr), x_j⟩ + (ρ/2)‖A_j^c(x_j − x_j^t)‖² + (η_j/2)‖x_j − x_j^t‖²
  Vec primal_update_exact(const SolverState& s, int j) const {
    if (cfg_.mode != UpdateMode::exact) throw ConfigError("primal_update_exact called in " + to_string(cfg_.mode) + " mode");
    return update_block(j, s.x.block(j), coupling_gradient(s, j));
  }

  // Bregman/linearized variants of the same subproblem.
  Vec primal_update_bregman(const SolverState& s, int j) const {
    if (cfg_.mode == UpdateMode::exact) throw ConfigError("primal_update_bregman called in exact mode");
    return update_block(j, s.x.block(j), coupling_gradient(s, j));
  }

  // r ← r + Σ_k A_{j_k}^c Δ_k, folded in ascending block order.
  void residual_update(SolverState& s, const std::vector<int>& blocks, const std::vector<Vec>& deltas) const {
    std::vector<size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return blocks[a] < blocks[b]; });
    for (size_t k : order) p_.A.column_apply_add(blocks[k], deltas[k], s.r);
  }

  void refresh_residual(SolverState& s) const { s.r = p_.residual(s.x); }

  // y_i ← y_i + τ_i ρ r_i on the selected rows; ŷ_i ← y_i − ν_i ρ r_i on all rows.
  void dual_update(SolverState& s, const std::vector<int>& dual_rows) const {
    for (int i : dual_rows) s.y.block(i) += tau(i) * cfg_.rho * s.r.block(i);
    for (int i = 0; i < I_; ++i) s.y_hat.block(i) = s.y.block(i) - nu(i) * cfg_.rho * s.r.block(i);
  }

  // B_{φ_j}(u, v) for the configured update mode.
  double bregman(int j, const Vec& u, const Vec& v) const {
    const double eta = cfg_.eta[static_cast<size_t>(j)];
    if (eta <= 0) return 0.0;
    const Vec d = u - v;
    double b = 0.5 * d.squaredNorm();
    if (cfg_.mode == UpdateMode::linearized_penalty || cfg_.mode == UpdateMode::linearized_both) {
      double sq = 0.0;
      for (int i : p_.A.col_pattern(j)) sq += p_.A.block(i, j)->apply(d).squaredNorm();
      b -= 0.5 * cfg_.rho / eta * sq;
    }
    if (cfg_.mode == UpdateMode::linearized_f || cfg_.mode == UpdateMode::linearized_both) {
      const auto& f = *p_.f[static_cast<size_t>(j)];
      b -= (f.value(u) - f.value(v) - f.gradient(v).dot(d)) / eta;
    }
    return b;
  }

  BregmanFn bregman_fn() const {
    return [this](int j, const Vec& u, const Vec& v) { return bregman(j, u, v); };
  }

  double lyapunov(const SolverState& s, const KktPoint& kkt) const {
    return lyapunov_h(p_, s.x, s.y, s.y_prev, kkt, constants_, cfg_.rho, cfg_.eta, bregman_fn(), steps_checked_);
  }

  // One iteration; returns its trace record.
  TraceRecord iterate(SolverState& s) const {
    const auto start = std::chrono::steady_clock::now();
    TraceRecord rec;
    std::vector<int> selected;
    std::vector<Vec> deltas;

    if (cfg_.gauss_seidel) {
      selected.resize(static_cast<size_t>(J_));
      std::iota(selected.begin(), selected.end(), 0);
      for (int j = 0; j < J_; ++j) {
        Vec xn = update_block(j, s.x.block(j), coupling_gradient(s, j));
        Vec d = xn - s.x.block(j);
        s.x.block(j) = xn;
        p_.A.column_apply_add(j, d, s.r);
        deltas.push_back(std::move(d));
      }
    } else {
      selected = sample_blocks(s);
      std::vector<Vec> fresh(selected.size());
      pool_->run(static_cast<int>(selected.size()), [&](int k) {
        const int j = selected[static_cast<size_t>(k)];
        try {
          fresh[static_cast<size_t>(k)] = update_block(j, s.x.block(j), coupling_gradient(s, j));
        } catch (const std::exception& e) {
          throw NumericalError("block " + std::to_string(j) + " update failed: " + e.what());
        }
      });
      deltas.resize(selected.size());
      for (size_t k = 0; k < selected.size(); ++k) {
        const int j = selected[k];
        deltas[k] = fresh[k] - s.x.block(j);
        s.x.block(j) = fresh[k];
      }
      residual_update(s, selected, deltas);
    }

    ++s.t;
    if (s.t % cfg_.refresh_interval == 0) refresh_residual(s);

    if (cfg_.track_h) s.y_prev = s.y;
    const std::vector<int> dual_rows = sample_dual_rows(s);
    if (cfg_.gauss_seidel) {
      for (int i = 0; i < I_; ++i) s.y.block(i) += cfg_.rho * s.r.block(i);
      s.y_hat = s.y;
    } else {
      dual_update(s, dual_rows);
    }

    rec.t = s.t;
    rec.selected = selected;
    rec.objective = p_.objective(s.x);
    rec.primal_residual = s.r.norm();
    if (cfg_.track_R) {
      std::vector<double> breg;
      for (size_t k = 0; k < selected.size(); ++k) {
        const int j = selected[k];
        const double eta = cfg_.eta[static_cast<size_t>(j)];
        if (eta > 0) breg.push_back(eta * bregman(j, s.x.block(j), Vec(s.x.block(j) - deltas[k])));
      }
      rec.R = residual_R_from_deltas(p_.A, s.r, cfg_.rho, constants_.beta, selected, cfg_.steps.K, deltas, breg);
    }
    if (cfg_.track_h && p_.reference) rec.h = lyapunov(s, *p_.reference);
    if (cfg_.record_time)
      rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  }

  SolveResult solve(const std::optional<KktPoint>& init = std::nullopt) const {
    SolveResult res;
    res.state = initial_state(init);
    SolverState& s = res.state;
    double elapsed = 0.0;
    while (true) {
      const BlockVector x_old = s.x;
      const BlockVector y_old = s.y;
      TraceRecord rec = iterate(s);
      rec.relative_change = relative_change(s.x, x_old) + relative_change(s.y, y_old);
      if (cfg_.record_time) {
        elapsed += rec.wall_time;
        rec.wall_time = elapsed;
      }
      res.trace.push_back(std::move(rec));
      const TraceRecord& last = res.trace.back();
      if (!std::isfinite(last.objective) || !std::isfinite(last.primal_residual) ||
          std::abs(last.objective) > cfg_.divergence_threshold || last.primal_residual > cfg_.divergence_threshold)
        throw DivergenceError("diverged at iteration " + std::to_string(s.t) + " (objective " +
                                  std::to_string(last.objective) + ", residual " +
                                  std::to_string(last.primal_residual) + ")",
                              res.trace);
      if (last.relative_change <= cfg_.tol) {
        res.stop_reason = StopReason::tolerance;
        break;
      }
      if (s.t >= cfg_.max_iter) {
        res.stop_reason = StopReason::max_iter;
        break;
      }
    }
    res.iterations = s.t;
    return res;
  }

 private:
  enum class KernelKind { prox_scalar, linear_solve, prox_linearized, gradient_scalar, gradient_solve, gradient_step };

  struct Kernel {
    KernelKind kind = KernelKind::prox_scalar;
    double mu = 0.0;
    std::shared_ptr<const Eigen::LLT<Mat>> llt;
    // Operator applied to x^t on the right-hand side of the linear solve.
    Mat anchor;
  };

  // ‖v − v_old‖/max(‖v_old‖, 1e-30); no movement away from the origin is
  // undefined (NaN), which never satisfies the tolerance.
  static double relative_change(const BlockVector& v, const BlockVector& v_old) {
    const double num = (v - v_old).norm();
    const double den = v_old.norm();
    if (den == 0.0 && num == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return num / std::max(den, 1e-30);
  }

  double tau(int i) const { return cfg_.steps.tau[static_cast<size_t>(i)]; }
  double nu(int i) const { return cfg_.steps.nu[static_cast<size_t>(i)]; }

  static std::vector<int> sample_subset(std::mt19937_64& rng, int n, int k) {
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int a = 0; a < k; ++a) {
      std::uniform_int_distribution<int> pick(a, n - 1);
      std::swap(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(pick(rng))]);
    }
    idx.resize(static_cast<size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
  }

  // (A_j^c)ᵀ(ŷ + ρr)
  Vec coupling_gradient(const SolverState& s, int j) const {
    Vec q = Vec::Zero(p_.A.partition().col_sizes[static_cast<size_t>(j)]);
    for (int i : p_.A.col_pattern(j)) {
      const Vec w = s.y_hat.block(i) + cfg_.rho * s.r.block(i);
      p_.A.block(i, j)->apply_transpose_add(w, q);
    }
    return q;
  }

  static std::shared_ptr<const Eigen::LLT<Mat>> factor(const Mat& M, int j) {
    auto llt = std::make_shared<const Eigen::LLT<Mat>>(M);
    if (llt->info() != Eigen::Success)
      throw NumericalError("block " + std::to_string(j) + ": subproblem matrix is not positive definite");
    return llt;
  }

  void prepare_kernel(int j) {
    Kernel& k = kernels_[static_cast<size_t>(j)];
    const auto& f = *p_.f[static_cast<size_t>(j)];
    const double rho = cfg_.rho;
    const double eta = cfg_.eta[static_cast<size_t>(j)];
    const ColumnGram& G = p_.A.column_gram(j);
    const Index n = p_.A.partition().col_sizes[static_cast<size_t>(j)];
    const std::string where = "block " + std::to_string(j) + " (" + f.name() + "): ";
    const bool scalar = G.kind == ColumnGram::Kind::scalar;

    if (cfg_.mode != UpdateMode::exact && !(eta > 0))
      throw ConfigError(where + to_string(cfg_.mode) + " mode needs eta_j > 0");
    if (cfg_.mode == UpdateMode::linearized_penalty || cfg_.mode == UpdateMode::linearized_both) {
      const double need = rho * p_.A.column_spectral_bound(j);
      if (eta < need * (1 - 1e-12))
        throw ConfigError(where + "eta_j = " + std::to_string(eta) + " is below rho * lambda_max = " + std::to_string(need));
    }

    switch (cfg_.mode) {
      case UpdateMode::exact: {
        if (scalar && f.has_prox()) {
          k.kind = KernelKind::prox_scalar;
          k.mu = rho * G.scalar + eta;
          if (!(k.mu > 0)) throw ConfigError(where + "column has no coupling and eta_j = 0; the subproblem has no prox weight");
          return;
        }
        if (const QuadraticData* q = f.quadratic()) {
          Mat anchor = rho * G.to_dense(n);
          anchor.diagonal().array() += eta;
          k.kind = KernelKind::linear_solve;
          k.llt = factor(q->H + anchor, j);
          k.anchor = std::move(anchor);
          return;
        }
        throw ConfigError(where + "no exact solver for this function with a non-identity column block; use a linearized mode");
      }
      case UpdateMode::linearized_penalty: {
        if (!f.has_prox()) throw ConfigError(where + "linearized-penalty mode needs a prox");
        k.kind = KernelKind::prox_linearized;
        k.mu = eta;
        return;
      }
      case UpdateMode::linearized_f: {
        if (!f.has_gradient()) throw ConfigError(where + "linearized-f mode needs a differentiable f_j");
        if (scalar) {
          k.kind = KernelKind::gradient_scalar;
          k.mu = rho * G.scalar + eta;
          return;
        }
        if (f.constrained()) throw ConfigError(where + "linearized-f with a constraint needs an identity-like column block");
        Mat M = rho * G.to_dense(n);
        M.diagonal().array() += eta;
        k.kind = KernelKind::gradient_solve;
        k.llt = factor(M, j);
        return;
      }
      case UpdateMode::linearized_both: {
        if (!f.has_gradient()) throw ConfigError(where + "linearized-both mode needs a differentiable f_j");
        k.kind = KernelKind::gradient_step;
        k.mu = eta;
        return;
      }
    }
  }

  Vec update_block(int j, const Vec& xt, const Vec& q) const {
    const Kernel& k = kernels_[static_cast<size_t>(j)];
    const auto& f = *p_.f[static_cast<size_t>(j)];
    switch (k.kind) {
      case KernelKind::prox_scalar:
      case KernelKind::prox_linearized: return f.prox(xt - q / k.mu, 1.0 / k.mu);
      case KernelKind::linear_solve: {
        const QuadraticData* qd = f.quadratic();
        return k.llt->solve(k.anchor * xt - qd->g - q);
      }
      case KernelKind::gradient_scalar:
      case KernelKind::gradient_step: return f.project(xt - (f.gradient(xt) + q) / k.mu);
      case KernelKind::gradient_solve: return xt - k.llt->solve(f.gradient(xt) + q);
    }
    return xt;
  }

  const Problem& p_;
  SolverConfig cfg_;
  int J_ = 0;
  int I_ = 0;
  bool steps_checked_ = false;
  TheoryConstants constants_;
  std::vector<Kernel> kernels_;
  std::unique_ptr<WorkerPool> pool_;
};

inline SolveResult solve(const Problem& problem, const SolverConfig& cfg,
                         const std::optional<KktPoint>& init = std::nullopt) {
  return Solver(problem, cfg).solve(init);
}

}  // namespace pdmm
