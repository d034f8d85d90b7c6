#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdmm/block_linalg.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/problem.hpp"
#include "pdmm/stepsize.hpp"

namespace pdmm {

struct TraceRecord {
  int t = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  std::optional<double> R;
  std::optional<double> h;
  double wall_time = 0.0;
  double relative_change = 0.0;
  std::vector<int> selected;
};

using Trace = std::vector<TraceRecord>;

// B_{φ_j}(u, v) for column block j.
using BregmanFn = std::function<double(int, const Vec&, const Vec&)>;

inline double no_bregman(int, const Vec&, const Vec&) { return 0.0; }

struct TheoryConstants {
  int J = 1;
  int I = 1;
  int K = 1;
  int K_I = 1;
  std::vector<int> degrees;
  std::vector<double> tau;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> zeta;
};

inline TheoryConstants theory_constants(const StepSizes& s) {
  const ValidityReport rep = validity_check(s, s.J, s.degrees);
  TheoryConstants c;
  c.J = s.J;
  c.I = static_cast<int>(s.degrees.size());
  c.K = s.K;
  c.K_I = s.K_I;
  c.degrees = s.degrees;
  c.tau = s.tau;
  c.beta = rep.beta;
  c.gamma = rep.gamma;
  c.zeta = rep.zeta;
  return c;
}

// R from the changed blocks only. deltas[k] = x_j^{t+1} − x_j^t for j = selected[k];
// r_new = A x^{t+1} − a.
inline double residual_R_from_deltas(const BlockMatrix& A, const BlockVector& r_new, double rho,
                                     const std::vector<double>& beta, const std::vector<int>& selected, int K,
                                     const std::vector<Vec>& deltas, const std::vector<double>& bregman_terms) {
  ZVector dz(A);
  for (int i = 0; i < A.num_row_blocks(); ++i) {
    const auto& cols = A.row_pattern(i);
    for (size_t k = 0; k < cols.size(); ++k) {
      auto it = std::lower_bound(selected.begin(), selected.end(), cols[k]);
      if (it == selected.end() || *it != cols[k]) continue;
      dz.entry(i, k) = A.row_blocks(i)[k].apply(deltas[static_cast<size_t>(it - selected.begin())]);
    }
  }
  double value = 0.5 * rho * build_Pt(A, selected, K)(dz);
  for (int i = 0; i < A.num_row_blocks(); ++i)
    value += 0.5 * rho * beta[static_cast<size_t>(i)] * r_new.block(i).squaredNorm();
  for (double b : bregman_terms) value += b;
  return value;
}

// R(x^{t+1}) = (ρ/2)‖z^{t+1} − z^t‖²_{P_t} + (ρ/2)Σ β_i‖A_i x^{t+1} − a_i‖² + Σ η_j B_{φ_j}(x_j^{t+1}, x_j^t)
inline double residual_R(const BlockMatrix& A, const BlockVector& a, const BlockVector& x_new,
                         const BlockVector& x_old, double rho, const std::vector<double>& beta,
                         std::vector<int> selected, int K, const std::vector<double>& eta = {},
                         const BregmanFn& bregman = no_bregman) {
  std::sort(selected.begin(), selected.end());
  std::vector<Vec> deltas;
  std::vector<double> breg;
  for (int j : selected) {
    deltas.push_back(x_new.block(j) - x_old.block(j));
    const double e = eta.empty() ? 0.0 : eta[static_cast<size_t>(j)];
    if (e > 0) breg.push_back(e * bregman(j, x_new.block(j), x_old.block(j)));
  }
  BlockVector r = A.apply(x_new);
  r -= a;
  return residual_R_from_deltas(A, r, rho, beta, selected, K, deltas, breg);
}

// L̃_ρ(x, y) = f(x) − f(x*) + Σ_i [⟨y_i, A_i x − a_i⟩ + ((γ_i − τ_i)ρ/2)‖A_i x − a_i‖²]
inline double aux_lagrangian(const Problem& p, const BlockVector& x, const BlockVector& y, double f_star,
                             const std::vector<double>& gamma, const std::vector<double>& tau, double rho) {
  const BlockVector r = p.residual(x);
  double v = p.objective(x) - f_star;
  for (int i = 0; i < p.num_row_blocks(); ++i) {
    v += y.block(i).dot(r.block(i));
    v += 0.5 * (gamma[static_cast<size_t>(i)] - tau[static_cast<size_t>(i)]) * rho * r.block(i).squaredNorm();
  }
  return v;
}

struct LyapunovTerms {
  double dual = 0.0;
  double aux = 0.0;
  double q = 0.0;
  double bregman = 0.0;
  double total() const { return dual + aux + q + bregman; }
};

inline LyapunovTerms lyapunov_terms(const Problem& p, const BlockVector& x, const BlockVector& y,
                                    const BlockVector& y_prev, const KktPoint& kkt, const TheoryConstants& c,
                                    double rho, const std::vector<double>& eta = {},
                                    const BregmanFn& bregman = no_bregman) {
  p.require_feasible(kkt.x);
  LyapunovTerms h;
  const double dual_scale = static_cast<double>(c.K) / c.J * static_cast<double>(c.I) / c.K_I;
  for (int i = 0; i < p.num_row_blocks(); ++i)
    h.dual += dual_scale / (2.0 * c.tau[static_cast<size_t>(i)] * rho) * (kkt.y.block(i) - y_prev.block(i)).squaredNorm();
  h.aux = aux_lagrangian(p, x, y, p.objective(kkt.x), c.gamma, c.tau, rho);
  const ZVector z = ZVector::from(p.A, x);
  const ZVector dz = ZVector::from(p.A, kkt.x) - z;
  h.q = 0.5 * rho * build_Q(p.A)(dz);
  for (int j = 0; j < p.num_col_blocks(); ++j) {
    const double e = eta.empty() ? 0.0 : eta[static_cast<size_t>(j)];
    if (e > 0) h.bregman += e * bregman(j, kkt.x.block(j), x.block(j));
  }
#ifdef PDMM_TESTING
  {
    // ‖z − z*‖²_Q = Σ_i [‖z_i − z_i*‖² − (1/d_i)‖A_i x − a_i‖²] for feasible x*.
    const BlockVector r = p.residual(x);
    double rhs = 0.0, scale = 0.0;
    for (int i = 0; i < p.num_row_blocks(); ++i) {
      for (size_t k = 0; k < dz.row_count(i); ++k) rhs += dz.entry(i, k).squaredNorm();
      rhs -= r.block(i).squaredNorm() / p.A.degree(i);
    }
    for (int i = 0; i < p.num_row_blocks(); ++i)
      for (size_t k = 0; k < dz.row_count(i); ++k) scale += dz.entry(i, k).squaredNorm();
    const double lhs = 2.0 * h.q / rho;
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + scale))
      throw NumericalError("Q-norm identity violated: " + std::to_string(lhs) + " vs " + std::to_string(rhs));
  }
#endif
  return h;
}

// h(v*, v^t); y_prev is y^{t−1}. With check_sign the value must be ≥ −1e-9
// relative to the objective scale.
inline double lyapunov_h(const Problem& p, const BlockVector& x, const BlockVector& y, const BlockVector& y_prev,
                         const KktPoint& kkt, const TheoryConstants& c, double rho,
                         const std::vector<double>& eta = {}, const BregmanFn& bregman = no_bregman,
                         bool check_sign = true) {
  const double h = lyapunov_terms(p, x, y, y_prev, kkt, c, rho, eta, bregman).total();
  if (check_sign && h < -1e-9 * (1.0 + std::abs(p.objective(kkt.x))))
    throw NumericalError("Lyapunov distance is negative: " + std::to_string(h));
  return h;
}

// (ρ/2)Σ ζ_i‖A_i x − a_i‖² + (ρ/2)‖z* − z‖²_Q + Σ η_j B(x_j*, x_j)
inline double lyapunov_lower_bound(const Problem& p, const BlockVector& x, const KktPoint& kkt,
                                   const TheoryConstants& c, double rho, const std::vector<double>& eta = {},
                                   const BregmanFn& bregman = no_bregman) {
  const BlockVector r = p.residual(x);
  double v = 0.0;
  for (int i = 0; i < p.num_row_blocks(); ++i) v += 0.5 * rho * c.zeta[static_cast<size_t>(i)] * r.block(i).squaredNorm();
  v += 0.5 * rho * build_Q(p.A)(ZVector::from(p.A, kkt.x) - ZVector::from(p.A, x));
  for (int j = 0; j < p.num_col_blocks(); ++j) {
    const double e = eta.empty() ? 0.0 : eta[static_cast<size_t>(j)];
    if (e > 0) v += e * bregman(j, kkt.x.block(j), x.block(j));
  }
  return v;
}

// Running mean (1/T) Σ_{t=1}^T x^t.
class ErgodicAverage {
 public:
  void add(const BlockVector& x) {
    if (count_ == 0) {
      sum_ = x;
    } else {
      sum_ += x;
    }
    ++count_;
  }
  int count() const { return count_; }
  BlockVector mean() const {
    if (count_ == 0) throw ConfigError("ergodic average of zero iterates");
    return (1.0 / count_) * sum_;
  }

 private:
  BlockVector sum_;
  int count_ = 0;
};

inline BlockVector ergodic_average(const std::vector<BlockVector>& iterates, int T) {
  if (T < 1 || T > static_cast<int>(iterates.size())) throw ConfigError("ergodic average needs 1 <= T <= #iterates");
  ErgodicAverage avg;
  for (int t = 0; t < T; ++t) avg.add(iterates[static_cast<size_t>(t)]);
  return avg.mean();
}

}  // namespace pdmm
