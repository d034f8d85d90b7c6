#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdmm/errors.hpp"

namespace pdmm {

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Ratio() = default;
  Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw ConfigError("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  // Correctly rounded: one division of exactly representable integers.
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(const Ratio& a, const Ratio& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
};

struct StepPair {
  Ratio tau;
  Ratio nu;
};

struct StepSizes {
  std::vector<double> tau;
  std::vector<double> nu;
  int J = 1;
  int I = 1;
  int K = 1;
  int K_I = 1;
  std::vector<int> K_tilde;
  std::vector<int> degrees;

  int num_rows() const { return static_cast<int>(tau.size()); }
};

namespace detail {

inline void check_block_counts(int J, int K, const std::vector<int>& degrees) {
  if (J < 1) throw ConfigError("J must be at least 1");
  if (K < 1 || K > J)
    throw ConfigError("K = " + std::to_string(K) + " is outside [1, J] with J = " + std::to_string(J));
  if (degrees.empty()) throw ConfigError("degree list is empty");
  for (int d : degrees)
    if (d < 1 || d > J) throw ConfigError("row degree " + std::to_string(d) + " is outside [1, J]");
}

inline StepSizes frame(int J, int K, const std::vector<int>& degrees) {
  StepSizes s;
  s.J = J;
  s.I = static_cast<int>(degrees.size());
  s.K = K;
  s.K_I = s.I;
  s.degrees = degrees;
  for (int d : degrees) s.K_tilde.push_back(std::min(d, K));
  return s;
}

}  // namespace detail

// Exact (τ_i, ν_i) of the step-size table for one row of degree d.
inline StepPair table1_entry(int J, int K, int d) {
  detail::check_block_counts(J, K, {d});
  if (K == J) return {Ratio(1, d), Ratio(d - 1, d)};
  const int kt = std::min(d, K);
  return {Ratio(K, static_cast<std::int64_t>(kt) * (2 * J - K)), Ratio(kt - 1, kt)};
}

inline StepSizes table1_step_sizes(int J, int K, const std::vector<int>& degrees) {
  detail::check_block_counts(J, K, degrees);
  StepSizes s = detail::frame(J, K, degrees);
  for (int d : degrees) {
    const StepPair p = table1_entry(J, K, d);
    s.tau.push_back(p.tau.value());
    s.nu.push_back(p.nu.value());
  }
  return s;
}

// τ_i = K / (K̃_i [ (2J−K) K_I/I + K (1 − K_I/I) ]) with the I factor cleared.
inline Ratio rdbcd_tau_exact(int J, int I, int K, int K_I, int d) {
  detail::check_block_counts(J, K, {d});
  if (I < 1 || K_I < 1 || K_I > I)
    throw ConfigError("K_I = " + std::to_string(K_I) + " is outside [1, I] with I = " + std::to_string(I));
  const std::int64_t kt = std::min(d, K);
  const std::int64_t bracket = static_cast<std::int64_t>(2 * J - K) * K_I + static_cast<std::int64_t>(K) * (I - K_I);
  return Ratio(static_cast<std::int64_t>(K) * I, kt * bracket);
}

inline StepSizes rdbcd_step_sizes(int J, int I, int K, int K_I, const std::vector<int>& degrees) {
  detail::check_block_counts(J, K, degrees);
  if (static_cast<int>(degrees.size()) != I) throw ConfigError("degree list length differs from I");
  StepSizes s = detail::frame(J, K, degrees);
  s.K_I = K_I;
  for (size_t i = 0; i < degrees.size(); ++i) {
    s.tau.push_back(rdbcd_tau_exact(J, I, K, K_I, degrees[i]).value());
    const int kt = s.K_tilde[i];
    s.nu.push_back(Ratio(kt - 1, kt).value());
  }
  return s;
}

inline StepSizes sadmm_step_sizes(int J, const std::vector<int>& degrees) {
  detail::check_block_counts(J, J, degrees);
  StepSizes s = detail::frame(J, J, degrees);
  s.tau.assign(degrees.size(), Ratio(1, J).value());
  s.nu.assign(degrees.size(), Ratio(J - 1, J).value());
  return s;
}

// Data for the proximal (Jacobian) regime: per-column weight η_j, strong
// convexity α_j of the Bregman generator, and λ_max(A_ijᵀA_ij) per stored block.
struct ProximalTerms {
  std::vector<double> eta;
  std::vector<double> alpha;
  double rho = 1.0;
  // spectral[i][j]; negative marks an absent block.
  std::vector<std::vector<double>> spectral;
};

struct PjadmmSteps {
  StepSizes steps;
  ProximalTerms proximal;
};

inline PjadmmSteps pjadmm_step_sizes(const std::vector<int>& degrees, double rho, int I,
                                     const std::vector<std::vector<double>>& spectral,
                                     const std::vector<double>& alpha) {
  if (!(rho > 0)) throw ConfigError("rho must be positive");
  if (static_cast<int>(degrees.size()) != I || static_cast<int>(spectral.size()) != I)
    throw ConfigError("spectral bounds missing for some row blocks");
  const int J = static_cast<int>(alpha.size());
  PjadmmSteps out;
  out.steps = detail::frame(J, J, degrees);
  out.steps.tau.assign(degrees.size(), 1.0);
  out.steps.nu.assign(degrees.size(), 0.0);
  out.proximal.alpha = alpha;
  out.proximal.rho = rho;
  out.proximal.spectral = spectral;
  out.proximal.eta.assign(static_cast<size_t>(J), 0.0);
  for (int j = 0; j < J; ++j) {
    if (!(alpha[static_cast<size_t>(j)] > 0)) throw ConfigError("alpha_j must be positive");
    for (int i = 0; i < I; ++i) {
      if (static_cast<int>(spectral[static_cast<size_t>(i)].size()) != J)
        throw ConfigError("spectral bound row " + std::to_string(i) + " has wrong length");
      const double lam = spectral[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (lam < 0) continue;
      const double eta = (degrees[static_cast<size_t>(i)] - 1) * rho * I * lam / alpha[static_cast<size_t>(j)];
      out.proximal.eta[static_cast<size_t>(j)] = std::max(out.proximal.eta[static_cast<size_t>(j)], eta);
    }
  }
  return out;
}

struct ValidityReport {
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> zeta;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {
constexpr double kValidityTol = 1e-12;
}

// β_i, γ_i, ζ_i for general (τ_i, ν_i); at the table values they reduce to
// β = K/(JK̃), γ = 2(J−K)/(K̃(2J−K)) + 1/d − K/(JK̃), ζ = γ + (1 − J/K)τ.
// With K_I < I the dual term of h carries I/K_I and ζ follows the
// randomized-dual form; γ is then recovered from ζ = γ + (1 − J K_I/(K I)) τ.
inline ValidityReport validity_check(const StepSizes& s, int J, const std::vector<int>& degrees,
                                     const std::optional<ProximalTerms>& proximal = std::nullopt) {
  ValidityReport rep;
  const double tol = detail::kValidityTol;
  const int K = s.K;
  const int I = static_cast<int>(degrees.size());
  auto fail = [&](int i, const std::string& what) {
    std::ostringstream os;
    os << "row " << i << ": " << what;
    rep.violations.push_back(os.str());
  };
  if (static_cast<int>(s.tau.size()) != I || static_cast<int>(s.nu.size()) != I) {
    rep.violations.push_back("step size vectors do not match the number of row blocks");
    return rep;
  }
  if (K < 1 || K > J) {
    rep.violations.push_back("K outside [1, J]");
    return rep;
  }
  const double p = static_cast<double>(s.K_I) / static_cast<double>(std::max(I, 1));
  const bool dual_sampling = s.K_I < I;
  for (int i = 0; i < I; ++i) {
    const int d = degrees[static_cast<size_t>(i)];
    const double tau = s.tau[static_cast<size_t>(i)];
    const double nu = s.nu[static_cast<size_t>(i)];
    const double kt = std::min(d, K);
    const double kj = static_cast<double>(K) / J;
    if (!(tau > 0)) fail(i, "tau must be positive");
    if (!(nu >= 0 && nu < 1)) fail(i, "nu must lie in [0, 1)");

    double beta, gamma, zeta;
    if (!dual_sampling) {
      beta = 4.0 / kt - (2.0 - kj) * (2.0 * (1.0 - nu) + tau);
      gamma = (3.0 - 2.0 * kj) * (1.0 - nu) + (1.0 - kj) * tau + 1.0 / d - 2.0 / kt;
      zeta = gamma + (1.0 - 1.0 / kj) * tau;
    } else {
      const double D = (2.0 * J - K) * p + K * (1.0 - p);
      beta = kj / kt;
      zeta = ((J - K) * p + K * (1.0 - p)) / (kt * D) + 1.0 / d - kj / kt;
      gamma = zeta - (1.0 - p / kj) * tau;
    }
    rep.beta.push_back(beta);
    rep.gamma.push_back(gamma);
    rep.zeta.push_back(zeta);

    if (proximal) {
      // Jacobian regime: every block updated, proximal weights absorb coupling.
      if (K != J) fail(i, "proximal regime requires K = J");
      for (int j = 0; j < J; ++j) {
        const double lam = proximal->spectral[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (lam <= 0) continue;
        const double slack = proximal->eta[static_cast<size_t>(j)] * proximal->alpha[static_cast<size_t>(j)] /
                             (proximal->rho * I * d * lam);
        if (nu < 1.0 - 1.0 / d - slack - tol) fail(i, "nu below the proximal lower bound for column " + std::to_string(j));
      }
      if (nu > 1.0 - 1.0 / d + tol) fail(i, "nu above 1 - 1/d_i");
      if (tau > 1.0 + 1.0 / d - nu + tol) fail(i, "tau above 1 + 1/d_i - nu_i");
      continue;
    }

    if (dual_sampling) {
      const double cap = rdbcd_tau_exact(J, I, K, s.K_I, d).value();
      if (tau > cap * (1 + tol)) fail(i, "tau above the randomized-dual bound");
    } else {
      const double cap = J / (2.0 * J - K) * (4.0 / kt - (4.0 - 2.0 * kj) * (1.0 - nu));
      if (tau > cap + tol) fail(i, "tau above J/(2J-K)[4/K~ - (4 - 2K/J)(1 - nu)]");
    }
    const double nu_hi = 1.0 - 1.0 / kt;
    const double nu_lo = 1.0 - 2.0 * J / (kt * (2.0 * J - K));
    if (nu > nu_hi + tol) fail(i, "nu above 1 - 1/K~");
    if (nu_lo >= 0 && !(nu > nu_lo)) fail(i, "nu not above 1 - 2J/(K~(2J-K))");
    if (beta < -tol) fail(i, "beta negative");
    if (zeta < -tol) fail(i, "zeta negative");
  }
  return rep;
}

struct NamedPreset {
  std::string name;
  int K;
  Ratio tau;
  Ratio nu;
};

// Tuned RPCA values (three blocks) and the value printed for the full-block
// run; none of them is the table value for K = 3.
inline const std::vector<NamedPreset>& rpca_presets() {
  static const std::vector<NamedPreset> presets = {
      {"rpca-tuned-k1", 1, Ratio(1, 2), Ratio(0, 1)},
      {"rpca-tuned-k2", 2, Ratio(1, 3), Ratio(1, 2)},
      {"rpca-tuned-k3", 3, Ratio(1, 2), Ratio(1, 2)},
      {"rpca-text-k3", 3, Ratio(1, 3), Ratio(1, 3)},
  };
  return presets;
}

inline StepSizes preset_step_sizes(const std::string& name, int J, const std::vector<int>& degrees) {
  for (const auto& p : rpca_presets()) {
    if (p.name != name) continue;
    if (p.K > J) throw ConfigError("preset " + name + " needs at least " + std::to_string(p.K) + " blocks");
    StepSizes s = detail::frame(J, p.K, degrees);
    s.tau.assign(degrees.size(), p.tau.value());
    s.nu.assign(degrees.size(), p.nu.value());
    return s;
  }
  throw ConfigError("unknown step-size preset '" + name + "'");
}

// Uniform override of τ and/or ν on top of an existing schedule.
inline StepSizes override_steps(StepSizes s, std::optional<double> tau, std::optional<double> nu) {
  if (tau) std::fill(s.tau.begin(), s.tau.end(), *tau);
  if (nu) std::fill(s.nu.begin(), s.nu.end(), *nu);
  return s;
}

}  // namespace pdmm
