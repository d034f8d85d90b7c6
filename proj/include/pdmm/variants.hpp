#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdmm/errors.hpp"
#include "pdmm/problem.hpp"
#include "pdmm/solver.hpp"
#include "pdmm/stepsize.hpp"

namespace pdmm {

enum class Variant { pdmm, sadmm, pjadmm, rdbcd, gsadmm_ref };

inline Variant parse_variant(const std::string& s) {
  if (s == "pdmm") return Variant::pdmm;
  if (s == "sadmm") return Variant::sadmm;
  if (s == "pjadmm") return Variant::pjadmm;
  if (s == "rdbcd") return Variant::rdbcd;
  if (s == "gsadmm-ref") return Variant::gsadmm_ref;
  throw ConfigError("unknown variant '" + s + "' (pdmm, sadmm, pjadmm, rdbcd, gsadmm-ref)");
}

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::pdmm: return "pdmm";
    case Variant::sadmm: return "sadmm";
    case Variant::pjadmm: return "pjadmm";
    case Variant::rdbcd: return "rdbcd";
    case Variant::gsadmm_ref: return "gsadmm-ref";
  }
  return "?";
}

struct VariantOptions {
  // 0 selects all blocks.
  int K = 0;
  int K_I = 0;
  double rho = 1.0;
  SamplerScheme sampler = SamplerScheme::uniform;
  UpdateMode mode = UpdateMode::exact;
  std::vector<double> eta;
  std::optional<double> tau;
  std::optional<double> nu;
  std::optional<std::string> preset;
};

// λ_max(A_ijᵀA_ij) per row, −1 where the block is absent.
inline std::vector<std::vector<double>> block_spectral_bounds(const BlockMatrix& A) {
  std::vector<std::vector<double>> out(static_cast<size_t>(A.num_row_blocks()),
                                       std::vector<double>(static_cast<size_t>(A.num_col_blocks()), -1.0));
  for (int i = 0; i < A.num_row_blocks(); ++i) {
    const auto& cols = A.row_pattern(i);
    for (size_t k = 0; k < cols.size(); ++k)
      out[static_cast<size_t>(i)][static_cast<size_t>(cols[k])] = A.row_blocks(i)[k].spectral_bound();
  }
  return out;
}

inline SolverConfig configure(Variant variant, const Problem& p, const VariantOptions& o) {
  const int J = p.num_col_blocks();
  const int I = p.num_row_blocks();
  const std::vector<int> d = p.A.degrees();
  const int K = o.K == 0 ? J : o.K;
  const int K_I = o.K_I == 0 ? I : o.K_I;
  if (K < 1 || K > J) throw ConfigError("K = " + std::to_string(K) + " is outside [1, " + std::to_string(J) + "]");
  if (K_I < 1 || K_I > I) throw ConfigError("K_I = " + std::to_string(K_I) + " is outside [1, " + std::to_string(I) + "]");
  if (variant != Variant::rdbcd && K_I != I) throw ConfigError("K_I < I requires the rdbcd variant");
  if (o.preset && variant != Variant::pdmm) throw ConfigError("step-size presets apply to the pdmm variant only");

  SolverConfig cfg;
  cfg.rho = o.rho;
  cfg.sampler = o.sampler;
  cfg.mode = o.mode;
  cfg.eta = o.eta;
  switch (variant) {
    case Variant::pdmm: {
      if (o.preset) {
        cfg.steps = preset_step_sizes(*o.preset, J, d);
        if (o.K != 0 && o.K != cfg.steps.K) throw ConfigError("preset " + *o.preset + " fixes K = " + std::to_string(cfg.steps.K));
        cfg.allow_unchecked_steps = true;
      } else {
        cfg.steps = table1_step_sizes(J, K, d);
      }
      if (o.tau || o.nu) {
        cfg.steps = override_steps(cfg.steps, o.tau, o.nu);
        cfg.allow_unchecked_steps = true;
      }
      break;
    }
    case Variant::sadmm: {
      if (K != J) throw ConfigError("sadmm updates all blocks; K must equal J");
      if (o.tau || o.nu) throw ConfigError("sadmm fixes tau = 1/J and nu = 1 - 1/J");
      cfg.steps = sadmm_step_sizes(J, d);
      // Justified by the splitting-form analysis, not the per-row interval.
      cfg.allow_unchecked_steps = true;
      cfg.backward_step_init = true;
      break;
    }
    case Variant::pjadmm: {
      if (K != J) throw ConfigError("pjadmm updates all blocks; K must equal J");
      if (o.nu) throw ConfigError("pjadmm fixes nu = 0; manual nu is not allowed");
      if (o.tau) throw ConfigError("pjadmm fixes tau = 1; manual tau is not allowed");
      if (o.mode != UpdateMode::exact) throw ConfigError("pjadmm uses exact proximal updates");
      const PjadmmSteps pj = pjadmm_step_sizes(d, o.rho, I, block_spectral_bounds(p.A), std::vector<double>(static_cast<size_t>(J), 1.0));
      cfg.steps = pj.steps;
      cfg.proximal = pj.proximal;
      if (!o.eta.empty()) {
        if (static_cast<int>(o.eta.size()) != J) throw ConfigError("eta needs one entry per column block");
        cfg.proximal->eta = o.eta;
      }
      cfg.eta = cfg.proximal->eta;
      break;
    }
    case Variant::rdbcd: {
      if (o.tau || o.nu) throw ConfigError("rdbcd derives tau and nu from K and K_I");
      cfg.steps = rdbcd_step_sizes(J, I, K, K_I, d);
      break;
    }
    case Variant::gsadmm_ref: {
      if (K != J) throw ConfigError("gsadmm-ref sweeps all blocks; K must equal J");
      cfg.steps = table1_step_sizes(J, J, d);
      cfg.steps.tau.assign(static_cast<size_t>(I), 1.0);
      cfg.steps.nu.assign(static_cast<size_t>(I), 0.0);
      cfg.gauss_seidel = true;
      cfg.allow_unchecked_steps = true;
      cfg.track_R = false;
      break;
    }
  }
  return cfg;
}

}  // namespace pdmm
