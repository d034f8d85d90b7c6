#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdmm/block_linalg.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/prox.hpp"

namespace pdmm {

struct KktPoint {
  BlockVector x;
  BlockVector y;
};

// min Σ_j f_j(x_j) subject to Σ_j A_j^c x_j = a.
struct Problem {
  std::string name;
  BlockMatrix A;
  BlockVector a;
  std::vector<FunctionPtr> f;
  std::optional<KktPoint> reference;

  int num_col_blocks() const { return A.num_col_blocks(); }
  int num_row_blocks() const { return A.num_row_blocks(); }

  double objective(const BlockVector& x) const {
    double v = 0.0;
    for (int j = 0; j < num_col_blocks(); ++j) v += f[static_cast<size_t>(j)]->value(x.block(j));
    return v;
  }

  BlockVector residual(const BlockVector& x) const {
    BlockVector r = A.apply(x);
    r -= a;
    return r;
  }

  void validate() const {
    if (!a.conforms(A.partition().row_sizes)) throw DimensionError("right-hand side does not match the row partition");
    if (static_cast<int>(f.size()) != num_col_blocks())
      throw DimensionError("expected " + std::to_string(num_col_blocks()) + " block functions, got " +
                           std::to_string(f.size()));
    for (size_t j = 0; j < f.size(); ++j)
      if (!f[j]) throw ConfigError("block function " + std::to_string(j) + " is missing");
    A.require_no_empty_rows();
    if (reference) {
      if (!reference->x.conforms(A.partition().col_sizes) || !reference->y.conforms(A.partition().row_sizes))
        throw DimensionError("reference point does not match the partition");
      require_feasible(reference->x);
    }
  }

  void require_feasible(const BlockVector& x) const {
    const double viol = residual(x).norm();
    if (viol > 1e-8 * (1.0 + a.norm()))
      throw ValidationError("reference point is infeasible: |Ax - a| = " + std::to_string(viol));
  }
};

}  // namespace pdmm
