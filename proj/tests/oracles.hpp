#pragma once

#include <vector>

#include "pdmm/pdmm.hpp"

namespace pdmm::testing {

// Independent splitting-form ADMM: z_j = A_j x_j with Σ z_j = a, one multiplier per block,
// for f_j = ½‖x_j − c_j‖².
struct SplittingAdmm {
  std::vector<Mat> Aj;
  std::vector<Vec> c, x, z, lam;
  Vec a;
  double rho;

  SplittingAdmm(const ToyQp& q, double rho_) : rho(rho_) {
    const Problem& p = q.problem;
    const Mat D = p.A.to_dense();
    a = p.a.data();
    Index off = 0;
    const int J = p.num_col_blocks();
    for (int j = 0; j < J; ++j) {
      const Index n = p.A.partition().col_sizes[static_cast<size_t>(j)];
      Aj.push_back(D.middleCols(off, n));
      off += n;
      c.push_back(dynamic_cast<const ShiftedSquaredNorm&>(*p.f[static_cast<size_t>(j)]).center());
      x.push_back(Vec::Zero(n));
      z.push_back(a / J);
      lam.push_back(Vec::Zero(a.size()));
    }
  }

  void step() {
    const int J = static_cast<int>(Aj.size());
    for (int j = 0; j < J; ++j) {
      const Mat& A = Aj[static_cast<size_t>(j)];
      const Mat M = Mat::Identity(A.cols(), A.cols()) + rho * A.transpose() * A;
      x[static_cast<size_t>(j)] =
          M.ldlt().solve(c[static_cast<size_t>(j)] + rho * A.transpose() * (z[static_cast<size_t>(j)] - lam[static_cast<size_t>(j)] / rho));
    }
    Vec total = -a;
    for (int j = 0; j < J; ++j) total += Aj[static_cast<size_t>(j)] * x[static_cast<size_t>(j)] + lam[static_cast<size_t>(j)] / rho;
    for (int j = 0; j < J; ++j) {
      const Vec v = Aj[static_cast<size_t>(j)] * x[static_cast<size_t>(j)] + lam[static_cast<size_t>(j)] / rho;
      z[static_cast<size_t>(j)] = v - total / J;
    }
    for (int j = 0; j < J; ++j)
      lam[static_cast<size_t>(j)] += rho * (Aj[static_cast<size_t>(j)] * x[static_cast<size_t>(j)] - z[static_cast<size_t>(j)]);
  }
};

}  // namespace pdmm::testing
