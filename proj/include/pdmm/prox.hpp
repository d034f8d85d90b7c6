#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "pdmm/block_linalg.hpp"
#include "pdmm/errors.hpp"

namespace pdmm {

// sign(v_k) * max(|v_k| - lambda, 0)
inline Vec prox_l1(const Vec& v, double lambda) {
  if (!(lambda > 0)) throw ConfigError("prox_l1 needs lambda > 0");
  return v.array().sign() * (v.array().abs() - lambda).max(0.0);
}

inline Vec prox_group_l2(const Vec& v, double lambda) {
  if (!(lambda > 0)) throw ConfigError("prox_group_l2 needs lambda > 0");
  const double n = v.norm();
  if (n <= lambda) return Vec::Zero(v.size());
  return (1.0 - lambda / n) * v;
}

// Singular value thresholding.
inline Mat prox_nuclear(const Mat& V, double lambda) {
  if (!(lambda > 0)) throw ConfigError("prox_nuclear needs lambda > 0");
  if (V.size() == 0) return V;
  Eigen::BDCSVD<Mat> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("SVD failed in prox_nuclear on a " + std::to_string(V.rows()) + "x" +
                         std::to_string(V.cols()) + " matrix");
  Vec s = (svd.singularValues().array() - lambda).max(0.0);
  Index r = 0;
  while (r < s.size() && s[r] > 0) ++r;
  if (r == 0) return Mat::Zero(V.rows(), V.cols());
  return svd.matrixU().leftCols(r) * s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
}

// Prox of (c/2)‖·‖_F².
inline Mat prox_sq_frobenius(const Mat& V, double lambda, double c) {
  if (!(lambda > 0) || !(c > 0)) throw ConfigError("prox_sq_frobenius needs lambda > 0 and c > 0");
  return V / (1.0 + c * lambda);
}

// Solves (H + mu I) u = mu v - g.
inline Vec quadratic_loss_solve(const Mat& H, const Vec& g, double mu, const Vec& v) {
  if (!(mu > 0)) throw ConfigError("quadratic_loss_solve needs mu > 0");
  Mat M = H;
  M.diagonal().array() += mu;
  Eigen::LLT<Mat> llt(M);
  if (llt.info() != Eigen::Success) throw NumericalError("H + mu I is not positive definite");
  return llt.solve(mu * v - g);
}

// f(u) = ½ uᵀHu + gᵀu + c
struct QuadraticData {
  Mat H;
  Vec g;
  double c = 0.0;
};

// Cholesky factors of H + mu I keyed by mu. Entries are immutable once
// inserted; lookups are safe from concurrent prox calls.
class ShiftedCholeskyCache {
 public:
  explicit ShiftedCholeskyCache(Mat H) : H_(std::move(H)) {}

  std::shared_ptr<const Eigen::LLT<Mat>> get(double mu) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(mu);
    if (it != cache_.end()) return it->second;
    Mat M = H_;
    M.diagonal().array() += mu;
    auto llt = std::make_shared<const Eigen::LLT<Mat>>(M);
    if (llt->info() != Eigen::Success) throw NumericalError("H + mu I is not positive definite");
    if (cache_.size() > 8) cache_.clear();
    cache_.emplace(mu, llt);
    return llt;
  }

 private:
  Mat H_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<const Eigen::LLT<Mat>>> cache_;
};

// One block term f_j together with its optional constraint set X_j.
// prox(v, λ) returns argmin_u f_j(u) + ι_{X_j}(u) + ‖u − v‖²/(2λ).
class BlockFunction {
 public:
  virtual ~BlockFunction() = default;
  virtual std::string name() const = 0;
  virtual double value(const Vec& x) const = 0;

  virtual bool has_prox() const { return false; }
  virtual Vec prox(const Vec&, double) const { throw ConfigError(name() + " has no prox"); }

  virtual bool has_gradient() const { return false; }
  virtual Vec gradient(const Vec&) const { throw ConfigError(name() + " is not differentiable"); }

  virtual Vec subgradient(const Vec& x) const { return gradient(x); }

  virtual bool constrained() const { return false; }
  virtual Vec project(const Vec& x) const { return x; }

  virtual const QuadraticData* quadratic() const { return nullptr; }
};

using FunctionPtr = std::shared_ptr<const BlockFunction>;

class ZeroFunction final : public BlockFunction {
 public:
  explicit ZeroFunction(Index n) : q_{Mat::Zero(n, n), Vec::Zero(n), 0.0} {}
  std::string name() const override { return "zero"; }
  double value(const Vec&) const override { return 0.0; }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double) const override { return v; }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return Vec::Zero(x.size()); }
  const QuadraticData* quadratic() const override { return &q_; }

 private:
  QuadraticData q_;
};

// weight * ‖x‖₁
class L1Norm final : public BlockFunction {
 public:
  explicit L1Norm(double weight) : w_(weight) {
    if (!(weight > 0)) throw ConfigError("l1 weight must be positive");
  }
  std::string name() const override { return "l1"; }
  double weight() const { return w_; }
  double value(const Vec& x) const override { return w_ * x.lpNorm<1>(); }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override { return prox_l1(v, lambda * w_); }
  Vec subgradient(const Vec& x) const override { return w_ * x.array().sign().matrix(); }

 private:
  double w_;
};

// weight * ‖x‖₂
class GroupL2Norm final : public BlockFunction {
 public:
  explicit GroupL2Norm(double weight) : w_(weight) {
    if (!(weight > 0)) throw ConfigError("group weight must be positive");
  }
  std::string name() const override { return "group_l2"; }
  double weight() const { return w_; }
  double value(const Vec& x) const override { return w_ * x.norm(); }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override { return prox_group_l2(v, lambda * w_); }
  Vec subgradient(const Vec& x) const override {
    const double n = x.norm();
    return n > 0 ? Vec(w_ * x / n) : Vec(Vec::Zero(x.size()));
  }

 private:
  double w_;
};

// weight * ‖X‖_* on a column-major vectorized rows x cols matrix.
class NuclearNorm final : public BlockFunction {
 public:
  NuclearNorm(double weight, Index rows, Index cols) : w_(weight), rows_(rows), cols_(cols) {
    if (!(weight > 0)) throw ConfigError("nuclear weight must be positive");
  }
  std::string name() const override { return "nuclear"; }
  double weight() const { return w_; }
  double value(const Vec& x) const override {
    Eigen::Map<const Mat> X(x.data(), rows_, cols_);
    Eigen::BDCSVD<Mat> svd(X);
    return w_ * svd.singularValues().sum();
  }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override {
    Eigen::Map<const Mat> V(v.data(), rows_, cols_);
    Mat P = prox_nuclear(V, lambda * w_);
    return Eigen::Map<const Vec>(P.data(), P.size());
  }

 private:
  double w_;
  Index rows_, cols_;
};

// (c/2)‖x‖²
class SquaredFrobenius final : public BlockFunction {
 public:
  SquaredFrobenius(double c, Index n) : c_(c), q_{c * Mat::Identity(n, n), Vec::Zero(n), 0.0} {
    if (!(c > 0)) throw ConfigError("squared norm scale must be positive");
  }
  std::string name() const override { return "sq_frobenius"; }
  double value(const Vec& x) const override { return 0.5 * c_ * x.squaredNorm(); }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override { return v / (1.0 + c_ * lambda); }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return c_ * x; }
  const QuadraticData* quadratic() const override { return &q_; }

 private:
  double c_;
  QuadraticData q_;
};

// ½‖x − center‖²
class ShiftedSquaredNorm final : public BlockFunction {
 public:
  explicit ShiftedSquaredNorm(Vec center)
      : c_(center), q_{Mat::Identity(center.size(), center.size()), -center, 0.5 * center.squaredNorm()} {}
  std::string name() const override { return "shifted_sq"; }
  const Vec& center() const { return c_; }
  double value(const Vec& x) const override { return 0.5 * (x - c_).squaredNorm(); }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override { return (v + lambda * c_) / (1.0 + lambda); }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return x - c_; }
  const QuadraticData* quadratic() const override { return &q_; }

 private:
  Vec c_;
  QuadraticData q_;
};

// ½ xᵀHx + gᵀx + c with H symmetric PSD.
class QuadraticFunction : public BlockFunction {
 public:
  QuadraticFunction(Mat H, Vec g, double c = 0.0) : q_{std::move(H), std::move(g), c}, chol_(q_.H) {
    if (q_.H.rows() != q_.H.cols() || q_.H.rows() != q_.g.size())
      throw DimensionError("quadratic function H and g sizes disagree");
  }
  std::string name() const override { return "quadratic"; }
  double value(const Vec& x) const override { return 0.5 * x.dot(q_.H * x) + q_.g.dot(x) + q_.c; }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double lambda) const override {
    const double mu = 1.0 / lambda;
    return chol_.get(mu)->solve(mu * v - q_.g);
  }
  bool has_gradient() const override { return true; }
  Vec gradient(const Vec& x) const override { return q_.H * x + q_.g; }
  const QuadraticData* quadratic() const override { return &q_; }

 private:
  QuadraticData q_;
  ShiftedCholeskyCache chol_;
};

// (scale/2)‖D x − b‖²
class LeastSquaresLoss final : public QuadraticFunction {
 public:
  LeastSquaresLoss(const Mat& D, const Vec& b, double scale)
      : QuadraticFunction(scale * D.transpose() * D, -scale * D.transpose() * b, 0.5 * scale * b.squaredNorm()),
        D_(D), b_(b), scale_(scale) {
    if (!(scale > 0)) throw ConfigError("least squares scale must be positive");
  }
  std::string name() const override { return "least_squares"; }
  double value(const Vec& x) const override { return 0.5 * scale_ * (D_ * x - b_).squaredNorm(); }

 private:
  Mat D_;
  Vec b_;
  double scale_;
};

// Indicator of the box [lo, hi]^n.
class BoxIndicator final : public BlockFunction {
 public:
  BoxIndicator(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw ConfigError("box needs lo <= hi");
  }
  std::string name() const override { return "box"; }
  double value(const Vec& x) const override {
    const bool inside = (x.array() >= lo_ - 1e-12).all() && (x.array() <= hi_ + 1e-12).all();
    return inside ? 0.0 : std::numeric_limits<double>::infinity();
  }
  bool has_prox() const override { return true; }
  Vec prox(const Vec& v, double) const override { return project(v); }
  bool constrained() const override { return true; }
  Vec project(const Vec& x) const override { return x.cwiseMax(lo_).cwiseMin(hi_); }

 private:
  double lo_, hi_;
};

}  // namespace pdmm
