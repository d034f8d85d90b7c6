#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pdmm/errors.hpp"

namespace pdmm {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Sizes m_i of the I row blocks and n_j of the J column blocks.
struct BlockPartition {
  std::vector<Index> row_sizes;
  std::vector<Index> col_sizes;

  BlockPartition() = default;
  BlockPartition(std::vector<Index> rows, std::vector<Index> cols)
      : row_sizes(std::move(rows)), col_sizes(std::move(cols)) {
    if (row_sizes.empty() || col_sizes.empty())
      throw DimensionError("partition needs at least one row block and one column block");
    for (Index s : row_sizes)
      if (s <= 0) throw DimensionError("row block sizes must be positive");
    for (Index s : col_sizes)
      if (s <= 0) throw DimensionError("column block sizes must be positive");
  }

  int num_row_blocks() const { return static_cast<int>(row_sizes.size()); }
  int num_col_blocks() const { return static_cast<int>(col_sizes.size()); }
  Index total_rows() const { return sum(row_sizes); }
  Index total_cols() const { return sum(col_sizes); }

 private:
  static Index sum(const std::vector<Index>& v) {
    Index s = 0;
    for (Index x : v) s += x;
    return s;
  }
};

class BlockVector {
 public:
  BlockVector() = default;

  explicit BlockVector(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    init_offsets();
    data_ = Vec::Zero(offsets_.back());
  }

  BlockVector(std::vector<Index> sizes, Vec data) : sizes_(std::move(sizes)), data_(std::move(data)) {
    init_offsets();
    if (data_.size() != offsets_.back())
      throw DimensionError("block vector data length " + std::to_string(data_.size()) +
                           " does not match block sizes total " + std::to_string(offsets_.back()));
  }

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  Index size() const { return data_.size(); }
  Index block_size(int j) const { return sizes_[static_cast<size_t>(j)]; }
  Index offset(int j) const { return offsets_[static_cast<size_t>(j)]; }
  const std::vector<Index>& sizes() const { return sizes_; }

  auto block(int j) { return data_.segment(offset(j), block_size(j)); }
  auto block(int j) const { return data_.segment(offset(j), block_size(j)); }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  bool conforms(const std::vector<Index>& sizes) const { return sizes_ == sizes; }
  double norm() const { return data_.norm(); }
  void set_zero() { data_.setZero(); }

  BlockVector& operator+=(const BlockVector& o) {
    require_same(o);
    data_ += o.data_;
    return *this;
  }
  BlockVector& operator-=(const BlockVector& o) {
    require_same(o);
    data_ -= o.data_;
    return *this;
  }
  BlockVector& operator*=(double s) {
    data_ *= s;
    return *this;
  }
  friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
  friend BlockVector operator*(double s, BlockVector a) { return a *= s; }
  friend bool operator==(const BlockVector& a, const BlockVector& b) {
    return a.sizes_ == b.sizes_ && a.data_ == b.data_;
  }

 private:
  void init_offsets() {
    offsets_.assign(sizes_.size() + 1, 0);
    for (size_t k = 0; k < sizes_.size(); ++k) {
      if (sizes_[k] <= 0) throw DimensionError("block sizes must be positive");
      offsets_[k + 1] = offsets_[k] + sizes_[k];
    }
  }
  void require_same(const BlockVector& o) const {
    if (sizes_ != o.sizes_) throw DimensionError("block vector partitions differ");
  }

  std::vector<Index> sizes_;
  std::vector<Index> offsets_{0};
  Vec data_;
};

// Largest eigenvalue of a symmetric PSD matrix. Exact below 65 columns,
// power iteration above.
inline double symmetric_spectral_bound(const Mat& gram, int max_iter = 500, double tol = 1e-8) {
  const Index n = gram.rows();
  if (n == 0) return 0.0;
  if (n <= 64) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on column gram");
    return std::max(0.0, es.eigenvalues().maxCoeff());
  }
  Vec v = Vec::Ones(n);
  for (Index k = 0; k < n; ++k) v[k] += 1e-3 * static_cast<double>(k % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = gram * v;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - lambda) <= tol * std::max(std::abs(next), 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::max(0.0, lambda);
}

// One nonzero block A_ij. Besides dense storage it has two structured kinds
// that never materialize: a scaled identity and a signed row selection
// (row r of the block is scale * e_{pick[r]}^T).
class Block {
 public:
  enum class Kind { dense, identity, selection };

  static Block dense(Mat m) {
    Block b;
    b.kind_ = Kind::dense;
    b.rows_ = m.rows();
    b.cols_ = m.cols();
    b.dense_ = std::make_shared<const Mat>(std::move(m));
    return b;
  }

  static Block identity(Index n, double scale = 1.0) {
    Block b;
    b.kind_ = Kind::identity;
    b.rows_ = n;
    b.cols_ = n;
    b.scale_ = scale;
    return b;
  }

  static Block selection(Index cols, std::vector<Index> pick, double scale = 1.0) {
    Block b;
    b.kind_ = Kind::selection;
    b.rows_ = static_cast<Index>(pick.size());
    b.cols_ = cols;
    b.scale_ = scale;
    for (Index p : pick)
      if (p < 0 || p >= cols) throw DimensionError("selection index out of range");
    b.pick_ = std::make_shared<const std::vector<Index>>(std::move(pick));
    return b;
  }

  Kind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double scale() const { return scale_; }
  const Mat& dense_matrix() const { return *dense_; }
  const std::vector<Index>& picks() const { return *pick_; }

  // out += alpha * B x
  void apply_add(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out, double alpha = 1.0) const {
    switch (kind_) {
      case Kind::dense: out.noalias() += alpha * (*dense_) * x; break;
      case Kind::identity: out += (alpha * scale_) * x; break;
      case Kind::selection: {
        const auto& p = *pick_;
        const double s = alpha * scale_;
        for (Index r = 0; r < rows_; ++r) out[r] += s * x[p[static_cast<size_t>(r)]];
        break;
      }
    }
  }

  // out += alpha * B^T y
  void apply_transpose_add(const Eigen::Ref<const Vec>& y, Eigen::Ref<Vec> out, double alpha = 1.0) const {
    switch (kind_) {
      case Kind::dense: out.noalias() += alpha * dense_->transpose() * y; break;
      case Kind::identity: out += (alpha * scale_) * y; break;
      case Kind::selection: {
        const auto& p = *pick_;
        const double s = alpha * scale_;
        for (Index r = 0; r < rows_; ++r) out[p[static_cast<size_t>(r)]] += s * y[r];
        break;
      }
    }
  }

  Vec apply(const Eigen::Ref<const Vec>& x) const {
    Vec out = Vec::Zero(rows_);
    apply_add(x, out);
    return out;
  }

  Vec apply_transpose(const Eigen::Ref<const Vec>& y) const {
    Vec out = Vec::Zero(cols_);
    apply_transpose_add(y, out);
    return out;
  }

  Mat to_dense() const {
    switch (kind_) {
      case Kind::dense: return *dense_;
      case Kind::identity: return scale_ * Mat::Identity(rows_, cols_);
      case Kind::selection: {
        Mat m = Mat::Zero(rows_, cols_);
        for (Index r = 0; r < rows_; ++r) m(r, (*pick_)[static_cast<size_t>(r)]) = scale_;
        return m;
      }
    }
    return {};
  }

  bool has_diagonal_gram() const { return kind_ != Kind::dense; }

  // diag(B^T B); valid only when has_diagonal_gram().
  Vec gram_diagonal() const {
    if (kind_ == Kind::identity) return Vec::Constant(cols_, scale_ * scale_);
    Vec d = Vec::Zero(cols_);
    if (kind_ == Kind::selection)
      for (Index p : *pick_) d[p] += scale_ * scale_;
    return d;
  }

  Mat gram() const {
    if (kind_ == Kind::dense) return dense_->transpose() * (*dense_);
    return gram_diagonal().asDiagonal();
  }

  // lambda_max(B^T B)
  double spectral_bound() const {
    if (has_diagonal_gram()) {
      Vec d = gram_diagonal();
      return d.size() ? d.maxCoeff() : 0.0;
    }
    return symmetric_spectral_bound(gram());
  }

 private:
  Kind kind_ = Kind::dense;
  Index rows_ = 0;
  Index cols_ = 0;
  double scale_ = 1.0;
  std::shared_ptr<const Mat> dense_;
  std::shared_ptr<const std::vector<Index>> pick_;
};

// (A_j^c)^T A_j^c in the cheapest exact representation.
struct ColumnGram {
  enum class Kind { scalar, diagonal, dense };
  Kind kind = Kind::scalar;
  double scalar = 0.0;
  Vec diagonal;
  Mat dense;

  Mat to_dense(Index n) const {
    switch (kind) {
      case Kind::scalar: return scalar * Mat::Identity(n, n);
      case Kind::diagonal: return diagonal.asDiagonal();
      case Kind::dense: return dense;
    }
    return {};
  }
};

class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(BlockPartition p)
      : part_(std::move(p)),
        row_cols_(static_cast<size_t>(part_.num_row_blocks())),
        row_blocks_(static_cast<size_t>(part_.num_row_blocks())),
        col_rows_(static_cast<size_t>(part_.num_col_blocks())),
        cache_(std::make_shared<Cache>(part_.num_col_blocks())) {}

  const BlockPartition& partition() const { return part_; }
  int num_row_blocks() const { return part_.num_row_blocks(); }
  int num_col_blocks() const { return part_.num_col_blocks(); }
  std::vector<Index> row_sizes() const { return part_.row_sizes; }
  std::vector<Index> col_sizes() const { return part_.col_sizes; }

  void set_block(int i, int j, Block b) {
    check_indices(i, j);
    if (b.rows() != part_.row_sizes[static_cast<size_t>(i)] || b.cols() != part_.col_sizes[static_cast<size_t>(j)])
      throw DimensionError("block (" + std::to_string(i) + "," + std::to_string(j) + ") has shape " +
                           std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ", partition expects " +
                           std::to_string(part_.row_sizes[static_cast<size_t>(i)]) + "x" +
                           std::to_string(part_.col_sizes[static_cast<size_t>(j)]));
    auto& cols = row_cols_[static_cast<size_t>(i)];
    auto& blocks = row_blocks_[static_cast<size_t>(i)];
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    const auto pos = it - cols.begin();
    if (it != cols.end() && *it == j) {
      blocks[static_cast<size_t>(pos)] = std::move(b);
    } else {
      cols.insert(it, j);
      blocks.insert(blocks.begin() + pos, std::move(b));
      auto& rows = col_rows_[static_cast<size_t>(j)];
      rows.insert(std::lower_bound(rows.begin(), rows.end(), i), i);
    }
    cache_ = std::make_shared<Cache>(num_col_blocks());
  }

  // Sorted column indices N(i) of the stored blocks in row block i.
  const std::vector<int>& row_pattern(int i) const { return row_cols_[static_cast<size_t>(i)]; }
  // Blocks of row i, aligned with row_pattern(i).
  const std::vector<Block>& row_blocks(int i) const { return row_blocks_[static_cast<size_t>(i)]; }
  // Sorted row indices touching column block j.
  const std::vector<int>& col_pattern(int j) const { return col_rows_[static_cast<size_t>(j)]; }

  int degree(int i) const { return static_cast<int>(row_cols_[static_cast<size_t>(i)].size()); }
  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<size_t>(num_row_blocks()));
    for (int i = 0; i < num_row_blocks(); ++i) d[static_cast<size_t>(i)] = degree(i);
    return d;
  }

  const Block* block(int i, int j) const {
    check_indices(i, j);
    const auto& cols = row_cols_[static_cast<size_t>(i)];
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return nullptr;
    return &row_blocks_[static_cast<size_t>(i)][static_cast<size_t>(it - cols.begin())];
  }

  void require_no_empty_rows() const {
    for (int i = 0; i < num_row_blocks(); ++i)
      if (degree(i) == 0) throw ValidationError("row block " + std::to_string(i) + " has no nonzero blocks");
  }

  // Σ_{j∈N(i)} A_ij x_j
  Vec row_block_apply(const BlockVector& x, int i) const {
    require_cols(x);
    if (i < 0 || i >= num_row_blocks()) throw DimensionError("row block index out of range");
    Vec out = Vec::Zero(part_.row_sizes[static_cast<size_t>(i)]);
    const auto& cols = row_cols_[static_cast<size_t>(i)];
    const auto& blocks = row_blocks_[static_cast<size_t>(i)];
    for (size_t k = 0; k < cols.size(); ++k) blocks[k].apply_add(x.block(cols[k]), out);
    return out;
  }

  BlockVector apply(const BlockVector& x) const {
    BlockVector out(part_.row_sizes);
    for (int i = 0; i < num_row_blocks(); ++i) out.block(i) = row_block_apply(x, i);
    return out;
  }

  // out_i += alpha * A_ij x_j for every i touching column j.
  void column_apply_add(int j, const Eigen::Ref<const Vec>& xj, BlockVector& out, double alpha = 1.0) const {
    for (int i : col_pattern(j)) block(i, j)->apply_add(xj, out.block(i), alpha);
  }

  // (A_j^c)^T y
  Vec column_apply_transpose(int j, const BlockVector& y) const {
    Vec out = Vec::Zero(part_.col_sizes[static_cast<size_t>(j)]);
    for (int i : col_pattern(j)) block(i, j)->apply_transpose_add(y.block(i), out);
    return out;
  }

  BlockVector apply_transpose(const BlockVector& y) const {
    if (!y.conforms(part_.row_sizes)) throw DimensionError("vector does not conform to the row partition");
    BlockVector out(part_.col_sizes);
    for (int j = 0; j < num_col_blocks(); ++j) out.block(j) = column_apply_transpose(j, y);
    return out;
  }

  const ColumnGram& column_gram(int j) const {
    Cache& c = *cache_;
    std::call_once(c.gram_once[static_cast<size_t>(j)], [&] { c.gram[static_cast<size_t>(j)] = compute_gram(j); });
    return c.gram[static_cast<size_t>(j)];
  }

  // λ_max((A_j^c)^T A_j^c), cached per column.
  double column_spectral_bound(int j) const {
    Cache& c = *cache_;
    std::call_once(c.bound_once[static_cast<size_t>(j)], [&] {
      const ColumnGram& g = column_gram(j);
      double v = 0.0;
      switch (g.kind) {
        case ColumnGram::Kind::scalar: v = g.scalar; break;
        case ColumnGram::Kind::diagonal: v = g.diagonal.size() ? g.diagonal.maxCoeff() : 0.0; break;
        case ColumnGram::Kind::dense: v = symmetric_spectral_bound(g.dense); break;
      }
      c.bound[static_cast<size_t>(j)] = v;
    });
    return c.bound[static_cast<size_t>(j)];
  }

  Mat to_dense() const {
    Mat m = Mat::Zero(part_.total_rows(), part_.total_cols());
    Index ro = 0;
    for (int i = 0; i < num_row_blocks(); ++i) {
      const auto& cols = row_cols_[static_cast<size_t>(i)];
      for (size_t k = 0; k < cols.size(); ++k) {
        Index co = 0;
        for (int j = 0; j < cols[k]; ++j) co += part_.col_sizes[static_cast<size_t>(j)];
        const Block& b = row_blocks_[static_cast<size_t>(i)][k];
        m.block(ro, co, b.rows(), b.cols()) = b.to_dense();
      }
      ro += part_.row_sizes[static_cast<size_t>(i)];
    }
    return m;
  }

 private:
  struct Cache {
    explicit Cache(int J)
        : gram_once(static_cast<size_t>(J)), gram(static_cast<size_t>(J)),
          bound_once(static_cast<size_t>(J)), bound(static_cast<size_t>(J), 0.0) {}
    std::vector<std::once_flag> gram_once;
    std::vector<ColumnGram> gram;
    std::vector<std::once_flag> bound_once;
    std::vector<double> bound;
  };

  ColumnGram compute_gram(int j) const {
    ColumnGram g;
    const Index n = part_.col_sizes[static_cast<size_t>(j)];
    bool diagonal = true;
    for (int i : col_pattern(j)) diagonal = diagonal && block(i, j)->has_diagonal_gram();
    if (diagonal) {
      Vec d = Vec::Zero(n);
      for (int i : col_pattern(j)) d += block(i, j)->gram_diagonal();
      if (n > 0 && (d.array() == d[0]).all()) {
        g.kind = ColumnGram::Kind::scalar;
        g.scalar = d[0];
      } else {
        g.kind = ColumnGram::Kind::diagonal;
        g.diagonal = std::move(d);
      }
      return g;
    }
    g.kind = ColumnGram::Kind::dense;
    g.dense = Mat::Zero(n, n);
    for (int i : col_pattern(j)) g.dense += block(i, j)->gram();
    return g;
  }

  void check_indices(int i, int j) const {
    if (i < 0 || i >= num_row_blocks() || j < 0 || j >= num_col_blocks())
      throw DimensionError("block index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
  }
  void require_cols(const BlockVector& x) const {
    if (!x.conforms(part_.col_sizes)) throw DimensionError("vector does not conform to the column partition");
  }

  BlockPartition part_;
  std::vector<std::vector<int>> row_cols_;
  std::vector<std::vector<Block>> row_blocks_;
  std::vector<std::vector<int>> col_rows_;
  std::shared_ptr<Cache> cache_;
};

// z_ij = A_ij x_j for the stored blocks, aligned with row_pattern(i).
class ZVector {
 public:
  ZVector() = default;
  explicit ZVector(const BlockMatrix& A) : rows_(static_cast<size_t>(A.num_row_blocks())) {
    for (int i = 0; i < A.num_row_blocks(); ++i)
      rows_[static_cast<size_t>(i)].assign(A.row_pattern(i).size(), Vec::Zero(A.partition().row_sizes[static_cast<size_t>(i)]));
  }

  static ZVector from(const BlockMatrix& A, const BlockVector& x) {
    if (!x.conforms(A.partition().col_sizes)) throw DimensionError("vector does not conform to the column partition");
    ZVector z(A);
    for (int i = 0; i < A.num_row_blocks(); ++i) {
      const auto& cols = A.row_pattern(i);
      const auto& blocks = A.row_blocks(i);
      for (size_t k = 0; k < cols.size(); ++k) z.rows_[static_cast<size_t>(i)][k] = blocks[k].apply(x.block(cols[k]));
    }
    return z;
  }

  int num_rows() const { return static_cast<int>(rows_.size()); }
  // k indexes row_pattern(i).
  Vec& entry(int i, size_t k) { return rows_[static_cast<size_t>(i)][k]; }
  const Vec& entry(int i, size_t k) const { return rows_[static_cast<size_t>(i)][k]; }
  size_t row_count(int i) const { return rows_[static_cast<size_t>(i)].size(); }

  ZVector& operator-=(const ZVector& o) {
    for (size_t i = 0; i < rows_.size(); ++i)
      for (size_t k = 0; k < rows_[i].size(); ++k) rows_[i][k] -= o.rows_[i][k];
    return *this;
  }
  friend ZVector operator-(ZVector a, const ZVector& b) { return a -= b; }

  // Full layout [z_1^r; ...; z_I^r] with z_i^r = [z_i1; ...; z_iJ], zeros off the pattern.
  Vec flatten(const BlockMatrix& A) const {
    const int J = A.num_col_blocks();
    Index total = 0;
    for (Index m : A.partition().row_sizes) total += m * J;
    Vec out = Vec::Zero(total);
    Index off = 0;
    for (int i = 0; i < A.num_row_blocks(); ++i) {
      const Index m = A.partition().row_sizes[static_cast<size_t>(i)];
      const auto& cols = A.row_pattern(i);
      for (size_t k = 0; k < cols.size(); ++k) out.segment(off + cols[k] * m, m) = entry(i, k);
      off += m * J;
    }
    return out;
  }

 private:
  std::vector<std::vector<Vec>> rows_;
};

// Σ_i [ Σ_{j∈S_i} ‖z_ij‖² − (1/c_i)‖Σ_{j∈S_i} z_ij‖² ] where S_i ⊆ N(i).
// Q uses S_i = N(i), c_i = d_i; P_t uses S_i = selected ∩ N(i), c_i = min(K, d_i).
class BlockQuadraticForm {
 public:
  BlockQuadraticForm(const BlockMatrix& A, std::vector<char> column_mask, std::vector<double> row_weight)
      : A_(&A), mask_(std::move(column_mask)), weight_(std::move(row_weight)) {}

  double operator()(const ZVector& z) const {
    double total = 0.0;
    for (int i = 0; i < A_->num_row_blocks(); ++i) {
      const auto& cols = A_->row_pattern(i);
      Vec sum = Vec::Zero(A_->partition().row_sizes[static_cast<size_t>(i)]);
      double sq = 0.0;
      for (size_t k = 0; k < cols.size(); ++k) {
        if (!mask_[static_cast<size_t>(cols[k])]) continue;
        sq += z.entry(i, k).squaredNorm();
        sum += z.entry(i, k);
      }
      total += sq - sum.squaredNorm() / weight_[static_cast<size_t>(i)];
    }
    return total;
  }

#ifdef PDMM_TESTING
  // Dense block-diagonal matrix diag(W_i ⊗ I_{m_i}) in ZVector::flatten layout.
  Mat materialize() const {
    const int J = A_->num_col_blocks();
    Index total = 0;
    for (Index m : A_->partition().row_sizes) total += m * J;
    Mat Q = Mat::Zero(total, total);
    Index off = 0;
    for (int i = 0; i < A_->num_row_blocks(); ++i) {
      const Index m = A_->partition().row_sizes[static_cast<size_t>(i)];
      Mat W = Mat::Zero(J, J);
      for (int j : A_->row_pattern(i)) {
        if (!mask_[static_cast<size_t>(j)]) continue;
        for (int k : A_->row_pattern(i)) {
          if (!mask_[static_cast<size_t>(k)]) continue;
          W(j, k) = (j == k ? 1.0 : 0.0) - 1.0 / weight_[static_cast<size_t>(i)];
        }
      }
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < J; ++k)
          Q.block(off + j * m, off + k * m, m, m) = W(j, k) * Mat::Identity(m, m);
      off += J * m;
    }
    return Q;
  }
#endif

 private:
  const BlockMatrix* A_;
  std::vector<char> mask_;
  std::vector<double> weight_;
};

inline BlockQuadraticForm build_Q(const BlockMatrix& A) {
  std::vector<double> w;
  for (int d : A.degrees()) w.push_back(static_cast<double>(std::max(d, 1)));
  return BlockQuadraticForm(A, std::vector<char>(static_cast<size_t>(A.num_col_blocks()), 1), std::move(w));
}

inline BlockQuadraticForm build_Pt(const BlockMatrix& A, const std::vector<int>& selected, int K) {
  std::vector<char> mask(static_cast<size_t>(A.num_col_blocks()), 0);
  for (int j : selected) {
    if (j < 0 || j >= A.num_col_blocks()) throw DimensionError("selected column out of range");
    mask[static_cast<size_t>(j)] = 1;
  }
  std::vector<double> w;
  for (int d : A.degrees()) w.push_back(static_cast<double>(std::max(1, std::min(d, K))));
  return BlockQuadraticForm(A, std::move(mask), std::move(w));
}

}  // namespace pdmm
