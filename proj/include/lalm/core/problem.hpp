#pragma once

#include <lalm/core/operator_norm.hpp>
#include <lalm/core/prox.hpp>
#include <lalm/core/smooth.hpp>
#include <lalm/core/types.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lalm {

/// Smooth convex constraint f(x) <= 0.  `grad_bound` is B with
/// ||grad f(x)|| <= B over dom(h); the gradient Lipschitz constant lives on
/// the SmoothFunction.
struct InequalityConstraint {
  SmoothFunction f;
  std::optional<double> grad_bound;

  double value(const Vector& x) const { return f.value(x); }
  Vector gradient(const Vector& x) const { return f.gradient(x); }
  std::optional<double> lipschitz() const { return f.lipschitz; }
};

/// Contiguous index range [offset, offset + width).
struct BlockRange {
  Index offset = 0;
  Index width = 0;
  Index end() const { return offset + width; }
};

/// Disjoint contiguous blocks covering [0, dim).
class BlockPartition {
 public:
  BlockPartition() = default;

  explicit BlockPartition(std::vector<BlockRange> blocks) : blocks_(std::move(blocks)) {
    Index next = 0;
    for (const auto& b : blocks_) {
      require(b.width > 0, "BlockPartition: empty block");
      require(b.offset == next, "BlockPartition: blocks must be contiguous, ordered and disjoint");
      next = b.end();
    }
    dim_ = next;
  }

  /// n nearly equal blocks; the first (dim mod n) blocks get one extra entry.
  static BlockPartition even(Index dim, Index n) {
    require(n >= 1 && n <= dim, "BlockPartition::even: need 1 <= n <= dim");
    std::vector<BlockRange> blocks;
    const Index base = dim / n;
    const Index extra = dim % n;
    Index offset = 0;
    for (Index i = 0; i < n; ++i) {
      const Index w = base + (i < extra ? 1 : 0);
      blocks.push_back({offset, w});
      offset += w;
    }
    return BlockPartition(std::move(blocks));
  }

  Index dim() const { return dim_; }
  Index count() const { return static_cast<Index>(blocks_.size()); }
  const BlockRange& operator[](Index i) const { return blocks_.at(static_cast<std::size_t>(i)); }
  const std::vector<BlockRange>& blocks() const { return blocks_; }

 private:
  std::vector<BlockRange> blocks_;
  Index dim_ = 0;
};

/// Ax = b with a dense A (possibly zero rows).
class AffineConstraint {
 public:
  AffineConstraint() = default;

  AffineConstraint(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    require_same_size(a_.rows(), b_.size(), "AffineConstraint");
    norm_sq_ = (a_.rows() == 0 || a_.cols() == 0) ? 0.0 : operator_norm_sq(a_);
  }

  static AffineConstraint empty(Index dim) { return AffineConstraint(Matrix(0, dim), Vector(0)); }

  bool is_empty() const { return a_.rows() == 0; }
  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }
  const Matrix& matrix() const { return a_; }
  const Vector& rhs() const { return b_; }
  double norm_sq() const { return norm_sq_; }

  Vector apply(const Vector& x) const { return a_ * x; }
  Vector adjoint(const Vector& y) const { return a_.transpose() * y; }
  Vector residual(const Vector& x) const { return a_ * x - b_; }

  /// A_i x_i for the column block i.
  Vector apply_block(const BlockRange& blk, const Vector& xi) const {
    return a_.middleCols(blk.offset, blk.width) * xi;
  }
  /// A_i' y.
  Vector adjoint_block(const BlockRange& blk, const Vector& y) const {
    return a_.middleCols(blk.offset, blk.width).transpose() * y;
  }
  double block_norm_sq(const BlockRange& blk) const {
    if (is_empty()) return 0.0;
    return operator_norm_sq(a_.middleCols(blk.offset, blk.width));
  }

 private:
  Matrix a_;
  Vector b_;
  double norm_sq_ = 0.0;
};

/// min g(x) + h(x)  s.t.  Ax = b,  f_j(x) <= 0.
struct ProblemInstance {
  std::string name;
  Index dim = 0;
  SmoothFunction g;
  ProxFunction h;
  AffineConstraint affine;
  std::vector<InequalityConstraint> constraints;
  std::optional<BlockPartition> partition;
  std::optional<double> optimal_value;

  Index num_constraints() const { return static_cast<Index>(constraints.size()); }
  Index num_equalities() const { return affine.rows(); }

  double objective(const Vector& x) const { return g.value(x) + h.value(x); }

  Vector constraint_values(const Vector& x) const {
    Vector out(num_constraints());
    for (Index j = 0; j < out.size(); ++j) out[j] = constraints[static_cast<std::size_t>(j)].value(x);
    return out;
  }

  /// ||Ax - b|| + sum_j [f_j(x)]_+.
  double feasibility(const Vector& x) const {
    double out = affine.is_empty() ? 0.0 : affine.residual(x).norm();
    for (const auto& c : constraints) out += positive_part(c.value(x));
    return out;
  }

  /// Checks structural invariants; throws InvalidArgument on violation.
  void validate() const {
    require(dim > 0, "ProblemInstance: dimension must be positive");
    require(static_cast<bool>(g.value) && static_cast<bool>(g.gradient),
            "ProblemInstance: g needs value and gradient oracles");
    require(affine.cols() == dim || affine.is_empty(), "ProblemInstance: A has wrong column count");
    if (h.domain()) require_same_size(h.domain()->size(), dim, "ProblemInstance: box");
    for (const auto& c : constraints) {
      require(static_cast<bool>(c.f.value) && static_cast<bool>(c.f.gradient),
              "ProblemInstance: constraint needs value and gradient oracles");
    }
    if (partition) require_same_size(partition->dim(), dim, "ProblemInstance: partition");
  }
};

/// w = (x, y, z) with the residual r = Ax - b and constraint values cached.
struct PrimalDualPoint {
  Vector x;
  Vector y;
  Vector z;
  Vector r;
  Vector fvals;

  static PrimalDualPoint make(const ProblemInstance& prob, Vector x, Vector y, Vector z) {
    require_same_size(x.size(), prob.dim, "PrimalDualPoint: x");
    require_same_size(y.size(), prob.num_equalities(), "PrimalDualPoint: y");
    require_same_size(z.size(), prob.num_constraints(), "PrimalDualPoint: z");
    require((z.array() >= 0.0).all(), "PrimalDualPoint: z must be nonnegative");
    PrimalDualPoint w{std::move(x), std::move(y), std::move(z), Vector(), Vector()};
    w.refresh(prob);
    return w;
  }

  /// x with zero multipliers.
  static PrimalDualPoint at(const ProblemInstance& prob, Vector x) {
    return make(prob, std::move(x), Vector::Zero(prob.num_equalities()),
                Vector::Zero(prob.num_constraints()));
  }

  void refresh(const ProblemInstance& prob) {
    r = prob.affine.is_empty() ? Vector(0) : prob.affine.residual(x);
    fvals = prob.constraint_values(x);
  }
};

}  // namespace lalm
