#pragma once

#include <lalm/core/types.hpp>

namespace lalm {

/// Running average of primal iterates without storing the history.
///
/// weighted: xbar = (sum_t w_t x_t) / (sum_t w_t); LALM feeds w_t = 1/eta^t.
/// uniform:  block-solver averaging over k+1 iterates x^1..x^{k+1} with n
///           blocks.  point() puts weight 1 on the newest iterate and 1/n on
///           each earlier one, normalized by 1 + k/n, so it is a convex
///           combination.  literal_point() returns the raw running sum over
///           1 + k/n.
class ErgodicAccumulator {
 public:
  enum class Mode { weighted, uniform };

  static ErgodicAccumulator weighted(Index dim) { return ErgodicAccumulator(Mode::weighted, dim, 1); }
  static ErgodicAccumulator uniform(Index dim, Index blocks) {
    require(blocks >= 1, "ErgodicAccumulator: need at least one block");
    return ErgodicAccumulator(Mode::uniform, dim, blocks);
  }

  Mode mode() const { return mode_; }
  Index count() const { return count_; }
  double total_weight() const { return total_weight_; }
  const Vector& sum() const { return sum_; }

  void add(const Vector& x, double weight = 1.0) {
    require_same_size(x.size(), sum_.size(), "ErgodicAccumulator::add");
    require(weight > 0.0, "ErgodicAccumulator::add: weight must be positive");
    if (mode_ == Mode::uniform) weight = 1.0;
    sum_ += weight * x;
    total_weight_ += weight;
    last_ = x;
    ++count_;
  }

  Vector point() const {
    if (count_ == 0) throw InvalidArgument("ErgodicAccumulator: no iterates accumulated");
    if (mode_ == Mode::weighted) return sum_ / total_weight_;
    const double n = static_cast<double>(blocks_);
    return (last_ + (sum_ - last_) / n) / normalizer();
  }

  /// Running sum divided by 1 + k/n (uniform mode only).
  Vector literal_point() const {
    if (count_ == 0) throw InvalidArgument("ErgodicAccumulator: no iterates accumulated");
    require(mode_ == Mode::uniform, "ErgodicAccumulator::literal_point: uniform mode only");
    return sum_ / normalizer();
  }

  /// 1 + k/n where k + 1 iterates have been accumulated.
  double normalizer() const {
    return 1.0 + static_cast<double>(count_ - 1) / static_cast<double>(blocks_);
  }

 private:
  ErgodicAccumulator(Mode mode, Index dim, Index blocks)
      : mode_(mode), blocks_(blocks), sum_(Vector::Zero(dim)), last_(Vector::Zero(dim)) {}

  Mode mode_;
  Index blocks_;
  Vector sum_;
  Vector last_;
  double total_weight_ = 0.0;
  Index count_ = 0;
};

}  // namespace lalm
