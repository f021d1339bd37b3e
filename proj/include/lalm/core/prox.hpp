#pragma once

#include <lalm/core/types.hpp>

#include <limits>
#include <optional>

namespace lalm {

/// Soft-thresholding: sign(v_i) * max(|v_i| - tau, 0).
inline Vector prox_l1(const Vector& v, double tau) {
  require(tau > 0.0, "prox_l1: threshold must be positive");
  if (!v.allFinite()) throw InvalidArgument("prox_l1: non-finite input");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

/// Componentwise clamp of v into [lower, upper].
inline Vector project_box(const Vector& v, const Vector& lower, const Vector& upper) {
  require_same_size(v.size(), lower.size(), "project_box");
  require_same_size(v.size(), upper.size(), "project_box");
  for (Index i = 0; i < v.size(); ++i) {
    if (lower[i] > upper[i]) throw InvalidArgument("project_box: lower bound exceeds upper bound");
  }
  return v.cwiseMax(lower).cwiseMin(upper);
}

/// Axis-aligned box; entries may be +-infinity.
struct Box {
  Vector lower;
  Vector upper;

  static Box uniform(Index dim, double lo, double hi) {
    return Box{Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }

  Index size() const { return lower.size(); }

  bool contains(const Vector& x, double slack = 0.0) const {
    return ((x - lower).array() >= -slack).all() && ((upper - x).array() >= -slack).all();
  }

  bool bounded() const { return lower.allFinite() && upper.allFinite(); }

  /// Largest Euclidean norm of a point in the box (infinite if unbounded).
  double max_norm() const {
    if (!bounded()) return std::numeric_limits<double>::infinity();
    return lower.cwiseAbs().cwiseMax(upper.cwiseAbs()).norm();
  }
};

/// Separable nonsmooth term h(x) = l1_weight * ||x||_1 + indicator of an
/// optional box.  Because each coordinate is handled independently the prox
/// is clamp(soft_threshold(v)), which is exact for this family.
class ProxFunction {
 public:
  ProxFunction() = default;

  static ProxFunction zero() { return ProxFunction{}; }

  static ProxFunction l1(double weight) {
    require(weight >= 0.0, "ProxFunction::l1: weight must be nonnegative");
    ProxFunction h;
    h.l1_weight_ = weight;
    return h;
  }

  static ProxFunction box(Box b) {
    ProxFunction h;
    h.set_box(std::move(b));
    return h;
  }

  static ProxFunction l1_box(double weight, Box b) {
    ProxFunction h = l1(weight);
    h.set_box(std::move(b));
    return h;
  }

  double l1_weight() const { return l1_weight_; }
  const std::optional<Box>& domain() const { return box_; }
  bool separable() const { return true; }

  bool in_domain(const Vector& x, double slack = 0.0) const {
    return !box_ || box_->contains(x, slack);
  }

  /// Extended-real value: +inf outside the box.
  double value(const Vector& x) const {
    if (!in_domain(x)) return std::numeric_limits<double>::infinity();
    return l1_weight_ > 0.0 ? l1_weight_ * x.lpNorm<1>() : 0.0;
  }

  /// argmin_u h(u) + 1/(2 weight) ||u - v||^2.
  Vector prox(const Vector& v, double weight) const {
    require(weight > 0.0, "ProxFunction::prox: weight must be positive");
    Vector out = v;
    prox_segment(out, 0, weight);
    return out;
  }

  /// Prox restricted to coordinates [offset, offset + seg.size()); the block
  /// form used by the randomized block solver.
  void prox_segment(Eigen::Ref<Vector> seg, Index offset, double weight) const {
    if (!seg.allFinite()) throw NumericalError("ProxFunction::prox: non-finite input");
    if (l1_weight_ > 0.0) {
      const double tau = l1_weight_ * weight;
      for (Index i = 0; i < seg.size(); ++i) {
        const double mag = std::abs(seg[i]) - tau;
        seg[i] = mag > 0.0 ? std::copysign(mag, seg[i]) : 0.0;
      }
    }
    if (box_) {
      seg = seg.cwiseMax(box_->lower.segment(offset, seg.size()))
                .cwiseMin(box_->upper.segment(offset, seg.size()));
    }
  }

 private:
  void set_box(Box b) {
    require_same_size(b.lower.size(), b.upper.size(), "ProxFunction::box");
    for (Index i = 0; i < b.size(); ++i) {
      if (b.lower[i] > b.upper[i]) throw InvalidArgument("ProxFunction::box: lower > upper");
    }
    box_ = std::move(b);
  }

  double l1_weight_ = 0.0;
  std::optional<Box> box_;
};

}  // namespace lalm
