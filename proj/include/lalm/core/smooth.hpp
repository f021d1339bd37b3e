#pragma once

#include <lalm/core/types.hpp>

#include <functional>
#include <memory>
#include <optional>

namespace lalm {

/// Maintains the value of a smooth function along a trajectory that changes
/// one contiguous block at a time.  Implementations keep whatever auxiliary
/// products make a block change cheap (Q x for quadratics, M x - b for
/// least squares).
class IncrementalEval {
 public:
  virtual ~IncrementalEval() = default;

  /// Recompute all cached quantities from scratch at x.
  virtual void reset(const Vector& x) = 0;
  virtual double value() const = 0;
  /// Partial gradient with respect to x[offset, offset + out.size()).
  virtual void block_gradient(Index offset, Eigen::Ref<Vector> out) const = 0;
  /// Value at x + delta placed at offset, without changing the state.
  virtual double trial_value(Index offset, const Vector& delta) const = 0;
  virtual void commit(Index offset, const Vector& delta) = 0;
};

using IncrementalFactory = std::function<std::unique_ptr<IncrementalEval>()>;

/// A differentiable function given by value and gradient oracles, with an
/// optional gradient Lipschitz constant and an optional incremental evaluator.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::optional<double> lipschitz;
  IncrementalFactory incremental;

  double operator()(const Vector& x) const { return value(x); }
  std::unique_ptr<IncrementalEval> make_incremental() const;
};

/// Fallback evaluator: stores x and re-evaluates the full oracles.
class GenericIncremental final : public IncrementalEval {
 public:
  explicit GenericIncremental(const SmoothFunction* fn) : fn_(fn) {}

  void reset(const Vector& x) override {
    x_ = x;
    value_ = fn_->value(x_);
    grad_ = fn_->gradient(x_);
  }
  double value() const override { return value_; }
  void block_gradient(Index offset, Eigen::Ref<Vector> out) const override {
    out = grad_.segment(offset, out.size());
  }
  double trial_value(Index offset, const Vector& delta) const override {
    Vector trial = x_;
    trial.segment(offset, delta.size()) += delta;
    return fn_->value(trial);
  }
  void commit(Index offset, const Vector& delta) override {
    x_.segment(offset, delta.size()) += delta;
    value_ = fn_->value(x_);
    grad_ = fn_->gradient(x_);
  }

 private:
  const SmoothFunction* fn_;
  Vector x_;
  Vector grad_;
  double value_ = 0.0;
};

inline std::unique_ptr<IncrementalEval> SmoothFunction::make_incremental() const {
  if (incremental) return incremental();
  return std::make_unique<GenericIncremental>(this);
}

// ---------------------------------------------------------------------------
// Concrete families.

/// 0.5 x'Qx + c'x + d with Q symmetric PSD; keeps Q x between block updates.
class QuadraticIncremental final : public IncrementalEval {
 public:
  QuadraticIncremental(std::shared_ptr<const Matrix> q, std::shared_ptr<const Vector> c, double d)
      : q_(std::move(q)), c_(std::move(c)), d_(d) {}

  void reset(const Vector& x) override {
    x_ = x;
    qx_.noalias() = (*q_) * x_;
    value_ = 0.5 * x_.dot(qx_) + c_->dot(x_) + d_;
  }
  double value() const override { return value_; }
  void block_gradient(Index offset, Eigen::Ref<Vector> out) const override {
    out = qx_.segment(offset, out.size()) + c_->segment(offset, out.size());
  }
  double trial_value(Index offset, const Vector& delta) const override {
    return value_ + increment(offset, delta);
  }
  void commit(Index offset, const Vector& delta) override {
    value_ += increment(offset, delta);
    qx_.noalias() += q_->middleCols(offset, delta.size()) * delta;
    x_.segment(offset, delta.size()) += delta;
  }

 private:
  double increment(Index offset, const Vector& delta) const {
    const Index w = delta.size();
    const double lin = (qx_.segment(offset, w) + c_->segment(offset, w)).dot(delta);
    const double quad = delta.dot(q_->block(offset, offset, w, w) * delta);
    return lin + 0.5 * quad;
  }

  std::shared_ptr<const Matrix> q_;
  std::shared_ptr<const Vector> c_;
  double d_;
  Vector x_;
  Vector qx_;
  double value_ = 0.0;
};

inline SmoothFunction make_quadratic(Matrix q, Vector c, double d) {
  require(q.rows() == q.cols(), "make_quadratic: Q must be square");
  require_same_size(q.rows(), c.size(), "make_quadratic");
  auto qp = std::make_shared<const Matrix>(std::move(q));
  auto cp = std::make_shared<const Vector>(std::move(c));
  SmoothFunction f;
  f.value = [qp, cp, d](const Vector& x) { return 0.5 * x.dot((*qp) * x) + cp->dot(x) + d; };
  f.gradient = [qp, cp](const Vector& x) -> Vector { return (*qp) * x + *cp; };
  Eigen::SelfAdjointEigenSolver<Matrix> eig(*qp, Eigen::EigenvaluesOnly);
  f.lipschitz = qp->rows() == 0 ? 0.0 : eig.eigenvalues().cwiseAbs().maxCoeff();
  f.incremental = [qp, cp, d]() -> std::unique_ptr<IncrementalEval> {
    return std::make_unique<QuadraticIncremental>(qp, cp, d);
  };
  return f;
}

/// ||M x - b||^2 - delta; keeps the residual M x - b.
class LeastSquaresIncremental final : public IncrementalEval {
 public:
  LeastSquaresIncremental(std::shared_ptr<const Matrix> m, std::shared_ptr<const Vector> b,
                          double delta)
      : m_(std::move(m)), b_(std::move(b)), delta_(delta) {}

  void reset(const Vector& x) override {
    res_.noalias() = (*m_) * x;
    res_ -= *b_;
  }
  double value() const override { return res_.squaredNorm() - delta_; }
  void block_gradient(Index offset, Eigen::Ref<Vector> out) const override {
    out.noalias() = 2.0 * m_->middleCols(offset, out.size()).transpose() * res_;
  }
  double trial_value(Index offset, const Vector& delta) const override {
    return (res_ + m_->middleCols(offset, delta.size()) * delta).squaredNorm() - delta_;
  }
  void commit(Index offset, const Vector& delta) override {
    res_.noalias() += m_->middleCols(offset, delta.size()) * delta;
  }

 private:
  std::shared_ptr<const Matrix> m_;
  std::shared_ptr<const Vector> b_;
  double delta_;
  Vector res_;
};

inline SmoothFunction make_least_squares(Matrix m, Vector b, double delta) {
  require_same_size(m.rows(), b.size(), "make_least_squares");
  auto mp = std::make_shared<const Matrix>(std::move(m));
  auto bp = std::make_shared<const Vector>(std::move(b));
  SmoothFunction f;
  f.value = [mp, bp, delta](const Vector& x) { return ((*mp) * x - *bp).squaredNorm() - delta; };
  f.gradient = [mp, bp](const Vector& x) -> Vector {
    return 2.0 * mp->transpose() * ((*mp) * x - *bp);
  };
  const double s = mp->size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(*mp).singularValues()(0);
  f.lipschitz = 2.0 * s * s;
  f.incremental = [mp, bp, delta]() -> std::unique_ptr<IncrementalEval> {
    return std::make_unique<LeastSquaresIncremental>(mp, bp, delta);
  };
  return f;
}

/// a'x + d.
class AffineIncremental final : public IncrementalEval {
 public:
  AffineIncremental(std::shared_ptr<const Vector> a, double d) : a_(std::move(a)), d_(d) {}

  void reset(const Vector& x) override { value_ = a_->dot(x) + d_; }
  double value() const override { return value_; }
  void block_gradient(Index offset, Eigen::Ref<Vector> out) const override {
    out = a_->segment(offset, out.size());
  }
  double trial_value(Index offset, const Vector& delta) const override {
    return value_ + a_->segment(offset, delta.size()).dot(delta);
  }
  void commit(Index offset, const Vector& delta) override {
    value_ += a_->segment(offset, delta.size()).dot(delta);
  }

 private:
  std::shared_ptr<const Vector> a_;
  double d_;
  double value_ = 0.0;
};

inline SmoothFunction make_affine(Vector a, double d) {
  auto ap = std::make_shared<const Vector>(std::move(a));
  SmoothFunction f;
  f.value = [ap, d](const Vector& x) { return ap->dot(x) + d; };
  f.gradient = [ap](const Vector&) -> Vector { return *ap; };
  f.lipschitz = 0.0;
  f.incremental = [ap, d]() -> std::unique_ptr<IncrementalEval> {
    return std::make_unique<AffineIncremental>(ap, d);
  };
  return f;
}

inline SmoothFunction make_zero_function(Index dim) { return make_affine(Vector::Zero(dim), 0.0); }

}  // namespace lalm
