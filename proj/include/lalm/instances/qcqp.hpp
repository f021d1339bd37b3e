#pragma once

#include <lalm/core/problem.hpp>

#include <random>
#include <vector>

namespace lalm {

/// Convex QCQP:
///   min 0.5 x'Q_0 x + c_0'x + d_0
///   s.t. 0.5 x'Q_j x + c_j'x + d_j <= 0,  j = 1..m,   l <= x <= u.
struct QcqpSpec {
  Index m = 10;
  Index p = 2000;
  double lower = -10.0;
  double upper = 10.0;
  double d_constraint = -1.0;  ///< d_j for j >= 1; must be negative
  std::uint64_t seed = 0;
  Index blocks = 200;

  void validate() const {
    require(m >= 0 && p >= 1, "QcqpSpec: need m >= 0 and p >= 1");
    require(lower < 0.0 && upper > 0.0, "QcqpSpec: the box must contain 0 in its interior");
    require(d_constraint < 0.0, "QcqpSpec: d_j must be negative");
    require(blocks >= 1 && blocks <= p, "QcqpSpec: blocks must be in [1, p]");
  }
};

struct QcqpData {
  std::vector<Matrix> q;  ///< q[0] objective, q[j] constraint j
  std::vector<Vector> c;
  std::vector<double> d;
  Box box;
  Index blocks = 1;

  Index dim() const { return q.empty() ? 0 : q.front().rows(); }
  Index num_constraints() const { return static_cast<Index>(q.size()) - 1; }
};

inline QcqpData generate_qcqp_data(const QcqpSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  QcqpData data;
  data.blocks = spec.blocks;
  data.box = Box::uniform(spec.p, spec.lower, spec.upper);
  Matrix mj(spec.p, spec.p);
  for (Index j = 0; j <= spec.m; ++j) {
    for (Index col = 0; col < spec.p; ++col) {
      for (Index row = 0; row < spec.p; ++row) mj(row, col) = normal(rng);
    }
    Matrix q = mj.transpose() * mj / static_cast<double>(spec.p);
    q = 0.5 * (q + q.transpose()).eval();
    data.q.push_back(std::move(q));
    Vector c(spec.p);
    for (Index i = 0; i < spec.p; ++i) c[i] = normal(rng);
    data.c.push_back(std::move(c));
    data.d.push_back(j == 0 ? 0.0 : spec.d_constraint);
  }
  return data;
}

inline double spectral_norm_sym(const Matrix& q) {
  if (q.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Builds the instance; each constraint exposes the incremental Q_j x state
/// and the box-derived constants B_j = ||Q_j|| R + ||c_j||, L_j = ||Q_j||.
inline ProblemInstance build_qcqp(const QcqpData& data) {
  require(!data.q.empty(), "build_qcqp: need an objective");
  require(data.c.size() == data.q.size() && data.d.size() == data.q.size(), "build_qcqp: inconsistent sizes");
  const Index dim = data.dim();
  require_same_size(data.box.size(), dim, "build_qcqp: box");
  ProblemInstance prob;
  prob.name = "qcqp";
  prob.dim = dim;
  prob.g = make_quadratic(data.q[0], data.c[0], data.d[0]);
  prob.h = ProxFunction::box(data.box);
  prob.affine = AffineConstraint::empty(dim);
  const double radius = data.box.max_norm();
  for (std::size_t j = 1; j < data.q.size(); ++j) {
    InequalityConstraint c;
    c.f = make_quadratic(data.q[j], data.c[j], data.d[j]);
    if (std::isfinite(radius)) c.grad_bound = spectral_norm_sym(data.q[j]) * radius + data.c[j].norm();
    prob.constraints.push_back(std::move(c));
  }
  prob.partition = BlockPartition::even(dim, std::min(data.blocks, dim));
  prob.validate();
  return prob;
}

inline ProblemInstance gen_qcqp(const QcqpSpec& spec) { return build_qcqp(generate_qcqp_data(spec)); }

}  // namespace lalm
