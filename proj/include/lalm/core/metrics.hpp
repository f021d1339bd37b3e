#pragma once

#include <lalm/core/problem.hpp>

#include <algorithm>

namespace lalm {

/// Phi(xbar; x, y, z) = f0(xbar) - f0(x) + y'(A xbar - b) + sum_j z_j f_j(xbar).
inline double phi_gap(const Vector& xbar, const PrimalDualPoint& at, const ProblemInstance& prob) {
  require_same_size(xbar.size(), prob.dim, "phi_gap: xbar");
  require_same_size(at.x.size(), prob.dim, "phi_gap: x");
  require_same_size(at.y.size(), prob.num_equalities(), "phi_gap: y");
  require_same_size(at.z.size(), prob.num_constraints(), "phi_gap: z");
  double out = prob.objective(xbar) - prob.objective(at.x);
  if (!prob.affine.is_empty()) out += at.y.dot(prob.affine.residual(xbar));
  for (Index j = 0; j < prob.num_constraints(); ++j) {
    out += at.z[j] * prob.constraints[static_cast<std::size_t>(j)].value(xbar);
  }
  return out;
}

struct EpsOptimality {
  double objective_gap = 0.0;  ///< |f0(x) - f0*|
  double feasibility = 0.0;    ///< ||Ax - b|| + sum_j [f_j(x)]_+
  bool optimal = false;
};

inline EpsOptimality eps_optimality(const Vector& xbar, double f0_star, double eps,
                                    const ProblemInstance& prob) {
  require(std::isfinite(f0_star), "eps_optimality: optimal value must be finite");
  require(eps > 0.0, "eps_optimality: eps must be positive");
  require_same_size(xbar.size(), prob.dim, "eps_optimality");
  EpsOptimality out;
  out.objective_gap = std::abs(prob.objective(xbar) - f0_star);
  out.feasibility = prob.feasibility(xbar);
  out.optimal = out.objective_gap <= eps && out.feasibility <= eps;
  return out;
}

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;

  double max() const { return std::max({stationarity, feasibility, complementarity}); }
};

/// Gradient of the ordinary Lagrangian in x: grad g + A'y + sum_j z_j grad f_j.
inline Vector lagrangian_gradient(const PrimalDualPoint& w, const ProblemInstance& prob) {
  Vector grad = prob.g.gradient(w.x);
  if (!prob.affine.is_empty()) grad.noalias() += prob.affine.matrix().transpose() * w.y;
  for (Index j = 0; j < prob.num_constraints(); ++j) {
    if (w.z[j] != 0.0) grad += w.z[j] * prob.constraints[static_cast<std::size_t>(j)].gradient(w.x);
  }
  return grad;
}

/// Measures the KKT system.  Stationarity is the prox-gradient fixed-point
/// residual ||x - prox_h(x - grad_x L(w))||, which vanishes iff
/// 0 in grad_x L(w) + dh(x).  Uses the cached r and fvals of w.
inline KktResidual kkt_residual(const PrimalDualPoint& w, const ProblemInstance& prob) {
  require_same_size(w.x.size(), prob.dim, "kkt_residual: x");
  require_same_size(w.z.size(), prob.num_constraints(), "kkt_residual: z");
  require_same_size(w.fvals.size(), prob.num_constraints(), "kkt_residual: fvals");
  if ((w.z.array() < 0.0).any()) throw InvalidArgument("kkt_residual: negative inequality multiplier");

  KktResidual out;
  const Vector grad = lagrangian_gradient(w, prob);
  out.stationarity = (w.x - prob.h.prox(w.x - grad, 1.0)).norm();
  out.feasibility = prob.affine.is_empty() ? 0.0 : w.r.norm();
  for (Index j = 0; j < w.fvals.size(); ++j) {
    out.feasibility += positive_part(w.fvals[j]);
    out.complementarity += std::abs(w.z[j] * w.fvals[j]);
  }
  return out;
}

}  // namespace lalm
