#pragma once

#include <lalm/core/metrics.hpp>
#include <lalm/core/problem.hpp>

namespace lalm {

/// Penalty parameter beta of the augmented Lagrangian.
struct PenaltyConfig {
  double beta = 1.0;

  explicit PenaltyConfig(double b) : beta(b) { require(b > 0.0, "PenaltyConfig: beta must be positive"); }
};

/// Scalar penalty coupling a constraint value u with its multiplier v:
///   u v + (beta/2) u^2   if beta u + v >= 0
///   -v^2 / (2 beta)      otherwise.
inline double psi(double u, double v, double beta) {
  require(beta > 0.0, "psi: beta must be positive");
  if (beta * u + v >= 0.0) return u * v + 0.5 * beta * u * u;
  return -v * v / (2.0 * beta);
}

/// d psi / du = [beta u + v]_+.
inline double psi_du(double u, double v, double beta) {
  require(beta > 0.0, "psi_du: beta must be positive");
  return positive_part(beta * u + v);
}

/// Psi(x, z) = sum_j psi(f_j(x), z_j), from precomputed constraint values.
inline double Psi_from_values(const Vector& fvals, const Vector& z, double beta) {
  require_same_size(fvals.size(), z.size(), "Psi");
  double out = 0.0;
  for (Index j = 0; j < z.size(); ++j) out += psi(fvals[j], z[j], beta);
  return out;
}

inline double Psi(const Vector& x, const Vector& z, double beta, const ProblemInstance& prob) {
  require_same_size(z.size(), prob.num_constraints(), "Psi: z");
  return Psi_from_values(prob.constraint_values(x), z, beta);
}

/// Smooth part F_beta(w) = L_beta(w) - h(x) from the cached r and fvals of w.
inline double smooth_auglag_value(const PrimalDualPoint& w, double beta, const ProblemInstance& prob) {
  double out = prob.g.value(w.x);
  if (!prob.affine.is_empty()) out += w.y.dot(w.r) + 0.5 * beta * w.r.squaredNorm();
  return out + Psi_from_values(w.fvals, w.z, beta);
}

/// Same quantity recomputed at an arbitrary primal point x with (y, z) held.
inline double smooth_auglag_value(const Vector& x, const Vector& y, const Vector& z, double beta,
                                  const ProblemInstance& prob) {
  double out = prob.g.value(x);
  if (!prob.affine.is_empty()) {
    const Vector r = prob.affine.residual(x);
    out += y.dot(r) + 0.5 * beta * r.squaredNorm();
  }
  return out + Psi_from_values(prob.constraint_values(x), z, beta);
}

/// L_beta(w) = g + h + y'r + (beta/2)||r||^2 + Psi; +inf outside dom(h).
inline double auglag_value(const PrimalDualPoint& w, double beta, const ProblemInstance& prob) {
  require(beta > 0.0, "auglag_value: beta must be positive");
  require_same_size(w.x.size(), prob.dim, "auglag_value: x");
  require_same_size(w.y.size(), prob.num_equalities(), "auglag_value: y");
  require_same_size(w.z.size(), prob.num_constraints(), "auglag_value: z");
  const double hval = prob.h.value(w.x);
  if (!std::isfinite(hval)) return hval;
  return smooth_auglag_value(w, beta, prob) + hval;
}

/// grad_x F_beta(w) = grad g + A'(y + beta r) + sum_j [beta f_j + z_j]_+ grad f_j.
inline Vector grad_x_F(const PrimalDualPoint& w, double beta, const ProblemInstance& prob) {
  require_same_size(w.x.size(), prob.dim, "grad_x_F: x");
  require_same_size(w.fvals.size(), prob.num_constraints(), "grad_x_F: fvals");
  require_same_size(w.z.size(), prob.num_constraints(), "grad_x_F: z");
  Vector grad = prob.g.gradient(w.x);
  if (!prob.affine.is_empty()) {
    require_same_size(w.r.size(), prob.num_equalities(), "grad_x_F: r");
    grad.noalias() += prob.affine.matrix().transpose() * (w.y + beta * w.r);
  }
  for (Index j = 0; j < prob.num_constraints(); ++j) {
    const double coef = psi_du(w.fvals[j], w.z[j], beta);
    if (coef != 0.0) grad += coef * prob.constraints[static_cast<std::size_t>(j)].gradient(w.x);
  }
  return grad;
}

/// Slice i of grad_x_F, using the block-gradient oracles of the incremental
/// evaluators when supplied (g first, then one per constraint).
inline Vector partial_grad_block(const PrimalDualPoint& w, double beta, const ProblemInstance& prob,
                                 Index block) {
  if (!prob.partition) throw InvalidArgument("partial_grad_block: problem has no block partition");
  require(block >= 0 && block < prob.partition->count(), "partial_grad_block: block index out of range");
  const BlockRange& blk = (*prob.partition)[block];
  Vector out = prob.g.gradient(w.x).segment(blk.offset, blk.width);
  if (!prob.affine.is_empty()) out += prob.affine.adjoint_block(blk, w.y + beta * w.r);
  for (Index j = 0; j < prob.num_constraints(); ++j) {
    const double coef = psi_du(w.fvals[j], w.z[j], beta);
    if (coef != 0.0) {
      out += coef * prob.constraints[static_cast<std::size_t>(j)].gradient(w.x).segment(blk.offset, blk.width);
    }
  }
  return out;
}

/// Point-dependent Lipschitz constant of grad_x Psi(., z) around x:
///   sum_j beta B_j^2 + L_j [beta f_j(x) + z_j]_+.
inline double L_Psi_from_values(const Vector& fvals, const Vector& z, double beta,
                                const ProblemInstance& prob) {
  double out = 0.0;
  for (Index j = 0; j < prob.num_constraints(); ++j) {
    const auto& c = prob.constraints[static_cast<std::size_t>(j)];
    if (!c.grad_bound || !c.lipschitz()) {
      throw InvalidArgument("L_Psi: constraint " + std::to_string(j) +
                            " lacks a gradient bound or Lipschitz constant; use backtracking step mode");
    }
    out += beta * (*c.grad_bound) * (*c.grad_bound) + (*c.lipschitz()) * psi_du(fvals[j], z[j], beta);
  }
  return out;
}

inline double L_Psi(const Vector& x, const Vector& z, double beta, const ProblemInstance& prob) {
  require_same_size(z.size(), prob.num_constraints(), "L_Psi: z");
  return L_Psi_from_values(prob.constraint_values(x), z, beta, prob);
}

/// L_F = L_g + beta ||A||^2 + L_Psi(x, z).
inline double L_F(const Vector& x, const Vector& z, double beta, const ProblemInstance& prob) {
  if (!prob.g.lipschitz) throw InvalidArgument("L_F: objective has no Lipschitz constant; use backtracking step mode");
  return *prob.g.lipschitz + beta * prob.affine.norm_sq() + L_Psi(x, z, beta, prob);
}

/// Whether analytic step sizing is possible (all constants known).
inline bool analytic_constants_available(const ProblemInstance& prob) {
  if (!prob.g.lipschitz) return false;
  for (const auto& c : prob.constraints) {
    if (!c.grad_bound || !c.lipschitz()) return false;
  }
  return true;
}

}  // namespace lalm
