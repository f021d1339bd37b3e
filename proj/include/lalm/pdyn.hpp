#pragma once

#include <lalm/lalm.hpp>

namespace lalm {

/// Virtual-queue primal-dual baseline for problems without equality
/// constraints and with h a box indicator:
///   x+       = P_X(x - (1/eta)[grad f0(x) + sum_j (lambda_j + f_j(x)) grad f_j(x)])
///   lambda_j = max(-f_j(x), lambda_j + f_j(x))            (f_j at the old x)
/// with lambda_j^0 = max(0, -f_j(x^0)).
///
/// StepMode::backtracking selects the adaptive step (eta grows by the
/// backtracking factor until the descent test on phi(x, z) = f0(x) +
/// sum_j z_j f_j(x), z_j = lambda_j + f_j(x^k), holds).  StepMode::analytic
/// keeps eta fixed at the seed.
class Pdyn {
 public:
  struct StepInfo {
    double eta = 0.0;
    Index backtracks = 0;
    Vector direction;  ///< grad_x phi(x^k, z^k)
    Vector z;          ///< lambda^k + f(x^k)
    double phi_old = 0.0;
    double phi_new = 0.0;
    double lin = 0.0;
    double dist_sq = 0.0;
  };

  Pdyn(const ProblemInstance& prob, SolverConfig cfg, Vector x0) : prob_(prob), cfg_(std::move(cfg)) {
    prob_.validate();
    cfg_.validate();
    if (!prob_.affine.is_empty()) {
      throw InvalidArgument("Pdyn: equality constraints are not supported by this method");
    }
    if (prob_.h.l1_weight() != 0.0) {
      throw InvalidArgument("Pdyn: h must be a box indicator (projection only)");
    }
    require_same_size(x0.size(), prob_.dim, "Pdyn: x0");
    x_ = std::move(x0);
    fvals_ = prob_.constraint_values(x_);
    lambda_ = (-fvals_).cwiseMax(0.0);
    eta_ = default_eta_seed(prob_, cfg_);
  }

  /// phi(x, z) = g(x) + sum_j z_j f_j(x).
  double phi(const Vector& x, const Vector& z) const { return prob_.g.value(x) + z.dot(prob_.constraint_values(x)); }

  Vector project(const Vector& v) const { return prob_.h.prox(v, 1.0); }

  StepInfo step() {
    StepInfo info;
    info.z = lambda_ + fvals_;
    info.direction = prob_.g.gradient(x_);
    for (Index j = 0; j < prob_.num_constraints(); ++j) {
      if (info.z[j] != 0.0) info.direction += info.z[j] * prob_.constraints[static_cast<std::size_t>(j)].gradient(x_);
    }
    info.phi_old = prob_.g.value(x_) + info.z.dot(fvals_);

    Vector next;
    auto candidate = [&](double eta) {
      next = project(x_ - info.direction / eta);
      const Vector d = next - x_;
      info.lin = info.direction.dot(d);
      info.dist_sq = d.squaredNorm();
      info.phi_new = phi(next, info.z);
    };
    if (cfg_.step_mode == StepMode::backtracking) {
      auto accept = [&](double eta) {
        candidate(eta);
        if (info.dist_sq == 0.0) return true;
        return descent_holds(info.phi_new, info.phi_old, info.lin, eta, info.dist_sq);
      };
      std::tie(eta_, info.backtracks) = backtrack(eta_, cfg_.backtrack_factor, cfg_.max_backtracks, accept);
      backtracks_ += info.backtracks;
    } else {
      candidate(eta_);
    }
    info.eta = eta_;

    for (Index j = 0; j < lambda_.size(); ++j) lambda_[j] = std::max(-fvals_[j], lambda_[j] + fvals_[j]);
    x_ = std::move(next);
    fvals_ = prob_.constraint_values(x_);
    ++iterations_;
    return info;
  }

  // Interface for detail::run_epochs.
  void advance_epoch() { step(); }
  /// Reported multipliers z = [lambda + f(x)]_+.
  PrimalDualPoint measured_point() const {
    PrimalDualPoint w;
    w.x = x_;
    w.y = Vector(0);
    w.z = (lambda_ + fvals_).cwiseMax(0.0);
    w.r = Vector(0);
    w.fvals = fvals_;
    return w;
  }
  std::optional<Vector> ergodic_point() const { return std::nullopt; }
  double eta_max() const { return eta_; }
  Index iterations() const { return iterations_; }
  Index backtracks() const { return backtracks_; }
  const char* name() const { return "pdyn"; }

  const Vector& x() const { return x_; }
  const Vector& lambda() const { return lambda_; }
  const Vector& fvals() const { return fvals_; }
  double eta() const { return eta_; }

  SolveResult run() { return detail::run_epochs(*this, prob_, cfg_); }

 private:
  const ProblemInstance& prob_;
  SolverConfig cfg_;
  Vector x_;
  Vector lambda_;
  Vector fvals_;
  double eta_ = 1.0;
  Index iterations_ = 0;
  Index backtracks_ = 0;
};

inline SolveResult solve_pdyn(const ProblemInstance& prob, const SolverConfig& cfg, Vector x0) {
  Pdyn solver(prob, cfg, std::move(x0));
  return solver.run();
}

}  // namespace lalm
