#pragma once

#include <lalm/solver.hpp>

namespace lalm {

/// Analytic step: max(eta_prev, L_F + delta).  eta_prev = 0 before the
/// first iteration.
inline double eta_analytic(double eta_prev, double lf, double delta) {
  require(std::isfinite(lf) && lf >= 0.0, "eta_analytic: L_F must be finite and nonnegative");
  return std::max(eta_prev, lf + delta);
}

/// argmin_x h(x) + <grad, x> + (eta/2)||x - x_k||^2 = prox_{h/eta}(x_k - grad/eta).
inline Vector x_update(const Vector& xk, const Vector& grad, double eta, const ProxFunction& h) {
  require(eta > 0.0, "x_update: eta must be positive");
  require_same_size(xk.size(), grad.size(), "x_update");
  return h.prox(xk - grad / eta, 1.0 / eta);
}

/// Geometric search eta, eta*nu, eta*nu^2, ... until `accept(eta)` holds.
/// Returns the accepted eta and the number of multiplications.
template <class Accept>
std::pair<double, Index> backtrack(double eta, double nu, Index max_backtracks, Accept&& accept) {
  require(eta > 0.0, "backtrack: seed must be positive");
  require(nu > 1.0, "backtrack: factor must exceed 1");
  for (Index t = 0; t <= max_backtracks; ++t) {
    if (accept(eta)) return {eta, t};
    eta *= nu;
  }
  throw NumericalError("backtracking exceeded " + std::to_string(max_backtracks) +
                       " increases; oracle values are probably non-finite");
}

/// Accepted linearized step of one LALM iteration.
struct LinearizedStep {
  double eta = 0.0;
  Index backtracks = 0;
  double f_old = 0.0;
  double f_new = 0.0;
  PrimalDualPoint next;  ///< (x+, y^k, z^k) with refreshed caches
};

/// Backtracking on the descent inequality
///   F(x+, y, z) <= F(w) + <grad_x F(w), x+ - x> + (eta/2)||x+ - x||^2,
/// starting from eta_start.
inline LinearizedStep eta_backtrack(const PrimalDualPoint& w, const Vector& grad, double eta_start,
                                    double beta, double nu, Index max_backtracks,
                                    const ProblemInstance& prob) {
  LinearizedStep step;
  step.f_old = smooth_auglag_value(w, beta, prob);
  auto accept = [&](double eta) {
    step.next = PrimalDualPoint::make(prob, x_update(w.x, grad, eta, prob.h), w.y, w.z);
    step.f_new = smooth_auglag_value(step.next, beta, prob);
    const Vector d = step.next.x - w.x;
    const double dist_sq = d.squaredNorm();
    if (dist_sq == 0.0) return true;
    return descent_holds(step.f_new, step.f_old, grad.dot(d), eta, dist_sq);
  };
  std::tie(step.eta, step.backtracks) = backtrack(eta_start, nu, max_backtracks, accept);
  return step;
}

/// Full-vector linearized augmented Lagrangian method.  Each iteration takes
/// one prox-gradient step on L_beta in x, then updates the multipliers
///   y <- y + rho_y (A x+ - b),   z_j <- z_j + rho_z max(-z_j/beta, f_j(x+)).
class Lalm {
 public:
  struct StepInfo {
    double eta = 0.0;
    Index backtracks = 0;
    double f_old = 0.0;     ///< F(w^k)
    double f_trial = 0.0;   ///< F(x^{k+1}, y^k, z^k)
    double lin = 0.0;       ///< <grad_x F(w^k), x^{k+1} - x^k>
    double dist_sq = 0.0;   ///< ||x^{k+1} - x^k||^2
  };

  Lalm(const ProblemInstance& prob, SolverConfig cfg, PrimalDualPoint w0)
      : prob_(prob), cfg_(std::move(cfg)), w_(std::move(w0)),
        ergodic_(ErgodicAccumulator::weighted(prob.dim)) {
    prob_.validate();
    cfg_.validate();
    require_same_size(w_.x.size(), prob_.dim, "Lalm: x0");
    require_same_size(w_.y.size(), prob_.num_equalities(), "Lalm: y0");
    require_same_size(w_.z.size(), prob_.num_constraints(), "Lalm: z0");
    if ((w_.z.array() < 0.0).any()) throw InvalidArgument("Lalm: z0 must be nonnegative");
    rho_y_ = cfg_.rho_y.value_or(cfg_.beta);
    rho_z_ = cfg_.rho_z.value_or(cfg_.beta);
    if (cfg_.step_mode == StepMode::analytic && !analytic_constants_available(prob_)) {
      throw InvalidArgument("Lalm: analytic step needs Lipschitz and gradient bounds for g and every f_j; "
                            "use backtracking step mode");
    }
    w_.refresh(prob_);
    eta_ = cfg_.step_mode == StepMode::analytic ? 0.0 : default_eta_seed(prob_, cfg_);
  }

  Lalm(const ProblemInstance& prob, SolverConfig cfg, Vector x0, Vector y0, Vector z0)
      : Lalm(prob, std::move(cfg), PrimalDualPoint::make(prob, std::move(x0), std::move(y0), std::move(z0))) {}

  StepInfo step() {
    StepInfo info;
    const double beta = cfg_.beta;
    const Vector grad = grad_x_F(w_, beta, prob_);
    PrimalDualPoint next;
    if (cfg_.step_mode == StepMode::analytic) {
      eta_ = eta_analytic(eta_, L_F_from_values(), cfg_.delta);
      next = PrimalDualPoint::make(prob_, x_update(w_.x, grad, eta_, prob_.h), w_.y, w_.z);
      info.f_old = smooth_auglag_value(w_, beta, prob_);
      info.f_trial = smooth_auglag_value(next, beta, prob_);
    } else {
      LinearizedStep s = eta_backtrack(w_, grad, eta_, beta, cfg_.backtrack_factor, cfg_.max_backtracks, prob_);
      eta_ = s.eta;
      info.backtracks = s.backtracks;
      info.f_old = s.f_old;
      info.f_trial = s.f_new;
      backtracks_ += s.backtracks;
      next = std::move(s.next);
    }
    info.eta = eta_;
    const Vector d = next.x - w_.x;
    info.lin = grad.dot(d);
    info.dist_sq = d.squaredNorm();

    if (cfg_.track_ergodic) ergodic_.add(next.x, 1.0 / eta_);
    w_.x = std::move(next.x);
    w_.r = std::move(next.r);
    w_.fvals = std::move(next.fvals);
    if (!prob_.affine.is_empty()) w_.y = y_update(w_.y, w_.r, rho_y_);
    w_.z = z_update(w_.z, w_.fvals, rho_z_, beta);
    ++iterations_;
    return info;
  }

  // Interface for detail::run_epochs.
  void advance_epoch() { step(); }
  PrimalDualPoint measured_point() const { return w_; }
  std::optional<Vector> ergodic_point() const {
    if (!cfg_.track_ergodic || ergodic_.count() == 0) return std::nullopt;
    return ergodic_.point();
  }
  double eta_max() const { return eta_; }
  Index iterations() const { return iterations_; }
  Index backtracks() const { return backtracks_; }
  const char* name() const { return "lalm"; }

  const PrimalDualPoint& point() const { return w_; }
  /// L_F at the current iterate from cached constraint values.
  double L_F_from_values() const {
    if (!prob_.g.lipschitz) throw InvalidArgument("L_F: objective has no Lipschitz constant; use backtracking step mode");
    return *prob_.g.lipschitz + cfg_.beta * prob_.affine.norm_sq() +
           L_Psi_from_values(w_.fvals, w_.z, cfg_.beta, prob_);
  }
  double eta() const { return eta_; }
  double rho_y() const { return rho_y_; }
  double rho_z() const { return rho_z_; }
  StepMode step_mode() const { return cfg_.step_mode; }
  const ErgodicAccumulator& ergodic() const { return ergodic_; }

  SolveResult run() { return detail::run_epochs(*this, prob_, cfg_); }

 private:
  const ProblemInstance& prob_;
  SolverConfig cfg_;
  PrimalDualPoint w_;
  ErgodicAccumulator ergodic_;
  double rho_y_ = 1.0;
  double rho_z_ = 1.0;
  double eta_ = 0.0;
  Index iterations_ = 0;
  Index backtracks_ = 0;
};

inline SolveResult solve_lalm(const ProblemInstance& prob, const SolverConfig& cfg, Vector x0, Vector y0,
                              Vector z0) {
  Lalm solver(prob, cfg, std::move(x0), std::move(y0), std::move(z0));
  return solver.run();
}

/// Zero multipliers.
inline SolveResult solve_lalm(const ProblemInstance& prob, const SolverConfig& cfg, Vector x0) {
  return solve_lalm(prob, cfg, std::move(x0), Vector::Zero(prob.num_equalities()),
                    Vector::Zero(prob.num_constraints()));
}

}  // namespace lalm
