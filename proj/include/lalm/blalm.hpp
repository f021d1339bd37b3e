#pragma once

#include <lalm/lalm.hpp>

#include <memory>
#include <random>
#include <vector>

namespace lalm {

/// Uniform block sampler with a deterministic stream per seed.
class BlockSampler {
 public:
  BlockSampler(Index blocks, std::uint64_t seed) : blocks_(blocks), rng_(seed) {
    require(blocks >= 1, "BlockSampler: need at least one block");
  }

  /// Index in [0, blocks).
  Index pick() {
    if (blocks_ == 1) return 0;
    // Plain modulo of a 64-bit draw: the bias is below n / 2^64 and the
    // stream does not depend on the standard library's distributions.
    return static_cast<Index>(rng_() % static_cast<std::uint64_t>(blocks_));
  }

  Index blocks() const { return blocks_; }

 private:
  Index blocks_;
  std::mt19937_64 rng_;
};

/// r + A_i delta_i.
inline Vector residual_increment(const Vector& r, const AffineConstraint& affine, const BlockRange& blk,
                                 const Vector& delta) {
  require_same_size(delta.size(), blk.width, "residual_increment");
  if (affine.is_empty()) return r;
  return r + affine.apply_block(blk, delta);
}

/// Randomized block linearized augmented Lagrangian method.  Each iteration
/// updates one uniformly drawn block of x by a prox-gradient step on
/// L_beta, refreshes r and f_j(x) incrementally, then updates y and z.
/// Epoch = n block updates.
class Blalm {
 public:
  Blalm(const ProblemInstance& prob, SolverConfig cfg, PrimalDualPoint w0, std::uint64_t seed)
      : prob_(prob), cfg_(std::move(cfg)), w_(std::move(w0)),
        sampler_(prob.partition ? prob.partition->count() : 1, seed),
        ergodic_(ErgodicAccumulator::uniform(prob.dim, prob.partition ? prob.partition->count() : 1)) {
    prob_.validate();
    cfg_.validate();
    if (!prob_.partition) throw InvalidArgument("Blalm: problem has no block partition");
    if (!prob_.h.separable()) throw InvalidArgument("Blalm: h must be separable across blocks");
    require_same_size(w_.x.size(), prob_.dim, "Blalm: x0");
    require_same_size(w_.y.size(), prob_.num_equalities(), "Blalm: y0");
    require_same_size(w_.z.size(), prob_.num_constraints(), "Blalm: z0");
    if ((w_.z.array() < 0.0).any()) throw InvalidArgument("Blalm: z0 must be nonnegative");

    const Index n = prob_.partition->count();
    rho_y_ = cfg_.rho_y.value_or(cfg_.beta / static_cast<double>(n));
    rho_z_ = cfg_.rho_z.value_or(cfg_.beta / static_cast<double>(n));
    if (cfg_.step_mode == StepMode::analytic && !analytic_constants_available(prob_)) {
      throw InvalidArgument("Blalm: analytic step needs Lipschitz and gradient bounds for g and every f_j; "
                            "use backtracking step mode");
    }
    const double seed_eta = cfg_.step_mode == StepMode::analytic ? 0.0 : default_eta_seed(prob_, cfg_);
    etas_.assign(static_cast<std::size_t>(n), seed_eta);
    block_norm_sq_.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      block_norm_sq_[static_cast<std::size_t>(i)] = prob_.affine.block_norm_sq((*prob_.partition)[i]);
    }

    g_eval_ = prob_.g.make_incremental();
    for (const auto& c : prob_.constraints) c_evals_.push_back(c.f.make_incremental());
    refresh();
  }

  Blalm(const ProblemInstance& prob, SolverConfig cfg, Vector x0, Vector y0, Vector z0, std::uint64_t seed)
      : Blalm(prob, std::move(cfg), PrimalDualPoint::make(prob, std::move(x0), std::move(y0), std::move(z0)),
              seed) {}

  /// Recompute r, f_j(x) and all incremental state from x.
  void refresh() {
    g_eval_->reset(w_.x);
    for (auto& e : c_evals_) e->reset(w_.x);
    w_.r = prob_.affine.is_empty() ? Vector(0) : prob_.affine.residual(w_.x);
    for (Index j = 0; j < prob_.num_constraints(); ++j) w_.fvals[j] = c_evals_[static_cast<std::size_t>(j)]->value();
  }

  /// grad_{x_i} F_beta(w) from the maintained state.
  Vector partial_gradient(Index i) const {
    const BlockRange& blk = (*prob_.partition)[i];
    Vector out(blk.width);
    g_eval_->block_gradient(blk.offset, out);
    if (!prob_.affine.is_empty()) out += prob_.affine.adjoint_block(blk, w_.y + cfg_.beta * w_.r);
    Vector tmp(blk.width);
    for (Index j = 0; j < prob_.num_constraints(); ++j) {
      const double coef = psi_du(w_.fvals[j], w_.z[j], cfg_.beta);
      if (coef == 0.0) continue;
      c_evals_[static_cast<std::size_t>(j)]->block_gradient(blk.offset, tmp);
      out += coef * tmp;
    }
    return out;
  }

  /// F_beta(w) from the maintained state.
  double smooth_value() const {
    double out = g_eval_->value();
    if (!prob_.affine.is_empty()) out += w_.y.dot(w_.r) + 0.5 * cfg_.beta * w_.r.squaredNorm();
    return out + Psi_from_values(w_.fvals, w_.z, cfg_.beta);
  }

  /// Block analytic step: L_g + beta ||A_i||^2 + L_Psi(x, z) + delta, kept monotone.
  double block_eta_analytic(Index i) const {
    const double lg = prob_.g.lipschitz.value_or(0.0);
    const double bound = lg + cfg_.beta * block_norm_sq_[static_cast<std::size_t>(i)] +
                         L_Psi_from_values(w_.fvals, w_.z, cfg_.beta, prob_) + cfg_.delta;
    return std::max(etas_[static_cast<std::size_t>(i)], bound);
  }

  struct BlockStep {
    Index block = 0;
    double eta = 0.0;
    Index backtracks = 0;
    Vector candidate;  ///< x_i^{k+1}
    Vector delta;      ///< x_i^{k+1} - x_i^k
    double f_old = 0.0;
    double f_new = 0.0;
    double lin = 0.0;
  };

  /// Candidate block update at step size eta without committing it.
  BlockStep trial_block(Index i, const Vector& grad_i, double eta) const {
    const BlockRange& blk = (*prob_.partition)[i];
    BlockStep s;
    s.block = i;
    s.eta = eta;
    s.candidate = w_.x.segment(blk.offset, blk.width) - grad_i / eta;
    prob_.h.prox_segment(s.candidate, blk.offset, 1.0 / eta);
    s.delta = s.candidate - w_.x.segment(blk.offset, blk.width);
    s.lin = grad_i.dot(s.delta);
    double f_new = g_eval_->trial_value(blk.offset, s.delta);
    if (!prob_.affine.is_empty()) {
      const Vector r_new = residual_increment(w_.r, prob_.affine, blk, s.delta);
      f_new += w_.y.dot(r_new) + 0.5 * cfg_.beta * r_new.squaredNorm();
    }
    for (Index j = 0; j < prob_.num_constraints(); ++j) {
      f_new += psi(c_evals_[static_cast<std::size_t>(j)]->trial_value(blk.offset, s.delta), w_.z[j], cfg_.beta);
    }
    s.f_new = f_new;
    return s;
  }

  /// Per-block backtracking from the block's current eta.
  BlockStep eta_backtrack_block(Index i) const {
    const Vector grad_i = partial_gradient(i);
    const double f_old = smooth_value();
    BlockStep step;
    auto accept = [&](double eta) {
      step = trial_block(i, grad_i, eta);
      const double dist_sq = step.delta.squaredNorm();
      if (dist_sq == 0.0) return true;
      return descent_holds(step.f_new, f_old, step.lin, eta, dist_sq);
    };
    Index count = 0;
    std::tie(std::ignore, count) =
        backtrack(etas_[static_cast<std::size_t>(i)], cfg_.backtrack_factor, cfg_.max_backtracks, accept);
    step.backtracks = count;
    step.f_old = f_old;
    return step;
  }

  /// Apply a block change to x, the residual and all constraint values.
  void commit(const BlockStep& s) {
    const BlockRange& blk = (*prob_.partition)[s.block];
    if (!prob_.affine.is_empty()) w_.r = residual_increment(w_.r, prob_.affine, blk, s.delta);
    g_eval_->commit(blk.offset, s.delta);
    for (Index j = 0; j < prob_.num_constraints(); ++j) {
      auto& e = c_evals_[static_cast<std::size_t>(j)];
      e->commit(blk.offset, s.delta);
      w_.fvals[j] = e->value();
    }
    w_.x.segment(blk.offset, blk.width) = s.candidate;
  }

  /// One iteration on a given block (exposed for deterministic tests).
  BlockStep step_block(Index i) {
    BlockStep s;
    if (cfg_.step_mode == StepMode::analytic) {
      const double eta = block_eta_analytic(i);
      s = trial_block(i, partial_gradient(i), eta);
      s.f_old = smooth_value();
    } else {
      s = eta_backtrack_block(i);
      backtracks_ += s.backtracks;
    }
    etas_[static_cast<std::size_t>(i)] = s.eta;
    commit(s);
    if (!prob_.affine.is_empty()) w_.y = y_update(w_.y, w_.r, rho_y_);
    w_.z = z_update(w_.z, w_.fvals, rho_z_, cfg_.beta);
    if (cfg_.track_ergodic) ergodic_.add(w_.x);
    ++iterations_;
    return s;
  }

  BlockStep step() { return step_block(sampler_.pick()); }

  // Interface for detail::run_epochs.
  void advance_epoch() {
    const Index n = prob_.partition->count();
    for (Index t = 0; t < n; ++t) step();
    ++epochs_;
    if (cfg_.refresh_epochs > 0 && epochs_ % cfg_.refresh_epochs == 0) refresh();
  }
  PrimalDualPoint measured_point() const {
    PrimalDualPoint out = w_;
    out.refresh(prob_);
    return out;
  }
  std::optional<Vector> ergodic_point() const {
    if (!cfg_.track_ergodic || ergodic_.count() == 0) return std::nullopt;
    return ergodic_.point();
  }
  double eta_max() const { return *std::max_element(etas_.begin(), etas_.end()); }
  Index iterations() const { return iterations_; }
  Index backtracks() const { return backtracks_; }
  const char* name() const { return "blalm"; }

  const PrimalDualPoint& point() const { return w_; }
  const std::vector<double>& etas() const { return etas_; }
  double rho_y() const { return rho_y_; }
  double rho_z() const { return rho_z_; }
  StepMode step_mode() const { return cfg_.step_mode; }
  const ErgodicAccumulator& ergodic() const { return ergodic_; }
  Index pick_block() { return sampler_.pick(); }

  SolveResult run() { return detail::run_epochs(*this, prob_, cfg_); }

 private:
  const ProblemInstance& prob_;
  SolverConfig cfg_;
  PrimalDualPoint w_;
  BlockSampler sampler_;
  ErgodicAccumulator ergodic_;
  std::unique_ptr<IncrementalEval> g_eval_;
  std::vector<std::unique_ptr<IncrementalEval>> c_evals_;
  std::vector<double> etas_;
  std::vector<double> block_norm_sq_;
  double rho_y_ = 1.0;
  double rho_z_ = 1.0;
  Index iterations_ = 0;
  Index backtracks_ = 0;
  Index epochs_ = 0;
};

inline SolveResult solve_blalm(const ProblemInstance& prob, const SolverConfig& cfg, Vector x0, Vector y0,
                               Vector z0, std::uint64_t seed) {
  Blalm solver(prob, cfg, std::move(x0), std::move(y0), std::move(z0), seed);
  return solver.run();
}

inline SolveResult solve_blalm(const ProblemInstance& prob, const SolverConfig& cfg, Vector x0,
                               std::uint64_t seed) {
  return solve_blalm(prob, cfg, std::move(x0), Vector::Zero(prob.num_equalities()),
                     Vector::Zero(prob.num_constraints()), seed);
}

}  // namespace lalm
