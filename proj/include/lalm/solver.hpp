#pragma once

#include <lalm/auglag.hpp>
#include <lalm/ergodic.hpp>

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lalm {

enum class StepMode { analytic, backtracking };

inline const char* to_string(StepMode m) { return m == StepMode::analytic ? "analytic" : "backtracking"; }

/// Which epochs produce a trace row.  every > 0 records epochs 0, every,
/// 2*every, ...; every == 0 means "automatic": every epoch when the budget is
/// at most 1000, otherwise about `log_rows` logarithmically spaced epochs.
struct RecordSchedule {
  Index every = 0;
  Index log_rows = 500;

  std::vector<Index> epochs(Index budget) const {
    std::vector<Index> out;
    if (every > 0 || budget <= 1000) {
      const Index step = every > 0 ? every : 1;
      for (Index e = 0; e <= budget; e += step) out.push_back(e);
      return out;
    }
    std::set<Index> picks{0};
    const double top = std::log10(static_cast<double>(budget));
    for (Index i = 0; i < log_rows; ++i) {
      const double t = top * static_cast<double>(i) / static_cast<double>(log_rows - 1);
      picks.insert(std::clamp<Index>(static_cast<Index>(std::llround(std::pow(10.0, t))), 1, budget));
    }
    picks.insert(budget);
    return {picks.begin(), picks.end()};
  }
};

struct SolverConfig {
  double beta = 1.0;
  std::optional<double> rho_y;  ///< defaults are method specific
  std::optional<double> rho_z;
  double delta = 0.0;
  StepMode step_mode = StepMode::backtracking;
  double backtrack_factor = 1.5;
  std::optional<double> eta0;  ///< backtracking seed; default max(1, L_g)
  Index max_backtracks = 200;
  Index max_epochs = 1000;
  double tol = 0.0;  ///< 0 disables early stopping
  RecordSchedule record;
  bool track_ergodic = true;
  Index refresh_epochs = 10;  ///< block solver cache refresh cadence
  std::optional<double> f0_star;  ///< overrides the instance's known optimum

  void validate() const {
    require(beta > 0.0, "SolverConfig: beta must be positive");
    require(delta >= 0.0, "SolverConfig: delta must be nonnegative");
    require(backtrack_factor > 1.0, "SolverConfig: backtracking factor must exceed 1");
    require(max_epochs >= 1, "SolverConfig: epoch budget must be at least 1");
    require(tol >= 0.0, "SolverConfig: tolerance must be nonnegative");
    if (eta0) require(*eta0 > 0.0, "SolverConfig: eta0 must be positive");
    if (rho_y) require(*rho_y > 0.0 && *rho_y <= beta, "SolverConfig: rho_y must lie in (0, beta]");
    if (rho_z) require(*rho_z > 0.0 && *rho_z <= beta, "SolverConfig: rho_z must lie in (0, beta]");
  }
};

/// One row of a convergence trace.  Optional fields are empty when the
/// quantity is unavailable (no reference value, no ergodic tracking).
struct TraceRecord {
  Index epoch = 0;
  double obj = 0.0;
  std::optional<double> obj_gap;
  double feas = 0.0;
  double kkt_stat = 0.0;
  double kkt_comp = 0.0;
  std::optional<double> erg_obj_gap;
  std::optional<double> erg_feas;
  double eta_max = 0.0;
  double time_ms = 0.0;
};

enum class StopReason { budget, tolerance };

struct SolveResult {
  std::string method;
  PrimalDualPoint w;
  std::optional<Vector> ergodic;
  std::vector<TraceRecord> trace;
  Index epochs = 0;
  Index iterations = 0;
  Index backtracks = 0;
  double eta_max = 0.0;
  StopReason stop = StopReason::budget;
};

/// Raised when an oracle produces a non-finite value; holds the trace so far.
class SolverAborted : public NumericalError {
 public:
  SolverAborted(const std::string& what, std::vector<TraceRecord> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  std::vector<TraceRecord> trace_;
};

/// Descent test F(x+) <= F(x) + <grad, d> + (eta/2)||d||^2, with a slack of a
/// few ulps of the function scale so roundoff cannot stall the search.
inline bool descent_holds(double f_new, double f_old, double lin, double eta, double dist_sq) {
  const double slack = 1e-13 * (1.0 + std::abs(f_old));
  return f_new <= f_old + lin + 0.5 * eta * dist_sq + slack;
}

/// Default backtracking seed.
inline double default_eta_seed(const ProblemInstance& prob, const SolverConfig& cfg) {
  if (cfg.eta0) return *cfg.eta0;
  return std::max(1.0, prob.g.lipschitz.value_or(1.0));
}

/// z_j + rho_z * max(-z_j / beta, f_j); stays >= 0 when rho_z <= beta (rounding is clamped).
inline Vector z_update(const Vector& z, const Vector& fvals, double rho_z, double beta) {
  require_same_size(z.size(), fvals.size(), "z_update");
  Vector out(z.size());
  for (Index j = 0; j < z.size(); ++j) out[j] = std::max(0.0, z[j] + rho_z * std::max(-z[j] / beta, fvals[j]));
  return out;
}

/// y + rho_y * r.
inline Vector y_update(const Vector& y, const Vector& r, double rho_y) {
  require_same_size(y.size(), r.size(), "y_update");
  return y + rho_y * r;
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

/// Metrics for one trace row at primal-dual point w.
inline TraceRecord measure(const ProblemInstance& prob, const PrimalDualPoint& w,
                           const std::optional<Vector>& ergodic, std::optional<double> f0_star) {
  TraceRecord rec;
  rec.obj = prob.objective(w.x);
  const KktResidual kkt = kkt_residual(w, prob);
  rec.feas = kkt.feasibility;
  rec.kkt_stat = kkt.stationarity;
  rec.kkt_comp = kkt.complementarity;
  if (f0_star) rec.obj_gap = std::abs(rec.obj - *f0_star);
  if (ergodic) {
    rec.erg_feas = prob.feasibility(*ergodic);
    if (f0_star) rec.erg_obj_gap = std::abs(prob.objective(*ergodic) - *f0_star);
  }
  return rec;
}

/// Stopping test: Definition-style eps-optimality when f0* is known,
/// otherwise the largest KKT component.
inline bool converged(const ProblemInstance& prob, const PrimalDualPoint& w,
                      std::optional<double> f0_star, double tol) {
  if (tol <= 0.0) return false;
  if (f0_star) return eps_optimality(w.x, *f0_star, tol, prob).optimal;
  return kkt_residual(w, prob).max() <= tol;
}

/// Epoch loop shared by all methods.  Solver must provide
///   void advance_epoch();                     // one epoch of work
///   PrimalDualPoint measured_point() const;   // fresh caches, z >= 0
///   std::optional<Vector> ergodic_point() const;
///   double eta_max() const;
///   Index iterations() const; Index backtracks() const;
///   const char* name() const;
template <class Solver>
SolveResult run_epochs(Solver& solver, const ProblemInstance& prob, const SolverConfig& cfg) {
  const std::optional<double> f0_star = cfg.f0_star ? cfg.f0_star : prob.optimal_value;
  const std::vector<Index> schedule = cfg.record.epochs(cfg.max_epochs);
  std::size_t next_record = 0;

  SolveResult result;
  result.method = solver.name();
  double solver_ms = 0.0;

  auto record = [&](Index epoch) {
    TraceRecord rec = measure(prob, solver.measured_point(), solver.ergodic_point(), f0_star);
    rec.epoch = epoch;
    rec.eta_max = solver.eta_max();
    rec.time_ms = solver_ms;
    result.trace.push_back(rec);
  };

  auto check_finite = [&](Index epoch) {
    const PrimalDualPoint w = solver.measured_point();
    const double obj = prob.objective(w.x);
    if (!std::isfinite(obj) || !w.x.allFinite() || !w.z.allFinite() || !w.y.allFinite()) {
      TraceRecord rec;
      rec.epoch = epoch;
      rec.obj = obj;
      rec.feas = std::numeric_limits<double>::quiet_NaN();
      rec.kkt_stat = std::numeric_limits<double>::quiet_NaN();
      rec.eta_max = solver.eta_max();
      rec.time_ms = solver_ms;
      result.trace.push_back(rec);
      throw SolverAborted(std::string(solver.name()) + ": non-finite iterate at epoch " +
                              std::to_string(epoch),
                          result.trace);
    }
  };

  if (next_record < schedule.size() && schedule[next_record] == 0) {
    record(0);
    ++next_record;
  }

  Index epoch = 0;
  while (epoch < cfg.max_epochs) {
    const auto t0 = std::chrono::steady_clock::now();
    solver.advance_epoch();
    solver_ms += elapsed_ms(t0);
    ++epoch;

    const bool scheduled = next_record < schedule.size() && schedule[next_record] == epoch;
    if (scheduled || cfg.tol > 0.0) check_finite(epoch);
    if (scheduled) {
      record(epoch);
      ++next_record;
    }
    if (cfg.tol > 0.0 && converged(prob, solver.measured_point(), f0_star, cfg.tol)) {
      if (!scheduled) record(epoch);
      result.stop = StopReason::tolerance;
      break;
    }
  }

  result.w = solver.measured_point();
  result.ergodic = solver.ergodic_point();
  result.epochs = epoch;
  result.iterations = solver.iterations();
  result.backtracks = solver.backtracks();
  result.eta_max = solver.eta_max();
  return result;
}

}  // namespace detail
}  // namespace lalm
