#pragma once

#include <lalm/instances/minimax.hpp>
#include <lalm/instances/reference.hpp>

#include <optional>

namespace lalm {

struct BruteForceOptions {
  Index resolution = 0;          ///< grid points per coordinate per round; 0 picks by dimension
  Index rounds = 100;            ///< zoom rounds around the incumbent
  double shrink = 0.5;           ///< window width ratio between rounds
  double min_width = 1e-13;      ///< stop zooming once every cell is this narrow
  double active_tol = 1e-7;      ///< |f_j| below this counts as active
  std::optional<Box> search;     ///< required when h has no bounded domain
};

namespace detail {

/// Visit all points of a tensor grid over [lo, hi] with n points per axis.
template <class Visit>
void for_each_grid_point(const Vector& lo, const Vector& hi, Index n, Visit&& visit) {
  const Index dim = lo.size();
  std::vector<Index> idx(static_cast<std::size_t>(dim), 0);
  Vector x(dim);
  while (true) {
    for (Index i = 0; i < dim; ++i) {
      const double t = n == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(i)]) / static_cast<double>(n - 1);
      x[i] = lo[i] + t * (hi[i] - lo[i]);
    }
    visit(x);
    Index k = 0;
    while (k < dim && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == dim) return;
  }
}

/// Least-squares multipliers for the active constraints from stationarity on
/// the coordinates where h is differentiable, clamped at zero.
inline Vector fit_multipliers(const Vector& x, const ProblemInstance& prob, double active_tol) {
  const Index m = prob.num_constraints();
  Vector z = Vector::Zero(m);
  if (m == 0) return z;
  const Vector fvals = prob.constraint_values(x);
  std::vector<Index> active;
  for (Index j = 0; j < m; ++j) {
    if (fvals[j] >= -active_tol) active.push_back(j);
  }
  if (active.empty()) return z;

  const double coord_tol = 1e-8;
  const auto& dom = prob.h.domain();
  std::vector<Index> rows;
  for (Index i = 0; i < prob.dim; ++i) {
    if (dom && (x[i] - dom->lower[i] <= coord_tol || dom->upper[i] - x[i] <= coord_tol)) continue;
    if (prob.h.l1_weight() != 0.0 && std::abs(x[i]) <= coord_tol) continue;
    rows.push_back(i);
  }
  if (rows.empty()) return z;

  Vector rhs = -prob.g.gradient(x);
  if (prob.h.l1_weight() != 0.0) {
    for (Index i = 0; i < prob.dim; ++i) rhs[i] -= prob.h.l1_weight() * (x[i] > 0.0 ? 1.0 : -1.0);
  }
  Matrix jac(static_cast<Index>(rows.size()), static_cast<Index>(active.size()));
  Vector b(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Vector grad = prob.constraints[static_cast<std::size_t>(active[k])].gradient(x);
    for (std::size_t r = 0; r < rows.size(); ++r) jac(static_cast<Index>(r), static_cast<Index>(k)) = grad[rows[r]];
  }
  for (std::size_t r = 0; r < rows.size(); ++r) b[static_cast<Index>(r)] = rhs[rows[r]];
  const Vector sol = jac.completeOrthogonalDecomposition().solve(b);
  for (std::size_t k = 0; k < active.size(); ++k) z[active[k]] = std::max(0.0, sol[static_cast<Index>(k)]);
  return z;
}

}  // namespace detail

/// Grid minimization of g + h over the box intersected with {f_j <= 0},
/// followed by repeated zooming around the incumbent.  Only for dim <= 3 and
/// no equality constraints.
inline ReferenceSolution brute_force_reference(const ProblemInstance& prob, const BruteForceOptions& opt = {}) {
  prob.validate();
  if (prob.dim > 3) throw InvalidArgument("brute_force_reference: dim > 3 (use a long-run reference instead)");
  if (!prob.affine.is_empty()) {
    throw InvalidArgument("brute_force_reference: equality constraints have no interior to grid");
  }
  const Index resolution = opt.resolution > 0 ? opt.resolution : (prob.dim <= 2 ? 101 : 41);
  require(resolution >= 3, "brute_force_reference: resolution must be at least 3");
  require(opt.shrink > 0.0 && opt.shrink < 1.0, "brute_force_reference: shrink must lie in (0, 1)");
  require(opt.rounds >= 1, "brute_force_reference: rounds must be at least 1");

  Box box;
  if (opt.search) {
    box = *opt.search;
    if (prob.h.domain()) {
      box.lower = box.lower.cwiseMax(prob.h.domain()->lower);
      box.upper = box.upper.cwiseMin(prob.h.domain()->upper);
    }
  } else if (prob.h.domain()) {
    box = *prob.h.domain();
  } else {
    throw InvalidArgument("brute_force_reference: unbounded domain needs a search box");
  }
  require_same_size(box.size(), prob.dim, "brute_force_reference: search box");
  if (!box.bounded()) throw InvalidArgument("brute_force_reference: search box must be bounded");
  require(((box.upper - box.lower).array() >= 0.0).all(), "brute_force_reference: empty search box");

  Vector lo = box.lower, hi = box.upper;
  std::optional<Vector> best;
  double best_val = std::numeric_limits<double>::infinity();
  for (Index round = 0; round < opt.rounds; ++round) {
    detail::for_each_grid_point(lo, hi, resolution, [&](const Vector& x) {
      for (const auto& c : prob.constraints) {
        if (c.value(x) > 0.0) return;
      }
      const double v = prob.objective(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    });
    if (!best) throw NumericalError("brute_force_reference: no feasible grid point");
    const Vector cell = (hi - lo) / static_cast<double>(resolution - 1);
    if (cell.maxCoeff() <= opt.min_width) break;
    // Halving (rather than a few cells) keeps thin feasible valleys, such as
    // epigraphs, inside the window.
    const Vector half = (0.5 * opt.shrink * (hi - lo)).cwiseMax(2.0 * cell);
    lo = (*best - half).cwiseMax(box.lower);
    hi = (*best + half).cwiseMin(box.upper);
  }

  ReferenceSolution ref;
  ref.provenance = Provenance::brute_force;
  ref.x = *best;
  ref.y = Vector(0);
  ref.z = detail::fit_multipliers(ref.x, prob, opt.active_tol);
  ref.f0 = best_val;
  ref.kkt = kkt_residual(ref.point(prob), prob).max();
  return ref;
}

/// Grid reference for a minimax instance.  Minimizes F(x) = max_j f_j(x)
/// over the x box directly, which is convex and unconstrained, then sets
/// t = F(x) and fits the piece multipliers on the reformulated problem.
inline ReferenceSolution brute_force_minimax(const MinimaxData& data, const BruteForceOptions& opt = {}) {
  const Index p = data.box.size();
  if (p > 3) throw InvalidArgument("brute_force_minimax: dim > 3 (use a long-run reference instead)");
  if (data.pieces.empty()) throw InvalidArgument("brute_force_minimax: no pieces");
  const Index resolution = opt.resolution > 0 ? opt.resolution : (p == 1 ? 101 : 41);
  require(resolution >= 3, "brute_force_minimax: resolution must be at least 3");
  auto worst = [&](const Vector& x) {
    double out = -std::numeric_limits<double>::infinity();
    for (const auto& piece : data.pieces) out = std::max(out, piece.value(x));
    return out;
  };

  Vector lo = data.box.lower, hi = data.box.upper;
  Vector best = lo;
  double best_val = std::numeric_limits<double>::infinity();
  for (Index round = 0; round < opt.rounds; ++round) {
    detail::for_each_grid_point(lo, hi, resolution, [&](const Vector& x) {
      const double v = worst(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    });
    const Vector cell = (hi - lo) / static_cast<double>(resolution - 1);
    if (cell.maxCoeff() <= opt.min_width) break;
    const Vector half = (0.5 * opt.shrink * (hi - lo)).cwiseMax(2.0 * cell);
    lo = (best - half).cwiseMax(data.box.lower);
    hi = (best + half).cwiseMin(data.box.upper);
  }

  const ProblemInstance prob = build_minimax(data);
  ReferenceSolution ref;
  ref.provenance = Provenance::brute_force;
  ref.x = Vector(p + 1);
  ref.x << best, best_val;
  ref.y = Vector(0);
  ref.z = detail::fit_multipliers(ref.x, prob, opt.active_tol);
  ref.f0 = best_val;
  ref.kkt = kkt_residual(ref.point(prob), prob).max();
  return ref;
}

}  // namespace lalm
