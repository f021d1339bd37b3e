#include "oracles.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <limits>

using namespace lalm;
using lalm::testing::random_vector;

namespace {

/// g = sum_i (L_i/2) x_i^2 with one coordinate per block.
ProblemInstance separable_quadratic(const Vector& curv) {
  ProblemInstance prob;
  prob.name = "separable";
  prob.dim = curv.size();
  prob.g = make_quadratic(curv.asDiagonal().toDenseMatrix(), Vector::Zero(curv.size()), 0.0);
  prob.affine = AffineConstraint::empty(curv.size());
  prob.partition = BlockPartition::even(curv.size(), curv.size());
  return prob;
}

/// Small QCQP with an extra equality block, n blocks.
ProblemInstance qcqp_with_equalities(Index p, Index n, std::uint64_t seed) {
  ProblemInstance prob = lalm::testing::small_qcqp(p, 3, seed, n);
  std::mt19937_64 rng(seed + 100);
  prob.affine = AffineConstraint(lalm::testing::random_matrix(rng, 2, p), random_vector(rng, 2));
  return prob;
}

}  // namespace

TEST(BlockSampler, SingleBlockAndDeterminism) {
  BlockSampler one(1, 9);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(one.pick(), 0);
  BlockSampler a(7, 42), b(7, 42), c(7, 43);
  bool differs = false;
  for (int t = 0; t < 1000; ++t) {
    const Index ia = a.pick();
    EXPECT_EQ(ia, b.pick());
    differs = differs || ia != c.pick();
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(BlockSampler(0, 1), InvalidArgument);
}

TEST(BlockSampler, UniformFrequencies) {
  BlockSampler s(10, 2024);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) ++counts[static_cast<std::size_t>(s.pick())];
  double chi2 = 0.0;
  for (int c : counts) {
    const double freq = static_cast<double>(c) / draws;
    EXPECT_GE(freq, 0.09);
    EXPECT_LE(freq, 0.11);
    chi2 += (c - draws / 10.0) * (c - draws / 10.0) / (draws / 10.0);
  }
  // 9 degrees of freedom, 0.999 quantile
  EXPECT_LT(chi2, 27.88);
}

TEST(ResidualIncrement, Examples) {
  const AffineConstraint aff(Matrix::Identity(3, 3), Vector::Zero(3));
  const BlockPartition part = BlockPartition::even(3, 3);
  const Vector r = Vector::Constant(3, 1.0);
  Vector d(1);
  d << 0.0;
  EXPECT_EQ(residual_increment(r, aff, part[1], d), r);
  d << 2.0;
  const Vector out = residual_increment(r, aff, part[1], d);
  EXPECT_DOUBLE_EQ(out[1], 3.0);
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[2], 1.0);
}

TEST(ResidualIncrement, DriftAgainstFullRecomputation) {
  std::mt19937_64 rng(71);
  const Matrix a = lalm::testing::random_matrix(rng, 8, 20);
  const AffineConstraint aff(a, random_vector(rng, 8));
  const BlockPartition part = BlockPartition::even(20, 5);
  Vector x = random_vector(rng, 20);
  Vector r = aff.residual(x);
  for (int t = 0; t < 10000; ++t) {
    const BlockRange& blk = part[static_cast<Index>(rng() % 5)];
    const Vector d = random_vector(rng, blk.width, -0.1, 0.1);
    r = residual_increment(r, aff, blk, d);
    x.segment(blk.offset, blk.width) += d;
  }
  const Vector full = aff.residual(x);
  EXPECT_LE((r - full).norm(), 1e-9 * std::max(1.0, full.norm()));
}

TEST(BlalmStep, SingleBlockChangesAndStateStaysConsistent) {
  const ProblemInstance prob = qcqp_with_equalities(12, 4, 3);
  SolverConfig cfg;
  cfg.beta = 0.5;
  cfg.refresh_epochs = 0;
  Blalm solver(prob, cfg, Vector::Constant(12, 2.0), Vector::Zero(2), Vector::Zero(3), 11);
  for (int t = 0; t < 2000; ++t) {
    const Vector before = solver.point().x;
    const auto s = solver.step();
    const BlockRange& blk = (*prob.partition)[s.block];
    const Vector& after = solver.point().x;
    for (Index k = 0; k < 12; ++k) {
      if (k >= blk.offset && k < blk.end()) continue;
      EXPECT_EQ(std::memcmp(&before[k], &after[k], sizeof(double)), 0);
    }
    EXPECT_TRUE((solver.point().z.array() >= 0.0).all());
  }
  const PrimalDualPoint fresh = solver.measured_point();
  EXPECT_LE((solver.point().r - fresh.r).norm(), 1e-9 * std::max(1.0, fresh.r.norm()));
  EXPECT_LE((solver.point().fvals - fresh.fvals).norm(), 1e-9 * std::max(1.0, fresh.fvals.norm()));
  EXPECT_NEAR(solver.smooth_value(), smooth_auglag_value(fresh, 0.5, prob),
              1e-9 * (1.0 + std::abs(solver.smooth_value())));
}

TEST(BlalmStep, PartialGradientMatchesFullGradientSlice) {
  const ProblemInstance prob = qcqp_with_equalities(10, 5, 4);
  SolverConfig cfg;
  Blalm solver(prob, cfg, Vector::Constant(10, 1.0), Vector::Ones(2), Vector::Constant(3, 0.5), 5);
  for (int t = 0; t < 50; ++t) solver.step();
  const Vector full = grad_x_F(solver.point(), cfg.beta, prob);
  for (Index i = 0; i < 5; ++i) {
    const BlockRange& blk = (*prob.partition)[i];
    EXPECT_LE((solver.partial_gradient(i) - full.segment(blk.offset, blk.width)).norm(), 1e-9 * (1.0 + full.norm()));
  }
}

TEST(BlalmStep, BlockUpdateIsRestrictedProxGradient) {
  const ProblemInstance prob = lalm::testing::small_bpdn(6, 12, 2, 4);
  std::mt19937_64 rng(73);
  SolverConfig cfg;
  for (int t = 0; t < 20; ++t) {
    const Vector x0 = random_vector(rng, 12, -2, 2);
    Blalm solver(prob, cfg, x0, Vector(0), Vector::Constant(1, 0.5), 1);
    const Index i = static_cast<Index>(rng() % 4);
    const BlockRange& blk = (*prob.partition)[i];
    const auto s = solver.trial_block(i, solver.partial_gradient(i), 3.0);
    const Vector full = x_update(x0, grad_x_F(solver.point(), cfg.beta, prob), 3.0, prob.h);
    EXPECT_LE((s.candidate - full.segment(blk.offset, blk.width)).norm(), 1e-12 * (1.0 + full.norm()));
  }
}

TEST(BlalmStep, ZeroGradientBlockUnchanged) {
  Vector curv(3);
  curv << 1.0, 2.0, 3.0;
  const ProblemInstance prob = separable_quadratic(curv);
  Vector x0(3);
  x0 << 0.0, 1.0, 1.0;
  Blalm solver(prob, SolverConfig{}, x0, Vector(0), Vector(0), 1);
  const auto s = solver.step_block(0);
  EXPECT_EQ(s.delta.norm(), 0.0);
  EXPECT_EQ(solver.point().x, x0);
}

TEST(BlalmStep, BacktrackCountPerBlock) {
  Vector curv(4);
  curv << 0.5, 2.0, 5.0, 40.0;
  const ProblemInstance prob = separable_quadratic(curv);
  SolverConfig cfg;
  cfg.eta0 = 1.0;
  cfg.backtrack_factor = 1.5;
  Blalm solver(prob, cfg, Vector::Ones(4), Vector(0), Vector(0), 1);
  for (Index i = 0; i < 4; ++i) {
    const auto s = solver.step_block(i);
    const Index expected =
        std::max<Index>(0, static_cast<Index>(std::ceil(std::log(curv[i] / 1.0) / std::log(1.5))));
    EXPECT_EQ(s.backtracks, expected) << "block " << i;
    EXPECT_GE(s.eta, curv[i]);
    EXPECT_LT(s.eta, 1.5 * std::max(curv[i], 1.0));
  }
  // Steps persist per block.
  EXPECT_EQ(solver.step_block(3).backtracks, 0);
  EXPECT_EQ(solver.etas()[0], 1.0);
}

TEST(BlalmStep, AnalyticBlockStepSatisfiesDescent) {
  const ProblemInstance prob = qcqp_with_equalities(16, 4, 8);
  SolverConfig cfg;
  cfg.step_mode = StepMode::analytic;
  cfg.beta = 0.7;
  Blalm solver(prob, cfg, Vector::Constant(16, 4.0), Vector::Zero(2), Vector::Zero(3), 3);
  std::vector<double> prev(4, 0.0);
  for (int t = 0; t < 2000; ++t) {
    const auto s = solver.step();
    EXPECT_LE(s.f_new, s.f_old + s.lin + 0.5 * s.eta * s.delta.squaredNorm() + 1e-10 * (1.0 + std::abs(s.f_old)));
    EXPECT_GE(s.eta, prev[static_cast<std::size_t>(s.block)]);
    prev[static_cast<std::size_t>(s.block)] = s.eta;
  }
}

TEST(BlalmSolve, SingleBlockMatchesLalm) {
  for (StepMode mode : {StepMode::analytic, StepMode::backtracking}) {
    ProblemInstance prob = qcqp_with_equalities(6, 1, 12);
    SolverConfig cfg;
    cfg.step_mode = mode;
    cfg.beta = 0.8;
    Lalm full(prob, cfg, Vector::Constant(6, 2.0), Vector::Zero(2), Vector::Zero(3));
    Blalm block(prob, cfg, Vector::Constant(6, 2.0), Vector::Zero(2), Vector::Zero(3), 77);
    EXPECT_EQ(block.rho_y(), full.rho_y());
    for (int t = 0; t < 100; ++t) {
      full.step();
      block.step();
      ASSERT_LE((full.point().x - block.point().x).norm(), 1e-12 * (1.0 + full.point().x.norm())) << t;
      ASSERT_LE((full.point().y - block.point().y).norm(), 1e-12 * (1.0 + full.point().y.norm())) << t;
      ASSERT_LE((full.point().z - block.point().z).norm(), 1e-12 * (1.0 + full.point().z.norm())) << t;
    }
  }
}

TEST(BlalmSolve, DefaultMultiplierSteps) {
  const ProblemInstance prob = lalm::testing::small_qcqp(10, 2, 1, 5);
  SolverConfig cfg;
  cfg.beta = 2.0;
  Blalm a(prob, cfg, Vector::Zero(10), Vector(0), Vector::Zero(2), 1);
  EXPECT_DOUBLE_EQ(a.rho_y(), 0.4);
  EXPECT_DOUBLE_EQ(a.rho_z(), 0.4);
  cfg.rho_z = 0.2;  // the theorem's beta / (2n)
  Blalm b(prob, cfg, Vector::Zero(10), Vector(0), Vector::Zero(2), 1);
  EXPECT_DOUBLE_EQ(b.rho_z(), 0.2);
}

TEST(BlalmSolve, TinyQcqpAndBlockCountsAgree) {
  {
    auto [prob, ref] = tiny_reference(TinyKind::scalar_qcqp);
    SolverConfig cfg;
    cfg.max_epochs = 10000;
    const SolveResult res = solve_blalm(prob, cfg, Vector::Zero(1), 3);
    EXPECT_NEAR(res.w.x[0], -1.0, 1e-5);
  }
  const ProblemInstance base = lalm::testing::small_qcqp(6, 2, 30, 1);
  SolverConfig cfg;
  cfg.max_epochs = 10000;
  cfg.beta = 0.5;
  const SolveResult one = solve_blalm(base, cfg, Vector::Zero(6), 3);
  ProblemInstance split = base;
  split.partition = BlockPartition::even(6, 6);
  const SolveResult many = solve_blalm(split, cfg, Vector::Zero(6), 3);
  EXPECT_LE((one.w.x - many.w.x).norm(), 1e-5);
  EXPECT_LE(kkt_residual(many.w, split).max(), 1e-6);
}

TEST(BlalmSolve, SeedDeterminism) {
  const ProblemInstance prob = lalm::testing::small_qcqp(20, 3, 5, 10);
  SolverConfig cfg;
  cfg.max_epochs = 50;
  cfg.record.every = 1;
  const SolveResult a = solve_blalm(prob, cfg, Vector::Ones(20), 7);
  const SolveResult b = solve_blalm(prob, cfg, Vector::Ones(20), 7);
  const SolveResult c = solve_blalm(prob, cfg, Vector::Ones(20), 8);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].obj, b.trace[k].obj);
    EXPECT_EQ(a.trace[k].kkt_stat, b.trace[k].kkt_stat);
  }
  EXPECT_EQ(a.w.x, b.w.x);
  EXPECT_NE(a.w.x, c.w.x);
}

TEST(BlalmSolve, ErgodicNormalizations) {
  const ProblemInstance prob = lalm::testing::small_qcqp(8, 2, 6, 4);
  Blalm solver(prob, SolverConfig{}, Vector::Constant(8, 1.0), Vector(0), Vector::Zero(2), 2);
  Vector sum = Vector::Zero(8), lo = Vector::Constant(8, 1e300), hi = Vector::Constant(8, -1e300);
  const int steps = 37;
  for (int t = 0; t < steps; ++t) {
    solver.step();
    sum += solver.point().x;
    lo = lo.cwiseMin(solver.point().x);
    hi = hi.cwiseMax(solver.point().x);
  }
  const ErgodicAccumulator& acc = solver.ergodic();
  EXPECT_DOUBLE_EQ(acc.normalizer(), 1.0 + (steps - 1) / 4.0);
  EXPECT_EQ(acc.literal_point(), acc.sum() / acc.normalizer());
  EXPECT_LE((acc.sum() - sum).norm(), 1e-12 * (1.0 + sum.norm()));
  const Vector p = acc.point();
  EXPECT_TRUE((p.array() >= lo.array() - 1e-12).all() && (p.array() <= hi.array() + 1e-12).all());
}

TEST(BlalmSolve, RequiresPartition) {
  ProblemInstance prob = lalm::testing::small_qcqp(4, 1, 1);
  prob.partition.reset();
  EXPECT_THROW(Blalm(prob, SolverConfig{}, Vector::Zero(4), Vector(0), Vector::Zero(1), 1), InvalidArgument);
}

TEST(BlalmStep, PartialGradientCostScalesWithBlockWidth) {
  const Index p = 600, n = 10;
  const ProblemInstance prob = lalm::testing::small_qcqp(p, 3, 2, n);
  std::mt19937_64 rng(3);
  Blalm solver(prob, SolverConfig{}, random_vector(rng, p, -1, 1), Vector(0), Vector::Constant(3, 1.0), 1);
  auto time_of = [](auto&& fn, int reps) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 5; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < reps; ++k) fn();
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps);
    }
    return best;
  };
  double sink = 0.0;
  const double full = time_of([&] { sink += grad_x_F(solver.point(), 1.0, prob)[0]; }, 20);
  const double part = time_of([&] { sink += solver.partial_gradient(3)[0]; }, 200);
  EXPECT_TRUE(std::isfinite(sink));
  EXPECT_LT(part / full, 3.0 / static_cast<double>(n)) << "partial " << part << " s, full " << full << " s";
}
