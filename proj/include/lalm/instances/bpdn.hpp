#pragma once

#include <lalm/core/problem.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

namespace lalm {

/// Basis pursuit denoising: min ||x||_1  s.t.  ||A x - b||^2 <= delta,
/// with b = A x_true + noise * xi for a sparse Gaussian x_true.
struct BpdnSpec {
  enum class DeltaPolicy { realized_noise, fixed };

  Index rows = 50;
  Index cols = 100;
  Index sparsity = 5;
  double noise = 0.1;
  DeltaPolicy delta_policy = DeltaPolicy::realized_noise;
  double delta_value = 0.0;  ///< used when delta_policy == fixed
  std::uint64_t seed = 0;
  Index blocks = 10;

  void validate() const {
    require(rows >= 1 && cols >= 1, "BpdnSpec: rows and cols must be positive");
    require(sparsity >= 0 && sparsity <= cols, "BpdnSpec: sparsity must be in [0, cols]");
    require(noise >= 0.0, "BpdnSpec: noise must be nonnegative");
    require(blocks >= 1 && blocks <= cols, "BpdnSpec: blocks must be in [1, cols]");
    if (delta_policy == DeltaPolicy::fixed) require(delta_value > 0.0, "BpdnSpec: fixed delta must be positive");
  }
};

struct BpdnData {
  Matrix a;
  Vector b;
  double delta = 0.0;
  Vector x_true;
  std::optional<Box> box;
  Index blocks = 1;
};

inline BpdnData generate_bpdn_data(const BpdnSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;

  BpdnData data;
  data.blocks = spec.blocks;
  data.a.resize(spec.rows, spec.cols);
  for (Index j = 0; j < spec.cols; ++j) {
    for (Index i = 0; i < spec.rows; ++i) data.a(i, j) = normal(rng);
  }

  std::vector<Index> support(static_cast<std::size_t>(spec.cols));
  std::iota(support.begin(), support.end(), Index{0});
  std::shuffle(support.begin(), support.end(), rng);
  data.x_true = Vector::Zero(spec.cols);
  for (Index k = 0; k < spec.sparsity; ++k) data.x_true[support[static_cast<std::size_t>(k)]] = normal(rng);

  Vector xi(spec.rows);
  for (Index i = 0; i < spec.rows; ++i) xi[i] = normal(rng);
  const Vector noise = spec.noise * xi;
  data.b = data.a * data.x_true + noise;
  data.delta = spec.delta_policy == BpdnSpec::DeltaPolicy::realized_noise ? noise.squaredNorm() : spec.delta_value;
  if (data.delta <= 0.0) throw InvalidArgument("BpdnSpec: resolved delta must be positive (zero noise?)");
  return data;
}

/// g = 0, h = ||.||_1 (plus an optional box), one constraint
/// f(x) = ||A x - b||^2 - delta, no equality part.
inline ProblemInstance build_bpdn(const BpdnData& data) {
  require_same_size(data.a.rows(), data.b.size(), "build_bpdn");
  require(data.delta > 0.0, "build_bpdn: delta must be positive");
  const Index dim = data.a.cols();
  ProblemInstance prob;
  prob.name = "bpdn";
  prob.dim = dim;
  prob.g = make_zero_function(dim);
  prob.h = data.box ? ProxFunction::l1_box(1.0, *data.box) : ProxFunction::l1(1.0);
  prob.affine = AffineConstraint::empty(dim);

  InequalityConstraint c;
  c.f = make_least_squares(data.a, data.b, data.delta);
  if (data.box && data.box->bounded()) {
    // ||2 A'(A x - b)|| <= 2 ||A|| (||A|| R + ||b||) on the box.
    const double a_norm = std::sqrt(operator_norm_sq(data.a));
    c.grad_bound = 2.0 * a_norm * (a_norm * data.box->max_norm() + data.b.norm());
  }
  prob.constraints.push_back(std::move(c));
  prob.partition = BlockPartition::even(dim, std::min(data.blocks, dim));
  prob.validate();
  return prob;
}

inline ProblemInstance gen_bpdn(const BpdnSpec& spec) { return build_bpdn(generate_bpdn_data(spec)); }

}  // namespace lalm
