#pragma once

#include <lalm/core/types.hpp>

#include <algorithm>
#include <random>

namespace lalm {

/// Raised when power iteration hits its cap; carries the last estimate.
class PowerIterationError : public NumericalError {
 public:
  PowerIterationError(const std::string& what, double estimate)
      : NumericalError(what), estimate_(estimate) {}
  double best_estimate() const { return estimate_; }

 private:
  double estimate_;
};

/// Largest eigenvalue of A'A (= ||A||_2^2) by power iteration, stopped when
/// the relative change of the Rayleigh quotient drops below tol.
inline double operator_norm_sq(const Matrix& a, double tol = 1e-8, Index max_iter = -1) {
  require(a.rows() > 0 && a.cols() > 0, "operator_norm_sq: empty operator");
  require(tol > 0.0, "operator_norm_sq: tolerance must be positive");
  if (max_iter < 0) max_iter = std::max<Index>(100, 10 * std::max(a.rows(), a.cols()));
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Fixed seed: the estimate must be reproducible across runs.
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Vector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  double lambda = 0.0;
  Vector av(a.rows());
  Vector w(a.cols());
  for (Index it = 0; it < max_iter; ++it) {
    av.noalias() = a * v;
    w.noalias() = a.transpose() * av;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  throw PowerIterationError("operator_norm_sq: power iteration did not converge", lambda);
}

}  // namespace lalm
