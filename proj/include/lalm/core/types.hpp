#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace lalm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Thrown for violated preconditions (bad dimensions, invalid parameters).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure fails (non-finite values, iteration caps).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double positive_part(double a) { return a > 0.0 ? a : 0.0; }

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

inline void require_same_size(Index a, Index b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace lalm
