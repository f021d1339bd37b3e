#pragma once

#include <lalm/core/metrics.hpp>

#include <string>

namespace lalm {

enum class Provenance { hand, brute_force, long_run };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::hand: return "hand";
    case Provenance::brute_force: return "brute-force";
    case Provenance::long_run: return "long-run";
  }
  return "unknown";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "hand") return Provenance::hand;
  if (s == "brute-force") return Provenance::brute_force;
  if (s == "long-run") return Provenance::long_run;
  throw InvalidArgument("unknown provenance '" + s + "'");
}

/// A primal-dual solution used as ground truth for gap reporting.
struct ReferenceSolution {
  Vector x;
  Vector y;
  Vector z;
  double f0 = 0.0;
  Provenance provenance = Provenance::hand;
  double kkt = 0.0;  ///< max KKT component at (x, y, z)

  PrimalDualPoint point(const ProblemInstance& prob) const { return PrimalDualPoint::make(prob, x, y, z); }
};

}  // namespace lalm
