#pragma once

#include <lalm/instances/bpdn.hpp>
#include <lalm/instances/qcqp.hpp>
#include <lalm/instances/reference.hpp>

#include <string>
#include <utility>

namespace lalm {

enum class TinyKind { equality_qp, scalar_qcqp, scalar_bpdn };

inline const char* to_string(TinyKind k) {
  switch (k) {
    case TinyKind::equality_qp: return "equality-qp";
    case TinyKind::scalar_qcqp: return "scalar-qcqp";
    case TinyKind::scalar_bpdn: return "scalar-bpdn";
  }
  return "unknown";
}

inline TinyKind tiny_kind_from_string(const std::string& s) {
  if (s == "equality-qp") return TinyKind::equality_qp;
  if (s == "scalar-qcqp") return TinyKind::scalar_qcqp;
  if (s == "scalar-bpdn") return TinyKind::scalar_bpdn;
  throw InvalidArgument("unknown tiny reference kind '" + s + "' (expected equality-qp, scalar-qcqp or scalar-bpdn)");
}

/// min 0.5||x||^2  s.t.  x1 + x2 = 1.
inline ProblemInstance tiny_equality_qp() {
  ProblemInstance prob;
  prob.name = "tiny:equality-qp";
  prob.dim = 2;
  prob.g = make_quadratic(Matrix::Identity(2, 2), Vector::Zero(2), 0.0);
  prob.h = ProxFunction::zero();
  prob.affine = AffineConstraint(Matrix::Ones(1, 2), Vector::Ones(1));
  prob.partition = BlockPartition::even(2, 1);
  prob.validate();
  return prob;
}

/// min 0.5x^2 + 2x  s.t.  x^2 - 1 <= 0,  x in [-10, 10].
inline QcqpData tiny_scalar_qcqp_data() {
  QcqpData data;
  data.q = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)};
  data.c = {Vector::Constant(1, 2.0), Vector::Zero(1)};
  data.d = {0.0, -1.0};
  data.box = Box::uniform(1, -10.0, 10.0);
  data.blocks = 1;
  return data;
}

/// min |x|  s.t.  (x - 2)^2 - 1 <= 0,  x in [-10, 10].
inline BpdnData tiny_scalar_bpdn_data() {
  BpdnData data;
  data.a = Matrix::Ones(1, 1);
  data.b = Vector::Constant(1, 2.0);
  data.delta = 1.0;
  data.x_true = Vector::Constant(1, 2.0);
  data.box = Box::uniform(1, -10.0, 10.0);
  data.blocks = 1;
  return data;
}

inline ProblemInstance tiny_instance(TinyKind kind) {
  ProblemInstance prob;
  switch (kind) {
    case TinyKind::equality_qp: return tiny_equality_qp();
    case TinyKind::scalar_qcqp: prob = build_qcqp(tiny_scalar_qcqp_data()); break;
    case TinyKind::scalar_bpdn: prob = build_bpdn(tiny_scalar_bpdn_data()); break;
  }
  prob.name = std::string("tiny:") + to_string(kind);
  return prob;
}

/// Exact KKT triple for a tiny instance.
inline ReferenceSolution tiny_solution(TinyKind kind) {
  ReferenceSolution ref;
  ref.provenance = Provenance::hand;
  switch (kind) {
    case TinyKind::equality_qp:
      // x + A'y = 0 with x1 = x2 and x1 + x2 = 1.
      ref.x = Vector::Constant(2, 0.5);
      ref.y = Vector::Constant(1, -0.5);
      ref.z = Vector(0);
      ref.f0 = 0.25;
      break;
    case TinyKind::scalar_qcqp:
      // x + 2 + 2zx = 0 at the active bound x = -1.
      ref.x = Vector::Constant(1, -1.0);
      ref.y = Vector(0);
      ref.z = Vector::Constant(1, 0.5);
      ref.f0 = -1.5;
      break;
    case TinyKind::scalar_bpdn:
      // 0 in sign(x) + 2z(x - 2) at x = 1: 1 - 2z = 0.
      ref.x = Vector::Constant(1, 1.0);
      ref.y = Vector(0);
      ref.z = Vector::Constant(1, 0.5);
      ref.f0 = 1.0;
      break;
  }
  return ref;
}

/// Instance plus its hand KKT triple; the stored residual is computed, not assumed.
inline std::pair<ProblemInstance, ReferenceSolution> tiny_reference(TinyKind kind) {
  ProblemInstance prob = tiny_instance(kind);
  ReferenceSolution ref = tiny_solution(kind);
  prob.optimal_value = ref.f0;
  ref.kkt = kkt_residual(ref.point(prob), prob).max();
  return {std::move(prob), std::move(ref)};
}

inline std::pair<ProblemInstance, ReferenceSolution> tiny_reference(const std::string& kind) {
  return tiny_reference(tiny_kind_from_string(kind));
}

}  // namespace lalm
