#pragma once

#include <lalm/instances/qcqp.hpp>

#include <random>
#include <vector>

namespace lalm {

/// f(x) = 0.5 x'Qx + c'x + d.
struct QuadraticPiece {
  Matrix q;
  Vector c;
  double d = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(q * x) + c.dot(x) + d; }
};

struct MinimaxData {
  std::vector<QuadraticPiece> pieces;
  Box box;  ///< box on x
};

namespace detail {

inline void check_minimax_box(const Box& box, std::size_t pieces) {
  if (pieces == 0) throw InvalidArgument("minimax_reformulate: empty function list");
  require(box.size() >= 1, "minimax_reformulate: box must have positive dimension");
  require(box.bounded(), "minimax_reformulate: box must be bounded");
  require(((box.upper - box.lower).array() >= 0.0).all(), "minimax_reformulate: box lower > upper");
}

inline ProblemInstance minimax_shell(const Box& box) {
  const Index p = box.size();
  ProblemInstance prob;
  prob.name = "minimax";
  prob.dim = p + 1;
  Vector e_t = Vector::Zero(p + 1);
  e_t[p] = 1.0;
  prob.g = make_affine(e_t, 0.0);
  Box full{Vector(p + 1), Vector(p + 1)};
  full.lower << box.lower, -std::numeric_limits<double>::infinity();
  full.upper << box.upper, std::numeric_limits<double>::infinity();
  prob.h = ProxFunction::box(full);
  prob.affine = AffineConstraint::empty(p + 1);
  prob.partition = BlockPartition::even(p + 1, 1);
  return prob;
}

}  // namespace detail

/// min_{x in box} max_j f_j(x) as  min_{x, t} t  s.t.  f_j(x) - t <= 0.
/// The variable is (x, t) with t last and unbounded.
inline ProblemInstance minimax_reformulate(const std::vector<InequalityConstraint>& fs, const Box& box) {
  detail::check_minimax_box(box, fs.size());
  const Index p = box.size();
  ProblemInstance prob = detail::minimax_shell(box);
  for (const auto& fj : fs) {
    InequalityConstraint c;
    SmoothFunction f = fj.f;
    c.f.value = [f, p](const Vector& xt) { return f.value(xt.head(p)) - xt[p]; };
    c.f.gradient = [f, p](const Vector& xt) -> Vector {
      Vector out(p + 1);
      out.head(p) = f.gradient(xt.head(p));
      out[p] = -1.0;
      return out;
    };
    c.f.lipschitz = f.lipschitz;
    if (fj.grad_bound) c.grad_bound = std::sqrt(*fj.grad_bound * *fj.grad_bound + 1.0);
    prob.constraints.push_back(std::move(c));
  }
  prob.validate();
  return prob;
}

/// Quadratic pieces become padded quadratics in (x, t), which keeps the
/// incremental evaluation path.
inline ProblemInstance build_minimax(const MinimaxData& data) {
  detail::check_minimax_box(data.box, data.pieces.size());
  const Index p = data.box.size();
  ProblemInstance prob = detail::minimax_shell(data.box);
  const double radius = data.box.max_norm();
  for (const auto& piece : data.pieces) {
    require(piece.q.rows() == p && piece.q.cols() == p && piece.c.size() == p, "build_minimax: piece size");
    Matrix q = Matrix::Zero(p + 1, p + 1);
    q.topLeftCorner(p, p) = piece.q;
    Vector c(p + 1);
    c << piece.c, -1.0;
    InequalityConstraint con;
    con.f = make_quadratic(q, c, piece.d);
    const double b = spectral_norm_sym(piece.q) * radius + piece.c.norm();
    con.grad_bound = std::sqrt(b * b + 1.0);
    prob.constraints.push_back(std::move(con));
  }
  prob.validate();
  return prob;
}

/// m random 1D pieces a_j (x - s_j)^2 + e_j with a_j in [0.5, 2],
/// s_j in [-3, 3], e_j in [-1, 1], on the box [-5, 5].
inline MinimaxData random_minimax_1d(Index m, std::uint64_t seed) {
  require(m >= 1, "random_minimax_1d: need at least one piece");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> curv(0.5, 2.0), shift(-3.0, 3.0), offset(-1.0, 1.0);
  MinimaxData data;
  data.box = Box::uniform(1, -5.0, 5.0);
  for (Index j = 0; j < m; ++j) {
    const double a = curv(rng), s = shift(rng), e = offset(rng);
    QuadraticPiece piece;
    piece.q = Matrix::Constant(1, 1, 2.0 * a);
    piece.c = Vector::Constant(1, -2.0 * a * s);
    piece.d = a * s * s + e;
    data.pieces.push_back(std::move(piece));
  }
  return data;
}

}  // namespace lalm
