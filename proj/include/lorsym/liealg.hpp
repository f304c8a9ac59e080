#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "lorsym/expr.hpp"
#include "lorsym/rational.hpp"

namespace lorsym {

template <typename S> using Vec9 = Eigen::Matrix<S, 9, 1>;
template <typename S> using Vec8 = Eigen::Matrix<S, 8, 1>;

namespace detail {
template <typename S> struct FromRational;
template <> struct FromRational<Rational> {
  static Rational get(const Rational& q) { return q; }
};
template <> struct FromRational<double> {
  static double get(const Rational& q) { return q.toDouble(); }
};
}  // namespace detail

template <typename S> S fromRational(const Rational& q) {
  return detail::FromRational<S>::get(q);
}

// One element of the equivalence algebra. c[i] is the coefficient of the
// basis generator with index i+1: translations (1..3), rotations about
// z, y, x (4..6), space scaling (7), time scaling (8), potential shift (9).
// The gauge part is a scalar function of x, y, z.
template <typename S>
struct EquivGeneratorT {
  Vec9<S> c = Vec9<S>::Zero();
  Expr gauge = Expr::zero();
};

using EquivGenerator = EquivGeneratorT<Rational>;
using EquivGeneratorD = EquivGeneratorT<double>;

template <typename S>
EquivGeneratorT<S> basisGenerator(int k) {
  if (k < 1 || k > 9) throw std::invalid_argument("basisGenerator: index out of range");
  EquivGeneratorT<S> g;
  g.c[k - 1] = S(1);
  return g;
}

template <typename S>
EquivGeneratorT<S> gaugeGenerator(Expr f) {
  EquivGeneratorT<S> g;
  g.gauge = simplify(f);
  return g;
}

template <typename S>
EquivGeneratorT<S> operator+(const EquivGeneratorT<S>& a, const EquivGeneratorT<S>& b) {
  EquivGeneratorT<S> r;
  r.c = a.c + b.c;
  r.gauge = simplify(a.gauge + b.gauge);
  return r;
}

template <typename S>
EquivGeneratorT<S> operator-(const EquivGeneratorT<S>& a, const EquivGeneratorT<S>& b) {
  EquivGeneratorT<S> r;
  r.c = a.c - b.c;
  r.gauge = simplify(a.gauge - b.gauge);
  return r;
}

template <typename S>
EquivGeneratorT<S> operator-(const EquivGeneratorT<S>& a) {
  EquivGeneratorT<S> r;
  r.c = -a.c;
  r.gauge = simplify(-a.gauge);
  return r;
}

template <typename S>
EquivGeneratorT<S> operator*(const S& s, const EquivGeneratorT<S>& a) {
  EquivGeneratorT<S> r;
  r.c = a.c * s;
  r.gauge = simplify(Expr::number(s) * a.gauge);
  return r;
}

template <typename S>
EquivGeneratorT<S> operator*(const EquivGeneratorT<S>& a, const S& s) {
  return s * a;
}

bool isZeroGenerator(const EquivGenerator& V);

EquivGeneratorD toNumeric(const EquivGenerator& V);

// First-order operator U = eta.grad + scalar attached to a generator,
// acting on functions of x alone. eta(x) = linear*x + translation.
template <typename S>
struct RelatedOperatorT {
  Eigen::Matrix<S, 3, 3> linear;
  Eigen::Matrix<S, 3, 1> translation;
  S scalar;
};

using RelatedOperator = RelatedOperatorT<Rational>;
using RelatedOperatorD = RelatedOperatorT<double>;

// linear(i,j) = c7 on the diagonal plus the rotation part, translation
// is (c1,c2,c3), scalar is c8 - 2*c7.
template <typename S>
RelatedOperatorT<S> relatedOperator(const EquivGeneratorT<S>& V) {
  RelatedOperatorT<S> u;
  const S z(0);
  const S& c4 = V.c[3];
  const S& c5 = V.c[4];
  const S& c6 = V.c[5];
  const S& c7 = V.c[6];
  u.linear << c7, z - c4, c5,
              c4, c7, z - c6,
              z - c5, c6, c7;
  u.translation << V.c[0], V.c[1], V.c[2];
  u.scalar = V.c[7] - c7 - c7;
  return u;
}

// eta as symbolic component expressions.
template <typename S>
VecExpr etaExprs(const RelatedOperatorT<S>& u) {
  VecExpr eta;
  for (int i = 0; i < 3; ++i) {
    Expr e = Expr::number(u.translation[i]);
    for (int j = 0; j < 3; ++j)
      e = e + Expr::number(u.linear(i, j)) * Expr::variable(j);
    eta[i] = simplify(e);
  }
  return eta;
}

// U g = eta.grad(g) + scalar*g
template <typename S>
Expr applyRelated(const RelatedOperatorT<S>& u, const Expr& g) {
  if (g.isConstZero()) return Expr::zero();
  VecExpr eta = etaExprs(u);
  Expr r = Expr::number(u.scalar) * g;
  for (int i = 0; i < 3; ++i) r = r + eta[i] * differentiate(g, i);
  return simplify(r);
}

// structureTerm(i, j) encodes the bracket of basis generators i and j
// (1-based) as coef * V_target; target 0 means the bracket vanishes.
struct StructureTerm {
  int target;
  std::int64_t coef;
};

const StructureTerm& structureTerm(int i, int j);

Vec9<Rational> structureBracket(int i, int j);

template <typename S>
EquivGeneratorT<S> bracket(const EquivGeneratorT<S>& V, const EquivGeneratorT<S>& W) {
  EquivGeneratorT<S> r;
  for (int i = 1; i <= 9; ++i) {
    if (V.c[i - 1] == S(0)) continue;
    for (int j = 1; j <= 9; ++j) {
      if (W.c[j - 1] == S(0)) continue;
      const StructureTerm& t = structureTerm(i, j);
      if (t.target == 0) continue;
      r.c[t.target - 1] += V.c[i - 1] * W.c[j - 1] * S(t.coef);
    }
  }
  bool gw = !W.gauge.isConstZero();
  bool gv = !V.gauge.isConstZero();
  if (gw || gv) {
    Expr part = Expr::zero();
    if (gw) part = applyRelated(relatedOperator(V), W.gauge);
    if (gv) part = part - applyRelated(relatedOperator(W), V.gauge);
    r.gauge = simplify(part);
  }
  return r;
}

// The ten one-parameter adjoint maps. Translations, scalings and the
// potential shift act polynomially and stay exact for rational parameters;
// rotations are exact only at quarter-turn multiples and otherwise take
// the floating path. The gauge map carries a function g of x, y, z.
enum class AdjointKind {
  TransX, TransY, TransZ,
  RotZ, RotY, RotX,
  ScaleSpace, ScaleTime, ShiftPhi,
  Gauge,
};

bool isRotation(AdjointKind k);

struct AdjointStep {
  AdjointKind kind = AdjointKind::TransX;
  bool exact = true;
  Rational eps = Rational(0);    // exact parameter; quarter-turn count for rotations
  double epsD = 0.0;             // floating parameter
  Expr gauge = Expr::zero();     // Gauge kind only

  static AdjointStep exactStep(AdjointKind k, Rational eps);
  static AdjointStep numericStep(AdjointKind k, double eps);
  static AdjointStep quarterTurns(AdjointKind k, std::int64_t turns);
  static AdjointStep gaugeStep(Expr g);
};

template <typename S>
EquivGeneratorT<S> adjointApply(const AdjointStep& step, const EquivGeneratorT<S>& V);

extern template EquivGenerator adjointApply<Rational>(const AdjointStep&, const EquivGenerator&);
extern template EquivGeneratorD adjointApply<double>(const AdjointStep&, const EquivGeneratorD&);

// (c7, c8, c4^2 + c5^2 + c6^2), unchanged by every adjoint map.
template <typename S>
std::array<S, 3> invariants(const EquivGeneratorT<S>& V) {
  return {V.c[6], V.c[7], V.c[3] * V.c[3] + V.c[4] * V.c[4] + V.c[5] * V.c[5]};
}

// Point-symmetry part of an equivalence generator: c9 and the gauge act
// only on the potentials and project away. c0 is the coefficient of the
// time translation, never produced by projection.
struct SymGenerator {
  Rational c0 = Rational(0);
  Vec8<Rational> c = Vec8<Rational>::Zero();
};

SymGenerator projectToSymmetry(const EquivGenerator& V);

// JSON form {"c":[...9 rationals as strings...],"f":"<expr text>"}.
// Generators with opaque numeric gauge parts do not serialize.
std::string toJson(const EquivGenerator& V);
EquivGenerator equivGeneratorFromJson(const std::string& text);

}  // namespace lorsym
