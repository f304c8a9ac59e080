#include "lorsym/liealg.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

namespace lorsym {

namespace {

// Bracket table over the nine-dimensional part, both orders written out.
// Row i, column j holds [V_i, V_j] as coef * V_target, target 0 for zero.
constexpr StructureTerm kNone{0, 0};

constexpr StructureTerm kTable[9][9] = {
    // V1
    {kNone, kNone, kNone, {2, 1}, {3, -1}, kNone, {1, 1}, kNone, kNone},
    // V2
    {kNone, kNone, kNone, {1, -1}, kNone, {3, 1}, {2, 1}, kNone, kNone},
    // V3
    {kNone, kNone, kNone, kNone, {1, 1}, {2, -1}, {3, 1}, kNone, kNone},
    // V4
    {{2, -1}, {1, 1}, kNone, kNone, {6, 1}, {5, -1}, kNone, kNone, kNone},
    // V5
    {{3, 1}, kNone, {1, -1}, {6, -1}, kNone, {4, 1}, kNone, kNone, kNone},
    // V6
    {kNone, {3, -1}, {2, 1}, {5, 1}, {4, -1}, kNone, kNone, kNone, kNone},
    // V7
    {{1, -1}, {2, -1}, {3, -1}, kNone, kNone, kNone, kNone, kNone, {9, -2}},
    // V8
    {kNone, kNone, kNone, kNone, kNone, kNone, kNone, kNone, {9, 2}},
    // V9
    {kNone, kNone, kNone, kNone, kNone, kNone, {9, 2}, {9, -2}, kNone},
};

}  // namespace

const StructureTerm& structureTerm(int i, int j) {
  if (i < 1 || i > 9 || j < 1 || j > 9)
    throw std::invalid_argument("structureTerm: index out of range");
  return kTable[i - 1][j - 1];
}

Vec9<Rational> structureBracket(int i, int j) {
  Vec9<Rational> r = Vec9<Rational>::Zero();
  const StructureTerm& t = structureTerm(i, j);
  if (t.target != 0) r[t.target - 1] = Rational(t.coef);
  return r;
}

bool isZeroGenerator(const EquivGenerator& V) {
  for (int i = 0; i < 9; ++i)
    if (!V.c[i].isZero()) return false;
  return simplify(V.gauge).isConstZero();
}

EquivGeneratorD toNumeric(const EquivGenerator& V) {
  EquivGeneratorD r;
  for (int i = 0; i < 9; ++i) r.c[i] = V.c[i].toDouble();
  r.gauge = V.gauge;
  return r;
}

bool isRotation(AdjointKind k) {
  return k == AdjointKind::RotZ || k == AdjointKind::RotY || k == AdjointKind::RotX;
}

AdjointStep AdjointStep::exactStep(AdjointKind k, Rational eps) {
  if (k == AdjointKind::Gauge)
    throw std::invalid_argument("adjoint: gauge map takes a function, not a scalar");
  if (isRotation(k))
    throw std::invalid_argument("adjoint: generic rotation angle needs the floating path");
  if ((k == AdjointKind::ScaleSpace || k == AdjointKind::ScaleTime) && eps.isZero())
    throw std::invalid_argument("adjoint: scaling parameter must be nonzero");
  AdjointStep s;
  s.kind = k;
  s.exact = true;
  s.eps = eps;
  return s;
}

AdjointStep AdjointStep::numericStep(AdjointKind k, double eps) {
  if (k == AdjointKind::Gauge)
    throw std::invalid_argument("adjoint: gauge map takes a function, not a scalar");
  if ((k == AdjointKind::ScaleSpace || k == AdjointKind::ScaleTime) && eps == 0.0)
    throw std::invalid_argument("adjoint: scaling parameter must be nonzero");
  AdjointStep s;
  s.kind = k;
  s.exact = false;
  s.epsD = eps;
  return s;
}

AdjointStep AdjointStep::quarterTurns(AdjointKind k, std::int64_t turns) {
  if (!isRotation(k))
    throw std::invalid_argument("adjoint: quarter turns apply to rotations only");
  AdjointStep s;
  s.kind = k;
  s.exact = true;
  s.eps = Rational(turns);
  return s;
}

AdjointStep AdjointStep::gaugeStep(Expr g) {
  AdjointStep s;
  s.kind = AdjointKind::Gauge;
  s.gauge = simplify(g);
  return s;
}

namespace {

template <typename S>
S stepParam(const AdjointStep& step);

template <>
Rational stepParam<Rational>(const AdjointStep& step) {
  if (!step.exact)
    throw std::invalid_argument("adjoint: floating step applied to an exact generator");
  return step.eps;
}

template <>
double stepParam<double>(const AdjointStep& step) {
  return step.exact ? step.eps.toDouble() : step.epsD;
}

// cos/sin of the rotation parameter. Exact steps count quarter turns.
template <typename S>
void rotationCosSin(const AdjointStep& step, S& cs, S& sn) {
  if (step.exact) {
    std::int64_t n = ((step.eps.num() % 4) + 4) % 4;
    static const std::int64_t c[4] = {1, 0, -1, 0};
    static const std::int64_t s[4] = {0, 1, 0, -1};
    cs = S(c[n]);
    sn = S(s[n]);
  } else {
    cs = S(std::cos(step.epsD));
    sn = S(std::sin(step.epsD));
  }
}

template <>
void rotationCosSin<Rational>(const AdjointStep& step, Rational& cs, Rational& sn) {
  if (!step.exact)
    throw std::invalid_argument("adjoint: generic rotation applied to an exact generator");
  std::int64_t n = ((step.eps.num() % 4) + 4) % 4;
  static const std::int64_t c[4] = {1, 0, -1, 0};
  static const std::int64_t s[4] = {0, 1, 0, -1};
  cs = Rational(c[n]);
  sn = Rational(s[n]);
}

}  // namespace

template <typename S>
EquivGeneratorT<S> adjointApply(const AdjointStep& step, const EquivGeneratorT<S>& V) {
  EquivGeneratorT<S> r = V;
  switch (step.kind) {
    case AdjointKind::TransX: {
      S e = stepParam<S>(step);
      r.c[0] = V.c[0] + e * V.c[6];
      r.c[1] = V.c[1] + e * V.c[3];
      r.c[2] = V.c[2] - e * V.c[4];
      return r;
    }
    case AdjointKind::TransY: {
      S e = stepParam<S>(step);
      r.c[0] = V.c[0] - e * V.c[3];
      r.c[1] = V.c[1] + e * V.c[6];
      r.c[2] = V.c[2] + e * V.c[5];
      return r;
    }
    case AdjointKind::TransZ: {
      S e = stepParam<S>(step);
      r.c[0] = V.c[0] + e * V.c[4];
      r.c[1] = V.c[1] - e * V.c[5];
      r.c[2] = V.c[2] + e * V.c[6];
      return r;
    }
    case AdjointKind::RotZ: {
      S cs, sn;
      rotationCosSin<S>(step, cs, sn);
      r.c[0] = V.c[0] * cs + V.c[1] * sn;
      r.c[1] = V.c[1] * cs - V.c[0] * sn;
      r.c[4] = V.c[4] * cs - V.c[5] * sn;
      r.c[5] = V.c[5] * cs + V.c[4] * sn;
      return r;
    }
    case AdjointKind::RotY: {
      S cs, sn;
      rotationCosSin<S>(step, cs, sn);
      r.c[0] = V.c[0] * cs - V.c[2] * sn;
      r.c[2] = V.c[2] * cs + V.c[0] * sn;
      r.c[3] = V.c[3] * cs + V.c[5] * sn;
      r.c[5] = V.c[5] * cs - V.c[3] * sn;
      return r;
    }
    case AdjointKind::RotX: {
      S cs, sn;
      rotationCosSin<S>(step, cs, sn);
      r.c[1] = V.c[1] * cs + V.c[2] * sn;
      r.c[2] = V.c[2] * cs - V.c[1] * sn;
      r.c[3] = V.c[3] * cs - V.c[4] * sn;
      r.c[4] = V.c[4] * cs + V.c[3] * sn;
      return r;
    }
    case AdjointKind::ScaleSpace: {
      S e = stepParam<S>(step);
      if (e == S(0)) throw std::invalid_argument("adjoint: scaling parameter must be nonzero");
      r.c[0] = e * V.c[0];
      r.c[1] = e * V.c[1];
      r.c[2] = e * V.c[2];
      return r;
    }
    case AdjointKind::ScaleTime: {
      S e = stepParam<S>(step);
      if (e == S(0)) throw std::invalid_argument("adjoint: scaling parameter must be nonzero");
      r.c[8] = e * V.c[8];
      return r;
    }
    case AdjointKind::ShiftPhi: {
      S e = stepParam<S>(step);
      r.c[8] = (V.c[6] - V.c[7]) * e + V.c[8];
      return r;
    }
    case AdjointKind::Gauge: {
      // f - eta.grad(g) + (2c7 - c8) g, additive constants dropped
      Expr moved = simplify(V.gauge - applyRelated(relatedOperator(V), step.gauge));
      r.gauge = moved.isConst() ? Expr::zero() : moved;
      return r;
    }
  }
  throw std::logic_error("adjoint: unhandled step kind");
}

template EquivGenerator adjointApply<Rational>(const AdjointStep&, const EquivGenerator&);
template EquivGeneratorD adjointApply<double>(const AdjointStep&, const EquivGeneratorD&);

SymGenerator projectToSymmetry(const EquivGenerator& V) {
  SymGenerator s;
  s.c0 = Rational(0);
  for (int i = 0; i < 8; ++i) s.c[i] = V.c[i];
  return s;
}

std::string toJson(const EquivGenerator& V) {
  if (containsNumFn(V.gauge))
    throw std::invalid_argument("generator serialization: opaque numeric gauge part");
  nlohmann::json j;
  auto arr = nlohmann::json::array();
  for (int i = 0; i < 9; ++i) arr.push_back(V.c[i].str());
  j["c"] = arr;
  j["f"] = printExpr(simplify(V.gauge));
  return j.dump();
}

EquivGenerator equivGeneratorFromJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const auto& arr = j.at("c");
  if (!arr.is_array() || arr.size() != 9)
    throw std::invalid_argument("generator JSON: field c must hold nine entries");
  EquivGenerator V;
  for (int i = 0; i < 9; ++i) V.c[i] = Rational::parse(arr[i].get<std::string>());
  V.gauge = simplify(parseExpr(j.at("f").get<std::string>()));
  return V;
}

}  // namespace lorsym
