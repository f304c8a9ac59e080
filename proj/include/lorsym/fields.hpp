#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lorsym/expr.hpp"
#include "lorsym/liealg.hpp"
#include "lorsym/rational.hpp"

namespace lorsym {

// Sampling region for a field. Constraints are stated in the field's intrinsic
// frame q = frameR * p + frameT so they survive point transformations; margin
// is the clearance kept around every excluded set, in intrinsic units.
struct DomainHint {
  bool positiveX = false;
  bool positiveY = false;
  bool positiveZ = false;
  bool offAxisZ = false;      // sqrt(qx^2 + qy^2) > margin
  bool offOrigin = false;     // |q| > margin
  bool offBranchCut = false;  // clear of the half-plane y = 0, x <= 0
  double margin = 0.1;
  Eigen::Matrix3d frameR = Eigen::Matrix3d::Identity();
  Eigen::Vector3d frameT = Eigen::Vector3d::Zero();

  bool contains(const Eigen::Vector3d& p) const;
};

// Stationary electromagnetic field in potential form. B and E are derived at
// construction; params bind every named constant appearing in the expressions
// (paramsD mirrors them for evaluation).
struct FieldSpec {
  VecExpr A = vecZero();
  Expr Phi = Expr::zero();
  VecExpr B = vecZero();  // curl A
  VecExpr E = vecZero();  // -grad Phi
  std::map<std::string, Rational> params;
  std::map<std::string, double> paramsD;
  DomainHint domain;
};

// Derives B and E and checks that every parameter referenced by A or Phi is
// bound. Throws std::invalid_argument on an unbound name.
FieldSpec makeFieldSpec(const VecExpr& A, const Expr& Phi,
                        std::map<std::string, Rational> params = {},
                        DomainHint domain = {});

// Context bound to fs.paramsD; fs must outlive the returned value.
inline EvalContext fieldContext(const FieldSpec& fs, const Eigen::Vector3d& p) {
  return EvalContext(p, &fs.paramsD);
}

inline Eigen::Vector3d fieldB(const FieldSpec& fs, const Eigen::Vector3d& p) {
  return evaluate(fs.B, fieldContext(fs, p));
}

inline Eigen::Vector3d fieldE(const FieldSpec& fs, const Eigen::Vector3d& p) {
  return evaluate(fs.E, fieldContext(fs, p));
}

// Worst normalized residual of div B = 0 and curl E = 0 over the points.
// Each residual is |sum of terms| / (1 + sum |term|), so it measures loss of
// the symbolic identity, not the magnitude of the field.
std::pair<double, double> maxwellResidual(const FieldSpec& fs,
                                          const std::vector<Eigen::Vector3d>& pts);

// Quasi-random points in the annulus rmin <= |p| <= rmax intersected with the
// domain. Deterministic for a given seed; throws std::runtime_error when the
// region is too thin to fill the request.
std::vector<Eigen::Vector3d> samplePoints(const DomainHint& d, int count,
                                          std::uint64_t seed = 0, double rmin = 0.5,
                                          double rmax = 2.0);

// One element of the equivalence group: t -> eps8 t + eps0,
// x -> eps7 R x + trans with R = R1(eps6) R2(eps5) R3(eps4) (rotations about
// x, y, z respectively), plus the potential shift eps9 and the gauge term
// grad(gauge) added to A.
struct GroupElement {
  double eps0 = 0.0;
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
  double eps4 = 0.0;  // angle about z
  double eps5 = 0.0;  // angle about y
  double eps6 = 0.0;  // angle about x
  double eps7 = 1.0;  // space scaling, nonzero
  double eps8 = 1.0;  // time scaling, nonzero
  double eps9 = 0.0;
  Expr gauge = Expr::zero();

  Eigen::Matrix3d rotation() const;
  bool isIdentity() const;
};

// Element whose application undoes e, gauge term included.
GroupElement inverseElement(const GroupElement& e);

// Transforms the potentials: A~ = (eps7/eps8) R A(T^-1 x) + grad(gauge),
// Phi~ = (eps7/eps8)^2 Phi(T^-1 x) + eps9, with T x = eps7 R x + trans.
// The domain frame is composed with T^-1 so exclusions follow the field.
// Throws std::invalid_argument on zero scalings or an unbound gauge parameter.
FieldSpec applyEquivalence(const FieldSpec& fs, const GroupElement& e);

// The four discrete maps: 1 fixes the potential components, 2 negates A,
// 3 flips axes i and j and negates the remaining component of A, 4 swaps axes
// i and j together with the matching components of A. i, j are 1-based and
// distinct; they matter only for maps 3 and 4.
FieldSpec applyDiscrete(const FieldSpec& fs, int which, int i = 1, int j = 2);

// Pushforward of a symmetry coefficient vector (c1..c8) under the point map of
// e: the rotation part conjugates, translations mix with scaling and rotation,
// c7 and c8 are invariant.
Vec8<double> pushforwardSymmetry(const GroupElement& e, const Vec8<double>& c);

// Parses the sectioned key/value field format:
//   [potential]  A1, A2, A3, Phi as expression strings
//   [params]     name = rational (integers, p/q, or decimals)
//   [domain]     exclude = z-axis|origin|branch-cut, positive = x|y|z,
//                margin = number
// Blank lines and lines starting with '#' are skipped. Throws ParseError with
// a byte offset into text on malformed input.
FieldSpec parseFieldFile(const std::string& text);

}  // namespace lorsym
