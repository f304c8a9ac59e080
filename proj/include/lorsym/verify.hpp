#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lorsym/fields.hpp"
#include "lorsym/liealg.hpp"

namespace lorsym {

struct PhaseState {
  double t = 0.0;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
};

// Caches the symbolic Jacobians of B and E for one field so that many
// residual evaluations share the differentiation work.
class ResidualAssembler {
 public:
  explicit ResidualAssembler(const FieldSpec& fs);

  // 6x8 matrix L(p) with fieldResidual(c) = L(p) c; rows 0..2 are the
  // magnetic block, rows 3..5 the electric block.
  Eigen::Matrix<double, 6, 8> matrixAt(const Eigen::Vector3d& p) const;

  Eigen::Matrix<double, 6, 1> residual(const Vec8<double>& c,
                                       const Eigen::Vector3d& p) const;

  // Mechanical second-order prolongation applied to the motion equations,
  // with the acceleration substituted from them. Assembled along a different
  // algebraic route than matrixAt, so agreement is a real check.
  Eigen::Vector3d prolongation(const Vec8<double>& c, const PhaseState& st) const;

 private:
  const FieldSpec* m_fs;
  std::array<Expr, 9> m_JB;  // m_JB[3 i + j] = d B_i / d x_j
  std::array<Expr, 9> m_JE;
};

// Residual of the symmetry condition in field form at one point: the
// magnetic part (eta . grad) B + c8 B - a x B stacked over the electric part
// (eta . grad) E + (2 c8 - c7) E - a x E, with eta = c7 x + a x x + (c1,c2,c3)
// and a = (c6, c5, c4). Zero for every point exactly when the generator is
// admitted. Convenience wrapper; build a ResidualAssembler for bulk use.
Eigen::Matrix<double, 6, 1> fieldResidual(const FieldSpec& fs, const Vec8<double>& c,
                                          const Eigen::Vector3d& p);

Eigen::Vector3d prolongationResidual(const FieldSpec& fs, const Vec8<double>& c,
                                     const PhaseState& st);

struct SymmetrySampler {
  int count = 40;
  std::uint64_t seed = 0;
  double rmin = 0.5;
  double rmax = 2.0;
};

struct ClassReport {
  int dimension = 0;
  std::vector<Vec8<double>> basis;        // orthonormal nullspace vectors
  std::array<double, 8> singularValues{};  // descending
  double gapRatio = 0.0;                  // confidence of the rank cut
  std::vector<double> residualNorms;      // stacked residual per basis vector
  std::vector<Vec8<double>> noetherBasis;  // subspan with c8 = 2 c7 imposed
  bool oracleAgreement = true;
  double oracleWorst = 0.0;  // largest prolongation residual over the basis
  std::vector<std::string> warnings;
};

// Stacks the 6x8 residual matrix over sampled points, extracts the numerical
// nullspace at the relative threshold tol, derives the variational subspan,
// and cross-checks every accepted vector against the prolongation oracle.
// A small singular value gap or a field outside the reach of the eight
// dimensional ansatz (fixed-direction B, linear motion) adds a warning.
ClassReport detectSymmetries(const FieldSpec& fs, const SymmetrySampler& sampler = {},
                             double tol = 1e-8);

// c9 from the scalar potential equation (eta . grad) Phi = 2 (c7 - c8) Phi + c9,
// averaged over the points; spread is the largest deviation from the mean and
// stays at roundoff when c is genuinely admitted with this Phi.
struct ShiftEstimate {
  double c9 = 0.0;
  double spread = 0.0;
};
ShiftEstimate potentialShift(const FieldSpec& fs, const Vec8<double>& c,
                             const std::vector<Eigen::Vector3d>& pts);

// Reconstructs the gauge function f with grad f = (eta . grad) A
// - (c7 - c8) A + A x a for the generator c (layout c1..c9; c9 unused).
// Validates that the field is a gradient (curl check over samples); on
// success f comes back as a quadrature-backed opaque node, normalized to
// f = 0 at the anchor point, trustworthy only where the straight segment
// from the anchor stays inside the domain.  grad holds the symbolic
// gradient of f, which is local and valid on the whole domain.
struct GaugeReconstruction {
  bool ok = false;
  Expr f = Expr::zero();
  VecExpr grad = vecZero();
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  double curlResidual = 0.0;
};
GaugeReconstruction gaugeReconstruct(const FieldSpec& fs, const Vec9<double>& c);

// {dimension, basis[][8], singularValues[], noetherBasis[][8],
//  oracleAgreement, warnings[]} plus the scalar diagnostics.
std::string toJson(const ClassReport& report);

}  // namespace lorsym
