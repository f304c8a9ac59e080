#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lorsym/fields.hpp"
#include "lorsym/verify.hpp"

namespace lorsym {

// (dx/dt, dv/dt) = (v, v x B + E) at the state's position
Eigen::Matrix<double, 6, 1> lorentzRHS(const FieldSpec& fs, const PhaseState& s);

struct Rk4 {
  double h = 1e-3;
};

struct Adaptive {
  double tolAbs = 1e-10;
  double tolRel = 1e-10;
};

// Dense list of accepted states from s0 to tEnd.  Throws when a step leaves
// the field's domain, produces a nonfinite state, or the step size
// underflows.  The adaptive method is an embedded fifth-order pair with PI
// step control.
std::vector<PhaseState> integrate(const FieldSpec& fs, const PhaseState& s0,
                                  double tEnd, Rk4 method);
std::vector<PhaseState> integrate(const FieldSpec& fs, const PhaseState& s0,
                                  double tEnd, Adaptive method = {});

// H = v^2/2 + Phi(x)
double hamiltonian(const FieldSpec& fs, const PhaseState& s);

// I = eta(x).(v + A(x)) - (2 c7 t + c0) H + c9 t - f(x) for the generator
// with time part c0 + 2 c7 t and space part eta = c7 x + a x x + (c1,c2,c3);
// c holds c1..c9.  Constant along orbits when c8 = 2 c7 and f solves the
// gauge equation.
double noetherIntegral(const FieldSpec& fs, double c0, const Vec9<double>& c,
                       const Expr& f, const PhaseState& s);

// Scalar invariant with an optional analytic phase-space gradient; when grad
// is absent the Poisson bracket falls back to central differences with one
// Richardson level.
struct InvariantFn {
  std::function<double(const PhaseState&)> value;
  std::function<std::pair<Eigen::Vector3d, Eigen::Vector3d>(const PhaseState&)> grad;
  bool isHamiltonian = false;
  bool isNoether = false;
  std::string label;
};

InvariantFn makeHamiltonian(const FieldSpec& fs);

// Analytic gradients unless f carries a quadrature node, in which case the
// finite-difference path takes over transparently.
InvariantFn makeNoetherInvariant(const FieldSpec& fs, double c0,
                                 const Vec9<double>& c, const Expr& f,
                                 const std::string& label = "");

// Same integral with a reconstructed gauge function.  The gradient uses the
// symbolic gauge flow, so brackets stay analytic and domain-wide even though
// the value of f is quadrature-backed and only trustworthy near the anchor.
InvariantFn makeNoetherInvariant(const FieldSpec& fs, double c0,
                                 const Vec9<double>& c, const GaugeReconstruction& g,
                                 const std::string& label = "");

// sum of I_k^2, differentiable whenever every part is
InvariantFn makeSumOfSquares(const std::vector<InvariantFn>& parts,
                             const std::string& label = "");

// {I1, I2} = dI1/dx . dI2/dv - dI1/dv . dI2/dx + B . (dI1/dv x dI2/dv)
double poissonBracket(const InvariantFn& I1, const InvariantFn& I2,
                      const FieldSpec& fs, const PhaseState& s);

struct InvolutionOptions {
  int stateCount = 20;
  std::uint64_t seed = 0;
  double tEnd = 50.0;
  Adaptive method = {};
  std::optional<PhaseState> start;  // default: first sample point, fixed v
};

struct InvolutionReport {
  Eigen::MatrixXd brackets;     // max |{I_i, I_j}| over the probe states
  std::vector<double> drifts;   // max |I_i(t) - I_i(0)| along the orbit
  int jacobianRank = 0;         // generic rank of the phase-space Jacobian
};

InvolutionReport involutionReport(const FieldSpec& fs,
                                  const std::vector<InvariantFn>& invariants,
                                  const InvolutionOptions& opts = {});

// header t,x,y,z,vx,vy,vz then one row per state, full double precision
void writeTrajectoryCsv(std::ostream& os, const std::vector<PhaseState>& traj);

}  // namespace lorsym
