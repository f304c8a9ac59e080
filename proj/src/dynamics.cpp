#include "lorsym/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace lorsym {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 pack(const PhaseState& s) {
  Vec6 y;
  y << s.x, s.v;
  return y;
}

PhaseState unpack(double t, const Vec6& y) {
  PhaseState s;
  s.t = t;
  s.x = y.head<3>();
  s.v = y.tail<3>();
  return s;
}

Vec6 rhs(const FieldSpec& fs, const Vec6& y) {
  const Eigen::Vector3d x = y.head<3>(), v = y.tail<3>();
  EvalContext ctx = fieldContext(fs, x);
  Vec6 dy;
  dy.head<3>() = v;
  dy.tail<3>() = v.cross(evaluate(fs.B, ctx)) + evaluate(fs.E, ctx);
  return dy;
}

void acceptState(const FieldSpec& fs, std::vector<PhaseState>& out, double t,
                 const Vec6& y) {
  if (!y.allFinite())
    throw std::runtime_error("integration produced a nonfinite state");
  if (!fs.domain.contains(y.head<3>()))
    throw std::runtime_error("integration left the field domain");
  out.push_back(unpack(t, y));
}

}  // namespace

Eigen::Matrix<double, 6, 1> lorentzRHS(const FieldSpec& fs, const PhaseState& s) {
  return rhs(fs, pack(s));
}

std::vector<PhaseState> integrate(const FieldSpec& fs, const PhaseState& s0,
                                  double tEnd, Rk4 method) {
  if (!(tEnd > s0.t)) throw std::invalid_argument("integrate: tEnd must exceed t0");
  if (!(method.h > 0)) throw std::invalid_argument("integrate: step must be positive");

  std::vector<PhaseState> out;
  double t = s0.t;
  Vec6 y = pack(s0);
  acceptState(fs, out, t, y);
  while (t < tEnd - 1e-14 * std::max(1.0, std::abs(tEnd))) {
    const double h = std::min(method.h, tEnd - t);
    const Vec6 k1 = rhs(fs, y);
    const Vec6 k2 = rhs(fs, y + 0.5 * h * k1);
    const Vec6 k3 = rhs(fs, y + 0.5 * h * k2);
    const Vec6 k4 = rhs(fs, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    acceptState(fs, out, t, y);
  }
  return out;
}

std::vector<PhaseState> integrate(const FieldSpec& fs, const PhaseState& s0,
                                  double tEnd, Adaptive method) {
  if (!(tEnd > s0.t)) throw std::invalid_argument("integrate: tEnd must exceed t0");
  if (!(method.tolAbs > 0) || !(method.tolRel > 0))
    throw std::invalid_argument("integrate: tolerances must be positive");

  // Dormand-Prince 5(4) pair, first-same-as-last
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<PhaseState> out;
  double t = s0.t;
  Vec6 y = pack(s0);
  acceptState(fs, out, t, y);

  double h = std::min(1e-2, 0.1 * (tEnd - t));
  double errOld = 1e-4;
  Vec6 k1 = rhs(fs, y);
  long steps = 0;

  while (t < tEnd - 1e-14 * std::max(1.0, std::abs(tEnd))) {
    if (++steps > 20'000'000) throw std::runtime_error("integrate: step limit hit");
    h = std::min(h, tEnd - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("integrate: step size underflow");

    const Vec6 k2 = rhs(fs, y + h * (a21 * k1));
    const Vec6 k3 = rhs(fs, y + h * (a31 * k1 + a32 * k2));
    const Vec6 k4 = rhs(fs, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec6 k5 = rhs(fs, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec6 k6 =
        rhs(fs, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec6 y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec6 k7 = rhs(fs, y1);
    const Vec6 ev =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double sc =
          method.tolAbs + method.tolRel * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (ev[i] / sc) * (ev[i] / sc);
    }
    err = std::sqrt(err / 6.0);

    if (err <= 1.0) {
      t += h;
      y = y1;
      k1 = k7;
      acceptState(fs, out, t, y);
      const double fac =
          0.9 * std::pow(std::max(err, 1e-16), -0.14) * std::pow(errOld, 0.08);
      h *= std::clamp(fac, 0.2, 5.0);
      errOld = std::max(err, 1e-8);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  return out;
}

double hamiltonian(const FieldSpec& fs, const PhaseState& s) {
  return 0.5 * s.v.squaredNorm() + evaluate(fs.Phi, fieldContext(fs, s.x));
}

namespace {

Eigen::Vector3d etaAt(const Vec9<double>& c, const Eigen::Vector3d& x) {
  const Eigen::Vector3d a(c[5], c[4], c[3]);
  return c[6] * x + a.cross(x) + Eigen::Vector3d(c[0], c[1], c[2]);
}

double evalNoether(const FieldSpec& fs, double c0, const Vec9<double>& c,
                   const Expr& f, const PhaseState& s) {
  EvalContext ctx = fieldContext(fs, s.x);
  const Eigen::Vector3d A = evaluate(fs.A, ctx);
  const double H = 0.5 * s.v.squaredNorm() + evaluate(fs.Phi, ctx);
  return etaAt(c, s.x).dot(s.v + A) - (2.0 * c[6] * s.t + c0) * H + c[8] * s.t -
         evaluate(f, ctx);
}

}  // namespace

double noetherIntegral(const FieldSpec& fs, double c0, const Vec9<double>& c,
                       const Expr& f, const PhaseState& s) {
  return evalNoether(fs, c0, c, f, s);
}

InvariantFn makeHamiltonian(const FieldSpec& fs) {
  InvariantFn I;
  I.isHamiltonian = true;
  I.label = "H";
  I.value = [fs](const PhaseState& s) { return hamiltonian(fs, s); };
  I.grad = [fs](const PhaseState& s) {
    // grad Phi = -E
    return std::make_pair(
        Eigen::Vector3d(-evaluate(fs.E, fieldContext(fs, s.x))),
        Eigen::Vector3d(s.v));
  };
  return I;
}

namespace {

void installNoetherGrad(InvariantFn& I, const FieldSpec& fs, double c0,
                        const Vec9<double>& c, const VecExpr& Jf) {
  std::array<Expr, 9> JA;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) JA[3 * i + j] = simplify(differentiate(fs.A[i], j));
  I.grad = [fs, c0, c, JA, Jf](const PhaseState& s) {
    EvalContext ctx = fieldContext(fs, s.x);
    const Eigen::Vector3d A = evaluate(fs.A, ctx);
    const Eigen::Vector3d E = evaluate(fs.E, ctx);
    const Eigen::Vector3d a(c[5], c[4], c[3]);
    const Eigen::Vector3d eta = etaAt(c, s.x);
    const double tf = 2.0 * c[6] * s.t + c0;
    Eigen::Matrix3d JAm;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) JAm(i, j) = evaluate(JA[3 * i + j], ctx);
    const Eigen::Vector3d u = s.v + A;
    // d(eta)/dx has transpose action c7 u - a x u
    Eigen::Vector3d gx = c[6] * u - a.cross(u) + JAm.transpose() * eta + tf * E -
                         evaluate(Jf, ctx);
    Eigen::Vector3d gv = eta - tf * s.v;
    return std::make_pair(gx, gv);
  };
}

}  // namespace

InvariantFn makeNoetherInvariant(const FieldSpec& fs, double c0,
                                 const Vec9<double>& c, const Expr& f,
                                 const std::string& label) {
  InvariantFn I;
  I.label = label;
  I.isNoether = std::abs(c[7] - 2.0 * c[6]) <=
                1e-12 * (1.0 + std::abs(c[6]) + std::abs(c[7]));
  I.value = [fs, c0, c, f](const PhaseState& s) {
    return evalNoether(fs, c0, c, f, s);
  };
  if (!containsNumFn(f)) {
    VecExpr Jf{simplify(differentiate(f, 0)), simplify(differentiate(f, 1)),
               simplify(differentiate(f, 2))};
    installNoetherGrad(I, fs, c0, c, Jf);
  }
  return I;
}

InvariantFn makeNoetherInvariant(const FieldSpec& fs, double c0,
                                 const Vec9<double>& c, const GaugeReconstruction& g,
                                 const std::string& label) {
  InvariantFn I = makeNoetherInvariant(fs, c0, c, g.f, label);
  installNoetherGrad(I, fs, c0, c, g.grad);
  return I;
}

InvariantFn makeSumOfSquares(const std::vector<InvariantFn>& parts,
                             const std::string& label) {
  InvariantFn I;
  I.label = label;
  I.value = [parts](const PhaseState& s) {
    double acc = 0.0;
    for (const auto& p : parts) {
      const double v = p.value(s);
      acc += v * v;
    }
    return acc;
  };
  bool allGrads = true;
  for (const auto& p : parts) allGrads = allGrads && static_cast<bool>(p.grad);
  if (allGrads) {
    I.grad = [parts](const PhaseState& s) {
      Eigen::Vector3d gx = Eigen::Vector3d::Zero(), gv = Eigen::Vector3d::Zero();
      for (const auto& p : parts) {
        const double v = p.value(s);
        const auto [px, pv] = p.grad(s);
        gx += 2.0 * v * px;
        gv += 2.0 * v * pv;
      }
      return std::make_pair(gx, gv);
    };
  }
  return I;
}

namespace {

std::pair<Eigen::Vector3d, Eigen::Vector3d> gradOf(const InvariantFn& I,
                                                   const PhaseState& s) {
  if (I.grad) return I.grad(s);
  // central differences with one Richardson level
  const double h = 1e-5;
  Eigen::Matrix<double, 6, 1> g;
  for (int i = 0; i < 6; ++i) {
    auto probe = [&](double d) {
      PhaseState p = s;
      if (i < 3)
        p.x[i] += d;
      else
        p.v[i - 3] += d;
      return I.value(p);
    };
    const double dh = (probe(h) - probe(-h)) / (2.0 * h);
    const double dh2 = (probe(h / 2) - probe(-h / 2)) / h;
    g[i] = (4.0 * dh2 - dh) / 3.0;
  }
  return {g.head<3>(), g.tail<3>()};
}

}  // namespace

double poissonBracket(const InvariantFn& I1, const InvariantFn& I2,
                      const FieldSpec& fs, const PhaseState& s) {
  const auto [g1x, g1v] = gradOf(I1, s);
  const auto [g2x, g2v] = gradOf(I2, s);
  const Eigen::Vector3d B = evaluate(fs.B, fieldContext(fs, s.x));
  return g1x.dot(g2v) - g1v.dot(g2x) + B.dot(g1v.cross(g2v));
}

InvolutionReport involutionReport(const FieldSpec& fs,
                                  const std::vector<InvariantFn>& invariants,
                                  const InvolutionOptions& opts) {
  const int n = static_cast<int>(invariants.size());
  InvolutionReport rep;
  rep.brackets = Eigen::MatrixXd::Zero(n, n);
  rep.drifts.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return rep;

  const auto pts = samplePoints(fs.domain, std::max(opts.stateCount, 6), opts.seed);
  std::mt19937 rng(static_cast<std::uint32_t>(opts.seed * 2654435761u + 17u));
  std::uniform_real_distribution<double> vel(-0.5, 0.5);
  std::vector<PhaseState> states;
  for (int i = 0; i < opts.stateCount; ++i) {
    PhaseState s;
    s.x = pts[static_cast<std::size_t>(i) % pts.size()];
    s.v = Eigen::Vector3d(vel(rng), vel(rng), vel(rng));
    states.push_back(s);
  }

  for (const auto& s : states)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double b = std::abs(poissonBracket(
            invariants[static_cast<std::size_t>(i)],
            invariants[static_cast<std::size_t>(j)], fs, s));
        rep.brackets(i, j) = std::max(rep.brackets(i, j), b);
        rep.brackets(j, i) = rep.brackets(i, j);
      }

  PhaseState s0;
  if (opts.start) {
    s0 = *opts.start;
  } else {
    s0.x = pts.front();
    s0.v = Eigen::Vector3d(0.2, -0.15, 0.1);
  }
  const auto traj = integrate(fs, s0, s0.t + opts.tEnd, opts.method);
  for (int i = 0; i < n; ++i) {
    const auto& I = invariants[static_cast<std::size_t>(i)];
    const double base = I.value(traj.front());
    double worst = 0.0;
    for (const auto& s : traj) worst = std::max(worst, std::abs(I.value(s) - base));
    rep.drifts[static_cast<std::size_t>(i)] = worst;
  }

  const int probes = std::min<int>(6, static_cast<int>(states.size()));
  for (int k = 0; k < probes; ++k) {
    Eigen::MatrixXd J(n, 6);
    for (int i = 0; i < n; ++i) {
      const auto [gx, gv] = gradOf(invariants[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(k)]);
      J.row(i) << gx.transpose(), gv.transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-8 * sv[0]) ++rank;
    rep.jacobianRank = std::max(rep.jacobianRank, rank);
  }
  return rep;
}

void writeTrajectoryCsv(std::ostream& os, const std::vector<PhaseState>& traj) {
  os << "t,x,y,z,vx,vy,vz\n";
  os << std::setprecision(17);
  for (const auto& s : traj)
    os << s.t << ',' << s.x.x() << ',' << s.x.y() << ',' << s.x.z() << ',' << s.v.x()
       << ',' << s.v.y() << ',' << s.v.z() << '\n';
}

}  // namespace lorsym
