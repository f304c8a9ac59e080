#include "lorsym/fields.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include <Eigen/Geometry>

namespace lorsym {

namespace {

// Skips numerically dead terms so rotation matrices with entries like
// cos(pi/2) ~ 6e-17 produce clean expressions.
Expr scaled(double k, const Expr& e) {
  if (std::abs(k) < 1e-15 || e.isConstZero()) return Expr::zero();
  if (k == 1.0) return e;
  if (k == -1.0) return -e;
  return Expr::number(k) * e;
}

Expr accumulate(const Expr& acc, const Expr& term) {
  if (term.isConstZero()) return acc;
  if (acc.isConstZero()) return term;
  return acc + term;
}

double radicalInverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

bool DomainHint::contains(const Eigen::Vector3d& p) const {
  Eigen::Vector3d q = frameR * p + frameT;
  if (positiveX && q.x() <= margin) return false;
  if (positiveY && q.y() <= margin) return false;
  if (positiveZ && q.z() <= margin) return false;
  if (offAxisZ && std::hypot(q.x(), q.y()) <= margin) return false;
  if (offOrigin && q.norm() <= margin) return false;
  if (offBranchCut && q.x() < margin && std::abs(q.y()) < margin) return false;
  return true;
}

FieldSpec makeFieldSpec(const VecExpr& A, const Expr& Phi,
                        std::map<std::string, Rational> params, DomainHint domain) {
  FieldSpec fs;
  for (int i = 0; i < 3; ++i) fs.A[i] = simplify(A[i]);
  fs.Phi = simplify(Phi);
  VecExpr b = curl(fs.A);
  VecExpr g = gradient(fs.Phi);
  for (int i = 0; i < 3; ++i) {
    fs.B[i] = simplify(b[i]);
    fs.E[i] = simplify(-g[i]);
  }
  fs.params = std::move(params);
  fs.domain = domain;
  std::set<std::string> used;
  for (const auto& a : fs.A) collectParams(a, used);
  collectParams(fs.Phi, used);
  for (const auto& name : used)
    if (!fs.params.count(name))
      throw std::invalid_argument("field parameter not bound: " + name);
  for (const auto& [name, value] : fs.params) fs.paramsD[name] = value.toDouble();
  return fs;
}

std::pair<double, double> maxwellResidual(const FieldSpec& fs,
                                          const std::vector<Eigen::Vector3d>& pts) {
  // div B and each curl E component are sums of three resp. two partials; the
  // identity is judged against the magnitude of those partials.
  std::array<Expr, 3> divTerms;
  for (int i = 0; i < 3; ++i) divTerms[i] = differentiate(fs.B[i], i);
  std::array<std::array<Expr, 2>, 3> curlTerms;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    curlTerms[i] = {differentiate(fs.E[k], j), -differentiate(fs.E[j], k)};
  }
  double worstDiv = 0.0, worstCurl = 0.0;
  for (const auto& p : pts) {
    EvalContext ctx = fieldContext(fs, p);
    double sum = 0.0, mag = 0.0;
    for (const auto& t : divTerms) {
      double v = evaluate(t, ctx);
      sum += v;
      mag += std::abs(v);
    }
    worstDiv = std::max(worstDiv, std::abs(sum) / (1.0 + mag));
    for (const auto& pair : curlTerms) {
      double a = evaluate(pair[0], ctx), b = evaluate(pair[1], ctx);
      worstCurl = std::max(worstCurl, std::abs(a + b) / (1.0 + std::abs(a) + std::abs(b)));
    }
  }
  return {worstDiv, worstCurl};
}

std::vector<Eigen::Vector3d> samplePoints(const DomainHint& d, int count,
                                          std::uint64_t seed, double rmin, double rmax) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t idx = 1 + seed * 16381;
  const std::uint64_t limit = idx + 400000;
  while (static_cast<int>(out.size()) < count && idx < limit) {
    Eigen::Vector3d p(rmax * (2.0 * radicalInverse(idx, 2) - 1.0),
                      rmax * (2.0 * radicalInverse(idx, 3) - 1.0),
                      rmax * (2.0 * radicalInverse(idx, 5) - 1.0));
    ++idx;
    double r = p.norm();
    if (r < rmin || r > rmax || !d.contains(p)) continue;
    out.push_back(p);
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("samplePoints: domain too thin for requested count");
  return out;
}

Eigen::Matrix3d GroupElement::rotation() const {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(eps6, Vector3d::UnitX()) * AngleAxisd(eps5, Vector3d::UnitY()) *
          AngleAxisd(eps4, Vector3d::UnitZ()))
      .toRotationMatrix();
}

bool GroupElement::isIdentity() const {
  return eps0 == 0.0 && trans.isZero(0.0) && eps4 == 0.0 && eps5 == 0.0 && eps6 == 0.0 &&
         eps7 == 1.0 && eps8 == 1.0 && eps9 == 0.0 && simplify(gauge).isConst();
}

GroupElement inverseElement(const GroupElement& e) {
  if (e.eps7 == 0.0 || e.eps8 == 0.0)
    throw std::invalid_argument("inverseElement: zero scaling parameter");
  GroupElement inv;
  Eigen::Matrix3d Rt = e.rotation().transpose();
  Eigen::Vector3d angles = Rt.eulerAngles(0, 1, 2);  // Rt = Rx(a0) Ry(a1) Rz(a2)
  inv.eps6 = angles[0];
  inv.eps5 = angles[1];
  inv.eps4 = angles[2];
  inv.eps7 = 1.0 / e.eps7;
  inv.eps8 = 1.0 / e.eps8;
  inv.eps0 = -e.eps0 / e.eps8;
  inv.trans = -(Rt * e.trans) / e.eps7;
  double q = e.eps8 / e.eps7;
  inv.eps9 = -e.eps9 * q * q;
  Expr g = simplify(e.gauge);
  if (!g.isConst()) {
    // Undoing the gauge needs -(eps8/eps7^2) * gauge composed with T.
    Eigen::Matrix3d R = e.rotation();
    std::array<Expr, 3> T;
    for (int i = 0; i < 3; ++i) {
      Expr acc = Expr::zero();
      for (int j = 0; j < 3; ++j)
        acc = accumulate(acc, scaled(e.eps7 * R(i, j), Expr::variable(j)));
      if (e.trans[i] != 0.0) acc = accumulate(acc, Expr::number(e.trans[i]));
      T[i] = acc;
    }
    inv.gauge = simplify(scaled(-e.eps8 / (e.eps7 * e.eps7), substituteVars(g, T)));
  }
  return inv;
}

FieldSpec applyEquivalence(const FieldSpec& fs, const GroupElement& e) {
  if (e.eps7 == 0.0 || e.eps8 == 0.0)
    throw std::invalid_argument("applyEquivalence: zero scaling parameter");
  {
    std::set<std::string> used;
    collectParams(e.gauge, used);
    for (const auto& name : used)
      if (!fs.params.count(name))
        throw std::invalid_argument("gauge parameter not bound: " + name);
  }
  if (e.isIdentity()) return fs;

  Eigen::Matrix3d R = e.rotation();
  bool pointIdentity = e.trans.isZero(0.0) && e.eps7 == 1.0 && e.eps4 == 0.0 &&
                       e.eps5 == 0.0 && e.eps6 == 0.0;
  std::array<Expr, 3> S;  // T^-1 in the new coordinates
  for (int i = 0; i < 3; ++i) {
    if (pointIdentity) {
      S[i] = Expr::variable(i);
      continue;
    }
    Expr acc = Expr::zero();
    for (int j = 0; j < 3; ++j) {
      Expr shifted = Expr::variable(j);
      if (e.trans[j] != 0.0) shifted = shifted - Expr::number(e.trans[j]);
      acc = accumulate(acc, scaled(R(j, i) / e.eps7, shifted));
    }
    S[i] = acc;
  }

  VecExpr Asub;
  for (int j = 0; j < 3; ++j)
    Asub[j] = pointIdentity ? fs.A[j] : substituteVars(fs.A[j], S);
  Expr g = simplify(e.gauge);
  VecExpr dg = g.isConst() ? vecZero() : gradient(g);
  double s = e.eps7 / e.eps8;
  VecExpr At;
  for (int i = 0; i < 3; ++i) {
    Expr acc = Expr::zero();
    for (int j = 0; j < 3; ++j) acc = accumulate(acc, scaled(s * R(i, j), Asub[j]));
    At[i] = accumulate(acc, dg[i]);
  }
  Expr Pt = scaled(s * s, pointIdentity ? fs.Phi : substituteVars(fs.Phi, S));
  if (e.eps9 != 0.0) Pt = accumulate(Pt, Expr::number(e.eps9));

  DomainHint dom = fs.domain;
  Eigen::Matrix3d Rti = R.transpose() / e.eps7;
  dom.frameR = fs.domain.frameR * Rti;
  dom.frameT = fs.domain.frameT - fs.domain.frameR * (Rti * e.trans);
  return makeFieldSpec(At, Pt, fs.params, dom);
}

FieldSpec applyDiscrete(const FieldSpec& fs, int which, int i, int j) {
  if (which < 1 || which > 4) throw std::invalid_argument("applyDiscrete: map index");
  if (which == 1) return fs;  // potential components are carried verbatim
  if (which == 2) {
    VecExpr A{simplify(-fs.A[0]), simplify(-fs.A[1]), simplify(-fs.A[2])};
    return makeFieldSpec(A, fs.Phi, fs.params, fs.domain);
  }
  if (i < 1 || i > 3 || j < 1 || j > 3 || i == j)
    throw std::invalid_argument("applyDiscrete: invalid axis pair");
  int a = i - 1, b = j - 1, k = 3 - a - b;
  std::array<Expr, 3> sub = {Expr::variable(0), Expr::variable(1), Expr::variable(2)};
  Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
  VecExpr A;
  if (which == 3) {
    sub[a] = -sub[a];
    sub[b] = -sub[b];
    M(a, a) = -1.0;
    M(b, b) = -1.0;
    for (int c = 0; c < 3; ++c) A[c] = substituteVars(fs.A[c], sub);
    A[k] = -A[k];
  } else {
    std::swap(sub[a], sub[b]);
    M.setZero();
    M(a, b) = M(b, a) = M(k, k) = 1.0;
    A[a] = substituteVars(fs.A[b], sub);
    A[b] = substituteVars(fs.A[a], sub);
    A[k] = substituteVars(fs.A[k], sub);
  }
  Expr Phi = substituteVars(fs.Phi, sub);
  DomainHint dom = fs.domain;
  dom.frameR = fs.domain.frameR * M;
  return makeFieldSpec(A, Phi, fs.params, dom);
}

Vec8<double> pushforwardSymmetry(const GroupElement& e, const Vec8<double>& c) {
  if (e.eps7 == 0.0 || e.eps8 == 0.0)
    throw std::invalid_argument("pushforwardSymmetry: zero scaling parameter");
  Eigen::Matrix3d R = e.rotation();
  Eigen::Vector3d a(c[5], c[4], c[3]);
  Eigen::Vector3d tv(c[0], c[1], c[2]);
  Eigen::Vector3d an = R * a;
  Eigen::Matrix3d cross;
  cross << 0, -an.z(), an.y(), an.z(), 0, -an.x(), -an.y(), an.x(), 0;
  Eigen::Matrix3d Mn = c[6] * Eigen::Matrix3d::Identity() + cross;
  Eigen::Vector3d tn = e.eps7 * (R * tv) - Mn * e.trans;
  Vec8<double> out;
  out << tn.x(), tn.y(), tn.z(), an.z(), an.y(), an.x(), c[6], c[7];
  return out;
}

namespace {

std::string trimmed(const std::string& s, std::size_t& lead) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    lead = s.size();
    return "";
  }
  std::size_t e = s.find_last_not_of(" \t\r");
  lead = b;
  return s.substr(b, e - b + 1);
}

Rational rationalFromToken(const std::string& tok, std::size_t at) {
  try {
    return Rational::parse(tok);
  } catch (const std::exception&) {
    throw ParseError("expected a rational number", at);
  }
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

FieldSpec parseFieldFile(const std::string& text) {
  VecExpr A = vecZero();
  Expr Phi = Expr::zero();
  std::map<std::string, Rational> params;
  DomainHint dom;
  enum class Sec { None, Potential, Params, Domain };
  Sec sec = Sec::None;

  std::size_t lineStart = 0;
  while (lineStart <= text.size()) {
    std::size_t eol = text.find('\n', lineStart);
    std::size_t lineEnd = (eol == std::string::npos) ? text.size() : eol;
    std::string raw = text.substr(lineStart, lineEnd - lineStart);
    std::size_t lead = 0;
    std::string line = trimmed(raw, lead);
    std::size_t base = lineStart + lead;
    if (!line.empty() && line[0] != '#') {
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError("unterminated section header", base);
        std::string name = line.substr(1, line.size() - 2);
        if (name == "potential")
          sec = Sec::Potential;
        else if (name == "params")
          sec = Sec::Params;
        else if (name == "domain")
          sec = Sec::Domain;
        else
          throw ParseError("unknown section [" + name + "]", base);
      } else {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", base);
        std::size_t klead = 0, vlead = 0;
        std::string key = trimmed(line.substr(0, eq), klead);
        std::string value = trimmed(line.substr(eq + 1), vlead);
        std::size_t vat = base + eq + 1 + vlead;
        if (key.empty()) throw ParseError("missing key before '='", base);
        if (value.empty()) throw ParseError("missing value for " + key, base + eq);
        switch (sec) {
          case Sec::None:
            throw ParseError("key outside any section", base);
          case Sec::Potential: {
            Expr parsed;
            try {
              parsed = parseExpr(value);
            } catch (const ParseError& pe) {
              throw ParseError(pe.what(), vat + pe.offset);
            }
            if (key == "A1")
              A[0] = parsed;
            else if (key == "A2")
              A[1] = parsed;
            else if (key == "A3")
              A[2] = parsed;
            else if (key == "Phi")
              Phi = parsed;
            else
              throw ParseError("unknown potential key " + key, base);
            break;
          }
          case Sec::Params:
            params[key] = rationalFromToken(value, vat);
            break;
          case Sec::Domain:
            if (key == "exclude") {
              for (const auto& tok : splitList(value)) {
                if (tok == "z-axis")
                  dom.offAxisZ = true;
                else if (tok == "origin")
                  dom.offOrigin = true;
                else if (tok == "branch-cut")
                  dom.offBranchCut = true;
                else
                  throw ParseError("unknown exclude token " + tok, vat);
              }
            } else if (key == "positive") {
              for (const auto& tok : splitList(value)) {
                if (tok == "x")
                  dom.positiveX = true;
                else if (tok == "y")
                  dom.positiveY = true;
                else if (tok == "z")
                  dom.positiveZ = true;
                else
                  throw ParseError("unknown positive token " + tok, vat);
              }
            } else if (key == "margin") {
              dom.margin = rationalFromToken(value, vat).toDouble();
            } else {
              throw ParseError("unknown domain key " + key, base);
            }
            break;
        }
      }
    }
    if (eol == std::string::npos) break;
    lineStart = eol + 1;
  }
  return makeFieldSpec(A, Phi, std::move(params), dom);
}

}  // namespace lorsym
