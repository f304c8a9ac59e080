#include "lorsym/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "lorsym/optimal.hpp"

namespace lorsym {

namespace {

using RMap = std::map<std::string, Rational>;
using EMap = std::map<std::string, Expr>;

Expr X() { return Expr::variable(0); }
Expr Y() { return Expr::variable(1); }
Expr Z() { return Expr::variable(2); }
Expr num(std::int64_t n, std::int64_t d = 1) { return Expr::number(Rational(n, d)); }
Expr pr(const char* name) { return Expr::param(name); }

Expr rho2() { return X() * X() + Y() * Y(); }
Expr rhoE() { return sqrt(rho2()); }
Expr rE() { return sqrt(rho2() + Z() * Z()); }
Expr phiE() { return atan2(Y(), X()); }

Expr sub1(const EMap& f, const char* name, const Expr& u) {
  return substituteParams(f.at(name), {{"u", u}});
}
Expr sub2(const EMap& f, const char* name, const Expr& u1, const Expr& u2) {
  return substituteParams(f.at(name), {{"u1", u1}, {"u2", u2}});
}

// flags: x/y/z positive half-spaces, a off the z-axis, o off the origin,
// b off the branch half-plane of atan2
DomainHint dom(const char* flags, double margin = 0.1) {
  DomainHint d;
  for (const char* c = flags; *c; ++c) {
    switch (*c) {
      case 'x': d.positiveX = true; break;
      case 'y': d.positiveY = true; break;
      case 'z': d.positiveZ = true; break;
      case 'a': d.offAxisZ = true; break;
      case 'o': d.offOrigin = true; break;
      case 'b': d.offBranchCut = true; break;
      default: break;
    }
  }
  d.margin = margin;
  return d;
}

Vec9<Rational> V(int k) { return basisGenerator<Rational>(k).c; }

struct GenPattern {
  Vec9<Rational> base;
  std::vector<std::pair<std::string, Vec9<Rational>>> dirs;
};

GenPattern gp(Vec9<Rational> base) { return {std::move(base), {}}; }
GenPattern gp(Vec9<Rational> base, const char* k1, Vec9<Rational> d1) {
  return {std::move(base), {{k1, std::move(d1)}}};
}
GenPattern gp(Vec9<Rational> base, const char* k1, Vec9<Rational> d1, const char* k2,
              Vec9<Rational> d2) {
  return {std::move(base), {{k1, std::move(d1)}, {k2, std::move(d2)}}};
}

struct RowSpec {
  std::string display;
  std::vector<GenPattern> gens;
  std::vector<std::string> kParams;
  std::vector<std::string> freeParams;
  std::vector<std::string> profileNames;
  int arity = 0;
  RMap defaults;
  EMap profDefaults;
  std::function<bool(const RMap&)> cond;
  std::function<FieldSpec(const RMap&, const EMap&)> build;
  std::string caveat;
};

EMap defaultProfileSet(int arity, const std::vector<std::string>& names) {
  EMap all;
  if (arity == 1) {
    Expr u = pr("u");
    all["F1"] = num(1) + u * u * num(1, 4);
    all["F2"] = num(1, 2) + u * num(1, 3);
    all["F3"] = num(1, 4) + u * num(1, 2);
    all["G"] = num(1) + u * num(1, 5) + u * u * num(1, 7);
  } else if (arity == 2) {
    Expr u1 = pr("u1"), u2 = pr("u2");
    all["F1"] = num(1) + u1 * num(1, 2) + u2 * u2 * num(1, 3);
    all["F2"] = num(1, 2) + u2 * num(1, 2) + u1 * u1 * num(1, 5);
    all["F3"] = num(1, 4) + u1 * num(1, 7) + u1 * u2 * num(1, 3);
    all["G"] = num(1) + u1 * num(1, 3) + u2 * num(1, 5) + u1 * u2 * num(1, 7);
  }
  EMap out;
  for (const auto& n : names) out[n] = all.count(n) ? all[n] : Expr::zero();
  return out;
}

void finish(RowSpec& r) { r.profDefaults = defaultProfileSet(r.arity, r.profileNames); }

const std::vector<std::string> kAllProfiles = {"F1", "F2", "F3", "G"};

// ---------------------------------------------------------------------------
// table 5: one generator beyond time translation, profiles of two arguments

std::vector<RowSpec> buildSym2() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "v4 + k1 v7 + k2 v8";
    r.gens = {gp(V(4), "k1", V(7), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(2)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(2, 1, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE() / Z(), u2 = ln(Z()) - pr("k1") * phiE();
      Expr q = -(pr("k2") / pr("k1"));
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      Expr zq = pow(Z(), q);
      VecExpr A{zq * (X() * F1 - Y() * F2), zq * (Y() * F1 + X() * F2),
                pow(Z(), q + num(1)) * sub2(f, "F3", u1, u2)};
      Expr Phi = pow(Z(), num(2) * (q + num(1))) * sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("zab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v4 + k (v7 + v8)";
    r.gens = {gp(V(4), "k", V(7) + V(8))};
    r.kParams = {"k"};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(2, 2, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE() / Z(), u2 = ln(Z()) - pr("k") * phiE();
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      Expr zi = num(1) / Z();
      VecExpr A{zi * (X() * F1 - Y() * F2), zi * (Y() * F1 + X() * F2),
                sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * ln(Z()) + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("zab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v4 + k1 v3 + k2 v8";
    r.gens = {gp(V(4), "k1", V(3), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(2, 3, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE(), u2 = Z() - pr("k1") * phiE();
      Expr s = exp(-(pr("k2") * phiE()));
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                s * sub2(f, "F3", u1, u2)};
      Expr Phi = exp(num(-2) * pr("k2") * phiE()) * sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v4 + k v3";
    r.gens = {gp(V(4), "k", V(3))};
    r.kParams = {"k"};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE(), u2 = Z() - pr("k") * phiE();
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      VecExpr A{X() * F1 - Y() * F2, Y() * F1 + X() * F2, sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * phiE() + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v7 + k v8";
    r.gens = {gp(V(7), "k", V(8))};
    r.kParams = {"k"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(3)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(2, 5, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = Y() / X(), u2 = Z() / Y();
      Expr s = pow(X(), num(1) - pr("k"));
      VecExpr A{s * sub2(f, "F1", u1, u2), s * sub2(f, "F2", u1, u2),
                s * sub2(f, "F3", u1, u2)};
      Expr Phi = pow(X(), num(2) * (num(1) - pr("k"))) * sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("xy", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v7 + v8";
    r.gens = {gp(V(7) + V(8))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = Y() / X(), u2 = Z() / Y();
      VecExpr A{sub2(f, "F1", u1, u2), sub2(f, "F2", u1, u2), sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * ln(Z()) + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("xyz"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v3 + k v8";
    r.gens = {gp(V(3), "k", V(8))};
    r.kParams = {"k"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(2, 7, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = X(), u2 = Y();
      Expr s = exp(-(pr("k") * Z()));
      VecExpr A{s * sub2(f, "F1", u1, u2), s * sub2(f, "F2", u1, u2),
                s * sub2(f, "F3", u1, u2)};
      Expr Phi = exp(num(-2) * pr("k") * Z()) * sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v3";
    r.gens = {gp(V(3))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = X(), u2 = Y();
      VecExpr A{sub2(f, "F1", u1, u2), sub2(f, "F2", u1, u2), sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * Z() + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// table 6: two generators, profiles of one argument

std::vector<RowSpec> buildSym3() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "{v3, v4 + k1 v7 + k2 v8}";
    r.gens = {gp(V(3)), gp(V(4), "k1", V(7), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k1", Rational(3)}, {"k2", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 1, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = ln(rhoE()) - pr("k1") * phiE();
      Expr s = exp(-(pr("k2") * phiE()));
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                exp((pr("k1") - pr("k2")) * phiE()) * sub1(f, "F3", u)};
      Expr Phi = exp(num(2) * (pr("k1") - pr("k2")) * phiE()) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4 + k (2 v7 + v8)}";
    r.gens = {gp(V(3)), gp(V(4), "k", Rational(2) * V(7) + V(8))};
    r.kParams = {"k"};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 2, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = ln(rhoE()) - num(2) * pr("k") * phiE();
      Expr s = exp(-(pr("k") * phiE()));
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                exp(pr("k") * phiE()) * sub1(f, "F3", u)};
      Expr Phi = pr("lambda") * Z() + exp(num(2) * pr("k") * phiE()) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4 + k (v7 + v8)}";
    r.gens = {gp(V(3)), gp(V(4), "k", V(7) + V(8))};
    r.kParams = {"k"};
    r.freeParams = {"lambda1", "lambda2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k", Rational(1)}, {"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 3, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = ln(rhoE()) - pr("k") * phiE();
      Expr F1 = sub1(f, "F1", u);
      Expr F2 = sub1(f, "F2", u) + pr("lambda1") * Z() / rhoE();
      Expr s = num(1) / rhoE();
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2), sub1(f, "F3", u)};
      Expr Phi = pr("lambda2") * ln(rhoE()) + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3 + k1 v8, v4 + k2 v8}";
    r.gens = {gp(V(3), "k1", V(8)), gp(V(4), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 4, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE();
      Expr s = exp(-(pr("k1") * Z() + pr("k2") * phiE()));
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                s * sub1(f, "F3", u)};
      Expr Phi = exp(num(-2) * (pr("k1") * Z() + pr("k2") * phiE())) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4}";
    r.gens = {gp(V(3)), gp(V(4))};
    r.freeParams = {"lambda1", "lambda2", "lambda3"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)},
                  {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}};
    r.caveat =
        "the lambda3 term as written is not a gradient, so a z translation "
        "or a z rotation shifts the potential by more than a gauge term and "
        "both claimed symmetries fail unless lambda3 = 0; table 9 row 2 "
        "carries the gradient variant";
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE();
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      Expr extra = pr("lambda3") * Y() * Z() / rho2();
      VecExpr A{X() * F1 - Y() * F2 - extra, Y() * F1 + X() * F2 + extra,
                sub1(f, "F3", u)};
      Expr Phi = pr("lambda1") * Z() + pr("lambda2") * phiE() + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4 + k1 v8, v7 + k2 v8}";
    r.gens = {gp(V(4), "k1", V(8)), gp(V(7), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k1", Rational(0)}, {"k2", Rational(3)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 6, p); };
    r.build = [](const RMap& p, const EMap& f) {
      bool axial = p.at("k1") == Rational(0);
      Expr u = rhoE() / Z();
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      Expr zq = pow(Z(), -pr("k2"));
      Expr s = axial ? zq : zq * exp(-(pr("k1") * phiE()));
      Expr z1 = pow(Z(), num(1) - pr("k2"));
      Expr z2 = pow(Z(), num(2) * (num(1) - pr("k2")));
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                (axial ? z1 : z1 * exp(-(pr("k1") * phiE()))) * sub1(f, "F3", u)};
      Expr Phi =
          (axial ? z2 : z2 * exp(num(-2) * pr("k1") * phiE())) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, axial ? dom("z", 0.2) : dom("zab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4, v7 + v8}";
    r.gens = {gp(V(4)), gp(V(7) + V(8))};
    r.freeParams = {"lambda1", "lambda2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE() / Z();
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      Expr zi = num(1) / Z();
      VecExpr A{zi * (X() * F1 - Y() * F2), zi * (Y() * F1 + X() * F2),
                sub1(f, "F3", u)};
      Expr Phi = pr("lambda1") * phiE() + pr("lambda2") * ln(Z()) + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("zab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4, v7 + 2 v8}";
    r.gens = {gp(V(4)), gp(V(7) + Rational(2) * V(8))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE() / Z();
      Expr F1 = sub1(f, "F1", u);
      Expr F2 = sub1(f, "F2", u) + pr("lambda") * ln(rhoE());
      Expr s = num(1) / rho2();
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                sub1(f, "F3", u) / Z()};
      Expr Phi = sub1(f, "G", u) / (Z() * Z());
      return makeFieldSpec(A, Phi, p, dom("za", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v7 + k v8}";
    r.gens = {gp(V(3)), gp(V(7), "k", V(8))};
    r.kParams = {"k"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k", Rational(3)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 9, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = Y() / X();
      Expr s = pow(X(), num(1) - pr("k"));
      VecExpr A{s * sub1(f, "F1", u), s * sub1(f, "F2", u), s * sub1(f, "F3", u)};
      Expr Phi = pow(X(), num(2) * (num(1) - pr("k"))) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("x", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v7 + v8}";
    r.gens = {gp(V(3)), gp(V(7) + V(8))};
    r.freeParams = {"lambda1", "lambda2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = Y() / X();
      VecExpr A{sub1(f, "F1", u), sub1(f, "F2", u),
                pr("lambda1") * ln(Y()) + sub1(f, "F3", u)};
      Expr Phi = pr("lambda2") * ln(Y()) + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("xy"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, 2 v7 + v8}";
    r.gens = {gp(V(3)), gp(Rational(2) * V(7) + V(8))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = Y() / X();
      Expr s = sqrt(X());
      VecExpr A{s * sub1(f, "F1", u), s * sub1(f, "F2", u), s * sub1(f, "F3", u)};
      Expr Phi = pr("lambda") * Z() + X() * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("x"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2 + k1 v8, v3 + k2 v8}";
    r.gens = {gp(V(2), "k1", V(8)), gp(V(3), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(3, 12, p); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = X();
      Expr s = exp(-(pr("k1") * Y() + pr("k2") * Z()));
      VecExpr A{s * sub1(f, "F1", u), s * sub1(f, "F2", u), s * sub1(f, "F3", u)};
      Expr Phi = exp(num(-2) * (pr("k1") * Y() + pr("k2") * Z())) * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3}";
    r.gens = {gp(V(2)), gp(V(3))};
    r.freeParams = {"lambda1", "lambda2", "lambda3"};
    r.profileNames = {"F2", "F3", "G"};
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)},
                  {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = X();
      VecExpr A{Expr::zero(), sub1(f, "F2", u),
                pr("lambda3") * Y() + sub1(f, "F3", u)};
      Expr Phi = pr("lambda1") * Y() + pr("lambda2") * Z() + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// table 7: three generators, potentials fixed up to constants

std::vector<RowSpec> buildSym4() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "{v3, v4 + k1 v8, v7 + k2 v8}";
    r.gens = {gp(V(3)), gp(V(4), "k1", V(8)), gp(V(7), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.freeParams = {"a1", "a2", "a3", "a4"};
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(3)}, {"a1", Rational(1)},
                  {"a2", Rational(1, 2)}, {"a3", Rational(1, 3)}, {"a4", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 1, p); };
    r.build = [](const RMap& p, const EMap&) {
      bool axial = p.at("k1") == Rational(0);
      Expr rq = pow(rhoE(), -pr("k2"));
      Expr s = axial ? rq : rq * exp(-(pr("k1") * phiE()));
      Expr r1 = pow(rhoE(), num(1) - pr("k2"));
      Expr r2 = pow(rhoE(), num(2) * (num(1) - pr("k2")));
      VecExpr A{s * (pr("a1") * X() - pr("a2") * Y()),
                s * (pr("a1") * Y() + pr("a2") * X()),
                pr("a3") * (axial ? r1 : r1 * exp(-(pr("k1") * phiE())))};
      Expr Phi =
          pr("a4") * (axial ? r2 : r2 * exp(num(-2) * pr("k1") * phiE()));
      return makeFieldSpec(A, Phi, p, axial ? dom("a", 0.2) : dom("ab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4, 2 v7 + v8}";
    r.gens = {gp(V(3)), gp(V(4)), gp(Rational(2) * V(7) + V(8))};
    r.freeParams = {"a1", "a2", "a3", "a4", "lambda"};
    r.defaults = {{"a1", Rational(1)}, {"a2", Rational(1, 2)}, {"a3", Rational(1, 3)},
                  {"a4", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap&) {
      Expr s = pow(rhoE(), num(-1, 2));
      VecExpr A{s * (pr("a1") * X() - pr("a2") * Y()),
                s * (pr("a1") * Y() + pr("a2") * X()), pr("a3") * sqrt(rhoE())};
      Expr Phi = pr("lambda") * Z() + pr("a4") * rhoE();
      return makeFieldSpec(A, Phi, p, dom("a"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4, v7 + v8}";
    r.gens = {gp(V(3)), gp(V(4)), gp(V(7) + V(8))};
    r.freeParams = {"a1", "a2", "lambda1", "lambda2", "lambda3", "lambda4"};
    r.defaults = {{"a1", Rational(1)},      {"a2", Rational(1, 2)},
                  {"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}, {"lambda4", Rational(1, 5)}};
    r.build = [](const RMap& p, const EMap&) {
      Expr s = num(1) / rhoE();
      Expr c2 = pr("a2") + pr("lambda1") * Z() / rhoE();
      VecExpr A{s * (pr("a1") * X() - Y() * c2), s * (pr("a1") * Y() + X() * c2),
                pr("lambda2") * ln(rhoE())};
      Expr Phi = pr("lambda3") * phiE() + pr("lambda4") * ln(rhoE());
      return makeFieldSpec(A, Phi, p, dom("ab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4, v7 + 2 v8}";
    r.gens = {gp(V(3)), gp(V(4)), gp(V(7) + Rational(2) * V(8))};
    r.freeParams = {"a1", "a2", "a3", "a4", "lambda"};
    r.defaults = {{"a1", Rational(1)}, {"a2", Rational(1, 2)}, {"a3", Rational(1, 3)},
                  {"a4", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap&) {
      Expr s = num(1) / rho2();
      Expr c2 = pr("a2") + pr("lambda") * ln(rhoE());
      VecExpr A{s * (pr("a1") * X() - Y() * c2), s * (pr("a1") * Y() + X() * c2),
                pr("a3") / rhoE()};
      Expr Phi = pr("a4") / rho2();
      return makeFieldSpec(A, Phi, p, dom("a", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4, v5, v6}";
    r.gens = {gp(V(4)), gp(V(5)), gp(V(6))};
    r.freeParams = {"lambda"};
    r.profileNames = {"G"};
    r.arity = 1;
    r.defaults = {{"lambda", Rational(1)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr s = pr("lambda") * Z() / (rE() * rho2());
      VecExpr A{s * Y(), -(s * X()), Expr::zero()};
      Expr Phi = sub1(f, "G", rE());
      return makeFieldSpec(A, Phi, p, dom("a", 0.2));
    };
    finish(r);
    r.profDefaults["G"] = Expr::zero();
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k1 v7 + k2 v8}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k1", V(7), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.freeParams = {"a1", "a2", "a4"};
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(2)}, {"a1", Rational(1)},
                  {"a2", Rational(1, 2)}, {"a4", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 6, p); };
    r.build = [](const RMap& p, const EMap&) {
      Expr q = num(1) - pr("k2") / pr("k1");
      Expr ang = ln(Z()) / pr("k1") + pr("a2");
      VecExpr A{pr("a1") * pow(Z(), q) * cos(ang), pr("a1") * pow(Z(), q) * sin(ang),
                Expr::zero()};
      Expr Phi = pr("a4") * pow(Z(), num(2) * q);
      return makeFieldSpec(A, Phi, p, dom("z", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k v7}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k", V(7))};
    r.kParams = {"k"};
    r.freeParams = {"a1", "a2", "a4", "lambda"};
    r.defaults = {{"k", Rational(1)}, {"a1", Rational(1)}, {"a2", Rational(1, 2)},
                  {"a4", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 7, p); };
    r.build = [](const RMap& p, const EMap&) {
      Expr ang = ln(Z()) / pr("k") + pr("a2");
      VecExpr A{pr("a1") * Z() * cos(ang) + pr("lambda") * Y(),
                pr("a1") * Z() * sin(ang), Expr::zero()};
      Expr Phi = pr("a4") * Z() * Z();
      return makeFieldSpec(A, Phi, p, dom("z"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k (v7 + v8)}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k", V(7) + V(8))};
    r.kParams = {"k"};
    r.freeParams = {"a1", "a2", "lambda"};
    r.defaults = {{"k", Rational(1)}, {"a1", Rational(1)}, {"a2", Rational(1, 2)},
                  {"lambda", Rational(1, 2)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 8, p); };
    r.build = [](const RMap& p, const EMap&) {
      Expr ang = ln(Z()) / pr("k") + pr("a2");
      VecExpr A{pr("a1") * cos(ang), pr("a1") * sin(ang), Expr::zero()};
      Expr Phi = pr("lambda") * ln(Z());
      return makeFieldSpec(A, Phi, p, dom("z"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k1 v3 + k2 v8}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k1", V(3), "k2", V(8))};
    r.kParams = {"k1", "k2"};
    r.freeParams = {"a1", "a2", "a4"};
    r.defaults = {{"k1", Rational(1)}, {"k2", Rational(1)}, {"a1", Rational(1)},
                  {"a2", Rational(1, 2)}, {"a4", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 9, p); };
    r.build = [](const RMap& p, const EMap&) {
      Expr s = exp(-(pr("k2") / pr("k1")) * Z());
      Expr ang = Z() / pr("k1") + pr("a2");
      VecExpr A{pr("a1") * s * cos(ang), pr("a1") * s * sin(ang), Expr::zero()};
      Expr Phi = pr("a4") * exp(num(-2) * (pr("k2") / pr("k1")) * Z());
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k v3}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k", V(3))};
    r.kParams = {"k"};
    r.freeParams = {"a1", "a2", "lambda1", "lambda2"};
    r.defaults = {{"k", Rational(1)}, {"a1", Rational(1)}, {"a2", Rational(1, 2)},
                  {"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 10, p); };
    r.build = [](const RMap& p, const EMap&) {
      Expr ang = Z() / pr("k") + pr("a2");
      VecExpr A{pr("a1") * cos(ang) + pr("lambda1") * Y(), pr("a1") * sin(ang),
                Expr::zero()};
      Expr Phi = pr("lambda2") * Z() / pr("k");
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3, v7 + k v8}";
    r.gens = {gp(V(2)), gp(V(3)), gp(V(7), "k", V(8))};
    r.kParams = {"k"};
    r.freeParams = {"a2", "a3", "a4"};
    r.defaults = {{"k", Rational(3)}, {"a2", Rational(1)}, {"a3", Rational(1, 2)},
                  {"a4", Rational(1)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 11, p); };
    r.caveat =
        "the magnetic field keeps a fixed direction; such fields admit "
        "point symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      Expr s = pow(X(), num(1) - pr("k"));
      VecExpr A{Expr::zero(), pr("a2") * s, pr("a3") * s};
      Expr Phi = pr("a4") * pow(X(), num(2) * (num(1) - pr("k")));
      return makeFieldSpec(A, Phi, p, dom("x", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3, v7}";
    r.gens = {gp(V(2)), gp(V(3)), gp(V(7))};
    r.freeParams = {"a2", "a3", "a4", "lambda"};
    r.defaults = {{"a2", Rational(1)}, {"a3", Rational(1, 2)}, {"a4", Rational(1)},
                  {"lambda", Rational(1, 2)}};
    r.caveat =
        "the equations of motion are linear; such fields admit point "
        "symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      VecExpr A{Expr::zero(), pr("a2") * X(), pr("a3") * X() + pr("lambda") * Y()};
      Expr Phi = pr("a4") * X() * X();
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3, 2 v7 + v8}";
    r.gens = {gp(V(2)), gp(V(3)), gp(Rational(2) * V(7) + V(8))};
    r.freeParams = {"a2", "a3", "a4", "lambda1", "lambda2"};
    r.defaults = {{"a2", Rational(1)}, {"a3", Rational(1, 2)}, {"a4", Rational(1)},
                  {"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.caveat =
        "the magnetic field keeps a fixed direction; such fields admit "
        "point symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      Expr s = sqrt(X());
      VecExpr A{Expr::zero(), pr("a2") * s, pr("a3") * s};
      Expr Phi = pr("a4") * X() + pr("lambda1") * Y() + pr("lambda2") * Z();
      return makeFieldSpec(A, Phi, p, dom("x"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3, v7 + v8}";
    r.gens = {gp(V(2)), gp(V(3)), gp(V(7) + V(8))};
    r.freeParams = {"lambda1", "lambda2", "lambda3"};
    r.defaults = {{"lambda1", Rational(1, 2)}, {"lambda2", Rational(1)},
                  {"lambda3", Rational(1, 3)}};
    r.caveat =
        "the magnetic field keeps a fixed direction; such fields admit "
        "point symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      VecExpr A{Expr::zero(), pr("lambda2") * ln(X()), pr("lambda3") * ln(X())};
      Expr Phi = pr("lambda1") * ln(X());
      return makeFieldSpec(A, Phi, p, dom("x", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1 + k1 v8, v2 + k2 v8, v3 + k3 v8}";
    r.gens = {gp(V(1), "k1", V(8)), gp(V(2), "k2", V(8)), gp(V(3), "k3", V(8))};
    r.kParams = {"k1", "k2", "k3"};
    r.freeParams = {"a1", "a2", "a3", "a4"};
    r.defaults = {{"k1", Rational(0)}, {"k2", Rational(0)}, {"k3", Rational(1)},
                  {"a1", Rational(1)}, {"a2", Rational(0)}, {"a3", Rational(0)},
                  {"a4", Rational(0)}};
    r.cond = [](const RMap& p) { return rowConditionsHold(4, 15, p); };
    r.caveat =
        "the magnetic field keeps a fixed direction; such fields admit "
        "point symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      Expr w = pr("k1") * X() + pr("k2") * Y() + pr("k3") * Z();
      Expr s = exp(-w);
      VecExpr A{pr("a1") * s, pr("a2") * s, pr("a3") * s};
      Expr Phi = pr("a4") * exp(num(-2) * w);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v3}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(3))};
    r.freeParams = {"lambda1", "lambda2", "lambda3", "lambda4", "lambda5", "lambda6"};
    r.defaults = {{"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}, {"lambda4", Rational(1)},
                  {"lambda5", Rational(1, 2)}, {"lambda6", Rational(1, 3)}};
    r.caveat =
        "the equations of motion are linear; such fields admit point "
        "symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      VecExpr A{Expr::zero(), pr("lambda4") * X(),
                pr("lambda5") * X() + pr("lambda6") * Y()};
      Expr Phi = pr("lambda1") * X() + pr("lambda2") * Y() + pr("lambda3") * Z();
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// tables 8 to 10: the c8 = 2 c7 subfamilies

std::vector<RowSpec> buildNoe2() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "v4 + k (v7 + 2 v8)";
    r.gens = {gp(V(4), "k", V(7) + Rational(2) * V(8))};
    r.kParams = {"k"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(1)}};
    r.cond = [](const RMap& p) { return p.at("k") != Rational(0); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE() / Z(), u2 = ln(Z()) - pr("k") * phiE();
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      Expr s = num(1) / (Z() * Z());
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                sub2(f, "F3", u1, u2) / Z()};
      Expr Phi = sub2(f, "G", u1, u2) / (Z() * Z());
      return makeFieldSpec(A, Phi, p, dom("zab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v4 + k v3";
    r.gens = {gp(V(4), "k", V(3))};
    r.kParams = {"k"};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"k", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = rhoE(), u2 = Z() - pr("k") * phiE();
      Expr F1 = sub2(f, "F1", u1, u2), F2 = sub2(f, "F2", u1, u2);
      VecExpr A{X() * F1 - Y() * F2, Y() * F1 + X() * F2, sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * phiE() + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v7 + 2 v8";
    r.gens = {gp(V(7) + Rational(2) * V(8))};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = Y() / X(), u2 = Z() / Y();
      Expr s = num(1) / X();
      VecExpr A{s * sub2(f, "F1", u1, u2), s * sub2(f, "F2", u1, u2),
                s * sub2(f, "F3", u1, u2)};
      Expr Phi = sub2(f, "G", u1, u2) / (X() * X());
      return makeFieldSpec(A, Phi, p, dom("xy", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "v3";
    r.gens = {gp(V(3))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 2;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u1 = X(), u2 = Y();
      VecExpr A{sub2(f, "F1", u1, u2), sub2(f, "F2", u1, u2), sub2(f, "F3", u1, u2)};
      Expr Phi = pr("lambda") * Z() + sub2(f, "G", u1, u2);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RowSpec> buildNoe3() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "{v3, v4 + k (v7 + 2 v8)}";
    r.gens = {gp(V(3)), gp(V(4), "k", V(7) + Rational(2) * V(8))};
    r.kParams = {"k"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"k", Rational(1)}};
    r.cond = [](const RMap& p) { return p.at("k") != Rational(0); };
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = ln(rhoE()) - pr("k") * phiE();
      Expr s = exp(num(-2) * pr("k") * phiE());
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                exp(-(pr("k") * phiE())) * sub1(f, "F3", u)};
      Expr Phi = s * sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab"));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v4}";
    r.gens = {gp(V(3)), gp(V(4))};
    r.freeParams = {"lambda1", "lambda2", "lambda3"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)},
                  {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}};
    r.caveat =
        "the lambda3 term here is the gradient of lambda3 z atan2(y, x), so a "
        "z translation only shifts the potential by a gauge term; table 6 "
        "row 5 prints a variant that loses the v3 symmetry";
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE();
      Expr F1 = sub1(f, "F1", u), F2 = sub1(f, "F2", u);
      VecExpr A{X() * F1 - Y() * F2 - pr("lambda3") * Y() * Z() / rho2(),
                Y() * F1 + X() * F2 + pr("lambda3") * X() * Z() / rho2(),
                sub1(f, "F3", u)};
      Expr Phi = pr("lambda1") * Z() + pr("lambda2") * phiE() + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom("ab", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4, v7 + 2 v8}";
    r.gens = {gp(V(4)), gp(V(7) + Rational(2) * V(8))};
    r.freeParams = {"lambda"};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.defaults = {{"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = rhoE() / Z();
      Expr F1 = sub1(f, "F1", u);
      Expr F2 = sub1(f, "F2", u) + pr("lambda") * ln(rhoE());
      Expr s = num(1) / rho2();
      VecExpr A{s * (X() * F1 - Y() * F2), s * (Y() * F1 + X() * F2),
                sub1(f, "F3", u) / Z()};
      Expr Phi = sub1(f, "G", u) / (Z() * Z());
      return makeFieldSpec(A, Phi, p, dom("za", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v3, v7 + 2 v8}";
    r.gens = {gp(V(3)), gp(V(7) + Rational(2) * V(8))};
    r.profileNames = kAllProfiles;
    r.arity = 1;
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = Y() / X();
      Expr s = num(1) / X();
      VecExpr A{s * sub1(f, "F1", u), s * sub1(f, "F2", u), s * sub1(f, "F3", u)};
      Expr Phi = sub1(f, "G", u) / (X() * X());
      return makeFieldSpec(A, Phi, p, dom("x", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3}";
    r.gens = {gp(V(2)), gp(V(3))};
    r.freeParams = {"lambda1", "lambda2", "lambda3"};
    r.profileNames = {"F2", "F3", "G"};
    r.arity = 1;
    r.defaults = {{"lambda1", Rational(1, 2)},
                  {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr u = X();
      VecExpr A{Expr::zero(), sub1(f, "F2", u),
                pr("lambda3") * Y() + sub1(f, "F3", u)};
      Expr Phi = pr("lambda1") * Y() + pr("lambda2") * Z() + sub1(f, "G", u);
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RowSpec> buildNoe4() {
  std::vector<RowSpec> rows;

  {
    RowSpec r;
    r.display = "{v3, v4, v7 + 2 v8}";
    r.gens = {gp(V(3)), gp(V(4)), gp(V(7) + Rational(2) * V(8))};
    r.freeParams = {"a1", "a2", "a3", "a4", "lambda"};
    r.defaults = {{"a1", Rational(1)}, {"a2", Rational(1, 2)}, {"a3", Rational(1, 3)},
                  {"a4", Rational(1)}, {"lambda", Rational(1, 2)}};
    r.build = [](const RMap& p, const EMap&) {
      Expr s = num(1) / rho2();
      Expr c2 = pr("a2") + pr("lambda") * ln(rhoE());
      VecExpr A{s * (pr("a1") * X() - Y() * c2), s * (pr("a1") * Y() + X() * c2),
                pr("a3") / rhoE()};
      Expr Phi = pr("a4") / rho2();
      return makeFieldSpec(A, Phi, p, dom("a", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v4, v5, v6}";
    r.gens = {gp(V(4)), gp(V(5)), gp(V(6))};
    r.freeParams = {"lambda"};
    r.profileNames = {"G"};
    r.arity = 1;
    r.defaults = {{"lambda", Rational(1)}};
    r.build = [](const RMap& p, const EMap& f) {
      Expr s = pr("lambda") * Z() / (rE() * rho2());
      VecExpr A{s * Y(), -(s * X()), Expr::zero()};
      Expr Phi = sub1(f, "G", rE());
      return makeFieldSpec(A, Phi, p, dom("a", 0.2));
    };
    finish(r);
    r.profDefaults["G"] = Expr::zero();
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k (v7 + 2 v8)}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k", V(7) + Rational(2) * V(8))};
    r.kParams = {"k"};
    r.freeParams = {"a1", "a2", "a4"};
    r.defaults = {{"k", Rational(1)}, {"a1", Rational(1)}, {"a2", Rational(1, 2)},
                  {"a4", Rational(1)}};
    r.cond = [](const RMap& p) { return p.at("k") != Rational(0); };
    r.build = [](const RMap& p, const EMap&) {
      Expr ang = ln(Z()) / pr("k") + pr("a2");
      VecExpr A{pr("a1") * cos(ang) / Z(), pr("a1") * sin(ang) / Z(), Expr::zero()};
      Expr Phi = pr("a4") / (Z() * Z());
      return makeFieldSpec(A, Phi, p, dom("z", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v4 + k v3}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(4), "k", V(3))};
    r.kParams = {"k"};
    r.freeParams = {"a1", "a2", "lambda1", "lambda2"};
    r.defaults = {{"k", Rational(1)}, {"a1", Rational(1)}, {"a2", Rational(1, 2)},
                  {"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)}};
    r.cond = [](const RMap& p) { return p.at("k") != Rational(0); };
    r.build = [](const RMap& p, const EMap&) {
      Expr ang = Z() / pr("k") + pr("a2");
      VecExpr A{pr("a1") * cos(ang) + pr("lambda1") * Y(), pr("a1") * sin(ang),
                Expr::zero()};
      Expr Phi = pr("lambda2") * Z() / pr("k");
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v2, v3, v7 + 2 v8}";
    r.gens = {gp(V(2)), gp(V(3)), gp(V(7) + Rational(2) * V(8))};
    r.freeParams = {"a2", "a3", "a4"};
    r.defaults = {{"a2", Rational(1)}, {"a3", Rational(1, 2)}, {"a4", Rational(1)}};
    r.caveat =
        "the magnetic field keeps a fixed direction; such fields admit "
        "point symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      VecExpr A{Expr::zero(), pr("a2") / X(), pr("a3") / X()};
      Expr Phi = pr("a4") / (X() * X());
      return makeFieldSpec(A, Phi, p, dom("x", 0.2));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  {
    RowSpec r;
    r.display = "{v1, v2, v3}";
    r.gens = {gp(V(1)), gp(V(2)), gp(V(3))};
    r.freeParams = {"lambda1", "lambda2", "lambda3", "lambda4", "lambda5", "lambda6"};
    r.defaults = {{"lambda1", Rational(1, 2)}, {"lambda2", Rational(1, 3)},
                  {"lambda3", Rational(1, 4)}, {"lambda4", Rational(1)},
                  {"lambda5", Rational(1, 2)}, {"lambda6", Rational(1, 3)}};
    r.caveat =
        "the equations of motion are linear; such fields admit point "
        "symmetries beyond the generators listed here";
    r.build = [](const RMap& p, const EMap&) {
      VecExpr A{Expr::zero(), pr("lambda4") * X(),
                pr("lambda5") * X() + pr("lambda6") * Y()};
      Expr Phi = pr("lambda1") * X() + pr("lambda2") * Y() + pr("lambda3") * Z();
      return makeFieldSpec(A, Phi, p, dom(""));
    };
    finish(r);
    rows.push_back(std::move(r));
  }
  return rows;
}

const std::vector<RowSpec>& tableRows(FieldTable t) {
  static const std::vector<RowSpec> t5 = buildSym2();
  static const std::vector<RowSpec> t6 = buildSym3();
  static const std::vector<RowSpec> t7 = buildSym4();
  static const std::vector<RowSpec> t8 = buildNoe2();
  static const std::vector<RowSpec> t9 = buildNoe3();
  static const std::vector<RowSpec> t10 = buildNoe4();
  switch (t) {
    case FieldTable::Sym2: return t5;
    case FieldTable::Sym3: return t6;
    case FieldTable::Sym4: return t7;
    case FieldTable::Noe2: return t8;
    case FieldTable::Noe3: return t9;
    case FieldTable::Noe4: return t10;
  }
  throw std::invalid_argument("unknown field table");
}

const RowSpec& rowSpec(FieldTable t, int row) {
  const auto& rows = tableRows(t);
  if (row < 1 || row > static_cast<int>(rows.size()))
    throw std::invalid_argument(fieldTableName(t) + " has rows 1 to " +
                                std::to_string(rows.size()));
  return rows[static_cast<std::size_t>(row - 1)];
}

bool listed(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

// ---------------------------------------------------------------------------

int tableIndex(FieldTable t) { return static_cast<int>(t); }

std::string fieldTableName(FieldTable t) {
  switch (t) {
    case FieldTable::Sym2: return "sym2";
    case FieldTable::Sym3: return "sym3";
    case FieldTable::Sym4: return "sym4";
    case FieldTable::Noe2: return "noe2";
    case FieldTable::Noe3: return "noe3";
    case FieldTable::Noe4: return "noe4";
  }
  throw std::invalid_argument("unknown field table");
}

FieldTable fieldTableFromName(const std::string& name) {
  for (FieldTable t : allFieldTables())
    if (fieldTableName(t) == name) return t;
  throw std::invalid_argument("unknown field table '" + name + "'");
}

int catalogRowCount(FieldTable t) { return static_cast<int>(tableRows(t).size()); }

std::vector<FieldTable> allFieldTables() {
  return {FieldTable::Sym2, FieldTable::Sym3, FieldTable::Sym4,
          FieldTable::Noe2, FieldTable::Noe3, FieldTable::Noe4};
}

CatalogRowInfo catalogRowInfo(FieldTable t, int row) {
  const RowSpec& r = rowSpec(t, row);
  return {r.display, r.kParams, r.freeParams, r.profileNames, r.arity, r.caveat};
}

std::string catalogRowReference(FieldTable t, int row) {
  return "Table " + std::to_string(tableIndex(t)) + " row " + std::to_string(row);
}

bool catalogConditionsHold(FieldTable t, int row, const RMap& params) {
  const RowSpec& r = rowSpec(t, row);
  RMap p = r.defaults;
  for (const auto& [name, v] : params) p[name] = v;
  return r.cond ? r.cond(p) : true;
}

RMap catalogDefaultParams(FieldTable t, int row) { return rowSpec(t, row).defaults; }

EMap catalogDefaultProfiles(FieldTable t, int row) { return rowSpec(t, row).profDefaults; }

std::vector<Vec9<Rational>> catalogGenerators(FieldTable t, int row, const RMap& params) {
  const RowSpec& r = rowSpec(t, row);
  RMap p = r.defaults;
  for (const auto& [name, v] : params) {
    if (!listed(r.kParams, name) && !listed(r.freeParams, name))
      throw std::invalid_argument("unknown parameter '" + name + "' for " +
                                  catalogRowReference(t, row));
    p[name] = v;
  }
  std::vector<Vec9<Rational>> out;
  out.reserve(r.gens.size());
  for (const auto& g : r.gens) {
    Vec9<Rational> v = g.base;
    for (const auto& [name, dir] : g.dirs) v += p.at(name) * dir;
    out.push_back(v);
  }
  return out;
}

FieldSpec catalogInstance(const CatalogKey& key) {
  const RowSpec& r = rowSpec(key.table, key.row);
  const std::string ref = catalogRowReference(key.table, key.row);

  RMap p = r.defaults;
  for (const auto& [name, v] : key.params) {
    if (!listed(r.kParams, name) && !listed(r.freeParams, name))
      throw std::invalid_argument("unknown parameter '" + name + "' for " + ref);
    p[name] = v;
  }
  if (r.cond && !r.cond(p))
    throw std::invalid_argument("side condition violated for " + ref);

  EMap f = r.profDefaults;
  for (const auto& [name, e] : key.profiles) {
    if (!listed(r.profileNames, name))
      throw std::invalid_argument("unknown profile '" + name + "' for " + ref);
    f[name] = e;
  }
  std::set<std::string> allowed;
  if (r.arity == 1) allowed.insert("u");
  if (r.arity == 2) {
    allowed.insert("u1");
    allowed.insert("u2");
  }
  for (const auto& name : r.kParams) allowed.insert(name);
  for (const auto& name : r.freeParams) allowed.insert(name);
  for (const auto& [name, e] : f) {
    std::set<std::string> used;
    collectParams(e, used);
    for (const auto& sym : used)
      if (!allowed.count(sym))
        throw std::invalid_argument("profile " + name + " references undefined symbol '" +
                                    sym + "' for " + ref);
  }
  return r.build(p, f);
}

FieldSpec stormerField() {
  Expr r3 = pow(rho2() + Z() * Z(), num(3, 2));
  VecExpr A{-(Y() / r3), X() / r3, Expr::zero()};
  DomainHint d;
  d.offOrigin = true;
  return makeFieldSpec(A, Expr::zero(), {}, d);
}

FieldSpec monopoleField(Rational lambda, const Expr& phiOfR) {
  Expr s = pr("lambda") * Z() / (rE() * rho2());
  VecExpr A{s * Y(), -(s * X()), Expr::zero()};
  Expr Phi = substituteParams(phiOfR, {{"u", rE()}});
  DomainHint d;
  d.offAxisZ = true;
  d.margin = 0.2;
  return makeFieldSpec(A, Phi, {{"lambda", lambda}}, d);
}

// ---------------------------------------------------------------------------
// matching a detected symmetry span against the catalog

namespace {

Rational snapRational(double v) {
  for (std::int64_t den = 1; den <= 12; ++den) {
    double s = v * static_cast<double>(den);
    double r = std::round(s);
    if (std::abs(s - r) <= 1e-6 * static_cast<double>(den) && std::abs(r) < 9e15)
      return Rational(static_cast<std::int64_t>(r), den);
  }
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int it = 0; it < 40; ++it) {
    double fl = std::floor(x);
    if (std::abs(fl) > 9e15) break;
    auto a = static_cast<std::int64_t>(fl);
    std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > 1000000 || q2 < 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = x - fl;
    if (frac < 1e-12) break;
    x = 1.0 / frac;
  }
  if (q1 <= 0) return Rational(0);
  return Rational(p1, q1);
}

}  // namespace

std::vector<CatalogMatch> matchDetectedSpan(const std::vector<Vec8<double>>& basis,
                                            bool noether, double tol) {
  std::vector<CatalogMatch> out;
  const int dim = static_cast<int>(basis.size());
  if (dim == 0) return out;
  static const FieldTable symSeq[3] = {FieldTable::Sym2, FieldTable::Sym3,
                                       FieldTable::Sym4};
  static const FieldTable noeSeq[3] = {FieldTable::Noe2, FieldTable::Noe3,
                                       FieldTable::Noe4};
  const int gc = dim < 3 ? dim : 3;
  FieldTable t = (noether ? noeSeq : symSeq)[gc - 1];

  const auto& rows = tableRows(t);
  for (int row = 1; row <= static_cast<int>(rows.size()); ++row) {
    const RowSpec& r = rows[static_cast<std::size_t>(row - 1)];
    const int nk = static_cast<int>(r.kParams.size());
    const int ng = static_cast<int>(r.gens.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(8 * ng, nk + ng * dim);
    Eigen::VectorXd b(8 * ng);
    for (int g = 0; g < ng; ++g) {
      for (int i = 0; i < 8; ++i) b[8 * g + i] = r.gens[g].base[i].toDouble();
      for (const auto& [name, dir] : r.gens[g].dirs) {
        auto it = std::find(r.kParams.begin(), r.kParams.end(), name);
        int col = static_cast<int>(it - r.kParams.begin());
        for (int i = 0; i < 8; ++i) M(8 * g + i, col) = -dir[i].toDouble();
      }
      for (int j = 0; j < dim; ++j)
        for (int i = 0; i < 8; ++i) M(8 * g + i, nk + g * dim + j) = basis[j][i];
    }
    Eigen::VectorXd u =
        M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    double rel = (b - M * u).norm() / (1.0 + b.norm());
    if (rel > tol) continue;

    RMap fitted;
    for (int j = 0; j < nk; ++j) fitted[r.kParams[j]] = snapRational(u[j]);
    RMap full = r.defaults;
    for (const auto& [name, v] : fitted) full[name] = v;
    if (r.cond && !r.cond(full)) continue;
    out.push_back({t, row, fitted, rel, catalogRowReference(t, row)});
  }
  return out;
}

std::string formatRational(const Rational& r) {
  std::string s = std::to_string(r.num());
  if (r.den() != 1) s += "/" + std::to_string(r.den());
  return s;
}

std::string catalogMatchLabel(const CatalogMatch& match) {
  const RowSpec& r = rowSpec(match.table, match.row);
  std::string s = match.reference.empty()
                      ? catalogRowReference(match.table, match.row)
                      : match.reference;
  std::string args;
  for (const auto& name : r.kParams) {
    auto it = match.params.find(name);
    if (it == match.params.end()) continue;
    if (!args.empty()) args += ",";
    args += name + "=" + formatRational(it->second);
  }
  if (!args.empty()) s += " (" + args + ")";
  return s;
}

}  // namespace lorsym
