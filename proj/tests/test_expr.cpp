#include <doctest.h>

#include <cmath>
#include <random>

#include "lorsym/expr.hpp"

using namespace lorsym;

namespace {

double evalAt(const Expr& e, double x, double y, double z,
              const std::map<std::string, double>* params = nullptr) {
  return evaluate(e, EvalContext(x, y, z, params));
}

/// Five-point central difference, the independent derivative oracle.
double centralDiff(const Expr& e, int axis, double x, double y, double z,
                   double h = 1e-4) {
  auto f = [&](double t) {
    double p[3] = {x, y, z};
    p[axis] += t;
    return evalAt(e, p[0], p[1], p[2]);
  };
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

/// Random expression trees over x,y,z with bounded depth, built to stay
/// finite near the sample box (no singular denominators by construction).
Expr randomTree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> leaf(0, 4);
  std::uniform_int_distribution<int> op(0, 8);
  std::uniform_int_distribution<std::int64_t> num(-5, 5);
  std::uniform_int_distribution<std::int64_t> den(1, 4);
  if (depth <= 0 || leaf(rng) == 0) {
    switch (leaf(rng) % 4) {
      case 0: return Expr::variable(0);
      case 1: return Expr::variable(1);
      case 2: return Expr::variable(2);
      default: return Expr::number(Rational(num(rng), den(rng)));
    }
  }
  Expr a = randomTree(rng, depth - 1);
  Expr b = randomTree(rng, depth - 1);
  switch (op(rng)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (b * b + Expr::number(Rational(3, 2)));  // keep denominator positive
    case 4: return sin(a);
    case 5: return cos(a);
    case 6: return exp(Expr::number(Rational(1, 4)) * sin(a));  // bounded argument
    case 7: return sqrt(a * a + Expr::number(Rational(1, 2)));
    case 8: return pow(a * a + Expr::number(Rational(1)), Expr::number(Rational(1, 3)));
  }
  return a;
}

}  // namespace

TEST_CASE("parse basic forms") {
  Expr e = parseExpr("x^2 + y");
  CHECK(evalAt(e, 3, 4, 0) == doctest::Approx(13.0));

  // power binds tighter than product, product tighter than sum
  CHECK(evalAt(parseExpr("2*x^3 - y/4"), 2, 8, 0) == doctest::Approx(14.0));
  // right-associative power
  CHECK(evalAt(parseExpr("2^3^2"), 0, 0, 0) == doctest::Approx(512.0));
  // unary minus is a grammar base: -x^2 parses as (-x)^2
  CHECK(evalAt(parseExpr("-x^2"), 3, 0, 0) == doctest::Approx(9.0));
  CHECK(evalAt(parseExpr("-(x^2)"), 3, 0, 0) == doctest::Approx(-9.0));

  std::map<std::string, double> params{{"k", 2.0}, {"a2", M_PI / 2}};
  CHECK(evalAt(parseExpr("sin(z/k + a2)"), 0, 0, 0, &params) == doctest::Approx(1.0));
  CHECK(evalAt(parseExpr("atan2(y, x)"), 1, 1, 0) == doctest::Approx(M_PI / 4));
}

TEST_CASE("parse dipole component and round trip") {
  Expr a1 = parseExpr("-y/(x^2+y^2+z^2)^(3/2)");
  CHECK(evalAt(a1, 0, 1, 0) == doctest::Approx(-1.0));
  CHECK(evalAt(a1, 1, 1, 1) == doctest::Approx(-1.0 / std::pow(3.0, 1.5)));

  std::string once = printExpr(a1);
  std::string twice = printExpr(parseExpr(once));
  CHECK(once == twice);
  CHECK(evalAt(parseExpr(once), 0.3, -0.4, 1.1) ==
        doctest::Approx(evalAt(a1, 0.3, -0.4, 1.1)).epsilon(1e-14));
}

TEST_CASE("parse errors carry byte offsets") {
  CHECK_THROWS_AS(parseExpr("x + * y"), ParseError);
  try {
    parseExpr("x + * y");
  } catch (const ParseError& pe) {
    CHECK(pe.offset == 4);
  }
  CHECK_THROWS_AS(parseExpr("foo(x)"), ParseError);       // unknown function
  CHECK_THROWS_AS(parseExpr("sin(x, y)"), ParseError);    // arity
  CHECK_THROWS_AS(parseExpr("atan2(x)"), ParseError);     // arity
  CHECK_THROWS_AS(parseExpr("(x + y"), ParseError);       // unbalanced
  CHECK_THROWS_AS(parseExpr("x + y)"), ParseError);       // trailing
}

TEST_CASE("evaluation domain errors are reported") {
  CHECK_THROWS_AS(evalAt(parseExpr("ln(x)"), -1, 0, 0), EvalError);
  CHECK_THROWS_AS(evalAt(parseExpr("ln(x)"), 0, 0, 0), EvalError);
  CHECK_THROWS_AS(evalAt(parseExpr("sqrt(x)"), -0.5, 0, 0), EvalError);
  CHECK_THROWS_AS(evalAt(parseExpr("1/x"), 0, 0, 0), EvalError);
  CHECK_THROWS_AS(evalAt(parseExpr("x^(1/2)"), -2, 0, 0), EvalError);
  CHECK_THROWS_AS(evalAt(parseExpr("k + 1"), 0, 0, 0), EvalError);  // unbound
  // integer powers of negative bases are fine
  CHECK(evalAt(parseExpr("x^3"), -2, 0, 0) == doctest::Approx(-8.0));
  CHECK(evalAt(parseExpr("x^(-2)"), -2, 0, 0) == doctest::Approx(0.25));
}

TEST_CASE("differentiate elementary rules") {
  // d/dx x^3 = 3x^2
  Expr d = differentiate(parseExpr("x^3"), 0);
  CHECK(evalAt(d, 2, 0, 0) == doctest::Approx(12.0));
  // d/dy ln(x^2 + y^2) = 2y/(x^2+y^2)
  d = differentiate(parseExpr("ln(x^2 + y^2)"), 1);
  CHECK(evalAt(d, 1, 2, 0) == doctest::Approx(4.0 / 5.0));
  // d/dx atan2(y, x) = -y/(x^2+y^2)
  d = differentiate(parseExpr("atan2(y, x)"), 0);
  CHECK(evalAt(d, 1, 2, 0) == doctest::Approx(-2.0 / 5.0));
  // d/dy atan2(y, x) = x/(x^2+y^2)
  d = differentiate(parseExpr("atan2(y, x)"), 1);
  CHECK(evalAt(d, 1, 2, 0) == doctest::Approx(1.0 / 5.0));
  // fractional power through e^{b ln a}
  d = differentiate(parseExpr("x^(3/2)"), 0);
  CHECK(evalAt(d, 4, 0, 0) == doctest::Approx(3.0));
}

TEST_CASE("derivative of dipole component matches central differences") {
  Expr a1 = parseExpr("-y/(x^2+y^2+z^2)^(3/2)");
  for (int axis = 0; axis < 3; ++axis) {
    Expr d = differentiate(a1, axis);
    double exact = evalAt(d, 1, 1, 1);
    double fd = centralDiff(a1, axis, 1, 1, 1);
    CHECK(std::abs(exact - fd) < 1e-8 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("property: eval(differentiate) matches central differences on random trees") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> coord(0.4, 1.3);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Expr e = randomTree(rng, 6);
    double x = coord(rng), y = coord(rng), z = coord(rng);
    for (int axis = 0; axis < 3; ++axis) {
      Expr d = differentiate(e, axis);
      double val, fd;
      try {
        val = evalAt(d, x, y, z);
        fd = centralDiff(e, axis, x, y, z);
      } catch (const EvalError&) {
        continue;  // tree hit a domain edge at this point; skip
      }
      if (!std::isfinite(val) || !std::isfinite(fd)) continue;
      // guard against sharp local curvature spoiling the finite difference
      if (std::abs(val) > 1e4) continue;
      ++checked;
      CHECK(std::abs(val - fd) <= 1e-6 * (1.0 + std::abs(val)));
    }
  }
  CHECK(checked > 2000);
}

TEST_CASE("property: print-parse-print is idempotent on random trees") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 1000; ++trial) {
    Expr e = randomTree(rng, 5);
    std::string s1 = printExpr(e);
    Expr back = parseExpr(s1);
    std::string s2 = printExpr(back);
    REQUIRE(s1 == s2);
    double v1, v2;
    try {
      v1 = evalAt(e, 0.7, 0.9, 1.1);
      v2 = evalAt(back, 0.7, 0.9, 1.1);
    } catch (const EvalError&) {
      continue;
    }
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-13));
  }
}

TEST_CASE("simplify preserves value and applies listed identities") {
  Expr x = Expr::variable(0);
  CHECK(simplify(x + Expr::zero()).op() == ExprOp::Var);
  CHECK(simplify(x * Expr::one()).op() == ExprOp::Var);
  CHECK(simplify(x * Expr::zero()).isConstZero());
  CHECK(simplify(pow(x, Expr::zero())).isConstOne());
  CHECK(simplify(-(-x)).op() == ExprOp::Var);
  Expr quotient = (x * x + Expr::one()) / (x * x + Expr::one());
  CHECK(simplify(quotient).isConstOne());
  // constant folding stays exact on rationals
  Expr c = simplify(Expr::number(Rational(1, 3)) + Expr::number(Rational(1, 6)));
  REQUIRE(c.isConst());
  CHECK(c.node().exact);
  CHECK(c.node().q == Rational(1, 2));

  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 300; ++trial) {
    Expr e = randomTree(rng, 5);
    Expr s = simplify(e);
    double v1, v2;
    try {
      v1 = evalAt(e, 1.2, 0.8, 0.6);
      v2 = evalAt(s, 1.2, 0.8, 0.6);
    } catch (const EvalError&) {
      continue;
    }
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
  }
}

TEST_CASE("gradient, curl, divergence") {
  // curl(-y, x, 0) = (0, 0, 2)
  VecExpr v{parseExpr("-y"), parseExpr("x"), Expr::zero()};
  VecExpr c = curl(v);
  Eigen::Vector3d cv = evaluate(c, EvalContext(0.3, -0.8, 0.5));
  CHECK(cv.x() == doctest::Approx(0.0));
  CHECK(cv.y() == doctest::Approx(0.0));
  CHECK(cv.z() == doctest::Approx(2.0));

  // curl of the dipole potential at (0,0,2) equals (0,0,1/4);
  // cross-checked against a finite-difference curl oracle
  VecExpr dip{parseExpr("-y/(x^2+y^2+z^2)^(3/2)"),
              parseExpr("x/(x^2+y^2+z^2)^(3/2)"), Expr::zero()};
  VecExpr b = curl(dip);
  Eigen::Vector3d bv = evaluate(b, EvalContext(0.0, 0.0, 2.0));
  CHECK(bv.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bv.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bv.z() == doctest::Approx(0.25));

  auto fdCurl = [&](const VecExpr& w, double x, double y, double z) {
    auto comp = [&](int i, int axis) { return centralDiff(w[i], axis, x, y, z); };
    return Eigen::Vector3d(comp(2, 1) - comp(1, 2), comp(0, 2) - comp(2, 0),
                           comp(1, 0) - comp(0, 1));
  };
  Eigen::Vector3d oracle = fdCurl(dip, 0.0, 0.0, 2.0);
  CHECK((bv - oracle).norm() < 1e-8);

  // div(curl(A)) vanishes identically; sampled for the dipole
  Expr dc = divergence(b);
  for (double t : {0.3, 0.9, 1.7}) {
    CHECK(std::abs(evalAt(dc, t, 0.2 * t, -0.5 * t + 1.0)) < 1e-9);
  }

  // curl(grad(f)) vanishes identically; sampled
  Expr f = parseExpr("exp(x)*sin(y) + z^2*x");
  VecExpr cg = curl(gradient(f));
  for (double t : {0.2, 0.8, 1.5}) {
    Eigen::Vector3d w = evaluate(cg, EvalContext(t, 1.0 - t, 0.5 * t));
    CHECK(w.norm() < 1e-9);
  }
}

TEST_CASE("substitution") {
  Expr profile = parseExpr("u/(1 + u^2)");
  Expr u = parseExpr("sqrt(x^2+y^2)/z");
  Expr composed = substituteParams(profile, {{"u", u}});
  double uval = std::hypot(1.0, 2.0) / 2.0;
  CHECK(evalAt(composed, 1, 2, 2) == doctest::Approx(uval / (1 + uval * uval)));

  // variable substitution composes coordinates
  Expr g = parseExpr("x*y + z");
  Expr moved = substituteVars(g, {parseExpr("x + 1"), parseExpr("2*y"), parseExpr("z - 3")});
  CHECK(evalAt(moved, 1, 1, 1) == doctest::Approx(2.0 * 2.0 - 2.0));

  std::set<std::string> names;
  collectParams(parseExpr("k1*x + lambda*sin(k2*z)"), names);
  CHECK(names == std::set<std::string>{"k1", "k2", "lambda"});
}

TEST_CASE("opaque numeric nodes evaluate but do not differentiate") {
  Expr f = Expr::numeric([](double x, double y, double) { return x * x + y; }, "probe");
  CHECK(evalAt(f, 3, 1, 0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(differentiate(f, 0), std::logic_error);
  CHECK(containsNumFn(f + Expr::one()));
  CHECK_FALSE(containsNumFn(parseExpr("x + 1")));
}

TEST_CASE("exact rational constants promote to float only at evaluation") {
  Expr e = parseExpr("1/3");
  // the tree keeps the exact division; folding yields the exact rational
  Expr s = simplify(e);
  REQUIRE(s.isConst());
  CHECK(s.node().exact);
  CHECK(s.node().q == Rational(1, 3));
  CHECK(evaluate(s, EvalContext()) == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}
