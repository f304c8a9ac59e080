#include <doctest.h>

#include <Eigen/Core>

#include "lorsym/rational.hpp"

using lorsym::Rational;

TEST_CASE("rational normalization and arithmetic") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(-6, 4) == Rational(-3, 2));
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(0, 7) == Rational(0));

  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
  CHECK(-Rational(5, 7) == Rational(-5, 7));

  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(7, 2).toDouble() == doctest::Approx(3.5));
}

TEST_CASE("rational errors") {
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
  const std::int64_t big = std::numeric_limits<std::int64_t>::max();
  CHECK_THROWS_AS(Rational(big) + Rational(big), std::overflow_error);
  CHECK_THROWS_AS(Rational(big) * Rational(2), std::overflow_error);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational::parse("-3/4") == Rational(-3, 4));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("2.5e-3") == Rational(1, 400));
  CHECK(Rational::parse(" 12/8 ") == Rational(3, 2));
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/2x"), std::invalid_argument);
  CHECK(Rational(22, 7).str() == "22/7");
  CHECK(Rational(-5).str() == "-5");
}

TEST_CASE("rational works as an Eigen scalar") {
  Eigen::Matrix<Rational, 3, 1> a, b;
  a << Rational(1, 2), Rational(2, 3), Rational(-1);
  b << Rational(2), Rational(3), Rational(1, 4);
  Eigen::Matrix<Rational, 3, 1> s = a + b;
  CHECK(s[0] == Rational(5, 2));
  CHECK(s[1] == Rational(11, 3));
  CHECK(s[2] == Rational(-3, 4));
  Rational dot = a.dot(b);
  CHECK(dot == Rational(1) + Rational(2) - Rational(1, 4));
}
