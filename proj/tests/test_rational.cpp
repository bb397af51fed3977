#include "doctest.h"
#include "macsim/rational.hpp"

using macsim::Rational;

TEST_CASE("rational normalization and equality") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(1, -2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(6, 3).is_integer());
  CHECK(Rational(6, 3).num() == 2);
}

TEST_CASE("rational arithmetic stays exact") {
  Rational third(1, 3);
  CHECK(third + third + third == Rational(1));
  CHECK(Rational(1, 3) * Rational(3) == Rational(1));
  CHECK(Rational(1) - Rational(1, 10) == Rational(9, 10));
  CHECK(Rational(3, 4) / Rational(1, 2) == Rational(3, 2));
  Rational acc(0);
  for (int i = 0; i < 700; ++i) acc += Rational(1, 7);
  CHECK(acc == Rational(100));
}

TEST_CASE("rational ordering uses cross multiplication") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(2, 6) <= Rational(1, 3));
  CHECK(Rational(7, 2) > Rational(3));
  // Values whose doubles would round equal stay distinct.
  CHECK(Rational(1000000000000000001LL, 1000000000000000000LL) > Rational(1));
}

TEST_CASE("rational floor and ceil") {
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(6, 3).floor() == 2);
  CHECK(Rational(7, 2).ceil() == 4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(0).floor() == 0);
}

TEST_CASE("rational parsing accepts p and p/q only") {
  CHECK(*Rational::parse("3") == Rational(3));
  CHECK(*Rational::parse("1/2") == Rational(1, 2));
  CHECK(*Rational::parse("-3/6") == Rational(-1, 2));
  CHECK(!Rational::parse("0.5"));
  CHECK(!Rational::parse(""));
  CHECK(!Rational::parse("1/0"));
  CHECK(!Rational::parse("a/b"));
  CHECK(!Rational::parse("1/2/3"));
}

TEST_CASE("rational string round-trip") {
  for (int num = -12; num <= 12; ++num)
    for (int den = 1; den <= 9; ++den) {
      Rational r(num, den);
      CHECK(*Rational::parse(r.str()) == r);
    }
}

TEST_CASE("rational division by zero throws") {
  CHECK_THROWS(Rational(1, 0));
  CHECK_THROWS(Rational(1) / Rational(0));
}
