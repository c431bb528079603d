#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fftower/series.hpp"

using namespace fftower;

TEST_CASE("basic arithmetic and precision tracking") {
  const Field& f = field_make(3, 1);
  LSeries t = LSeries::t(f);
  // (1 + t)(1 - t) = 1 - t^2 exactly
  LSeries a = add(LSeries::one(f), t);
  LSeries b = sub(LSeries::one(f), t);
  LSeries p = mul(a, b);
  CHECK(p.isExact());
  CHECK(p.at(0).isOne());
  CHECK(p.at(1).isZero());
  CHECK(p.at(2) == f.fromInt(2));
  CHECK(p.at(5).isZero());

  // truncation: multiplying by O(t^3)-known series
  LSeries c = a.truncated(3);
  LSeries q = mul(c, c);
  CHECK(q.end() == 3);
  CHECK(q.at(2) == f.fromInt(1));  // (1+t)^2 = 1 + 2t + t^2
  CHECK_THROWS_AS(q.at(3), FieldError);
}

TEST_CASE("inverse and division") {
  const Field& f = field_make(5, 1);
  LSeries t = LSeries::t(f);
  // 1/(1 - t) = 1 + t + t^2 + ...
  LSeries g = sub(LSeries::one(f), t).truncated(10);
  LSeries h = inv(g);
  for (sint i = 0; i < 8; ++i) CHECK(h.at(i).isOne());
  // Laurent: 1/t^2
  LSeries m = LSeries::monomial(f.one(), 2);
  LSeries im = inv(m);
  CHECK(im.lead() == -2);
  CHECK(mul(m, im).at(0).isOne());
  // a/b*b == a within precision
  LSeries num = add(LSeries::one(f), mul(t, f.fromInt(3))).truncated(8);
  LSeries r = mul(div(num, g), g);
  for (sint i = 0; i < 4; ++i) CHECK(r.at(i) == num.at(i));
}

TEST_CASE("derivative kills p-divisible exponents") {
  const Field& f = field_make(2, 1);
  // d/dt (t^2 + t^3) = t^2 in char 2
  LSeries s = add(pow(LSeries::t(f), 2), pow(LSeries::t(f), 3));
  LSeries d = derivative(s);
  CHECK(d.val().has_value());
  CHECK(*d.val() == 2);
  CHECK(d.at(2).isOne());
  CHECK(d.at(1).isZero());
}

TEST_CASE("pthPower is exact Frobenius") {
  const Field& f4 = field_make(2, 2);
  LSeries s = add(LSeries::monomial(f4.gen(), 1), LSeries::monomial(f4.one(), 3));
  LSeries s2 = pthPower(s);
  CHECK(*s2.val() == 2);
  CHECK(s2.at(2) == f4.mul(f4.gen(), f4.gen()));
  CHECK(s2.at(6).isOne());
  CHECK(s2.at(3).isZero());
  CHECK(mul(s, s) == s2);
}

TEST_CASE("nthRoot") {
  const Field& f = field_make(2, 1);
  LSeries t = LSeries::t(f);
  // cube root of t^3 (1 + t) in char 2
  LSeries u = mul(pow(t, 3), add(LSeries::one(f), t).truncated(12));
  LSeries r = nthRoot(u, 3);
  CHECK(*r.val() == 1);
  LSeries r3 = pow(r, 3);
  for (sint i = 3; i < 10; ++i) CHECK(r3.at(i) == u.at(i));
}

TEST_CASE("compose") {
  const Field& f = field_make(3, 1);
  LSeries t = LSeries::t(f);
  // a(t) = 1/t + t ; s = t^2 => a(s) = t^-2 + t^2
  LSeries a = add(LSeries::monomial(f.one(), -1), t);
  LSeries s = pow(t, 2);
  LSeries c = compose(a, s);
  CHECK(c.at(-2).isOne());
  CHECK(c.at(2).isOne());
  CHECK(c.at(0).isZero());

  // precision cap: a known to O(t^4) composed with t^2 -> O(t^8)
  LSeries a2 = a.truncated(4);
  LSeries c2 = compose(a2, s);
  CHECK(c2.end() == 8);
}

TEST_CASE("evalPoly on series") {
  const Field& f = field_make(2, 1);
  Poly g = poly_from(f, {1, 1, 0, 1});  // 1 + x + x^3
  LSeries t = LSeries::t(f);
  LSeries v = evalPoly(g, t);
  CHECK(v.at(0).isOne());
  CHECK(v.at(1).isOne());
  CHECK(v.at(2).isZero());
  CHECK(v.at(3).isOne());
}
