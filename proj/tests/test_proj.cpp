#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fftower/proj.hpp"

using namespace fftower;
using u64 = std::uint64_t;

TEST_CASE("place orbits") {
  const Field& f2 = field_make(2, 1);
  // P_x over F_2 -> {0}
  auto px = place_from_gen(poly_from(f2, {0, 1}));
  auto o1 = place_orbit(px);
  REQUIRE(o1.size() == 1);
  CHECK(o1[0].value == f2.zero());

  // P_{x^2+x+1} over F_2 -> two conjugate points of F_4
  auto pq = place_from_gen(poly_from(f2, {1, 1, 1}));
  auto o2 = place_orbit(pq);
  REQUIRE(o2.size() == 2);
  const Field& f4 = field_make(2, 2);
  CHECK(o2[0].home == &f4);
  CHECK(f4.frobenius(*o2[0].value) == *o2[1].value);

  // P_inf -> {inf}
  auto oi = place_orbit(place_infinity(f2));
  REQUIRE(oi.size() == 1);
  CHECK(oi[0].isInfinity());

  CHECK_THROWS_AS(place_from_gen(poly_from(f2, {1, 0, 1})), FieldError);
}

TEST_CASE("flip") {
  const Field& f4 = field_make(2, 2);
  CHECK(flip(p1_affine(f4.zero())).isInfinity());
  CHECK(flip(p1_infinity(f4)) == p1_affine(f4.zero()));

  // alpha of order 3 in F_4 -> alpha^2
  Elem a = f4.gen();
  CHECK(*flip(p1_affine(a)).value == f4.mul(a, a));

  // involution on all points of F_{q^m}, m <= 4 (exhaustive over F_16)
  const Field& f16 = field_make(2, 4);
  for (u64 i = 0; i < 16; ++i) {
    P1Point pt = p1_affine(f16.elemAt(i));
    P1Point ff = flip(flip(pt));
    if (pt.value->isZero())
      CHECK(ff.value->isZero());
    else
      CHECK(ff == pt);
  }
  CHECK(flip(flip(p1_infinity(f16))).isInfinity());
}

TEST_CASE("residue degrees") {
  const Field& f2 = field_make(2, 1);
  const Field& f4 = field_make(2, 2);
  CHECK(residue_degree(p1_affine(f2.zero()), f2) == 1);
  CHECK(residue_degree(p1_affine(f4.gen()), f2) == 2);
  CHECK(residue_degree(p1_infinity(f2), f2) == 1);
  // an F_4 generator viewed over F_4 has degree 1
  CHECK(residue_degree(p1_affine(f4.gen()), f4) == 1);
}

TEST_CASE("orbit sizes tile P^1 (Moebius bookkeeping)") {
  for (auto [p, k] : std::vector<std::pair<u64, unsigned>>{{2, 1}, {3, 1}, {2, 2}}) {
    const Field& f = field_make(p, k);
    u64 q = f.order();
    if (q > 4) continue;
    for (int D = 1; D <= 3; ++D) {
      // sum over d | D of d * #monic-irreducibles(d) = q^D, plus infinity
      u64 total = 1;  // infinite place contributes one point
      for (int d = 1; d <= D; ++d) {
        if (D % d) continue;
        total += static_cast<u64>(d) * monic_irreducibles(f, d).size();
      }
      u64 qD = 1;
      for (int i = 0; i < D; ++i) qD *= q;
      CHECK(total == qD + 1);
    }
  }
}

TEST_CASE("place_of_point round trip") {
  const Field& f4 = field_make(2, 2);
  auto pl = place_of_point(f4.gen());
  CHECK(pl.degree() == 2);
  auto orbit = place_orbit(pl);
  CHECK(orbit.size() == 2);
}
