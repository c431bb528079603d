#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>

#include "fftower/gf.hpp"

using namespace fftower;
using u64 = std::uint64_t;

namespace {

// Independent bit-packed F_2[x] arithmetic, used as a brute-force oracle for
// the F_{2^24} generator-order check.  Kept deliberately separate from the
// library implementation.
struct F2Packed {
  u64 mod;
  int k;
  u64 mul(u64 a, u64 b) const {
    u64 r = 0;
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      a <<= 1;
      if ((a >> k) & 1) a ^= mod;
    }
    return r;
  }
};

Poly randPoly(const Field& f, int maxDeg, u64& state) {
  auto next = [&state]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 33;
  };
  std::vector<Elem> c;
  int d = 1 + static_cast<int>(next() % maxDeg);
  for (int i = 0; i <= d; ++i) c.push_back(f.elemAt(next() % f.order()));
  return Poly(&f, std::move(c));
}

}  // namespace

TEST_CASE("field_make basics and reproducibility") {
  const Field& f2 = field_make(2, 1);
  CHECK(f2.p() == 2);
  CHECK(f2.order() == 2);

  const Field& f9 = field_make(3, 2);
  CHECK(f9.order() == 9);
  CHECK(f9.modulus().size() == 3);
  // same (p,k) yields the identical interned field
  CHECK(&field_make(3, 2) == &f9);

  CHECK_THROWS_AS(field_make(4, 1), FieldError);
  CHECK_THROWS_AS(field_make(2, 25), FieldError);
}

TEST_CASE("arithmetic closure and inverses in F_9") {
  const Field& f = field_make(3, 2);
  for (u64 i = 1; i < 9; ++i) {
    Elem a = f.elemAt(i);
    Elem ia = f.inv(a);
    CHECK(f.mul(a, ia) == f.one());
  }
  // Frobenius fixes exactly the prime field (exhaustive q <= 81)
  for (u64 pk : {4ull, 9ull, 25ull, 49ull, 81ull}) {
    u64 p = (pk == 4) ? 2 : (pk == 9 ? 3 : (pk == 25 ? 5 : (pk == 49 ? 7 : 3)));
    unsigned k = (pk == 81) ? 4u : 2u;
    const Field& F = field_make(p, k);
    int fixed = 0;
    for (u64 i = 0; i < F.order(); ++i) {
      Elem a = F.elemAt(i);
      if (F.frobenius(a) == a) {
        ++fixed;
        CHECK(F.degreeOver(a) == 1);
      }
    }
    CHECK(fixed == static_cast<int>(p));
  }
}

TEST_CASE("F_{2^24} generator has full multiplicative order (brute force)") {
  const Field& f = field_make(2, 24);
  REQUIRE(f.primitiveCertified());
  u64 m = 0;
  for (unsigned i = 0; i <= 24; ++i)
    if (f.modulus()[i]) m |= (1ull << i);
  F2Packed pk{m, 24};
  u64 x = 2;  // the generator
  u64 order = 0;
  u64 acc = x;
  do {
    ++order;
    acc = pk.mul(acc, x);
  } while (acc != x && order < (1ull << 25));
  // acc returned to x after `order` more steps => order of x divides `order`
  CHECK(order == (1ull << 24) - 1);
}

TEST_CASE("canonical embeddings") {
  const Field& f2 = field_make(2, 1);
  const Field& f4 = field_make(2, 2);
  const Field& f16 = field_make(2, 4);

  // identity on the prime field
  CHECK(embed(f2.one(), f16) == f16.one());

  // generator of F_4 maps to an element of multiplicative order 3
  Elem g = f4.gen();
  Elem h = embed(g, f16);
  CHECK(f16.pow(h, 3) == f16.one());
  CHECK(!(f16.pow(h, 1) == f16.one()));

  // commuting triangle F_2 -> F_4 -> F_16 equals F_2 -> F_16
  for (u64 i = 0; i < 2; ++i) {
    Elem a = f2.elemAt(i);
    CHECK(embed(embed(a, f4), f16) == embed(a, f16));
  }
  // and F_4 -> F_8 must fail
  CHECK_THROWS_AS(embed(g, field_make(2, 3)), FieldError);
}

TEST_CASE("poly_factor worked examples") {
  const Field& f2 = field_make(2, 1);
  // T^2+1 over F_2 = (T+1)^2
  Poly t21 = poly_from(f2, {1, 0, 1});
  auto fac = poly_factor(t21);
  REQUIRE(fac.size() == 1);
  CHECK(fac[0].first == poly_from(f2, {1, 1}));
  CHECK(fac[0].second == 2);

  // T^3+T over F_2 = T (T+1)^2 ; expansion oracle re-multiplies the factors
  Poly t3t = poly_from(f2, {0, 1, 0, 1});
  auto fac2 = poly_factor(t3t);
  Poly prod = poly_one(f2);
  int totalDeg = 0;
  for (auto& [q, m] : fac2) {
    CHECK(irreducible(q));
    for (int i = 0; i < m; ++i) prod = mul(prod, q);
    totalDeg += q.deg() * m;
  }
  CHECK(prod == t3t);
  CHECK(totalDeg == 3);
  REQUIRE(fac2.size() == 2);
  CHECK(fac2[0].first == poly_from(f2, {0, 1}));
  CHECK(fac2[0].second == 1);
  CHECK(fac2[1].first == poly_from(f2, {1, 1}));
  CHECK(fac2[1].second == 2);

  // T^2+1 over F_3 is irreducible: no roots among {0,1,2}
  const Field& f3 = field_make(3, 1);
  Poly t21f3 = poly_from(f3, {1, 0, 1});
  for (u64 r = 0; r < 3; ++r) CHECK(!eval(t21f3, f3.fromInt(r)).isZero());
  CHECK(irreducible(t21f3));
  auto fac3 = poly_factor(t21f3);
  REQUIRE(fac3.size() == 1);
  CHECK(fac3[0].second == 1);
}

TEST_CASE("factor(f*g) refines to multiset union (random)") {
  u64 state = 99;
  for (u64 p : {2ull, 3ull}) {
    const Field& f = field_make(p, 1);
    for (int trial = 0; trial < 40; ++trial) {
      Poly a = randPoly(f, 4, state), b = randPoly(f, 4, state);
      if (a.isZero() || b.isZero()) continue;
      auto fa = poly_factor(a), fb = poly_factor(b), fab = poly_factor(mul(a, b));
      // accumulate union
      std::map<std::string, int> expect, got;
      for (auto& [q, m] : fa) expect[q.str()] += m;
      for (auto& [q, m] : fb) expect[q.str()] += m;
      for (auto& [q, m] : fab) got[q.str()] += m;
      CHECK(expect == got);
    }
  }
}

TEST_CASE("irreducible factors have no roots in their own field (exhaustive)") {
  for (auto [p, k] : std::vector<std::pair<u64, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
    const Field& f = field_make(p, k);
    u64 q = f.order();
    if (q > 9) continue;
    // enumerate all monic polys of degree <= 3
    for (int d = 2; d <= 3; ++d) {
      u64 count = 1;
      for (int i = 0; i < d; ++i) count *= q;
      for (u64 n = 0; n < count; ++n) {
        std::vector<Elem> c;
        u64 t = n;
        for (int i = 0; i < d; ++i) {
          c.push_back(f.elemAt(t % q));
          t /= q;
        }
        c.push_back(f.one());
        Poly g(&f, std::move(c));
        for (auto& [fac, mult] : poly_factor(g)) {
          (void)mult;
          if (fac.deg() < 2) continue;
          for (u64 e = 0; e < q; ++e)
            CHECK(!eval(fac, f.elemAt(e)).isZero());
        }
      }
    }
  }
}

TEST_CASE("poly_roots worked examples") {
  const Field& f5 = field_make(5, 1);
  // T^2 - 1 over F_5 -> {1, 4}
  Poly g = poly_from(f5, {4, 0, 1});
  auto r = poly_roots(g, f5);
  REQUIRE(r.size() == 2);
  CHECK(r[0].first == f5.fromInt(1));
  CHECK(r[1].first == f5.fromInt(4));

  // T^2+T+1 over F_2: none; over F_4: two
  const Field& f2 = field_make(2, 1);
  const Field& f4 = field_make(2, 2);
  Poly h = poly_from(f2, {1, 1, 1});
  CHECK(poly_roots(h, f2).empty());
  auto r4 = poly_roots(h, f4);
  CHECK(r4.size() == 2);
  for (auto& [root, m] : r4) {
    CHECK(m == 1);
    CHECK(eval(embedPoly(h, f4), root).isZero());
  }

  // T^3+T over F_2 -> root 0 (mult 1) and root 1 (mult 2)
  Poly t3t = poly_from(f2, {0, 1, 0, 1});
  auto rr = poly_roots(t3t, f2);
  REQUIRE(rr.size() == 2);
  CHECK(rr[0].first == f2.zero());
  CHECK(rr[0].second == 1);
  CHECK(rr[1].first == f2.one());
  CHECK(rr[1].second == 2);
}

TEST_CASE("factorization determinism across seeds is stable per seed") {
  const Field& f3 = field_make(3, 1);
  u64 state = 7;
  for (int trial = 0; trial < 10; ++trial) {
    Poly a = randPoly(f3, 6, state);
    if (a.isZero()) continue;
    auto f1 = poly_factor(a, 123);
    auto f2_ = poly_factor(a, 123);
    CHECK(f1 == f2_);
  }
}
