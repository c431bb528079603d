#include "fftower/proj.hpp"

#include <algorithm>
#include <numeric>

namespace fftower {

RationalPlace place_infinity(const Field& base) {
  return RationalPlace{std::nullopt, &base};
}

RationalPlace place_from_gen(Poly gen) {
  if (!gen.isMonic() || !irreducible(gen))
    throw FieldError("place generator must be monic irreducible");
  const Field* base = gen.field();
  return RationalPlace{std::move(gen), base};
}

RationalPlace place_of_point(const Elem& value) {
  const Field& home = *value.field();
  unsigned d = home.degreeOver(value);
  // minimal polynomial = product over the Frobenius orbit
  Poly mp = poly_one(home);
  Elem c = value;
  for (unsigned i = 0; i < d; ++i) {
    mp = mul(mp, Poly(&home, {home.neg(c), home.one()}));
    c = home.frobenius(c);
  }
  return RationalPlace{mp, &home};
}

std::vector<P1Point> place_orbit(const RationalPlace& pl) {
  if (pl.isInfinity()) return {p1_infinity(field_make(pl.base->p(), 1))};
  const Field& base = *pl.base;
  unsigned d = static_cast<unsigned>(pl.gen->deg());
  const Field& ext = field_make(base.p(), base.k() * d);
  auto roots = poly_roots(*pl.gen, ext);
  std::vector<P1Point> orbit;
  for (auto& [r, m] : roots) {
    if (m != 1) throw FieldError("place generator not squarefree");
    orbit.push_back(p1_affine(r));
  }
  if (orbit.size() != d) throw FieldError("place generator not irreducible");
  return orbit;
}

P1Point flip(const P1Point& pt) {
  const Field& f = *pt.home;
  if (pt.isInfinity()) return p1_affine(f.zero());
  if (pt.value->isZero()) return p1_infinity(f);
  return p1_affine(f.inv(*pt.value));
}

unsigned residue_degree(const P1Point& pt, const Field& base) {
  if (pt.isInfinity()) return 1;
  const Field& home = *pt.home;
  if (home.p() != base.p() || home.k() % base.k() != 0)
    throw FieldError("point not defined over an extension of base");
  unsigned abs = home.degreeOver(*pt.value);  // degree over the prime field
  // smallest m with F_{p^abs} inside F_{q^m}: lcm(abs, k)/k
  unsigned k = base.k();
  unsigned l = std::lcm(abs, k);
  return l / k;
}

std::vector<Poly> monic_irreducibles(const Field& f, int d) {
  std::vector<Poly> out;
  std::uint64_t q = f.order();
  std::uint64_t count = 1;
  for (int i = 0; i < d; ++i) count *= q;
  for (std::uint64_t n = 0; n < count; ++n) {
    std::vector<Elem> c;
    std::uint64_t t = n;
    for (int i = 0; i < d; ++i) {
      c.push_back(f.elemAt(t % q));
      t /= q;
    }
    c.push_back(f.one());
    Poly g(&f, std::move(c));
    if (irreducible(g)) out.push_back(g);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fftower
