#ifndef FFTOWER_PROJ_HPP
#define FFTOWER_PROJ_HPP

#include <optional>
#include <string>
#include <vector>

#include "fftower/gf.hpp"

// Points of P^1 over the extension system of F_q, and places of the rational
// function field F_q(x).  A place is a monic irreducible over F_q or the
// infinite place; its orbit is the set of Frobenius-conjugate points in the
// splitting field.

namespace fftower {

struct P1Point {
  const Field* home = nullptr;          // field of definition
  std::optional<Elem> value;            // empty = point at infinity
  bool isInfinity() const { return !value.has_value(); }

  bool operator==(const P1Point& o) const {
    if (isInfinity() || o.isInfinity()) return isInfinity() == o.isInfinity();
    return value == o.value;
  }
  std::string str() const { return isInfinity() ? "inf" : value->str(); }
};

inline P1Point p1_infinity(const Field& base) {
  return P1Point{&base, std::nullopt};
}
inline P1Point p1_affine(Elem v) {
  const Field* f = v.field();
  return P1Point{f, std::move(v)};
}

struct RationalPlace {
  // empty optional = infinite place
  std::optional<Poly> gen;  // monic irreducible over the base field
  const Field* base = nullptr;

  bool isInfinity() const { return !gen.has_value(); }
  int degree() const { return isInfinity() ? 1 : gen->deg(); }

  bool operator==(const RationalPlace& o) const {
    return base == o.base && gen == o.gen;
  }
  bool operator<(const RationalPlace& o) const {
    if (isInfinity() != o.isInfinity()) return o.isInfinity();
    if (isInfinity()) return false;
    return *gen < *o.gen;
  }
  std::string str() const { return isInfinity() ? "inf" : gen->str(); }
};

RationalPlace place_infinity(const Field& base);
RationalPlace place_from_gen(Poly gen);           // checks irreducibility
RationalPlace place_of_point(const Elem& value);  // minimal polynomial place

// The deg(gen) Frobenius-conjugate points in F_{q^deg} (infinity -> {inf}).
std::vector<P1Point> place_orbit(const RationalPlace& pl);

// Chart swap x <-> 1/x; involution with flip(0) = inf, flip(inf) = 0.
P1Point flip(const P1Point& pt);

// Degree of the minimal field of definition of pt over `base`.
unsigned residue_degree(const P1Point& pt, const Field& base);

// All monic irreducibles of degree d over f's base (enumeration helper for
// small censuses and tests).
std::vector<Poly> monic_irreducibles(const Field& f, int d);

}  // namespace fftower

#endif  // FFTOWER_PROJ_HPP
