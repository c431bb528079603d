#ifndef FFTOWER_GF_HPP
#define FFTOWER_GF_HPP

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Exact arithmetic in GF(p^k) and its univariate polynomial ring.
//
// Fields are interned: field_make(p, k) always returns the same object with
// the same canonical modulus, so serialized output is stable across runs.
// The modulus is the first monic irreducible of degree k (in base-p counter
// order on the coefficient vector) whose root is primitive and whose norms
// down to every maximal subfield hit the canonical generator there.  That
// gives compatible embeddings F_{p^a} -> F_{p^b} via
//   gen_a |-> gen_b^((p^b-1)/(p^a-1)),
// which commute for chains of subfields.

namespace fftower {

class FieldError : public std::runtime_error {
 public:
  explicit FieldError(const std::string& what) : std::runtime_error(what) {}
};

class Field;
using FieldRef = const Field*;

// Element of GF(p^k): coordinate vector in the power basis of the modulus
// root, length k, entries in [0, p).  Small degrees stay on the stack.
using Coords = boost::container::small_vector<std::uint64_t, 4>;

class Elem {
 public:
  Elem() : f_(nullptr) {}
  Elem(FieldRef f, Coords c) : f_(f), c_(std::move(c)) {}
  Elem(FieldRef f, const std::vector<std::uint64_t>& c)
      : f_(f), c_(c.begin(), c.end()) {}

  FieldRef field() const { return f_; }
  const Coords& coords() const { return c_; }
  bool isZero() const;
  bool isOne() const;

  bool operator==(const Elem& o) const { return f_ == o.f_ && c_ == o.c_; }
  bool operator!=(const Elem& o) const { return !(*this == o); }
  // Canonical total order inside one field (coordinate-lexicographic,
  // most significant coordinate last).
  bool operator<(const Elem& o) const;

  std::string str() const;

 private:
  FieldRef f_;
  Coords c_;
};

class Field {
 public:
  std::uint64_t p() const { return p_; }
  unsigned k() const { return k_; }
  // q = p^k; throws if it does not fit in 64 bits.
  std::uint64_t order() const;
  // modulus coefficients c[0..k], monic (c[k] = 1), over F_p.
  const std::vector<std::uint64_t>& modulus() const { return mod_; }
  // True when the modulus root is certified primitive (needed for
  // canonical embeddings).
  bool primitiveCertified() const { return primitive_; }

  Elem zero() const;
  Elem one() const;
  Elem gen() const;  // class of x
  Elem fromInt(std::uint64_t n) const;
  Elem make(std::vector<std::uint64_t> coords) const;

  Elem add(const Elem& a, const Elem& b) const;
  Elem sub(const Elem& a, const Elem& b) const;
  Elem neg(const Elem& a) const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem inv(const Elem& a) const;
  Elem div(const Elem& a, const Elem& b) const;
  Elem pow(const Elem& a, std::uint64_t e) const;
  // x |-> x^p iterated n times.
  Elem frobenius(const Elem& a, unsigned n = 1) const;
  // Unique p-th root (Frobenius is bijective).
  Elem pthRoot(const Elem& a) const;
  // Smallest m >= 1 with a in F_{p^m}; divides k.
  unsigned degreeOver(const Elem& a) const;

  // Enumeration in the canonical element order: index in [0, p^k).
  Elem elemAt(std::uint64_t index) const;
  std::uint64_t indexOf(const Elem& a) const;

 private:
  friend struct FieldFactory;
  friend Elem embed(const Elem& x, const Field& target);
  Field(std::uint64_t p, unsigned k);

  void check(const Elem& a) const;

  std::uint64_t p_;
  unsigned k_;
  std::vector<std::uint64_t> mod_;
  bool primitive_ = false;
  // cache of embedding generator powers, keyed by source absolute degree
  mutable std::map<unsigned, std::vector<Elem>> embedPows_;
};

// Default guardrail on the absolute extension degree.
inline constexpr unsigned kFieldDegreeCap = 24;

// Canonical interned field; throws FieldError on composite p or k over cap.
const Field& field_make(std::uint64_t p, unsigned k, unsigned cap);
const Field& field_make(std::uint64_t p, unsigned k);

// Canonical embedding (source degree must divide target degree, same p).
Elem embed(const Elem& x, const Field& target);

// ---------------------------------------------------------------------------
// Polynomials over a field, coefficient list with trailing zeros stripped.

class Poly {
 public:
  Poly() : f_(nullptr) {}
  explicit Poly(FieldRef f) : f_(f) {}
  Poly(FieldRef f, std::vector<Elem> c);

  FieldRef field() const { return f_; }
  bool isZero() const { return c_.empty(); }
  int deg() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Elem>& coeffs() const { return c_; }
  // Coefficient of x^i (zero element beyond degree).
  Elem coeff(int i) const;
  Elem lead() const;
  bool isMonic() const;

  bool operator==(const Poly& o) const { return f_ == o.f_ && c_ == o.c_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  // Canonical order: degree, then coefficient-lexicographic from the top.
  bool operator<(const Poly& o) const;

  std::string str() const;

 private:
  FieldRef f_;
  std::vector<Elem> c_;
};

Poly poly_zero(const Field& f);
Poly poly_one(const Field& f);
Poly poly_x(const Field& f);
Poly poly_const(const Elem& a);
Poly poly_from(const Field& f, std::vector<std::uint64_t> intCoeffs);

Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly neg(const Poly& a);
Poly mul(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Elem& s);
Poly monic(const Poly& a);
// quotient/remainder; divisor must be nonzero.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly mod(const Poly& a, const Poly& b);
Poly gcd(const Poly& a, const Poly& b);  // monic
Poly derivative(const Poly& a);
Elem eval(const Poly& a, const Elem& x);
Poly powmod(const Poly& base, std::uint64_t e, const Poly& m);
// base^(p^n) mod m via iterated p-powers (exponent never materialized).
Poly frobPowmod(const Poly& base, unsigned n, const Poly& m);
// Map coefficients into an extension field.
Poly embedPoly(const Poly& a, const Field& target);
// Reverse coefficients: x^deg * a(1/x) (trailing zeros of a become degree drop).
Poly reverse(const Poly& a);

bool irreducible(const Poly& a);

// Monic irreducible factors with multiplicities, deterministic order
// (degree, then coefficient-lex).  `seed` drives the equal-degree split.
std::vector<std::pair<Poly, int>> poly_factor(const Poly& a,
                                              std::uint64_t seed = 0x5eedULL);

// Roots of f in `target` (which must be an extension of the coefficient
// field), with multiplicities, canonically ordered.
std::vector<std::pair<Elem, int>> poly_roots(const Poly& f,
                                             const Field& target,
                                             std::uint64_t seed = 0x5eedULL);

}  // namespace fftower

#endif  // FFTOWER_GF_HPP
