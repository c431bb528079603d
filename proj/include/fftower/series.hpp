#ifndef FFTOWER_SERIES_HPP
#define FFTOWER_SERIES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fftower/gf.hpp"

// Truncated Laurent series over GF(p^k), with explicit precision tracking.
//
// A series knows its coefficients on the window [lead, end); everything
// below `lead` is exactly zero, everything at `end` and above is unknown.
// `end` = kExact marks a series with finite support known exactly.
// Valuations read off a series are exact when a nonzero coefficient is
// visible, otherwise only the bound v >= end is available; callers decide
// whether that is an error, a retry with more precision, or an honest
// lower-bound result.

namespace fftower {

using sint = std::int64_t;

class LSeries {
 public:
  static constexpr sint kExact = (1LL << 56);

  LSeries() : f_(nullptr), lead_(0), end_(kExact) {}

  static LSeries zero(const Field& f) { return LSeries(&f, 0, {}, kExact); }
  static LSeries zeroToPrec(const Field& f, sint end) {
    return LSeries(&f, end, {}, end);
  }
  static LSeries monomial(const Elem& c, sint e);
  static LSeries one(const Field& f) { return monomial(f.one(), 0); }
  static LSeries t(const Field& f) { return monomial(f.one(), 1); }
  static LSeries make(const Field& f, sint lead, std::vector<Elem> coeffs,
                      sint end);

  FieldRef field() const { return f_; }
  sint lead() const { return lead_; }
  sint end() const { return end_; }
  bool isExact() const { return end_ >= kExact; }
  // first visible nonzero exponent; nullopt when zero to precision
  std::optional<sint> val() const;
  bool zeroToPrecision() const { return !val().has_value(); }
  // exactly zero (exact series with no support)
  bool isExactZero() const { return isExact() && zeroToPrecision(); }
  Elem at(sint e) const;  // coefficient of t^e; throws above the window
  Elem leadCoeff() const;

  LSeries truncated(sint newEnd) const;
  // re-embed all coefficients into an extension field
  LSeries mapField(const Field& target) const;

  // stored window (first stored coefficient is nonzero after normalization)
  const std::vector<Elem>& stored() const { return c_; }

  std::string str(int maxTerms = 8) const;

  bool operator==(const LSeries& o) const;

 private:
  LSeries(FieldRef f, sint lead, std::vector<Elem> c, sint end)
      : f_(f), lead_(lead), c_(std::move(c)), end_(end) {
    normalize();
  }
  void normalize();

  FieldRef f_;
  sint lead_;
  std::vector<Elem> c_;
  sint end_;
};

LSeries add(const LSeries& a, const LSeries& b);
LSeries sub(const LSeries& a, const LSeries& b);
LSeries neg(const LSeries& a);
LSeries mul(const LSeries& a, const LSeries& b);
LSeries mul(const LSeries& a, const Elem& s);
LSeries shift(const LSeries& a, sint n);  // * t^n
// multiplicative inverse; requires a visible leading coefficient
LSeries inv(const LSeries& a);
LSeries div(const LSeries& a, const LSeries& b);
LSeries pow(const LSeries& a, sint e);  // e may be negative
LSeries derivative(const LSeries& a);
// exact Frobenius power (x -> x^p applied to the whole series)
LSeries pthPower(const LSeries& a);
// n-th root with gcd(n, p) = 1; val(a) must be visible and divisible by n.
LSeries nthRoot(const LSeries& a, sint n);
// a(s(t)) with val(s) >= 1 required
LSeries compose(const LSeries& a, const LSeries& s);
// evaluate a polynomial on a series argument
LSeries evalPoly(const Poly& p, const LSeries& x);

}  // namespace fftower

#endif  // FFTOWER_SERIES_HPP
