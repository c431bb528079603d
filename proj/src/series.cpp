#include "fftower/series.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace fftower {

namespace {
sint satAdd(sint a, sint b) {
  if (a >= LSeries::kExact || b >= LSeries::kExact) return LSeries::kExact;
  return a + b;
}
sint clampEnd(sint e) { return e >= LSeries::kExact ? LSeries::kExact : e; }

// Reinterpret the stored window as an exact polynomial-like series, keeping
// at most n stored terms.  Used inside Newton loops, where the iteration
// argument guarantees more correct terms than interval-style tracking admits.
LSeries exactWindow(const LSeries& s, sint n) {
  std::vector<Elem> c(s.stored());
  if (static_cast<sint>(c.size()) > n && n >= 0)
    c.resize(static_cast<size_t>(n));
  return LSeries::make(*s.field(), s.lead(), std::move(c), LSeries::kExact);
}
}  // namespace

LSeries LSeries::monomial(const Elem& c, sint e) {
  return LSeries(c.field(), e, {c}, kExact);
}

LSeries LSeries::make(const Field& f, sint lead, std::vector<Elem> coeffs,
                      sint end) {
  return LSeries(&f, lead, std::move(coeffs), end);
}

void LSeries::normalize() {
  size_t i = 0;
  while (i < c_.size() && c_[i].isZero()) ++i;
  if (i) {
    c_.erase(c_.begin(), c_.begin() + static_cast<long>(i));
    lead_ += static_cast<sint>(i);
  }
  if (end_ >= kExact) {
    end_ = kExact;
    while (!c_.empty() && c_.back().isZero()) c_.pop_back();
  } else if (lead_ + static_cast<sint>(c_.size()) > end_) {
    sint keep = end_ - lead_;
    c_.resize(keep > 0 ? static_cast<size_t>(keep) : 0);
    while (!c_.empty() && c_.back().isZero()) c_.pop_back();
  }
  if (c_.empty()) lead_ = isExact() ? 0 : end_;
}

std::optional<sint> LSeries::val() const {
  if (c_.empty()) return std::nullopt;
  return lead_;
}

Elem LSeries::at(sint e) const {
  if (e >= end_) throw FieldError("series coefficient beyond precision");
  if (c_.empty() || e < lead_ || e >= lead_ + static_cast<sint>(c_.size()))
    return f_->zero();
  return c_[static_cast<size_t>(e - lead_)];
}

Elem LSeries::leadCoeff() const {
  auto v = val();
  if (!v) throw FieldError("leading coefficient of zero-to-precision series");
  return c_[0];
}

LSeries LSeries::truncated(sint newEnd) const {
  if (newEnd >= end_) return *this;
  return LSeries(f_, lead_, c_, newEnd);
}

LSeries LSeries::mapField(const Field& target) const {
  std::vector<Elem> c;
  c.reserve(c_.size());
  for (auto& x : c_) c.push_back(embed(x, target));
  return LSeries(&target, lead_, std::move(c), end_);
}

bool LSeries::operator==(const LSeries& o) const {
  return f_ == o.f_ && lead_ == o.lead_ && end_ == o.end_ && c_ == o.c_;
}

std::string LSeries::str(int maxTerms) const {
  std::ostringstream os;
  int shown = 0;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].isZero()) continue;
    if (shown == maxTerms) {
      os << " + ...";
      break;
    }
    if (shown) os << " + ";
    os << c_[i].str() << "*t^" << (lead_ + static_cast<sint>(i));
    ++shown;
  }
  if (!shown) os << "0";
  if (!isExact()) os << " + O(t^" << end_ << ")";
  return os.str();
}

LSeries add(const LSeries& a, const LSeries& b) {
  const Field& f = *a.field();
  sint end = std::min(a.end(), b.end());
  sint supA = a.lead() + static_cast<sint>(a.stored().size());
  sint supB = b.lead() + static_cast<sint>(b.stored().size());
  sint lo = std::min(a.stored().empty() ? end : a.lead(),
                     b.stored().empty() ? end : b.lead());
  sint hi = std::min(end, std::max(supA, supB));
  if (lo > hi) lo = hi;
  std::vector<Elem> c;
  c.reserve(static_cast<size_t>(hi - lo));
  for (sint e = lo; e < hi; ++e) c.push_back(f.add(a.at(e), b.at(e)));
  return LSeries::make(f, lo, std::move(c), clampEnd(end));
}

LSeries mul(const LSeries& a, const Elem& s) {
  const Field& f = *a.field();
  if (s.isZero()) return LSeries::zeroToPrec(f, a.end());
  std::vector<Elem> c;
  c.reserve(a.stored().size());
  for (auto& x : a.stored()) c.push_back(f.mul(x, s));
  return LSeries::make(f, a.lead(), std::move(c), a.end());
}

LSeries neg(const LSeries& a) {
  return mul(a, a.field()->neg(a.field()->one()));
}

LSeries sub(const LSeries& a, const LSeries& b) { return add(a, neg(b)); }

LSeries shift(const LSeries& a, sint n) {
  const Field& f = *a.field();
  std::vector<Elem> c(a.stored());
  return LSeries::make(f, a.lead() + n, std::move(c), satAdd(a.end(), n));
}

LSeries mul(const LSeries& a, const LSeries& b) {
  const Field& f = *a.field();
  sint end = std::min(satAdd(a.end(), b.lead()), satAdd(b.end(), a.lead()));
  if (a.stored().empty() || b.stored().empty())
    return LSeries::zeroToPrec(f, clampEnd(end));
  sint lo = a.lead() + b.lead();
  sint width;
  if (end >= LSeries::kExact)
    width = static_cast<sint>(a.stored().size() + b.stored().size()) - 1;
  else
    width = std::min<sint>(
        end - lo, static_cast<sint>(a.stored().size() + b.stored().size()) - 1);
  if (width <= 0) return LSeries::zeroToPrec(f, clampEnd(end));
  std::vector<Elem> c(static_cast<size_t>(width), f.zero());
  for (size_t i = 0; i < a.stored().size() && i < static_cast<size_t>(width); ++i) {
    const Elem& ai = a.stored()[i];
    if (ai.isZero()) continue;
    for (size_t j = 0; j < b.stored().size() && i + j < static_cast<size_t>(width); ++j)
      c[i + j] = f.add(c[i + j], f.mul(ai, b.stored()[j]));
  }
  return LSeries::make(f, lo, std::move(c), clampEnd(end));
}

LSeries inv(const LSeries& a) {
  const Field& f = *a.field();
  auto v = a.val();
  if (!v) throw FieldError("inverse of zero-to-precision series");
  Elem c0 = a.leadCoeff();
  if (a.stored().size() == 1)  // monomial: exactly invertible
    return LSeries::monomial(f.inv(c0), -*v).truncated(
        a.isExact() ? LSeries::kExact : a.end() - 2 * *v);
  sint relPrec = a.isExact() ? 256 : a.end() - *v;
  LSeries u = exactWindow(shift(mul(a, f.inv(c0)), -*v), relPrec);
  LSeries x = LSeries::one(f);
  sint prec = 1;
  LSeries two = LSeries::monomial(f.fromInt(2), 0);
  while (prec < relPrec) {
    prec = std::min(relPrec, prec * 2);
    x = exactWindow(mul(x, sub(two, mul(u, x))), prec);
  }
  LSeries out = shift(mul(x, f.inv(c0)), -*v);
  return out.truncated(-*v + relPrec);
}

LSeries div(const LSeries& a, const LSeries& b) { return mul(a, inv(b)); }

LSeries pow(const LSeries& a, sint e) {
  const Field& f = *a.field();
  if (e == 0) return LSeries::one(f);
  LSeries base = e < 0 ? inv(a) : a;
  sint n = e < 0 ? -e : e;
  LSeries r = LSeries::one(f);
  while (n) {
    if (n & 1) r = mul(r, base);
    base = mul(base, base);
    n >>= 1;
  }
  return r;
}

LSeries derivative(const LSeries& a) {
  const Field& f = *a.field();
  sint p = static_cast<sint>(f.p());
  std::vector<Elem> c;
  c.reserve(a.stored().size());
  for (size_t i = 0; i < a.stored().size(); ++i) {
    sint e = a.lead() + static_cast<sint>(i);
    std::uint64_t em = static_cast<std::uint64_t>(((e % p) + p) % p);
    c.push_back(f.mul(a.stored()[i], f.fromInt(em)));
  }
  return LSeries::make(f, a.lead() - 1, std::move(c), satAdd(a.end(), -1));
}

LSeries pthPower(const LSeries& a) {
  const Field& f = *a.field();
  sint p = static_cast<sint>(f.p());
  sint end = a.isExact() ? LSeries::kExact : (a.end() - 1) * p + 1;
  if (a.stored().empty()) return LSeries::zeroToPrec(f, clampEnd(end));
  sint n = static_cast<sint>(a.stored().size());
  std::vector<Elem> c(static_cast<size_t>((n - 1) * p + 1), f.zero());
  for (sint i = 0; i < n; ++i)
    c[static_cast<size_t>(i * p)] = f.pow(a.stored()[static_cast<size_t>(i)], f.p());
  return LSeries::make(f, a.lead() * p, std::move(c), clampEnd(end));
}

LSeries nthRoot(const LSeries& a, sint n) {
  const Field& f = *a.field();
  if (n <= 0 || static_cast<std::uint64_t>(n) % f.p() == 0)
    throw FieldError("nthRoot: index must be positive and prime to p");
  auto v = a.val();
  if (!v) throw FieldError("nthRoot of zero-to-precision series");
  if (*v % n != 0) throw FieldError("nthRoot: valuation not divisible");
  sint relPrec = a.isExact() ? 256 : a.end() - *v;
  Elem c0 = a.leadCoeff();
  // least n-th root of the leading coefficient in the coefficient field
  Elem r0 = f.zero();
  bool found = false;
  for (std::uint64_t i = 0; i < f.order(); ++i) {
    Elem x = f.elemAt(i);
    if (f.pow(x, static_cast<std::uint64_t>(n)) == c0) {
      r0 = x;
      found = true;
      break;
    }
  }
  if (!found) throw FieldError("nthRoot: no root for leading coefficient");
  LSeries u = exactWindow(shift(mul(a, f.inv(c0)), -*v), relPrec);
  Elem nmod = f.fromInt(static_cast<std::uint64_t>(
      ((n % (sint)f.p()) + (sint)f.p()) % (sint)f.p()));
  LSeries x = LSeries::one(f);
  sint prec = 1;
  while (prec < relPrec) {
    prec = std::min(relPrec, prec * 2);
    LSeries num = sub(pow(x, n), u);
    LSeries den = mul(pow(x, n - 1), nmod);
    x = exactWindow(sub(x, mul(num, inv(exactWindow(den, prec)))), prec);
  }
  return shift(mul(x, r0), *v / n).truncated(
      a.isExact() ? LSeries::kExact : *v / n + relPrec);
}

LSeries compose(const LSeries& a, const LSeries& s) {
  const Field& f = *a.field();
  auto vs = s.val();
  if (!vs || *vs < 1)
    throw FieldError("compose: substituted series needs val >= 1");
  sint tailCap =
      a.isExact() ? LSeries::kExact : clampEnd(a.end() * *vs);
  if (a.stored().empty()) {
    return LSeries::zeroToPrec(
        f, std::min<sint>(tailCap, s.isExact() ? tailCap : s.end()));
  }
  sint lo = a.lead();
  sint hiExcl = a.lead() + static_cast<sint>(a.stored().size());
  LSeries result = LSeries::zero(f);
  if (lo < 0) {
    LSeries sInv = inv(s);
    for (sint e = lo; e < std::min<sint>(0, hiExcl); ++e) {
      Elem c = a.at(e);
      if (c.isZero()) continue;
      result = add(result, mul(pow(sInv, -e), c));
    }
  }
  LSeries horner = LSeries::zero(f);
  for (sint e = hiExcl - 1; e >= 0; --e) {
    horner = mul(horner, s);
    Elem c = e >= lo ? a.at(e) : f.zero();
    if (!c.isZero()) horner = add(horner, LSeries::monomial(c, 0));
  }
  if (hiExcl > 0) result = add(result, horner);
  return result.truncated(tailCap);
}

LSeries evalPoly(const Poly& p, const LSeries& x) {
  const Field& f = *x.field();
  LSeries r = LSeries::zero(f);
  for (int i = p.deg(); i >= 0; --i) {
    r = mul(r, x);
    Elem c = p.coeff(i);
    if (c.field() != &f) c = embed(c, f);
    r = add(r, LSeries::monomial(c, 0));
  }
  return r;
}

}  // namespace fftower
