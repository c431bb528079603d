#include "fftower/gf.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <numeric>
#include <sstream>

namespace fftower {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) {
  if ((a | b) < (1ull << 32)) return a * b % m;
  return static_cast<u64>((u128)a * b % m);
}

u64 powmod_u64(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool isPrimeU64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

u64 pollardRho(u64 n) {
  if ((n & 1) == 0) return 2;
  u64 c = 1;
  while (true) {
    u64 x = 2, y = 2, d = 1;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      u64 diff = x > y ? x - y : y - x;
      d = std::gcd(diff, n);
    }
    if (d != n) return d;
    ++c;
  }
}

void factorInto(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (isPrimeU64(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollardRho(n);
  factorInto(d, out);
  factorInto(n / d, out);
}

std::vector<u64> primeFactors(u64 n) {
  std::vector<u64> fs;
  factorInto(n, fs);
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  return fs;
}

// --- raw arithmetic on coefficient vectors over F_p (used by the modulus
// search, before a Field object exists) ------------------------------------

using Vec = std::vector<u64>;

void vtrim(Vec& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Vec vmulmod(const Vec& a, const Vec& b, const Vec& m, u64 p) {
  // m monic of degree k; result reduced mod m.
  if (a.empty() || b.empty()) return {};
  Vec r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  }
  size_t k = m.size() - 1;
  for (size_t i = r.size(); i-- > k;) {
    u64 c = r[i];
    if (!c) continue;
    r[i] = 0;
    for (size_t j = 0; j < k; ++j)
      r[i - k + j] = (r[i - k + j] + (p - mulmod(c, m[j], p))) % p;
  }
  r.resize(k);
  vtrim(r);
  return r;
}

Vec vpowmod(Vec a, u64 e, const Vec& m, u64 p) {
  Vec r{1};
  while (e) {
    if (e & 1) r = vmulmod(r, a, m, p);
    a = vmulmod(a, a, m, p);
    e >>= 1;
  }
  return r;
}

Vec vfrob(const Vec& a, const Vec& m, u64 p) { return vpowmod(a, p, m, p); }

Vec vgcd(Vec a, Vec b, u64 p) {
  auto reduce = [&](Vec& x, const Vec& y) {
    // x mod y, y nonzero
    while (x.size() >= y.size() && !x.empty()) {
      u64 lc = mulmod(x.back(), powmod_u64(y.back(), p - 2, p), p);
      size_t off = x.size() - y.size();
      for (size_t i = 0; i < y.size(); ++i)
        x[off + i] = (x[off + i] + p - mulmod(lc, y[i], p)) % p;
      vtrim(x);
    }
  };
  vtrim(a);
  vtrim(b);
  while (!b.empty()) {
    reduce(a, b);
    std::swap(a, b);
  }
  return a;
}

bool vIrreducible(const Vec& f, u64 p) {
  // Rabin: x^(p^k) == x mod f and gcd(x^(p^(k/l)) - x, f) = 1 for primes l|k.
  size_t k = f.size() - 1;
  if (k == 1) return true;
  Vec x{0, 1};
  Vec h = x;
  std::vector<Vec> frobs(k + 1);
  for (size_t i = 1; i <= k; ++i) {
    h = vfrob(h, f, p);
    frobs[i] = h;
  }
  Vec top = frobs[k];
  // top must equal x
  if (top != x) return false;
  for (u64 l : primeFactors(k)) {
    Vec g = frobs[k / l];
    // g - x
    Vec d = g;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = (d[1] + p - 1) % p;
    vtrim(d);
    Vec gg = vgcd(d, f, p);
    if (!(gg.size() == 1)) return false;
  }
  return true;
}

// p = 2 bit-packed fast path for the modulus search (k <= 32).
namespace f2 {
u64 mulmod2(u64 a, u64 b, u64 m, int k) {
  u64 r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> k & 1) a ^= m;
  }
  return r & ((k < 64) ? ((1ull << k) - 1) : ~0ull);
}
u64 powmod2(u64 a, u64 e, u64 m, int k) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mulmod2(r, a, m, k);
    a = mulmod2(a, a, m, k);
    e >>= 1;
  }
  return r;
}
u64 gcd2(u64 a, u64 b) {
  auto degOf = [](u64 x) { return 63 - __builtin_clzll(x); };
  while (b) {
    if (!a) return b;
    while (a && degOf(a) >= degOf(b)) a ^= b << (degOf(a) - degOf(b));
    std::swap(a, b);
  }
  return a;
}
bool irreducible2(u64 f, int k) {
  // f includes the x^k bit.
  u64 h = 2;  // x
  std::vector<u64> frobs(k + 1);
  for (int i = 1; i <= k; ++i) {
    h = mulmod2(h, h, f, k);
    frobs[i] = h;
  }
  if (frobs[k] != 2) return false;
  for (u64 l : primeFactors(k))
    if (gcd2(frobs[k / l] ^ 2ull, f) != 1) return false;
  return true;
}
}  // namespace f2

}  // namespace

// --- Field -----------------------------------------------------------------

Field::Field(u64 p, unsigned k) : p_(p), k_(k) {}

u64 Field::order() const {
  u128 q = 1;
  for (unsigned i = 0; i < k_; ++i) {
    q *= p_;
    if (q > ~0ull) throw FieldError("field order exceeds 64 bits");
  }
  return static_cast<u64>(q);
}

void Field::check(const Elem& a) const {
  if (a.field() != this) throw FieldError("element belongs to another field");
}

Elem Field::zero() const { return Elem(this, Coords(k_, 0)); }
Elem Field::one() const { return fromInt(1); }
Elem Field::gen() const {
  if (k_ == 1) return fromInt(mod_[0] ? p_ - mod_[0] : 0);  // root of x - g
  Coords c(k_, 0);
  c[1] = 1;
  return Elem(this, std::move(c));
}
Elem Field::fromInt(u64 n) const {
  Coords c(k_, 0);
  c[0] = n % p_;
  return Elem(this, std::move(c));
}
Elem Field::make(Vec coords) const {
  if (coords.size() != k_) throw FieldError("coordinate length mismatch");
  for (auto& c : coords) c %= p_;
  return Elem(this, Coords(coords.begin(), coords.end()));
}

Elem Field::add(const Elem& a, const Elem& b) const {
  check(a);
  check(b);
  Coords c(k_);
  for (unsigned i = 0; i < k_; ++i) {
    u64 s = a.coords()[i] + b.coords()[i];
    c[i] = s >= p_ ? s - p_ : s;
  }
  return Elem(this, std::move(c));
}
Elem Field::sub(const Elem& a, const Elem& b) const {
  check(a);
  check(b);
  Coords c(k_);
  for (unsigned i = 0; i < k_; ++i) {
    u64 s = a.coords()[i] + p_ - b.coords()[i];
    c[i] = s >= p_ ? s - p_ : s;
  }
  return Elem(this, std::move(c));
}
Elem Field::neg(const Elem& a) const { return sub(zero(), a); }
Elem Field::mul(const Elem& a, const Elem& b) const {
  check(a);
  check(b);
  if (k_ == 1) {
    Coords c(1);
    c[0] = mulmod(a.coords()[0], b.coords()[0], p_);
    return Elem(this, std::move(c));
  }
  // schoolbook product then reduction by the monic modulus, on the stack
  u64 buf[2 * kFieldDegreeCap];
  unsigned n = 2 * k_ - 1;
  for (unsigned i = 0; i < n; ++i) buf[i] = 0;
  for (unsigned i = 0; i < k_; ++i) {
    u64 ai = a.coords()[i];
    if (!ai) continue;
    for (unsigned j = 0; j < k_; ++j) {
      u64 bj = b.coords()[j];
      if (!bj) continue;
      buf[i + j] = (buf[i + j] + mulmod(ai, bj, p_)) % p_;
    }
  }
  for (unsigned i = n; i-- > k_;) {
    u64 c = buf[i];
    if (!c) continue;
    buf[i] = 0;
    for (unsigned j = 0; j < k_; ++j) {
      u64 s = buf[i - k_ + j] + p_ - mulmod(c, mod_[j], p_);
      buf[i - k_ + j] = s >= p_ ? s - p_ : s;
    }
  }
  Coords out(k_);
  for (unsigned i = 0; i < k_; ++i) out[i] = buf[i];
  return Elem(this, std::move(out));
}
Elem Field::inv(const Elem& a) const {
  check(a);
  if (a.isZero()) throw FieldError("division by zero");
  // extended Euclid in F_p[x] against the modulus
  Vec r0 = mod_;
  Vec r1(a.coords().begin(), a.coords().end());
  vtrim(r1);
  Vec s0{}, s1{1};
  while (!r1.empty()) {
    // r0 = q*r1 + r2
    Vec q;
    Vec r2 = r0;
    u64 il = powmod_u64(r1.back(), p_ - 2, p_);
    while (r2.size() >= r1.size() && !r2.empty()) {
      u64 c = mulmod(r2.back(), il, p_);
      size_t off = r2.size() - r1.size();
      if (q.size() < off + 1) q.resize(off + 1, 0);
      q[off] = c;
      for (size_t i = 0; i < r1.size(); ++i)
        r2[off + i] = (r2[off + i] + p_ - mulmod(c, r1[i], p_)) % p_;
      vtrim(r2);
    }
    // s2 = s0 - q*s1
    Vec qs(q.size() + s1.size(), 0);
    for (size_t i = 0; i < q.size(); ++i)
      for (size_t j = 0; j < s1.size(); ++j)
        qs[i + j] = (qs[i + j] + mulmod(q[i], s1[j], p_)) % p_;
    Vec s2 = s0;
    if (s2.size() < qs.size()) s2.resize(qs.size(), 0);
    for (size_t i = 0; i < qs.size(); ++i) s2[i] = (s2[i] + p_ - qs[i]) % p_;
    vtrim(s2);
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  // r0 = gcd (a constant, since modulus irreducible), s0 * a == r0 mod m
  u64 c = powmod_u64(r0[0], p_ - 2, p_);
  Coords out(k_, 0);
  for (size_t i = 0; i < s0.size() && i < k_; ++i) out[i] = mulmod(s0[i], c, p_);
  return Elem(this, std::move(out));
}
Elem Field::div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
Elem Field::pow(const Elem& a, u64 e) const {
  check(a);
  Elem r = one(), b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}
Elem Field::frobenius(const Elem& a, unsigned n) const {
  Elem r = a;
  for (unsigned i = 0; i < n; ++i) r = pow(r, p_);
  return r;
}
Elem Field::pthRoot(const Elem& a) const { return frobenius(a, k_ - 1); }
unsigned Field::degreeOver(const Elem& a) const {
  check(a);
  for (unsigned m = 1; m <= k_; ++m) {
    if (k_ % m) continue;
    if (frobenius(a, m) == a) return m;
  }
  throw FieldError("degreeOver: unreachable");
}
Elem Field::elemAt(u64 index) const {
  Coords c(k_);
  for (unsigned i = 0; i < k_; ++i) {
    c[i] = index % p_;
    index /= p_;
  }
  return Elem(this, std::move(c));
}
u64 Field::indexOf(const Elem& a) const {
  check(a);
  u64 n = 0;
  for (unsigned i = k_; i-- > 0;) n = n * p_ + a.coords()[i];
  return n;
}

bool Elem::isZero() const {
  for (auto c : c_)
    if (c) return false;
  return true;
}
bool Elem::isOne() const {
  if (c_.empty() || c_[0] != 1) return false;
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i]) return false;
  return true;
}
bool Elem::operator<(const Elem& o) const {
  assert(f_ == o.f_);
  for (size_t i = c_.size(); i-- > 0;) {
    if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
  }
  return false;
}
std::string Elem::str() const {
  if (!f_) return "?";
  std::ostringstream os;
  if (f_->k() == 1) {
    os << c_[0];
    return os.str();
  }
  os << "[";
  for (size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ",";
    os << c_[i];
  }
  os << "]";
  return os.str();
}

// --- canonical modulus search ----------------------------------------------

struct FieldFactory {
  static Field* create(u64 p, unsigned k, std::vector<u64> mod, bool prim) {
    auto* f = new Field(p, k);
    f->mod_ = std::move(mod);
    f->primitive_ = prim;
    return f;
  }
};

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::pair<u64, unsigned>, std::unique_ptr<Field>> fields;
};
Registry& registry() {
  static Registry r;
  return r;
}

// order of a modulo the full group order, given prime factors of the order
bool isPrimitiveRoot(u64 g, u64 p) {
  for (u64 l : primeFactors(p - 1))
    if (powmod_u64(g, (p - 1) / l, p) == 1) return false;
  return true;
}

// returns p^k as u128
u128 pk128(u64 p, unsigned k) {
  u128 q = 1;
  for (unsigned i = 0; i < k; ++i) q *= p;
  return q;
}

const Field& fieldMakeLocked(u64 p, unsigned k, unsigned cap);

// Check the norm-compatibility of candidate root x (class of x mod f) with
// the canonical generator one level down, for every maximal proper subfield.
bool normCompatible(const Vec& f, u64 p, unsigned k, unsigned cap) {
  u64 qk = static_cast<u64>(pk128(p, k));
  for (u64 l : primeFactors(k)) {
    unsigned a = k / static_cast<unsigned>(l);
    const Field& sub = fieldMakeLocked(p, a, cap);
    u64 qa = sub.order();
    Vec delta = vpowmod(Vec{0, 1}, (qk - 1) / (qa - 1), f, p);
    // minimal polynomial of delta over F_p: prod_{j<a} (X - delta^(p^j));
    // coefficients land in F_p exactly when delta has degree a (it does:
    // it is a primitive element of the degree-a subfield).
    std::vector<Vec> conj(a);
    conj[0] = delta;
    for (unsigned j = 1; j < a; ++j) conj[j] = vfrob(conj[j - 1], f, p);
    // multiply out, coefficients in F_{p^k} as Vec
    std::vector<Vec> mp{Vec{1}};  // polynomial in X with Vec coefficients
    for (unsigned j = 0; j < a; ++j) {
      std::vector<Vec> nx(mp.size() + 1, Vec{});
      for (size_t i = 0; i < mp.size(); ++i) {
        // X * mp[i]
        if (nx[i + 1].empty()) nx[i + 1] = mp[i];
        else {
          nx[i + 1].resize(std::max(nx[i + 1].size(), mp[i].size()), 0);
          for (size_t t = 0; t < mp[i].size(); ++t)
            nx[i + 1][t] = (nx[i + 1][t] + mp[i][t]) % p;
        }
        // -conj[j] * mp[i]
        Vec prod = vmulmod(mp[i], conj[j], f, p);
        nx[i].resize(std::max(nx[i].size(), prod.size()), 0);
        for (size_t t = 0; t < prod.size(); ++t)
          nx[i][t] = (nx[i][t] + p - prod[t]) % p;
        vtrim(nx[i]);
      }
      mp = std::move(nx);
    }
    // compare with sub.modulus(): all coefficients must be constants
    const auto& sm = sub.modulus();
    if (mp.size() != a + 1) return false;
    for (unsigned i = 0; i <= a; ++i) {
      Vec c = mp[i];
      vtrim(c);
      if (c.size() > 1) return false;
      u64 cv = c.empty() ? 0 : c[0];
      if (cv != sm[i] % p) return false;
    }
  }
  return true;
}

bool candidateOk(const Vec& f, u64 p, unsigned k, unsigned cap, u64 qk,
                 const std::vector<u64>& qkFactors) {
  if (!vIrreducible(f, p)) return false;
  // primitivity of x
  for (u64 l : qkFactors)
    if (vpowmod(Vec{0, 1}, (qk - 1) / l, f, p) == Vec{1}) return false;
  return normCompatible(f, p, k, cap);
}

Vec searchModulus(u64 p, unsigned k, unsigned cap, bool& primitive) {
  if (k == 1) {
    // x - g with g the least primitive root mod p (g = 0 for p = 2? no:
    // F_2* = {1}, the least primitive root is 1).
    u64 g = 1;
    if (p > 2)
      while (!isPrimitiveRoot(g, p)) ++g;
    primitive = true;
    return Vec{(p - g % p) % p, 1};
  }
  u128 qk128 = pk128(p, k);
  bool canCertify = qk128 - 1 <= ~0ull;
  if (!canCertify) {
    // fall back: first irreducible, no embedding support
    primitive = false;
  }
  u64 qk = canCertify ? static_cast<u64>(qk128) : 0;
  std::vector<u64> qkFactors;
  if (canCertify) qkFactors = primeFactors(qk - 1);

  if (p == 2 && canCertify) {
    // bit-packed scan
    for (u64 n = 1;; ++n) {
      u64 f = n | (1ull << k);
      if (!(f & 1)) continue;  // constant term must be nonzero
      if (!f2::irreducible2(f, static_cast<int>(k))) continue;
      bool prim = true;
      for (u64 l : qkFactors)
        if (f2::powmod2(2, (qk - 1) / l, f, static_cast<int>(k)) == 1) {
          prim = false;
          break;
        }
      if (!prim) continue;
      Vec fv(k + 1, 0);
      for (unsigned i = 0; i <= k; ++i) fv[i] = (f >> i) & 1;
      if (normCompatible(fv, p, k, cap)) {
        primitive = true;
        return fv;
      }
    }
  }

  for (u64 n = 1;; ++n) {
    // coefficients of x^0..x^(k-1) are the base-p digits of n
    Vec f(k + 1, 0);
    u64 t = n;
    bool over = false;
    for (unsigned i = 0; i < k; ++i) {
      f[i] = t % p;
      t /= p;
    }
    if (t) over = true;
    if (over) throw FieldError("modulus search exhausted");
    f[k] = 1;
    if (f[0] == 0) continue;
    if (canCertify) {
      if (candidateOk(f, p, k, cap, qk, qkFactors)) {
        primitive = true;
        return f;
      }
    } else {
      if (vIrreducible(f, p)) {
        primitive = false;
        return f;
      }
    }
  }
}

const Field& fieldMakeLocked(u64 p, unsigned k, unsigned cap) {
  auto& reg = registry();
  auto key = std::make_pair(p, k);
  auto it = reg.fields.find(key);
  if (it != reg.fields.end()) return *it->second;
  bool prim = false;
  std::vector<u64> mod = searchModulus(p, k, cap, prim);
  auto f = std::unique_ptr<Field>(FieldFactory::create(p, k, std::move(mod), prim));
  auto* ptr = f.get();
  reg.fields.emplace(key, std::move(f));
  return *ptr;
}

}  // namespace

const Field& field_make(u64 p, unsigned k, unsigned cap) {
  if (p < 2 || !isPrimeU64(p)) throw FieldError("characteristic must be prime");
  if (k < 1 || k > cap) throw FieldError("extension degree out of range");
  std::lock_guard<std::mutex> lock(registry().mu);
  return fieldMakeLocked(p, k, cap);
}
const Field& field_make(u64 p, unsigned k) {
  return field_make(p, k, kFieldDegreeCap);
}

Elem embed(const Elem& x, const Field& target) {
  const Field* src = x.field();
  if (src == &target) return x;
  if (src->p() != target.p() || target.k() % src->k() != 0)
    throw FieldError("no embedding: incompatible degrees");
  if (!src->primitiveCertified() || !target.primitiveCertified())
    throw FieldError("no canonical embedding for this field size");
  std::lock_guard<std::mutex> lock(registry().mu);
  auto& pows = target.embedPows_[src->k()];
  if (pows.empty()) {
    u64 qa = src->order(), qb = target.order();
    Elem eta = target.pow(target.gen(), (qb - 1) / (qa - 1));
    Elem acc = target.one();
    for (unsigned i = 0; i < src->k(); ++i) {
      pows.push_back(acc);
      acc = target.mul(acc, eta);
    }
  }
  Elem out = target.zero();
  for (unsigned i = 0; i < src->k(); ++i) {
    if (!x.coords()[i]) continue;
    out = target.add(out, target.mul(pows[i], target.fromInt(x.coords()[i])));
  }
  return out;
}

// --- Poly ------------------------------------------------------------------

Poly::Poly(FieldRef f, std::vector<Elem> c) : f_(f), c_(std::move(c)) {
  while (!c_.empty() && c_.back().isZero()) c_.pop_back();
}
Elem Poly::coeff(int i) const {
  if (i < 0 || i > deg()) return f_->zero();
  return c_[static_cast<size_t>(i)];
}
Elem Poly::lead() const {
  if (isZero()) throw FieldError("lead of zero polynomial");
  return c_.back();
}
bool Poly::isMonic() const { return !isZero() && c_.back().isOne(); }
bool Poly::operator<(const Poly& o) const {
  if (deg() != o.deg()) return deg() < o.deg();
  for (int i = deg(); i >= 0; --i) {
    if (!(coeff(i) == o.coeff(i))) return coeff(i) < o.coeff(i);
  }
  return false;
}
std::string Poly::str() const {
  if (isZero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = deg(); i >= 0; --i) {
    if (coeff(i).isZero()) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || !coeff(i).isOne()) os << coeff(i).str();
    if (i > 0) {
      if (!coeff(i).isOne()) os << "*";
      os << "x";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

Poly poly_zero(const Field& f) { return Poly(&f); }
Poly poly_one(const Field& f) { return Poly(&f, {f.one()}); }
Poly poly_x(const Field& f) { return Poly(&f, {f.zero(), f.one()}); }
Poly poly_const(const Elem& a) { return Poly(a.field(), {a}); }
Poly poly_from(const Field& f, std::vector<u64> ic) {
  std::vector<Elem> c;
  c.reserve(ic.size());
  for (u64 v : ic) c.push_back(f.fromInt(v));
  return Poly(&f, std::move(c));
}

static const Field& pf(const Poly& a) { return *a.field(); }

Poly add(const Poly& a, const Poly& b) {
  const Field& f = pf(a);
  std::vector<Elem> c;
  int n = std::max(a.deg(), b.deg());
  c.reserve(n + 1);
  for (int i = 0; i <= n; ++i) c.push_back(f.add(a.coeff(i), b.coeff(i)));
  return Poly(&f, std::move(c));
}
Poly sub(const Poly& a, const Poly& b) {
  const Field& f = pf(a);
  std::vector<Elem> c;
  int n = std::max(a.deg(), b.deg());
  for (int i = 0; i <= n; ++i) c.push_back(f.sub(a.coeff(i), b.coeff(i)));
  return Poly(&f, std::move(c));
}
Poly neg(const Poly& a) { return sub(poly_zero(pf(a)), a); }
Poly mul(const Poly& a, const Poly& b) {
  const Field& f = pf(a);
  if (a.isZero() || b.isZero()) return poly_zero(f);
  std::vector<Elem> c(a.deg() + b.deg() + 1, f.zero());
  for (int i = 0; i <= a.deg(); ++i) {
    if (a.coeff(i).isZero()) continue;
    for (int j = 0; j <= b.deg(); ++j)
      c[i + j] = f.add(c[i + j], f.mul(a.coeff(i), b.coeff(j)));
  }
  return Poly(&f, std::move(c));
}
Poly mul(const Poly& a, const Elem& s) {
  const Field& f = pf(a);
  std::vector<Elem> c;
  for (int i = 0; i <= a.deg(); ++i) c.push_back(f.mul(a.coeff(i), s));
  return Poly(&f, std::move(c));
}
Poly monic(const Poly& a) {
  if (a.isZero() || a.isMonic()) return a;
  return mul(a, pf(a).inv(a.lead()));
}
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  const Field& f = pf(a);
  if (b.isZero()) throw FieldError("polynomial division by zero");
  if (a.deg() < b.deg()) return {poly_zero(f), a};
  std::vector<Elem> r(a.coeffs());
  std::vector<Elem> q(a.deg() - b.deg() + 1, f.zero());
  Elem il = f.inv(b.lead());
  for (int i = a.deg(); i >= b.deg(); --i) {
    Elem c = f.mul(r[i], il);
    if (c.isZero()) continue;
    q[i - b.deg()] = c;
    for (int j = 0; j <= b.deg(); ++j)
      r[i - b.deg() + j] = f.sub(r[i - b.deg() + j], f.mul(c, b.coeff(j)));
  }
  return {Poly(&f, std::move(q)), Poly(&f, std::move(r))};
}
Poly mod(const Poly& a, const Poly& b) { return divmod(a, b).second; }
Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.isZero()) {
    Poly r = mod(x, y);
    x = y;
    y = r;
  }
  return monic(x);
}
Poly derivative(const Poly& a) {
  const Field& f = pf(a);
  std::vector<Elem> c;
  for (int i = 1; i <= a.deg(); ++i)
    c.push_back(f.mul(a.coeff(i), f.fromInt(static_cast<u64>(i))));
  return Poly(&f, std::move(c));
}
Elem eval(const Poly& a, const Elem& x) {
  const Field& f = *x.field();
  Elem r = f.zero();
  for (int i = a.deg(); i >= 0; --i) {
    r = f.mul(r, x);
    Elem c = a.coeff(i);
    if (c.field() != &f) c = embed(c, f);
    r = f.add(r, c);
  }
  return r;
}
Poly powmod(const Poly& base, u64 e, const Poly& m) {
  Poly r = poly_one(pf(base)), b = mod(base, m);
  while (e) {
    if (e & 1) r = mod(mul(r, b), m);
    b = mod(mul(b, b), m);
    e >>= 1;
  }
  return r;
}
Poly frobPowmod(const Poly& base, unsigned n, const Poly& m) {
  Poly r = mod(base, m);
  u64 p = pf(base).p();
  for (unsigned i = 0; i < n; ++i) r = powmod(r, p, m);
  return r;
}
Poly embedPoly(const Poly& a, const Field& target) {
  std::vector<Elem> c;
  for (int i = 0; i <= a.deg(); ++i) c.push_back(embed(a.coeff(i), target));
  return Poly(&target, std::move(c));
}
Poly reverse(const Poly& a) {
  std::vector<Elem> c(a.coeffs().rbegin(), a.coeffs().rend());
  return Poly(a.field(), std::move(c));
}

bool irreducible(const Poly& a) {
  if (a.deg() < 1) return false;
  if (a.deg() == 1) return true;
  const Field& f = pf(a);
  Poly m = monic(a);
  unsigned n = static_cast<unsigned>(m.deg());
  Poly x = poly_x(f);
  // h = x^(q^i) mod m, i = 1..n
  std::vector<Poly> fr(n + 1, poly_zero(f));
  Poly h = x;
  for (unsigned i = 1; i <= n; ++i) {
    h = frobPowmod(h, f.k(), m);
    fr[i] = h;
  }
  if (!(fr[n] == mod(x, m))) return false;
  for (u64 l : primeFactors(n))
    if (gcd(sub(fr[n / static_cast<unsigned>(l)], x), m).deg() != 0)
      return false;
  return true;
}

namespace {

struct SplitRng {
  u64 s;
  explicit SplitRng(u64 seed) : s(seed) {}
  u64 next() {
    s += 0x9e3779b97f4a7c15ull;
    u64 z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

Poly randomPoly(const Field& f, int degBelow, SplitRng& rng) {
  std::vector<Elem> c;
  for (int i = 0; i < degBelow; ++i) c.push_back(f.elemAt(rng.next() % f.order()));
  return Poly(&f, std::move(c));
}

// equal-degree splitting of a product of distinct irreducibles of degree d
void edf(const Poly& f, unsigned d, std::vector<Poly>& out, SplitRng& rng) {
  if (f.deg() == static_cast<int>(d)) {
    out.push_back(monic(f));
    return;
  }
  const Field& F = pf(f);
  u64 p = F.p();
  unsigned kd = F.k() * d;
  while (true) {
    Poly r = randomPoly(F, f.deg(), rng);
    if (r.deg() < 1) continue;
    Poly g;
    if (p == 2) {
      // absolute trace map of r down to F_2
      Poly t = mod(r, f), acc = t;
      for (unsigned i = 1; i < kd; ++i) {
        t = mod(mul(t, t), f);
        acc = add(acc, t);
      }
      g = gcd(acc, f);
    } else {
      // norm down to F_q then power (q-1)/2
      Poly nrm = mod(r, f), cur = nrm;
      for (unsigned i = 1; i < d; ++i) {
        cur = frobPowmod(cur, F.k(), f);
        nrm = mod(mul(nrm, cur), f);
      }
      Poly s = powmod(nrm, (F.order() - 1) / 2, f);
      g = gcd(sub(s, poly_one(F)), f);
    }
    if (g.deg() > 0 && g.deg() < f.deg()) {
      edf(g, d, out, rng);
      edf(divmod(f, g).first, d, out, rng);
      return;
    }
  }
}

void factorSquarefreeMonic(const Poly& f, int mult,
                           std::vector<std::pair<Poly, int>>& out, u64 seed) {
  // distinct-degree then equal-degree
  const Field& F = pf(f);
  Poly rem = f;
  Poly h = poly_x(F);
  unsigned d = 0;
  while (rem.deg() > 0) {
    ++d;
    if (rem.deg() < static_cast<int>(2 * d)) {
      out.emplace_back(monic(rem), mult);
      break;
    }
    h = frobPowmod(h, F.k(), rem);
    Poly g = gcd(sub(h, poly_x(F)), rem);
    if (g.deg() > 0) {
      SplitRng rng(seed ^ (0xd1f5ull * d));
      std::vector<Poly> parts;
      edf(g, d, parts, rng);
      for (auto& q : parts) out.emplace_back(q, mult);
      rem = divmod(rem, g).first;
      h = mod(h, rem);
    }
  }
}

}  // namespace

std::vector<std::pair<Poly, int>> poly_factor(const Poly& a, u64 seed) {
  if (a.isZero()) throw FieldError("factor of zero polynomial");
  const Field& F = pf(a);
  std::vector<std::pair<Poly, int>> out;
  Poly f = monic(a);
  if (f.deg() == 0) return out;

  // squarefree decomposition, characteristic-p aware
  std::vector<std::pair<Poly, int>> square;  // (squarefree part, multiplicity)
  struct Item {
    Poly f;
    int mult;
  };
  std::vector<Item> stack{{f, 1}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    Poly g = it.f;
    if (g.deg() == 0) continue;
    Poly dg = derivative(g);
    if (dg.isZero()) {
      // g = h(x^p); take p-th roots of coefficients
      u64 p = F.p();
      std::vector<Elem> c;
      for (int i = 0; i <= g.deg(); i += static_cast<int>(p))
        c.push_back(F.pthRoot(g.coeff(i)));
      stack.push_back({Poly(&F, std::move(c)), it.mult * static_cast<int>(p)});
      continue;
    }
    Poly c = gcd(g, dg);
    Poly w = divmod(g, c).first;  // product of squarefree factors
    int m = it.mult;
    while (w.deg() > 0) {
      Poly y = gcd(w, c);
      Poly z = divmod(w, y).first;  // factors of exact current multiplicity
      if (z.deg() > 0) square.emplace_back(z, m);
      w = y;
      c = divmod(c, y).first;
      m += it.mult;
    }
    if (c.deg() > 0) stack.push_back({c, it.mult});
  }

  for (auto& [sf, mult] : square) factorSquarefreeMonic(sf, mult, out, seed);

  // merge duplicates, canonical order
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<Poly, int>> merged;
  for (auto& pr : out) {
    if (!merged.empty() && merged.back().first == pr.first)
      merged.back().second += pr.second;
    else
      merged.push_back(pr);
  }
  return merged;
}

std::vector<std::pair<Elem, int>> poly_roots(const Poly& f, const Field& target,
                                             u64 seed) {
  const Field* src = f.field();
  if (src->p() != target.p() || target.k() % src->k() != 0)
    throw FieldError("poly_roots: target does not extend coefficient field");
  Poly g = embedPoly(f, target);
  std::vector<std::pair<Elem, int>> roots;
  if (g.isZero()) throw FieldError("poly_roots: zero polynomial");
  for (auto& [fac, mult] : poly_factor(g, seed)) {
    if (fac.deg() == 1) {
      // monic x + c, root -c
      roots.emplace_back(target.neg(fac.coeff(0)), mult);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return a.first < b.first;
  });
  return roots;
}

}  // namespace fftower
