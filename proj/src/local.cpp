#include "fftower/local.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace fftower {
namespace {

sint sgcd(sint a, sint b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    sint t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// extended gcd: returns (g, a, b) with a*x + b*y = g
void xgcd(sint x, sint y, sint& g, sint& a, sint& b) {
  if (y == 0) {
    g = x < 0 ? -x : x;
    a = x < 0 ? -1 : 1;
    b = 0;
    return;
  }
  sint g1, a1, b1;
  xgcd(y, x % y, g1, a1, b1);
  g = g1;
  a = b1;
  b = a1 - (x / y) * b1;
}

}  // namespace

// ---------------------------------------------------------------- BiPoly

int BiPoly::degS() const {
  int d = 0;
  for (auto& c : tc) d = std::max(d, c.deg());
  return d;
}

BiPoly BiPoly::transpose() const {
  BiPoly out;
  out.f = f;
  int dS = degS();
  out.tc.assign(static_cast<size_t>(dS) + 1, poly_zero(*f));
  for (int i = 0; i <= dS; ++i) {
    std::vector<Elem> c;
    for (int j = 0; j <= degT(); ++j) c.push_back(tc[static_cast<size_t>(j)].coeff(i));
    out.tc[static_cast<size_t>(i)] = Poly(f, std::move(c));
  }
  while (out.tc.size() > 1 && out.tc.back().isZero()) out.tc.pop_back();
  return out;
}

BiPoly BiPoly::derivativeS() const {
  BiPoly out;
  out.f = f;
  for (auto& c : tc) out.tc.push_back(derivative(c));
  while (out.tc.size() > 1 && out.tc.back().isZero()) out.tc.pop_back();
  return out;
}

BiPoly BiPoly::derivativeT() const {
  BiPoly out;
  out.f = f;
  for (size_t j = 1; j < tc.size(); ++j)
    out.tc.push_back(mul(tc[j], f->fromInt(static_cast<std::uint64_t>(j % f->p()))));
  if (out.tc.empty()) out.tc.push_back(poly_zero(*f));
  while (out.tc.size() > 1 && out.tc.back().isZero()) out.tc.pop_back();
  return out;
}

Poly BiPoly::evalT(const Elem& beta) const {
  Poly r = poly_zero(*f);
  for (int j = degT(); j >= 0; --j) r = add(mul(r, poly_const(beta)), tc[static_cast<size_t>(j)]);
  return r;
}

Poly BiPoly::evalS(const Elem& alpha) const {
  std::vector<Elem> c;
  for (auto& sc : tc) c.push_back(eval(sc, alpha));
  return Poly(alpha.field(), std::move(c));
}

std::string BiPoly::str() const {
  std::ostringstream os;
  bool first = true;
  for (int j = degT(); j >= 0; --j) {
    const Poly& c = tc[static_cast<size_t>(j)];
    if (c.isZero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str() << ")";
    if (j > 0) os << "*T" << (j > 1 ? "^" + std::to_string(j) : "");
  }
  if (first) os << "0";
  return os.str();
}

BiPoly bipoly_from(const Field& f,
                   const std::vector<std::vector<std::uint64_t>>& stCoeffs) {
  BiPoly H;
  H.f = &f;
  for (auto& sc : stCoeffs) H.tc.push_back(poly_from(f, sc));
  while (H.tc.size() > 1 && H.tc.back().isZero()) H.tc.pop_back();
  return H;
}

std::optional<ASShape> as_shape(const BiPoly& H) {
  const Field& f = *H.f;
  sint p = static_cast<sint>(f.p());
  if (H.degT() != p) return std::nullopt;
  // need tc[p] = b2, tc[1] = -b2, tc[0] = -b1, everything else zero
  for (int j = 2; j < p; ++j)
    if (!H.coeffT(j).isZero()) return std::nullopt;
  Poly b2 = H.coeffT(static_cast<int>(p));
  if (b2.isZero()) return std::nullopt;
  if (!(H.coeffT(1) == neg(b2))) return std::nullopt;
  Poly b1 = neg(H.coeffT(0));
  if (b1.isZero()) return std::nullopt;
  return ASShape{b1, b2};
}

// ---------------------------------------------------------------- polygon

NewtonPolygon newton_polygon(
    const std::vector<std::pair<int, std::optional<sint>>>& pts) {
  struct P {
    sint j, v;
  };
  std::vector<P> fin;
  for (auto& [j, v] : pts)
    if (v) fin.push_back({j, *v});
  if (fin.size() < 2) throw FieldError("newton_polygon: fewer than two finite points");
  std::sort(fin.begin(), fin.end(), [](const P& a, const P& b) {
    return a.j != b.j ? a.j < b.j : a.v < b.v;
  });
  // drop duplicate indices (keep lowest valuation)
  std::vector<P> uniq;
  for (auto& pt : fin)
    if (uniq.empty() || uniq.back().j != pt.j) uniq.push_back(pt);
  // lower convex hull, slopes increasing
  std::vector<P> hull;
  for (auto& pt : uniq) {
    while (hull.size() >= 2) {
      const P& a = hull[hull.size() - 2];
      const P& b = hull[hull.size() - 1];
      // pop b if slope(a,b) >= slope(b,pt)
      if ((b.v - a.v) * (pt.j - b.j) >= (pt.v - b.v) * (b.j - a.j))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  NewtonPolygon np;
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    sint dj = hull[i + 1].j - hull[i].j;
    sint dv = hull[i + 1].v - hull[i].v;
    sint g = sgcd(dj, dv);
    if (g == 0) g = 1;
    PolygonSegment seg;
    seg.e = dj / g;
    seg.h = -dv / g;
    // lowest terms with e > 0
    sint gg = sgcd(seg.e, seg.h);
    if (gg > 1) {
      seg.e /= gg;
      seg.h /= gg;
    }
    seg.j0 = static_cast<int>(hull[i].j);
    seg.j1 = static_cast<int>(hull[i + 1].j);
    np.segments.push_back(seg);
  }
  return np;
}

// ------------------------------------------------------------- as_normalize

ASNormalized as_normalize(const LSeries& g, std::uint64_t p) {
  const Field& f = *g.field();
  LSeries cur = g;
  LSeries corr = LSeries::zero(f);
  for (int guard = 0; guard < 4096; ++guard) {
    auto v = cur.val();
    if (!v) {
      if (cur.isExact()) return {corr, cur};  // exactly zero
      // valuation hidden by precision: if the window already reaches >= 0 we
      // are done, otherwise we cannot decide the reduced valuation
      if (cur.end() >= 0) return {corr, cur};
      throw PrecisionError("as_normalize: valuation below window");
    }
    if (*v >= 0) return {corr, cur};
    if (static_cast<std::uint64_t>((-*v) % static_cast<sint>(p)) != 0)
      return {corr, cur};
    // subtract u^p - u with u = c t^(v/p), c^p = lead
    Elem lead = cur.leadCoeff();
    Elem c = f.pthRoot(lead);
    sint vp = *v / static_cast<sint>(p);
    LSeries u = LSeries::monomial(c, vp);
    corr = add(corr, u);
    cur = add(sub(cur, LSeries::monomial(lead, *v)), u);
  }
  throw PrecisionError("as_normalize: did not terminate");
}

// --------------------------------------------------------------- internals

namespace {

using CoeffVec = std::vector<LSeries>;  // polynomial in T, series coefficients

struct Ctx {
  const BiPoly* H;
  DecomposeOptions opt;
  sint p;
};

// cap every coefficient at `rel` terms of relative precision so that exact
// inputs do not balloon inside Newton loops
CoeffVec truncAll(const CoeffVec& A, sint rel) {
  CoeffVec out;
  out.reserve(A.size());
  for (auto& a : A) {
    sint lead = a.stored().empty() ? 0 : a.lead();
    out.push_back(a.truncated(lead + rel));
  }
  return out;
}

CoeffVec mapCoeffs(const CoeffVec& A, const Field& target) {
  CoeffVec out;
  out.reserve(A.size());
  for (auto& a : A) out.push_back(a.mapField(target));
  return out;
}

LSeries evalA(const CoeffVec& A, const LSeries& u) {
  const Field& f = *u.field();
  LSeries r = LSeries::zero(f);
  for (size_t j = A.size(); j-- > 0;) {
    r = mul(r, u);
    r = add(r, A[j]);
  }
  return r;
}

CoeffVec derivT(const CoeffVec& A) {
  CoeffVec out;
  const Field& f = *A[0].field();
  for (size_t j = 1; j < A.size(); ++j)
    out.push_back(mul(A[j], f.fromInt(static_cast<std::uint64_t>(j % f.p()))));
  if (out.empty()) out.push_back(LSeries::zero(f));
  return out;
}

// A(s + T) via Pascal
CoeffVec recenter(const CoeffVec& A, const LSeries& s) {
  const Field& f = *A[0].field();
  size_t n = A.size();
  // binomials mod p
  std::vector<std::vector<std::uint64_t>> binom(n, std::vector<std::uint64_t>(n, 0));
  for (size_t i = 0; i < n; ++i) {
    binom[i][0] = 1;
    for (size_t j = 1; j <= i; ++j)
      binom[i][j] = (binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0)) % f.p();
  }
  CoeffVec out(n, LSeries::zero(f));
  std::vector<LSeries> spow(n, LSeries::one(f));
  for (size_t i = 1; i < n; ++i) spow[i] = mul(spow[i - 1], s);
  for (size_t i = 0; i < n; ++i) {
    LSeries acc = LSeries::zero(f);
    for (size_t j = i; j < n; ++j) {
      if (!binom[j][i]) continue;
      LSeries term = mul(A[j], spow[j - i]);
      if (binom[j][i] != 1) term = mul(term, f.fromInt(binom[j][i]));
      acc = add(acc, term);
    }
    out[i] = acc;
  }
  return out;
}

CoeffVec composeCoeffs(const CoeffVec& A, const LSeries& tP) {
  CoeffVec out;
  out.reserve(A.size());
  for (auto& a : A) out.push_back(compose(a, tP));
  return out;
}

struct Proto {
  sint e = 1;
  unsigned fDeg = 1;
  const Field* home = nullptr;
  LSeries y;       // working-variable series in t_Q
  LSeries tP;      // t_P in t_Q
  std::optional<sint> dExact;  // AS-exact different exponent
  BranchStatus status = BranchStatus::Exact;
  int covered = 1;
  std::string note;
};

// polygon of a CoeffVec; throws PrecisionError when a hidden coefficient
// could dent the hull
NewtonPolygon coeffPolygon(const CoeffVec& A) {
  std::vector<std::pair<int, std::optional<sint>>> pts;
  for (size_t j = 0; j < A.size(); ++j) {
    auto v = A[j].val();
    if (v)
      pts.emplace_back(static_cast<int>(j), *v);
    else
      pts.emplace_back(static_cast<int>(j), std::nullopt);
  }
  int finite = 0;
  for (auto& [j, v] : pts)
    if (v) ++finite;
  if (finite < 2) throw PrecisionError("degenerate fiber polynomial");
  NewtonPolygon np = newton_polygon(pts);
  // hidden points must lie strictly above the hull within their windows
  for (size_t j = 0; j < A.size(); ++j) {
    if (A[j].val()) continue;
    sint window = A[j].end();
    for (auto& seg : np.segments) {
      if (static_cast<int>(j) < seg.j0 || static_cast<int>(j) > seg.j1) continue;
      // line value at j: v(j0) + (j - j0) * (-h/e); v(j0) from segment data is
      // not stored, recompute from neighbors: find hull value via the two
      // endpoint coefficients
      auto v0 = A[static_cast<size_t>(seg.j0)].val();
      if (!v0) continue;
      // e * lineV = e*v0 - (j - j0) * h
      sint lineVe = seg.e * *v0 - (static_cast<sint>(j) - seg.j0) * seg.h;
      if (window * seg.e <= lineVe)
        throw PrecisionError("coefficient window touches the hull");
    }
  }
  return np;
}

// residual polynomial of a segment over `home`
Poly segmentResidual(const CoeffVec& A, const PolygonSegment& seg,
                     const Field& home) {
  auto v0 = A[static_cast<size_t>(seg.j0)].val();
  if (!v0) throw PrecisionError("segment endpoint hidden");
  std::vector<Elem> c;
  int L = seg.latticeLength();
  for (int i = 0; i <= L; ++i) {
    sint j = seg.j0 + static_cast<sint>(i) * seg.e;
    sint lineV = *v0 - static_cast<sint>(i) * seg.h;
    const LSeries& aj = A[static_cast<size_t>(j)];
    if (lineV >= aj.end()) throw PrecisionError("residual coefficient hidden");
    c.push_back(aj.at(lineV));
  }
  return Poly(&home, std::move(c));
}

// Hensel lift of a simple root (e = 1): u0 given, iterate u -= A(u)/A'(u).
LSeries henselLift(const CoeffVec& A0, LSeries u0, sint target) {
  sint uLead = u0.val() ? *u0.val() : 0;
  sint rel = target - std::min<sint>(0, uLead) + 8;
  CoeffVec A = truncAll(A0, rel);
  CoeffVec Ad = derivT(A);
  LSeries u = u0.truncated(target + 2);
  sint lastVal = LSeries::kExact;
  for (int it = 0; it < 64; ++it) {
    LSeries fu = evalA(A, u);
    auto vf = fu.val();
    if (!vf) {
      // residual vanished to precision: certify to the window
      LSeries da = evalA(Ad, u);
      sint vd = da.val() ? *da.val() : 0;
      return u.truncated(fu.end() - vd);
    }
    LSeries da = evalA(Ad, u);
    auto vd = da.val();
    if (!vd) throw PrecisionError("hensel: derivative hidden");
    LSeries delta = neg(div(fu, da));
    sint dval = delta.val() ? *delta.val() : delta.end();
    if (dval >= target) {
      u = add(u, delta);
      return u.truncated(target);
    }
    if (dval <= lastVal && it > 4)
      throw PrecisionError("hensel: no progress");
    lastVal = dval;
    u = add(u, delta);
  }
  throw PrecisionError("hensel: iteration budget exhausted");
}

struct LiftOut {
  LSeries u;   // root series in t_Q
  LSeries tP;  // parent uniformizer in t_Q
};

// Lift a branch of valuation h/e (lowest terms) with residual root rho:
// solve { A(u) = 0, tP^a u^b = tQ-normalized } starting from
// tP = rho^{-b} t^e, u = rho^a t^h.
LiftOut monomialLift(const CoeffVec& A0, sint h, sint e, const Elem& rho,
                     sint target) {
  const Field& f = *A0[0].field();
  sint hAbs0 = h < 0 ? -h : h;
  CoeffVec A = truncAll(A0, target / e + hAbs0 + 10);
  sint g, a, b;
  xgcd(e, h, g, a, b);
  if (g != 1) throw FieldError("monomialLift: slope not in lowest terms");
  // a*e + b*h = 1; start from tP = rho^{-b} t^e, u = rho^a t^h, which
  // satisfies both leading relations with constant exactly t.
  Elem tau = b >= 0 ? f.pow(f.inv(rho), static_cast<std::uint64_t>(b))
                    : f.pow(rho, static_cast<std::uint64_t>(-b));
  Elem gamma = a >= 0 ? f.pow(rho, static_cast<std::uint64_t>(a))
                      : f.pow(f.inv(rho), static_cast<std::uint64_t>(-a));
  sint bigEnd = target + e + hAbs0 + 8;
  LSeries tP = LSeries::monomial(tau, e).truncated(bigEnd);
  LSeries u = LSeries::monomial(gamma, h).truncated(bigEnd);

  CoeffVec Ad = derivT(A);
  CoeffVec AdS;  // d a_j / d t_P
  AdS.reserve(A.size());
  for (auto& aj : A) AdS.push_back(derivative(aj));

  std::uint64_t p = f.p();
  auto elemOf = [&](sint v) {
    return f.fromInt(static_cast<std::uint64_t>(((v % (sint)p) + (sint)p) % (sint)p));
  };
  // division-free first equation: tP^a+ u^b+ - t * tP^a- u^b- = 0
  sint ap = a > 0 ? a : 0, am = a < 0 ? -a : 0;
  sint bp = b > 0 ? b : 0, bm = b < 0 ? -b : 0;

  sint last1 = -LSeries::kExact, last2 = -LSeries::kExact;
  int stall = 0;
  for (int it = 0; it < 96; ++it) {
    LSeries lhs = mul(pow(tP, ap), pow(u, bp));
    LSeries rhs = shift(mul(pow(tP, am), pow(u, bm)), 1);
    LSeries r1 = sub(lhs, rhs);
    CoeffVec Acomp = composeCoeffs(A, tP);
    LSeries r2 = evalA(Acomp, u);
    auto v1 = r1.val(), v2 = r2.val();
    sint c1 = v1 ? *v1 : r1.end();
    sint c2 = v2 ? *v2 : r2.end();
    bool done1 = !v1 && (c1 >= target || c1 >= r1.end());
    bool done2 = !v2 && (c2 >= target || c2 >= r2.end());
    if (done1 && done2) {
      // converged as far as the data allows; certify honest windows
      CoeffVec AdComp = composeCoeffs(Ad, tP);
      LSeries J22 = evalA(AdComp, u);
      LSeries J11s = sub(mul(mul(pow(tP, ap > 0 ? ap - 1 : 0), pow(u, bp)), elemOf(ap)),
                         shift(mul(mul(pow(tP, am > 0 ? am - 1 : 0), pow(u, bm)), elemOf(am)), 1));
      LSeries J12s = sub(mul(mul(pow(tP, ap), pow(u, bp > 0 ? bp - 1 : 0)), elemOf(bp)),
                         shift(mul(mul(pow(tP, am), pow(u, bm > 0 ? bm - 1 : 0)), elemOf(bm)), 1));
      CoeffVec AdSComp = composeCoeffs(AdS, tP);
      LSeries J21 = evalA(AdSComp, u);
      auto valOr = [](const LSeries& sdet, sint dflt) {
        return sdet.val() ? *sdet.val() : dflt;
      };
      LSeries det = sub(mul(J11s, J22), mul(J12s, J21));
      if (!det.val()) throw PrecisionError("monomialLift: singular jacobian");
      sint vDet = *det.val();
      sint big = LSeries::kExact;
      sint uErr = std::min(valOr(J11s, big) + c2, valOr(J21, big) + c1) - vDet;
      sint tErr = std::min(valOr(J12s, big) + c2, valOr(J22, big) + c1) - vDet;
      if (getenv("FFT_DBG")) fprintf(stderr, "mlift accept e=%lld h=%lld it=%d c1=%lld c2=%lld vDet=%lld uErr=%lld tErr=%lld vJ12=%lld vJ22=%lld aend0=%lld\n", (long long)e,(long long)h,it,(long long)c1,(long long)c2,(long long)vDet,(long long)uErr,(long long)tErr,(long long)valOr(J12s,-1),(long long)valOr(J22,-1),(long long)A[0].end());
      if (uErr <= h || tErr <= e)
        throw PrecisionError("monomialLift: could not certify windows");
      return {u.truncated(uErr), tP.truncated(tErr)};
    }
    if (c1 <= last1 && c2 <= last2) {
      if (++stall > 2) throw PrecisionError("monomialLift: stalled");
    } else
      stall = 0;
    last1 = c1;
    last2 = c2;
    // Jacobian of (r1, r2) in (tP, u)
    LSeries J11 = sub(mul(mul(pow(tP, ap > 0 ? ap - 1 : 0), pow(u, bp)), elemOf(ap)),
                      shift(mul(mul(pow(tP, am > 0 ? am - 1 : 0), pow(u, bm)), elemOf(am)), 1));
    LSeries J12 = sub(mul(mul(pow(tP, ap), pow(u, bp > 0 ? bp - 1 : 0)), elemOf(bp)),
                      shift(mul(mul(pow(tP, am), pow(u, bm > 0 ? bm - 1 : 0)), elemOf(bm)), 1));
    CoeffVec AdComp = composeCoeffs(Ad, tP);
    LSeries J22 = evalA(AdComp, u);
    CoeffVec AdSComp = composeCoeffs(AdS, tP);
    LSeries J21 = evalA(AdSComp, u);
    LSeries det = sub(mul(J11, J22), mul(J12, J21));
    if (!det.val()) throw PrecisionError("monomialLift: singular jacobian");
    LSeries dtP = div(sub(mul(J12, r2), mul(J22, r1)), det);
    LSeries du = div(sub(mul(J21, r1), mul(J11, r2)), det);
    tP = add(tP, dtP).truncated(bigEnd);
    u = add(u, du).truncated(bigEnd);
    if (!tP.val() || *tP.val() != e || !u.val() || *u.val() != h)
      throw PrecisionError("monomialLift: drifted away from the branch");
  }
  throw PrecisionError("monomialLift: iteration budget exhausted");
}

// polynomial division in T with series coefficients
CoeffVec divExactT(const CoeffVec& A, const CoeffVec& B) {
  const Field& f = *A[0].field();
  CoeffVec rem = A;
  int degB = static_cast<int>(B.size()) - 1;
  int degA = static_cast<int>(A.size()) - 1;
  CoeffVec q(static_cast<size_t>(degA - degB + 1), LSeries::zero(f));
  LSeries il = inv(B.back());
  for (int i = degA; i >= degB; --i) {
    LSeries c = mul(rem[static_cast<size_t>(i)], il);
    q[static_cast<size_t>(i - degB)] = c;
    for (int j = 0; j <= degB; ++j)
      rem[static_cast<size_t>(i - degB + j)] =
          sub(rem[static_cast<size_t>(i - degB + j)], mul(c, B[static_cast<size_t>(j)]));
  }
  return q;
}

void analyzeRoots(const CoeffVec& A, const Field* home, Ctx& ctx,
                  std::optional<std::pair<sint, sint>> valGreaterThan,
                  int recenterBudget, sint target, std::vector<Proto>& out);

// AS treatment for an equation  lead*T^p + mid*T + low = 0 given in the
// normalized form z^p - z = g, applied after the caller's substitutions.
// Emits protos for the roots z (working variable = z).
void asAnalyze(const LSeries& g0, const Field* home, Ctx& ctx, sint target,
               std::vector<Proto>& out) {
  const Field& f = *home;
  sint p = ctx.p;
  sint gLead = g0.stored().empty() ? 0 : g0.lead();
  LSeries g = g0.truncated(gLead + target + 8);
  ASNormalized nrm = as_normalize(g, static_cast<std::uint64_t>(p));
  const LSeries& gr = nrm.reduced;
  auto v = gr.val();
  if (v && *v < 0) {
    sint m = -*v;
    // one branch, e = p, d = (m+1)(p-1), residual root = leading coefficient
    Elem rho = gr.leadCoeff();
    // equation z'^p - z' - gr = 0
    CoeffVec E(static_cast<size_t>(p) + 1, LSeries::zero(f));
    E[0] = neg(gr);
    E[1] = LSeries::monomial(f.neg(f.one()), 0);
    E[static_cast<size_t>(p)] = LSeries::one(f);
    LiftOut lo = monomialLift(E, -m, p, rho, target);
    Proto pr;
    pr.e = p;
    pr.fDeg = 1;
    pr.home = home;
    pr.tP = lo.tP;
    pr.y = add(lo.u, compose(nrm.correction, lo.tP));
    pr.dExact = (m + 1) * (p - 1);
    pr.covered = static_cast<int>(p);
    out.push_back(pr);
    return;
  }
  // unramified: residue equation s^p - s = c0
  Elem c0 = f.zero();
  if (v && *v == 0) c0 = gr.at(0);
  std::vector<Elem> rc{f.neg(c0), f.neg(f.one())};
  rc.resize(static_cast<size_t>(p) + 1, f.zero());
  rc[static_cast<size_t>(p)] = f.one();
  Poly residueEq(&f, std::move(rc));
  for (auto& [fac, mult] : poly_factor(residueEq, ctx.opt.seed)) {
    if (mult != 1) throw PrecisionError("asAnalyze: inseparable residue equation");
    const Field* bHome = home;
    Elem root = f.zero();
    if (fac.deg() == 1) {
      root = f.neg(fac.coeff(0));
    } else {
      bHome = &field_make(f.p(), f.k() * static_cast<unsigned>(fac.deg()));
      auto roots = poly_roots(fac, *bHome, ctx.opt.seed);
      root = roots[0].first;
    }
    const Field& bf = *bHome;
    CoeffVec E(static_cast<size_t>(p) + 1, LSeries::zero(bf));
    E[0] = neg(gr.mapField(bf));
    E[1] = LSeries::monomial(bf.neg(bf.one()), 0);
    E[static_cast<size_t>(p)] = LSeries::one(bf);
    LSeries z = henselLift(E, LSeries::monomial(root, 0), target);
    Proto pr;
    pr.e = 1;
    pr.fDeg = static_cast<unsigned>(fac.deg());
    pr.home = bHome;
    pr.tP = LSeries::t(bf);
    pr.y = add(z, nrm.correction.mapField(bf));
    pr.dExact = 0;
    pr.covered = fac.deg();
    out.push_back(pr);
  }
}

// quadratic cluster in characteristic 2: complete the AS substitution
void asQuadratic(const CoeffVec& C, const Field* home, Ctx& ctx, sint target,
                 std::vector<Proto>& out) {
  const Field& f = *home;
  // C = c2 T^2 + c1 T + c0, c1 != 0 (separable)
  LSeries aa = div(C[1], C[2]);
  LSeries bb = div(C[0], C[2]);
  if (!aa.val()) throw PrecisionError("asQuadratic: middle coefficient hidden");
  // z = T / aa : z^2 + z = bb / aa^2   (characteristic 2)
  LSeries g = div(bb, mul(aa, aa));
  std::vector<Proto> sub;
  asAnalyze(g, home, ctx, target, sub);
  for (auto& pr : sub) {
    // transform back: T = aa(tP) * z
    LSeries aaQ = compose(aa.mapField(*pr.home), pr.tP);
    pr.y = mul(aaQ, pr.y);
    out.push_back(pr);
  }
}

void processSegment(const CoeffVec& A, const PolygonSegment& seg,
                    const Field* home, Ctx& ctx, int recenterBudget,
                    sint target, std::vector<Proto>& out) {
  const Field& f = *home;
  Poly R = segmentResidual(A, seg, f);
  auto factors = poly_factor(R, ctx.opt.seed);
  // simple factors first so that multiple clusters can deflate by them
  std::stable_sort(factors.begin(), factors.end(),
                   [](const auto& x, const auto& y) { return x.second < y.second; });
  std::vector<LSeries> liftedAtThisLevel;  // y-series of e=1 branches (t_P coords)
  for (auto& [fac, mult] : factors) {
    const Field* bHome = home;
    Elem rho = f.zero();
    if (fac.deg() == 1) {
      rho = f.neg(fac.coeff(0));
    } else {
      bHome = &field_make(f.p(), f.k() * static_cast<unsigned>(fac.deg()));
      auto roots = poly_roots(fac, *bHome, ctx.opt.seed);
      rho = roots[0].first;
    }
    const Field& bf = *bHome;
    CoeffVec Ab = (bHome == home) ? A : mapCoeffs(A, bf);
    Elem rhoB = rho;
    if (mult == 1) {
      if (seg.e == 1) {
        // simple finite-slope-1 root: u = rho t^h + ...
        LSeries u0 = LSeries::monomial(rhoB, seg.h);
        LSeries y = henselLift(Ab, u0, target);
        Proto pr;
        pr.e = 1;
        pr.fDeg = static_cast<unsigned>(fac.deg());
        pr.home = bHome;
        pr.y = y;
        pr.tP = LSeries::t(bf);
        pr.dExact = 0;
        pr.covered = fac.deg();
        out.push_back(pr);
        if (bHome == home) liftedAtThisLevel.push_back(y);
      } else {
        LiftOut lo = monomialLift(Ab, seg.h, seg.e, rhoB, target * seg.e);
        Proto pr;
        pr.e = seg.e;
        pr.fDeg = static_cast<unsigned>(fac.deg());
        pr.home = bHome;
        pr.y = lo.u;
        pr.tP = lo.tP;
        pr.covered = static_cast<int>(seg.e) * fac.deg();
        if (seg.e % ctx.p == 0) {
          // wild: d read later from tP (or via AS cross-path for p = 2)
        } else {
          pr.dExact = seg.e - 1;
        }
        out.push_back(pr);
      }
      continue;
    }
    // multiple residual root
    if (seg.e == 1 && recenterBudget > 0) {
      LSeries s = LSeries::monomial(rhoB, seg.h);
      CoeffVec A2 = recenter(Ab, s);
      std::vector<Proto> sub;
      analyzeRoots(A2, bHome, ctx, std::make_pair(seg.h, (sint)1),
                   recenterBudget - 1, target, sub);
      int got = 0;
      for (auto& pr : sub) {
        // shift back: y += rho * tP^h
        LSeries shiftBack = mul(pow(pr.tP, seg.h), embed(rhoB, *pr.home));
        pr.y = add(pr.y, shiftBack);
        got += pr.covered;
        out.push_back(pr);
      }
      if (got != mult * fac.deg())
        throw PrecisionError("recentered cluster lost roots");
      continue;
    }
    if (seg.e == 1 && ctx.p == 2 && mult == 2) {
      // deflate the cluster to a quadratic and run the AS substitution
      CoeffVec cur = Ab;
      for (auto& ys : liftedAtThisLevel) {
        CoeffVec lin{neg(ys.mapField(bf)), LSeries::one(bf)};
        cur = divExactT(cur, lin);
      }
      if (cur.size() == 3) {
        asQuadratic(cur, bHome, ctx, target, out);
        continue;
      }
    }
    // honest failure: cover the cluster with an irregular placeholder
    Proto pr;
    pr.e = seg.e;
    pr.fDeg = static_cast<unsigned>(fac.deg());
    pr.home = bHome;
    pr.y = LSeries::zeroToPrec(bf, 1);
    pr.tP = LSeries::t(bf);
    pr.status = BranchStatus::Irregular;
    pr.covered = static_cast<int>(seg.e) * mult * fac.deg();
    pr.note = "unresolved cluster (multiplicity " + std::to_string(mult) + ")";
    out.push_back(pr);
  }
}

void analyzeRoots(const CoeffVec& A, const Field* home, Ctx& ctx,
                  std::optional<std::pair<sint, sint>> valGreaterThan,
                  int recenterBudget, sint target, std::vector<Proto>& out) {
  NewtonPolygon np = coeffPolygon(A);
  for (auto& seg : np.segments) {
    if (valGreaterThan) {
      // keep roots with val h/e > bound num/den
      if (seg.h * valGreaterThan->second <= valGreaterThan->first * seg.e)
        continue;
    }
    processSegment(A, seg, home, ctx, recenterBudget, target, out);
  }
}

LSeries xSeriesOf(const LocalData& parent) {
  if (parent.atInfinity) return inv(parent.u);
  return add(LSeries::monomial(parent.center, 0), parent.u);
}

Branch protoToBranch(const Proto& pr, const Ctx& ctx, const LocalData& parent) {
  Branch br;
  br.eRel = pr.e;
  br.residueDeg = pr.fDeg;
  br.status = pr.status;
  br.coveredDegree = pr.covered;
  br.parentT = pr.tP;
  br.ySeries = pr.y;
  const Field& bf = *pr.home;
  if (pr.status == BranchStatus::Irregular) {
    br.dRel = pr.e % ctx.p == 0 ? pr.e : (pr.e > 1 ? pr.e - 1 : 0);
    br.child.atInfinity = false;
    br.child.center = bf.zero();
    br.child.u = LSeries::zeroToPrec(bf, 1);
    br.child.wildPath = true;
    return br;
  }
  // different exponent
  bool wild = pr.e % ctx.p == 0;
  if (pr.dExact) {
    br.dRel = *pr.dExact;
    br.status = BranchStatus::Exact;
  } else if (!wild) {
    br.dRel = pr.e - 1;
    br.status = BranchStatus::Exact;
  } else {
    // v(d tP / d tQ): first stored exponent of tP prime to p, minus 1
    std::optional<sint> dv;
    const LSeries& tP = pr.tP;
    for (size_t i = 0; i < tP.stored().size(); ++i) {
      sint e = tP.lead() + static_cast<sint>(i);
      if (tP.stored()[i].isZero()) continue;
      if (e % ctx.p != 0) {
        dv = e - 1;
        break;
      }
    }
    if (dv) {
      br.dRel = *dv;
      br.status = BranchStatus::Exact;
    } else {
      br.dRel = std::max<sint>(pr.e, tP.end() - 1);
      br.status = BranchStatus::DifferentLowerBound;
    }
  }
  // wild cross-check: AS-exact d must agree with the series route if visible
  if (pr.dExact && wild) {
    for (size_t i = 0; i < pr.tP.stored().size(); ++i) {
      sint e = pr.tP.lead() + static_cast<sint>(i);
      if (!pr.tP.stored()[i].isZero() && e % ctx.p != 0) {
        if (e - 1 != *pr.dExact)
          throw FieldError("internal: AS and differential different exponents disagree");
        break;
      }
    }
  }
  // chart-fold the child
  auto v = pr.y.val();
  br.child.wildPath = parent.wildPath || wild;
  if (!v) {
    // zero to precision: center 0 with unknown expansion
    br.child.atInfinity = false;
    br.child.center = bf.zero();
    br.child.u = pr.y;
    return br;
  }
  if (*v > 0) {
    br.child.atInfinity = false;
    br.child.center = bf.zero();
    br.child.u = pr.y;
  } else if (*v == 0) {
    br.child.atInfinity = false;
    br.child.center = pr.y.at(0);
    br.child.u = sub(pr.y, LSeries::monomial(pr.y.at(0), 0));
  } else {
    br.child.atInfinity = true;
    br.child.center = bf.zero();
    br.child.u = inv(pr.y);
  }
  return br;
}

std::uint64_t elemKey(const Elem& e) { return e.field()->indexOf(e); }

void sortBranches(std::vector<Branch>& brs) {
  std::stable_sort(brs.begin(), brs.end(), [](const Branch& a, const Branch& b) {
    auto key = [](const Branch& x) {
      sint chart = x.child.atInfinity ? 2 : (x.child.center.isZero() ? 0 : 1);
      std::uint64_t ck = x.child.atInfinity ? 0 : elemKey(x.child.center);
      return std::make_tuple(x.eRel, chart, ck, x.residueDeg,
                             x.ySeries.val() ? *x.ySeries.val() : x.ySeries.end());
    };
    return key(a) < key(b);
  });
}

StepResult decomposeAttempt(const BiPoly& H, const LocalData& parent,
                            const DecomposeOptions& opt) {
  Ctx ctx{&H, opt, static_cast<sint>(H.f->p())};
  const Field* home = parent.home();
  LSeries x = xSeriesOf(parent);
  sint target = opt.precision;

  std::vector<Proto> protos;
  auto shape = as_shape(H);
  if (shape) {
    // global Artin-Schreier form: T^p - T = b1(x)/b2(x)
    LSeries b1x = evalPoly(shape->b1, x);
    LSeries b2x = evalPoly(shape->b2, x);
    if (!b2x.val()) throw PrecisionError("AS: denominator hidden");
    LSeries g = div(b1x, b2x);
    asAnalyze(g, home, ctx, target, protos);
  } else {
    CoeffVec A;
    for (int j = 0; j <= H.degT(); ++j)
      A.push_back(evalPoly(H.coeffT(j), x));
    analyzeRoots(A, home, ctx, std::nullopt, 2, target, protos);
  }

  StepResult res;
  int covered = 0;
  for (auto& pr : protos) {
    Branch br = protoToBranch(pr, ctx, parent);
    covered += br.coveredDegree;
    if (br.status != BranchStatus::Exact) res.allExact = false;
    if (!pr.note.empty()) res.note += pr.note + "; ";
    res.branches.push_back(std::move(br));
  }
  res.conserved = covered == H.degT();
  if (!res.conserved) {
    res.allExact = false;
    res.note += "fiber degree mismatch: covered " + std::to_string(covered) +
                " of " + std::to_string(H.degT()) + "; ";
  }
  sortBranches(res.branches);
  return res;
}

}  // namespace

StepResult decompose_step(const BiPoly& H, const LocalData& parent,
                          const DecomposeOptions& opt) {
  try {
    return decomposeAttempt(H, parent, opt);
  } catch (const PrecisionError& e) {
    if (!opt.allowPrecisionRetry) throw;
  }
  DecomposeOptions o2 = opt;
  o2.precision *= 2;
  try {
    return decomposeAttempt(H, parent, o2);
  } catch (const PrecisionError& e) {
    // honest failure: a single irregular branch covering the whole fiber
    StepResult res;
    Branch br;
    br.eRel = 1;
    br.dRel = 0;
    br.status = BranchStatus::Irregular;
    br.residueDeg = 1;
    br.coveredDegree = H.degT();
    br.child.center = parent.home()->zero();
    br.child.u = LSeries::zeroToPrec(*parent.home(), 1);
    br.child.wildPath = true;
    br.parentT = LSeries::t(*parent.home());
    br.ySeries = LSeries::zeroToPrec(*parent.home(), 1);
    res.branches.push_back(br);
    res.conserved = false;
    res.allExact = false;
    res.note = std::string("precision exhausted: ") + e.what();
    return res;
  }
}

std::vector<Branch> tame_branch(const BiPoly& H, const LocalData& parent,
                                const PolygonSegment& seg,
                                const DecomposeOptions& opt) {
  if (seg.e % static_cast<sint>(H.f->p()) == 0)
    throw FieldError("tame_branch: segment is wild");
  Ctx ctx{&H, opt, static_cast<sint>(H.f->p())};
  LSeries x = xSeriesOf(parent);
  CoeffVec A;
  for (int j = 0; j <= H.degT(); ++j) A.push_back(evalPoly(H.coeffT(j), x));
  Poly R = segmentResidual(A, seg, *parent.home());
  if (gcd(R, derivative(R)).deg() != 0)
    throw FieldError("tame_branch: residual not separable");
  std::vector<Proto> protos;
  processSegment(A, seg, parent.home(), ctx, 0, opt.precision, protos);
  std::vector<Branch> out;
  for (auto& pr : protos) out.push_back(protoToBranch(pr, ctx, parent));
  sortBranches(out);
  return out;
}

}  // namespace fftower
