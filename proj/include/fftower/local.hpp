#ifndef FFTOWER_LOCAL_HPP
#define FFTOWER_LOCAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "fftower/proj.hpp"
#include "fftower/series.hpp"

// Local analysis of one tower step: given a place of F_i described by the
// expansion of x_i in a uniformizer t, decompose the fiber of
// H(x_i, x_{i+1}) = 0 into branches with relative ramification index e and
// different exponent d.
//
// Conventions.  The fiber polynomial A(T) = sum_j a_j(x_i) T^j is analyzed
// by Newton polygon over the Laurent-series ring in t.  A segment of slope
// -h/e (lowest terms, e > 0) carries roots of valuation h/e; h < 0 means a
// pole of the new variable, i.e. a branch centered at infinity.  Residual
// roots split the segment into branches; an irreducible residual factor of
// degree r extends the working coefficient field (and multiplies the
// Frobenius-orbit count by r).  Wild segments (p | e) are lifted through a
// two-variable Newton iteration on { A(u) = 0, t_P^a u^b = const * t_Q },
// which also yields t_P as a series in the child uniformizer t_Q; the
// different exponent is then read off d = v(dt_P/dt_Q).  Artin-Schreier
// shaped equations get the substitution normalization first, so the wild
// exponent -m with gcd(m, p) = 1 and d = (m+1)(p-1) are exact.

namespace fftower {

// ------------------------------------------------------------------ polygon

struct PolygonSegment {
  // slope = -h/e with gcd(h,e) = 1 (h may be negative or zero), e >= 1
  sint h = 0;
  sint e = 1;
  int j0 = 0, j1 = 0;        // horizontal extent (j0 < j1)
  int horizontalLength() const { return j1 - j0; }
  int latticeLength() const { return static_cast<int>((j1 - j0) / e); }
  Poly residual;             // degree = latticeLength (when supplied)
};

struct NewtonPolygon {
  std::vector<PolygonSegment> segments;  // slopes strictly increasing
};

// Lower convex hull of (index, valuation) points; nullopt = +infinity.
// Throws FieldError when fewer than two finite points are given.
NewtonPolygon newton_polygon(
    const std::vector<std::pair<int, std::optional<sint>>>& pts);

// ----------------------------------------------------------------- bivariate

// H = sum_j tc[j](S) T^j over F_q.
struct BiPoly {
  FieldRef f = nullptr;
  std::vector<Poly> tc;

  int degT() const { return static_cast<int>(tc.size()) - 1; }
  int degS() const;
  Poly coeffT(int j) const { return j < static_cast<int>(tc.size()) ? tc[j] : poly_zero(*f); }
  BiPoly transpose() const;
  BiPoly derivativeS() const;
  BiPoly derivativeT() const;
  Poly evalT(const Elem& beta) const;  // polynomial in S
  Poly evalS(const Elem& alpha) const; // polynomial in T
  bool operator==(const BiPoly& o) const { return f == o.f && tc == o.tc; }
  std::string str() const;
};

BiPoly bipoly_from(const Field& f,
                   const std::vector<std::vector<std::uint64_t>>& stCoeffs);

// Artin-Schreier type detection: H = (T^p - T) b2(S) - b1(S).
struct ASShape {
  Poly b1, b2;
};
std::optional<ASShape> as_shape(const BiPoly& H);

// ------------------------------------------------------------------ branches

enum class BranchStatus { Exact, DifferentLowerBound, Irregular };

// Local data of a place: chart center of the current variable and the
// expansion of the chart variable u (= x - center, or 1/x at infinity) in
// the place's uniformizer.
struct LocalData {
  bool atInfinity = false;
  Elem center;      // meaningful when !atInfinity
  LSeries u;        // val(u) >= 1
  bool wildPath = false;  // some wild step occurred below this place
  sint paramVal() const { return u.val() ? *u.val() : u.end(); }
  const Field* home() const { return u.field(); }
};

struct Branch {
  sint eRel = 1;
  sint dRel = 0;
  BranchStatus status = BranchStatus::Exact;
  unsigned residueDeg = 1;   // residual factor degree over the parent home
  LocalData child;           // over the (possibly extended) branch home
  LSeries parentT;           // t_P as a series in t_Q
  // full expansion of the new variable (before chart-folding), for callers
  // that need leading data of y itself
  LSeries ySeries;
  int coveredDegree = 1;     // e * residueDeg * cluster multiplicity
};

struct DecomposeOptions {
  sint precision = 64;       // target number of series terms at the seed
  bool allowPrecisionRetry = true;
  std::uint64_t seed = 0x5eed;
};

struct StepResult {
  std::vector<Branch> branches;
  bool conserved = false;    // sum of covered degrees == degT H
  bool allExact = true;
  std::string note;          // diagnostics for irregular outcomes
};

// Thrown internally to request a retry at doubled precision.
struct PrecisionError : std::runtime_error {
  explicit PrecisionError(const std::string& w) : std::runtime_error(w) {}
};

// Decompose the fiber of H(x, T) above the place described by `parent`.
// The parent data must live over `parent.home()`; branches may extend it.
StepResult decompose_step(const BiPoly& H, const LocalData& parent,
                          const DecomposeOptions& opt = {});

// Artin-Schreier normalization: replace g by g - (u^p - u) until the
// valuation is either >= 0 or negative and prime to p.  Returns the
// accumulated correction (the sum of the u's) and the reduced series.
struct ASNormalized {
  LSeries correction;  // z = z' + correction
  LSeries reduced;
};
ASNormalized as_normalize(const LSeries& g, std::uint64_t p);

// Tame branch data for a segment: one branch per distinct residual root,
// e = segment e, d = e - 1.  Exposed for direct tests; decompose_step uses
// the same code path.
std::vector<Branch> tame_branch(const BiPoly& H, const LocalData& parent,
                                const PolygonSegment& seg,
                                const DecomposeOptions& opt = {});

}  // namespace fftower

#endif  // FFTOWER_LOCAL_HPP
