#include "fftower/tower.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>

namespace fftower {

namespace {

Poly polyContent(const BiPoly& H) {
  Poly g = poly_zero(*H.f);
  for (auto& c : H.tc) g = gcd(g, c);
  return g;
}

LSeries xSeriesOfLocal(const LocalData& ld) {
  if (ld.atInfinity) return inv(ld.u);
  return add(LSeries::monomial(ld.center, 0), ld.u);
}

LSeries evalBi(const BiPoly& H, const LSeries& x, const LSeries& y) {
  const Field& f = *x.field();
  LSeries r = LSeries::zero(f);
  for (int j = H.degT(); j >= 0; --j) {
    r = mul(r, y);
    r = add(r, evalPoly(H.coeffT(j), x));
  }
  return r;
}

}  // namespace

// ------------------------------------------------------------ resultant

Poly resultant_T(const BiPoly& A, const BiPoly& B) {
  const Field& f = *A.f;
  int m = A.degT(), n = B.degT();
  if (m < 0 || n < 0) return poly_zero(f);
  int N = m + n;
  if (N == 0) return poly_one(f);
  // Sylvester matrix, rows of B-coefficients then A-coefficients
  std::vector<std::vector<Poly>> M(static_cast<size_t>(N),
                                   std::vector<Poly>(static_cast<size_t>(N), poly_zero(f)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j)
      M[static_cast<size_t>(i)][static_cast<size_t>(i + j)] = A.coeffT(m - j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j)
      M[static_cast<size_t>(n + i)][static_cast<size_t>(i + j)] = B.coeffT(n - j);
  // Bareiss fraction-free elimination
  Poly prev = poly_one(f);
  int sign = 1;
  for (int k = 0; k < N - 1; ++k) {
    if (M[k][k].isZero()) {
      int swapRow = -1;
      for (int r = k + 1; r < N; ++r)
        if (!M[r][k].isZero()) {
          swapRow = r;
          break;
        }
      if (swapRow < 0) return poly_zero(f);
      std::swap(M[static_cast<size_t>(k)], M[static_cast<size_t>(swapRow)]);
      sign = -sign;
    }
    for (int i = k + 1; i < N; ++i) {
      for (int j = k + 1; j < N; ++j) {
        Poly num = sub(mul(M[i][j], M[k][k]), mul(M[i][k], M[k][j]));
        auto [q, r] = divmod(num, prev);
        if (!r.isZero()) throw FieldError("resultant: exact division failed");
        M[i][j] = q;
      }
      M[i][k] = poly_zero(f);
    }
    prev = M[k][k];
  }
  Poly det = M[static_cast<size_t>(N - 1)][static_cast<size_t>(N - 1)];
  if (sign < 0) det = neg(det);
  return det;
}

// ------------------------------------------------------------ minpoly

Poly minpoly_over(const Elem& v, const Field& base) {
  const Field& home = *v.field();
  if (home.p() != base.p() || home.k() % base.k() != 0)
    throw FieldError("minpoly_over: incompatible fields");
  // Frobenius^k orbit
  std::vector<Elem> orbit;
  Elem w = v;
  do {
    orbit.push_back(w);
    w = home.frobenius(w, base.k());
  } while (!(w == v));
  Poly mp = poly_one(home);
  for (auto& o : orbit) mp = mul(mp, Poly(&home, {home.neg(o), home.one()}));
  // descend coefficients to base
  std::map<std::uint64_t, Elem> table;
  for (std::uint64_t i = 0; i < base.order(); ++i) {
    Elem b = base.elemAt(i);
    table.emplace(home.indexOf(embed(b, home)), b);
  }
  std::vector<Elem> c;
  for (int i = 0; i <= mp.deg(); ++i) {
    auto it = table.find(home.indexOf(mp.coeff(i)));
    if (it == table.end())
      throw FieldError("minpoly_over: coefficient escaped the base field");
    c.push_back(it->second);
  }
  return Poly(&base, std::move(c));
}

// ------------------------------------------------------------ tower_make

TowerSpec TowerSpec::transposed() const {
  TowerSpec t = *this;
  t.H = H.transpose();
  std::swap(t.degS, t.degT);
  t.name = name + "^t";
  // shape tags are orientation-dependent; recompute the cheap ones
  t.tags.clear();
  if (as_shape(t.H)) t.tags.push_back(ShapeTag::ArtinSchreierType);
  return t;
}

namespace {

bool specializationIrreducible(const BiPoly& H) {
  const Field& f = *H.f;
  for (unsigned m = 1; m <= 3; ++m) {
    if (f.k() * m > kFieldDegreeCap) break;
    const Field& ext = field_make(f.p(), f.k() * m);
    std::uint64_t count = std::min<std::uint64_t>(ext.order(), 64);
    for (std::uint64_t i = 0; i < count; ++i) {
      Elem alpha = ext.elemAt(i);
      std::vector<Elem> c;
      for (int j = 0; j <= H.degT(); ++j)
        c.push_back(eval(embedPoly(H.coeffT(j), ext), alpha));
      Poly fiber(&ext, std::move(c));
      if (fiber.deg() != H.degT()) continue;
      if (irreducible(fiber)) return true;
    }
  }
  return false;
}

// search small fibers for a totally ramified branch (e = degT), which
// certifies geometric irreducibility of H in T over the closure of F_q(S)
bool totallyRamifiedWitness(const BiPoly& H) {
  const Field& f = *H.f;
  DecomposeOptions opt;
  opt.precision = 16;
  opt.allowPrecisionRetry = false;
  auto tryParent = [&](const LocalData& ld) {
    try {
      StepResult r = decompose_step(H, ld, opt);
      if (!r.conserved) return false;
      return r.branches.size() == 1 && r.branches[0].eRel == H.degT() &&
             r.branches[0].residueDeg == 1 &&
             r.branches[0].status != BranchStatus::Irregular;
    } catch (const std::exception&) {
      return false;
    }
  };
  for (std::uint64_t i = 0; i < std::min<std::uint64_t>(f.order(), 32); ++i) {
    LocalData ld;
    ld.center = f.elemAt(i);
    ld.u = LSeries::t(f);
    if (tryParent(ld)) return true;
  }
  LocalData ld;
  ld.atInfinity = true;
  ld.center = f.zero();
  ld.u = LSeries::t(f);
  return tryParent(ld);
}

}  // namespace

TowerSpec tower_make(BiPoly H, std::string name) {
  const Field& f = *H.f;
  TowerSpec spec;
  spec.degT = H.degT();
  spec.degS = H.degS();
  if (spec.degT < 2) throw FieldError("tower_make: deg_T H must be >= 2");
  if (spec.degS < 1) throw FieldError("tower_make: deg_S H must be >= 1");
  if (H.coeffT(0).isZero()) throw FieldError("tower_make: T divides H");
  if (polyContent(H).deg() > 0)
    throw FieldError("tower_make: nontrivial S-content");
  Poly disc = resultant_T(H, H.derivativeT());
  if (disc.isZero()) throw FieldError("tower_make: H not separable in T");
  spec.H = std::move(H);
  spec.name = std::move(name);
  spec.skew = spec.degS != spec.degT;
  if (auto sh = as_shape(spec.H)) {
    spec.tags.push_back(ShapeTag::ArtinSchreierType);
  } else {
    bool kummer = true;
    for (int j = 1; j < spec.degT; ++j)
      if (!spec.H.coeffT(j).isZero()) kummer = false;
    if (kummer && spec.H.coeffT(spec.degT).deg() == 0 &&
        !spec.H.coeffT(0).isZero())
      spec.tags.push_back(ShapeTag::KummerType);
    else
      spec.tags.push_back(ShapeTag::Generic);
  }
  spec.irreducibleCertified = specializationIrreducible(spec.H);
  spec.geometricCertified = totallyRamifiedWitness(spec.H);
  (void)f;
  return spec;
}

// ------------------------------------------------------- ramification locus

namespace {

void addFactorPlaces(const Poly& g, std::set<RationalPlace>& out) {
  if (g.deg() < 1) return;
  for (auto& [fac, mult] : poly_factor(g)) {
    (void)mult;
    if (fac.deg() >= 1) out.insert(RationalPlace{fac, fac.field()});
  }
}

// H with S flipped: u^degS * H(1/u, T)
BiPoly flipS(const BiPoly& H) {
  BiPoly out;
  out.f = H.f;
  int d = H.degS();
  for (auto& c : H.tc) {
    std::vector<Elem> rc;
    for (int i = d; i >= 0; --i) rc.push_back(c.coeff(i));
    out.tc.push_back(Poly(H.f, std::move(rc)));
  }
  return out;
}

}  // namespace

ClosureResult ramification_locus(const TowerSpec& spec, int budget) {
  const Field& f = *spec.H.f;
  std::set<RationalPlace> locus;
  // critical places: disc_T and leading-coefficient zeros, plus infinity
  Poly disc = resultant_T(spec.H, spec.H.derivativeT());
  addFactorPlaces(disc, locus);
  addFactorPlaces(spec.H.coeffT(spec.degT), locus);
  locus.insert(place_infinity(f));

  BiPoly Hs = flipS(spec.H);
  Poly atInf = poly_zero(f);  // fiber polynomial over S = infinity
  {
    std::vector<Elem> c;
    for (auto& sc : Hs.tc) c.push_back(sc.coeff(0));
    atInf = Poly(&f, std::move(c));
  }

  auto predecessors = [&](const RationalPlace& beta) {
    std::set<RationalPlace> pred;
    if (!beta.isInfinity()) {
      // Res_T(H(S,T), g(T)) as a polynomial in S
      BiPoly G;
      G.f = &f;
      for (int i = 0; i <= beta.gen->deg(); ++i)
        G.tc.push_back(poly_const(beta.gen->coeff(i)));
      Poly R = resultant_T(spec.H, G);
      if (R.isZero())
        throw FieldError("ramification_locus: degenerate predecessor fiber");
      addFactorPlaces(R, pred);
      if (!atInf.isZero() && gcd(atInf, *beta.gen).deg() > 0)
        pred.insert(place_infinity(f));
    } else {
      addFactorPlaces(spec.H.coeffT(spec.degT), pred);
      if (atInf.deg() < spec.degT) pred.insert(place_infinity(f));
    }
    return pred;
  };

  ClosureResult res;
  std::deque<RationalPlace> queue(locus.begin(), locus.end());
  int totalDeg = 0;
  for (auto& pl : locus) totalDeg += pl.degree();
  bool exceeded = false;
  while (!queue.empty()) {
    RationalPlace beta = queue.front();
    queue.pop_front();
    for (auto& alpha : predecessors(beta)) {
      if (locus.count(alpha)) continue;
      totalDeg += alpha.degree();
      if (totalDeg > budget) {
        exceeded = true;
        break;
      }
      locus.insert(alpha);
      queue.push_back(alpha);
    }
    if (exceeded) break;
  }
  res.locus.assign(locus.begin(), locus.end());
  res.closed = !exceeded;
  res.orbitPoints = totalDeg;
  return res;
}

// ------------------------------------------------------------- build_tower

namespace {

std::optional<RationalPlace> nodeCoordinatePlace(const LocalData& ld,
                                                 const Field& base) {
  if (ld.atInfinity) return place_infinity(base);
  Poly mp = minpoly_over(ld.center, base);
  return RationalPlace{mp, &base};
}

}  // namespace

PlaceTree build_tower(const TowerSpec& spec, int depth,
                      const std::vector<RationalPlace>& seedsIn,
                      const std::vector<RationalPlace>& locus,
                      const BuildOptions& opt) {
  if (depth < 1) throw FieldError("build_tower: depth must be >= 1");
  if (seedsIn.empty()) throw FieldError("build_tower: no seeds");
  const Field& base = *spec.H.f;
  PlaceTree tree;
  tree.spec = spec;
  tree.depth = depth;
  std::set<RationalPlace> seedSet(seedsIn.begin(), seedsIn.end());
  tree.seeds.assign(seedSet.begin(), seedSet.end());
  std::set<RationalPlace> locusSet(locus.begin(), locus.end());

  DecomposeOptions dopt;
  dopt.precision = opt.precision > 0
                       ? opt.precision
                       : 4 * static_cast<sint>(spec.degT) * (depth + 2);
  dopt.seed = opt.seed;

  BiPoly HS = spec.H.derivativeS();
  BiPoly HT = spec.H.derivativeT();

  tree.levels.assign(static_cast<size_t>(depth) + 1, {});

  // roots
  for (size_t si = 0; si < tree.seeds.size(); ++si) {
    const RationalPlace& pl = tree.seeds[si];
    PlaceNode node;
    node.id = static_cast<int>(tree.nodes.size());
    node.level = 0;
    node.parent = -1;
    node.seed = static_cast<int>(si);
    if (pl.isInfinity()) {
      node.local.atInfinity = true;
      node.local.center = base.zero();
      node.local.u = LSeries::t(base);
    } else {
      unsigned d = static_cast<unsigned>(pl.degree());
      const Field& home =
          d == 1 ? base : field_make(base.p(), base.k() * d, opt.fieldCap);
      Elem alpha = d == 1 ? base.neg(pl.gen->coeff(0))
                          : poly_roots(*pl.gen, home, opt.seed)[0].first;
      node.local.atInfinity = false;
      node.local.center = alpha;
      node.local.u = LSeries::t(home);
    }
    node.orbitMult = pl.degree();
    node.eAbs = 1;
    node.mu = {1};
    node.delta = {0};
    node.chartInf = {pl.isInfinity()};
    node.exited = opt.pruneOutsideLocus && !locusSet.count(pl);
    tree.levels[0].push_back(node.id);
    tree.nodes.push_back(std::move(node));
  }

  // breadth-first expansion
  for (int lvl = 0; lvl < depth; ++lvl) {
    std::vector<int> ids = tree.levels[static_cast<size_t>(lvl)];
    for (int id : ids) {
      // copy out what we need; tree.nodes may reallocate
      if (tree.nodes[static_cast<size_t>(id)].truncated) continue;
      if (tree.nodes[static_cast<size_t>(id)].exited && opt.pruneOutsideLocus)
        continue;
      if (!tree.nodes[static_cast<size_t>(id)].local.u.val().has_value()) {
        tree.allExact = false;
        tree.notes += "node " + std::to_string(id) + ": expansion unavailable; ";
        continue;
      }
      LocalData parentLocal = tree.nodes[static_cast<size_t>(id)].local;
      StepResult res = decompose_step(spec.H, parentLocal, dopt);
      tree.nodes[static_cast<size_t>(id)].expanded = true;
      tree.nodes[static_cast<size_t>(id)].fiberConserved = res.conserved;
      if (!res.conserved || !res.allExact) tree.allExact = false;
      if (!res.note.empty())
        tree.notes += "node " + std::to_string(id) + ": " + res.note;

      for (auto& br : res.branches) {
        PlaceNode parent = tree.nodes[static_cast<size_t>(id)];  // copy
        PlaceNode child;
        child.id = static_cast<int>(tree.nodes.size());
        child.level = lvl + 1;
        child.parent = id;
        child.seed = parent.seed;
        child.local = br.child;
        child.eRel = br.eRel;
        child.dRel = br.dRel;
        child.status = br.status;
        child.orbitMult = parent.orbitMult * br.residueDeg;
        child.eAbs = parent.eAbs * br.eRel;
        const Field* chHome = br.child.home();
        if (chHome->k() > opt.fieldCap) child.truncated = true;
        bool dExact = br.status == BranchStatus::Exact;
        // mu and delta propagation
        for (size_t j = 0; j < parent.mu.size(); ++j) {
          child.mu.push_back(parent.mu[j]
                                 ? std::optional<sint>(*parent.mu[j] * br.eRel)
                                 : std::nullopt);
          if (parent.delta[j] && dExact)
            child.delta.push_back(*parent.delta[j] * br.eRel + br.dRel);
          else
            child.delta.push_back(std::nullopt);
          child.chartInf.push_back(parent.chartInf[j]);
        }
        auto vNew = br.child.u.val();
        child.mu.push_back(vNew);
        child.chartInf.push_back(br.child.atInfinity);
        // delta of the new coordinate via the implicit relation
        std::optional<sint> deltaNew;
        if (dExact && parent.delta.back() && vNew &&
            br.status != BranchStatus::Irregular) {
          try {
            LSeries xQ = compose(xSeriesOfLocal(parentLocal).mapField(*chHome),
                                 br.parentT);
            LSeries hs = evalBi(HS, xQ, br.ySeries);
            LSeries ht = evalBi(HT, xQ, br.ySeries);
            if (hs.val() && ht.val()) {
              sint vdxu = *parent.delta.back() * br.eRel + br.dRel;
              sint vdx = vdxu;
              if (parent.local.atInfinity) {
                // x = 1/u: v(dx) = v(du) - 2 v(u)
                vdx = vdxu - 2 * (*parent.mu.back() * br.eRel);
              }
              sint vdy = *hs.val() - *ht.val() + vdx;
              sint dn = vdy;
              if (br.child.atInfinity) dn = vdy + 2 * (*vNew);
              deltaNew = dn;
              // cross-check against the series derivative when visible
              const LSeries& uc = br.child.u;
              for (size_t i = 0; i < uc.stored().size(); ++i) {
                sint e = uc.lead() + static_cast<sint>(i);
                if (!uc.stored()[i].isZero() &&
                    e % static_cast<sint>(base.p()) != 0) {
                  if (e - 1 != dn)
                    throw FieldError(
                        "internal: delta bookkeeping disagrees with series");
                  break;
                }
              }
            }
          } catch (const PrecisionError&) {
            deltaNew = std::nullopt;
          }
        }
        child.delta.push_back(deltaNew);
        // locus membership of the child coordinate
        if (opt.pruneOutsideLocus && !child.truncated) {
          if (child.local.u.val().has_value() || child.local.atInfinity) {
            try {
              auto cp = nodeCoordinatePlace(child.local, base);
              child.exited = cp && !locusSet.count(*cp);
            } catch (const FieldError&) {
              child.exited = false;  // cannot certify membership: keep it
            }
          }
        }
        if (child.status != BranchStatus::Exact) tree.allExact = false;
        if (child.truncated) tree.allExact = false;
        tree.levels[static_cast<size_t>(lvl + 1)].push_back(child.id);
        tree.nodes[static_cast<size_t>(id)].children.push_back(child.id);
        tree.nodes.push_back(std::move(child));
      }
    }
  }
  return tree;
}

PlaceTree build_tower_default(const TowerSpec& spec, int depth,
                              const ClosureResult& closure,
                              const BuildOptions& opt) {
  std::vector<RationalPlace> seeds = closure.locus;
  seeds.push_back(place_infinity(*spec.H.f));
  return build_tower(spec, depth, seeds, closure.locus, opt);
}

// ----------------------------------------------------------- accounting

DiffDegree different_degree(const PlaceTree& tree, const ClosureResult& closure,
                            int level) {
  DiffDegree out{0, true};
  if (level < 0 || level >= tree.depth)
    throw FieldError("different_degree: level out of range");
  // every ramified place of F_level must appear among expanded fibers
  if (!closure.closed) out.exact = false;
  // seeds must cover the locus
  std::set<RationalPlace> seedSet(tree.seeds.begin(), tree.seeds.end());
  for (auto& pl : closure.locus)
    if (!seedSet.count(pl)) out.exact = false;
  for (int id : tree.levels[static_cast<size_t>(level)]) {
    const PlaceNode& n = tree.nodes[static_cast<size_t>(id)];
    if (n.exited || n.truncated) continue;
    if (!n.expanded || !n.fiberConserved) out.exact = false;
  }
  for (int id : tree.levels[static_cast<size_t>(level + 1)]) {
    const PlaceNode& n = tree.nodes[static_cast<size_t>(id)];
    out.value += Int(n.dRel) * n.orbitMult;
    if (n.status != BranchStatus::Exact) out.exact = false;
  }
  return out;
}

std::vector<LevelSummary> genus_sequence(const PlaceTree& tree,
                                         const ClosureResult& closure) {
  const TowerSpec& spec = tree.spec;
  std::vector<LevelSummary> out;
  LevelSummary base;
  base.level = 0;
  base.stepDegree = 1;
  base.stepCertified = true;
  base.totalDegree = 1;
  base.diffDegree = 0;
  base.diffExact = true;
  base.genus = 0;  // rational base field
  base.genusExact = true;
  base.gammaPartial = Rat(-1);
  base.gammaExact = true;
  out.push_back(base);

  bool geomOk = spec.geometricCertified;
  for (int lvl = 1; lvl <= tree.depth; ++lvl) {
    LevelSummary s;
    s.level = lvl;
    s.stepDegree = spec.degT;
    // step-degree witness: an expanded node one level down with a single
    // totally ramified branch
    s.stepCertified = false;
    for (int id : tree.levels[static_cast<size_t>(lvl - 1)]) {
      const PlaceNode& n = tree.nodes[static_cast<size_t>(id)];
      if (!n.expanded || !n.fiberConserved) continue;
      if (n.children.size() == 1) {
        const PlaceNode& c = tree.nodes[static_cast<size_t>(n.children[0])];
        if (c.eRel == spec.degT && c.status != BranchStatus::Irregular &&
            c.orbitMult == n.orbitMult) {
          s.stepCertified = true;
          break;
        }
      }
    }
    s.totalDegree = out.back().totalDegree * spec.degT;
    DiffDegree dd = different_degree(tree, closure, lvl - 1);
    s.diffDegree = dd.value;
    s.diffExact = dd.exact && s.stepCertified && geomOk;
    const LevelSummary& prev = out.back();
    // Hurwitz: 2g_i - 2 = degT (2 g_{i-1} - 2) + diff
    Int rhs = Int(spec.degT) * (2 * prev.genus - 2) + s.diffDegree;
    // rhs is even when everything is consistent; keep floor for bounds
    s.genus = (rhs + 2) / 2;
    s.genusExact = prev.genusExact && s.diffExact;
    if (s.genusExact && (rhs % 2) != 0)
      throw FieldError("internal: Hurwitz parity violated");
    s.gammaPartial =
        prev.gammaPartial + Rat(s.diffDegree, 2 * s.totalDegree);
    s.gammaExact = prev.gammaExact && s.diffExact;
    out.push_back(s);
  }
  return out;
}

std::optional<sint> line_different(const PlaceTree& tree, int nodeId, int j) {
  const PlaceNode& n = tree.nodes[static_cast<size_t>(nodeId)];
  if (j < 0 || j > n.level) throw FieldError("line_different: bad coordinate");
  return n.delta[static_cast<size_t>(j)];
}

std::optional<sint> composed_different(const PlaceTree& tree, int nodeId,
                                       int ancestorLevel) {
  const PlaceNode* n = &tree.nodes[static_cast<size_t>(nodeId)];
  if (ancestorLevel > n->level)
    throw FieldError("composed_different: ancestor above node");
  // collect the path down to ancestorLevel
  std::vector<const PlaceNode*> path;
  while (n->level > ancestorLevel) {
    path.push_back(n);
    n = &tree.nodes[static_cast<size_t>(n->parent)];
  }
  sint d = 0;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if ((*it)->status != BranchStatus::Exact) return std::nullopt;
    d = (*it)->eRel * d + (*it)->dRel;
  }
  return d;
}

RationalPlace coordinate_place(const PlaceTree& tree, int nodeId, int j) {
  const PlaceNode* n = &tree.nodes[static_cast<size_t>(nodeId)];
  if (j < 0 || j > n->level)
    throw FieldError("coordinate_place: bad coordinate");
  while (n->level > j) n = &tree.nodes[static_cast<size_t>(n->parent)];
  const Field& base = *tree.spec.H.f;
  auto pl = nodeCoordinatePlace(n->local, base);
  if (!pl) throw FieldError("coordinate_place: unavailable");
  return *pl;
}

}  // namespace fftower
