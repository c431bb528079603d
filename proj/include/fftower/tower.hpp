#ifndef FFTOWER_TOWER_HPP
#define FFTOWER_TOWER_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fftower/local.hpp"
#include "fftower/rational.hpp"

// Tower of function fields F_0 = F_q(x_0), F_{i+1} = F_i(x_{i+1}) with
// H(x_i, x_{i+1}) = 0.  The engine builds the tree of places above chosen
// rational seeds over the algebraic closure (one Frobenius-orbit
// representative per node, with the orbit size as multiplicity), closes the
// ramification locus, and runs the different/genus accounting.
//
// Per node we keep, for every chain coordinate x_j:
//   mu_j    = v(u_j), the valuation of the chart variable of x_j,
//   delta_j = v(d u_j / dt), the derivative valuation of that chart
//             variable, which is exactly the different exponent of the
//             place over the rational line F_q(x_j).
// delta propagates by delta_j(child) = e * delta_j(parent) + d_rel, and the
// new coordinate's delta comes from the implicit relation
//   v(dy) = v(H_S(x,y)) - v(H_T(x,y)) + v(dx).

namespace fftower {

enum class ShapeTag { ArtinSchreierType, KummerType, Generic };

struct TowerSpec {
  BiPoly H;
  std::string name;
  std::vector<ShapeTag> tags;
  int degS = 0, degT = 0;
  bool skew = false;
  // evidence recorded at load
  bool irreducibleCertified = false;
  bool geometricCertified = false;

  TowerSpec transposed() const;
};

// Validates separability and collects irreducibility evidence.  Throws
// FieldError when H is visibly unusable (inseparable in T, degT < 2, or a
// T-content divides it).
TowerSpec tower_make(BiPoly H, std::string name);

struct ClosureResult {
  std::vector<RationalPlace> locus;  // x-line places, canonical order
  bool closed = false;
  int orbitPoints = 0;  // total degree of the locus
};

ClosureResult ramification_locus(const TowerSpec& spec, int budget = 64);

struct PlaceNode {
  int id = -1;
  int level = 0;
  int parent = -1;
  int seed = -1;  // index into tree.seeds
  LocalData local;
  sint eRel = 1, dRel = 0;
  BranchStatus status = BranchStatus::Exact;
  Int orbitMult = 1;
  Int eAbs = 1;
  std::vector<std::optional<sint>> mu;     // per coordinate 0..level
  std::vector<std::optional<sint>> delta;  // per coordinate 0..level
  std::vector<bool> chartInf;              // chart of x_j along the chain
  bool truncated = false;                  // field-degree cap exceeded
  bool exited = false;                     // left the ramification locus
  bool expanded = false;
  bool fiberConserved = true;              // of this node's own decomposition
  std::vector<int> children;
};

struct BuildOptions {
  sint precision = 0;          // 0 = spec default 4*degT*(depth+2)
  bool pruneOutsideLocus = true;
  unsigned fieldCap = kFieldDegreeCap;
  std::uint64_t seed = 0x5eed;
};

struct PlaceTree {
  TowerSpec spec;
  std::vector<RationalPlace> seeds;
  std::vector<PlaceNode> nodes;
  std::vector<std::vector<int>> levels;  // ids per level, canonical order
  int depth = 0;
  bool allExact = true;   // every fiber conserved + every branch Exact
  std::string notes;
};

// Seeds must be places of the x_0-line.  When pruneOutsideLocus is set,
// subtrees whose coordinate leaves `locus` are not expanded (they can never
// ramify again).
PlaceTree build_tower(const TowerSpec& spec, int depth,
                      const std::vector<RationalPlace>& seeds,
                      const std::vector<RationalPlace>& locus,
                      const BuildOptions& opt = {});

// Convenience: closure locus + infinity as seeds.
PlaceTree build_tower_default(const TowerSpec& spec, int depth,
                              const ClosureResult& closure,
                              const BuildOptions& opt = {});

struct DiffDegree {
  Int value;     // exact value or certified lower bound
  bool exact;
};

// deg Diff(F_{i+1}/F_i) over the closure: sum of d_rel * orbitMult over
// level-(i+1) nodes.  Exactness requires a closed locus, conserved fibers,
// Exact statuses, and tree seeds covering the locus.
DiffDegree different_degree(const PlaceTree& tree, const ClosureResult& closure,
                            int level);

struct LevelSummary {
  int level = 0;
  sint stepDegree = 0;      // [F_{i}:F_{i-1}] (= degT when certified)
  bool stepCertified = false;
  Int totalDegree = 1;      // [F_i:F_0]
  Int diffDegree = 0;       // deg Diff(F_i/F_{i-1}), i >= 1
  bool diffExact = false;
  Int genus = 0;            // g(F_i): exact value or lower bound
  bool genusExact = false;
  Rat gammaPartial = 0;     // g(F_0) - 1 + 1/2 sum_{j<=i} diff_j/[F_j:F_0]
  bool gammaExact = false;
};

std::vector<LevelSummary> genus_sequence(const PlaceTree& tree,
                                         const ClosureResult& closure);

// Different exponent of the node's place over the rational line F_q(x_j):
// nullopt when not resolvable from the stored data.
std::optional<sint> line_different(const PlaceTree& tree, int nodeId, int j);

// Composed different exponent d(node | ancestor at `ancestorLevel`) via
// transitivity along the chain; nullopt when a step is not exact.
std::optional<sint> composed_different(const PlaceTree& tree, int nodeId,
                                       int ancestorLevel);

// The canonical rational place of the x-line under a node coordinate.
RationalPlace coordinate_place(const PlaceTree& tree, int nodeId, int j);

// Minimal polynomial of an element over a subfield presented as F_{q};
// helper shared with the locus computation.
Poly minpoly_over(const Elem& v, const Field& base);

// Resultant of two polynomials in T with coefficients in F_q[S].
Poly resultant_T(const BiPoly& A, const BiPoly& B);

}  // namespace fftower

#endif  // FFTOWER_TOWER_HPP
