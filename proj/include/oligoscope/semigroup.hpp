#ifndef OLIGOSCOPE_SEMIGROUP_HPP_
#define OLIGOSCOPE_SEMIGROUP_HPP_

#include <optional>
#include <vector>

#include "oligoscope/partial_iso.hpp"
#include "oligoscope/rational.hpp"

namespace oligoscope {

// A finite *-semigroup of partial isomorphisms with full multiplication and
// involution tables.  Elements are sorted by graph encoding; closed under
// compose and involution.
struct StarSemigroupTable {
  std::vector<PartialIso> elements;
  std::vector<std::vector<int>> product;  // product[i][j] = index of compose(e_i, e_j)
  std::vector<int> star;
  std::vector<int> generators;

  int index_of(const PartialIso& p) const;  // -1 if absent
  void validate() const;                    // closure, associativity spot and (pq)* = q*p*
};

StarSemigroupTable generate_star_semigroup(const std::vector<PartialIso>& gens,
                                           const Limits& limits = {});

// Green's left preorder.  p <=_L q holds exactly when dom(p) is contained in
// dom(q); equivalently p factors as "q followed by a correction", and the
// canonical witness maps q(a) to p(a) on the shared domain.
bool green_leq(const PartialIso& p, const PartialIso& q);
bool green_equiv(const PartialIso& p, const PartialIso& q);
// Exhaustive search for r with compose(q, r) = p over the given universe.
std::optional<PartialIso> green_leq_witness(const PartialIso& p, const PartialIso& q,
                                            const std::vector<PartialIso>& universe);
bool green_leq(const PartialIso& p, const PartialIso& q, const StarSemigroupTable& universe);
PartialIso green_canonical_witness(const PartialIso& p, const PartialIso& q);

// The unique <=_L-least idempotent of a star-closed table.
PartialIso least_idempotent(const StarSemigroupTable& s);

// Partial identities id_A with A invariant under every total automorphism of
// the window structure.
std::vector<PartialIso> central_idempotents(const FiniteStructure& window_structure,
                                            const Limits& limits = {});

// H(e) for an idempotent e = id_A: all p with pe = ep = p and p*p = pp* = e,
// i.e. the automorphisms of the induced substructure on A.
StarSemigroupTable maximal_group(const PartialIso& e, const FiniteStructure& window_structure);

// Quotient action g |-> compose(g, e) into H(e); requires e central, g total.
PartialIso restrict_action(const PartialIso& e, const PartialIso& g,
                           const FiniteStructure& window_structure);

struct AmalgamationTriple {
  PartialIso w, u, v;        // embeddings of the window into the enlarged window
  FiniteStructure enlarged;  // structure on the enlarged window
};

// Given p with compose(x, p) == compose(y, p) for total automorphisms x, y of
// the window, produce w, u, v into an enlarged window with
// involution(w)*u = involution(w)*v = p and compose(y, u) = compose(x, v).
// Returns nullopt if the construction exceeds the window growth bound.
std::optional<AmalgamationTriple> amalgamation_triple(const PartialIso& p, const PartialIso& x,
                                                      const PartialIso& y,
                                                      const FiniteStructure& window_structure,
                                                      const Limits& limits = {});

// Normalized Hamming distance on images and its two-sided companion.
Rational hamming_left(const std::vector<int>& g, const std::vector<int>& h);
Rational hamming_right(const std::vector<int>& g, const std::vector<int>& h);
// Exact lower-uniformity distance: min over f of max(d_R(g, f), d_L(f, h)).
Rational roelcke_distance(const std::vector<int>& g, const std::vector<int>& h,
                          const Limits& limits = {});

}  // namespace oligoscope

#endif  // OLIGOSCOPE_SEMIGROUP_HPP_
