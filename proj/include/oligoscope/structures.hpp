#ifndef OLIGOSCOPE_STRUCTURES_HPP_
#define OLIGOSCOPE_STRUCTURES_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oligoscope/error.hpp"
#include "oligoscope/limits.hpp"
#include "oligoscope/rational.hpp"

namespace oligoscope {

// The five signature kinds.  UrysohnRational carries the grid denominator:
// distances are multiples of 1/denominator in [0,1].
struct ClassKind {
  enum class Tag { PureSet, RandomGraph, DenseLinearOrder, AtomlessBoolean, UrysohnRational };

  Tag tag = Tag::PureSet;
  int denominator = 1;  // meaningful for UrysohnRational only; 1 otherwise

  static ClassKind pure_set() { return {Tag::PureSet, 1}; }
  static ClassKind random_graph() { return {Tag::RandomGraph, 1}; }
  static ClassKind dense_linear_order() { return {Tag::DenseLinearOrder, 1}; }
  static ClassKind atomless_boolean() { return {Tag::AtomlessBoolean, 1}; }
  static ClassKind urysohn_rational(int denominator);

  bool operator==(const ClassKind&) const = default;

  std::string name() const;
  static ClassKind from_name(const std::string& name, int denominator = 1);
};

// A finite model of one of the five kinds.  Universe is {0, ..., size-1};
// the payload depends on the kind:
//   RandomGraph       edges, sorted pairs (a, b) with a < b
//   DenseLinearOrder  order[i] = rank of element i (a permutation)
//   AtomlessBoolean   atom_count ambient atoms; elements[i] is the atom-subset
//                     mask of element i; the mask set must be a subalgebra
//                     containing 0 and the full mask
//   UrysohnRational   dist: symmetric matrix, zero diagonal, grid entries,
//                     diameter <= 1, triangle inequality
struct FiniteStructure {
  ClassKind kind;
  int size = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> order;
  int atom_count = 0;
  std::vector<unsigned> elements;
  std::vector<std::vector<Rational>> dist;

  static FiniteStructure pure_set(int n);
  static FiniteStructure graph(int n, std::vector<std::pair<int, int>> edges);
  static FiniteStructure linear_order(int n);
  static FiniteStructure linear_order(std::vector<int> ranks);
  static FiniteStructure boolean_algebra(int atom_count, std::vector<unsigned> elements);
  static FiniteStructure full_boolean_algebra(int atom_count);
  static FiniteStructure metric_space(int denominator, std::vector<std::vector<Rational>> dist);

  void validate() const;  // throws DomainError on any invariant violation

  bool operator==(const FiniteStructure&) const = default;

  // Deterministic total encoding, used for ordering and dedupe.
  std::string encode() const;

  bool adjacent(int a, int b) const;
  bool less(int a, int b) const;
  unsigned mask_of(int i) const { return elements[static_cast<size_t>(i)]; }
  unsigned full_mask() const { return atom_count >= 32 ? ~0u : ((1u << atom_count) - 1u); }
  int boolean_index_of(unsigned mask) const;  // -1 if not in the universe
  const Rational& distance(int a, int b) const;
};

// An injective map source -> target preserving and reflecting all relations.
struct Embedding {
  FiniteStructure source;
  FiniteStructure target;
  std::vector<int> map;

  void validate() const;  // throws if not an embedding
};

// Relation-preservation test for a candidate map; total maps that pass with
// equal sizes are isomorphisms.
bool is_embedding_map(const FiniteStructure& source, const FiniteStructure& target,
                      const std::vector<int>& map);
bool is_isomorphism(const Embedding& f);

// Deterministic backtracking search; first hit in lexicographic image order.
std::optional<Embedding> find_isomorphism(const FiniteStructure& s, const FiniteStructure& t);

// All embedding maps c -> a, sorted lexicographically.
std::vector<std::vector<int>> enumerate_embeddings(const FiniteStructure& c,
                                                   const FiniteStructure& a);
std::vector<std::vector<int>> automorphisms(const FiniteStructure& s);

// Restriction to `subset` (for AtomlessBoolean: the generated subalgebra).
// Returns the substructure together with its inclusion into s.
std::pair<FiniteStructure, Embedding> induced_substructure(const FiniteStructure& s,
                                                           const std::vector<int>& subset);

enum class OrderTiePolicy { ASideFirst, BSideFirst };

struct Amalgam {
  FiniteStructure whole;
  Embedding from_a;
  Embedding from_b;
};

// Glue e1.target and e2.target along the common source, adding no relations
// beyond what the kind forces (DenseLinearOrder interleaves per `policy`).
Amalgam free_amalgam(const Embedding& e1, const Embedding& e2,
                     OrderTiePolicy policy = OrderTiePolicy::ASideFirst);

FiniteStructure canonical_form(const FiniteStructure& s);

// One representative per isomorphism class of size-<=-n members of the class,
// sorted by (size, canonical encoding).
std::vector<FiniteStructure> enumerate_age(ClassKind kind, int n, const Limits& limits = {});

}  // namespace oligoscope

#endif  // OLIGOSCOPE_STRUCTURES_HPP_
