#ifndef OLIGOSCOPE_TYPES_HPP_
#define OLIGOSCOPE_TYPES_HPP_

#include <functional>
#include <string>
#include <vector>

#include "oligoscope/structures.hpp"

namespace oligoscope {

// Quantifier-free type of a labeled tuple: an equality pattern (block ids in
// first-occurrence order) plus the induced data on the distinct elements.
// Payload representation per kind:
//   RandomGraph       edge_bits over block pairs (i<j at bit i*k+j collapsed)
//   DenseLinearOrder  ranks of blocks
//   AtomlessBoolean   sorted nonzero cell signatures; cell S (bitmask over
//                     blocks) is /\_{i in S} x_i /\ /\_{i not in S} ~x_i
//   UrysohnRational   distances between blocks in grid units
struct TypeSpec {
  ClassKind kind;
  int arity = 0;
  std::vector<int> pattern;
  std::vector<std::pair<int, int>> edges;  // on blocks, sorted
  std::vector<int> ranks;                  // on blocks
  std::vector<unsigned> support;           // boolean cell signatures, sorted
  std::vector<std::vector<int>> grid;      // urysohn distances in grid units

  bool operator==(const TypeSpec&) const = default;
  std::string encode() const;
  int block_count() const;

  // The generic type with all positions distinct: edgeless / increasing /
  // all cells nonzero.  For UrysohnRational only arity <= 1 is canonical.
  static TypeSpec distinct(ClassKind kind, int arity);

  // A smallest structure carrying a tuple that realizes this type.
  FiniteStructure realize() const;
  std::vector<int> realize_tuple() const;
};

TypeSpec type_of_tuple(const FiniteStructure& s, const std::vector<int>& tuple);

// A structure carrying two labeled tuples (the object formulas are evaluated
// on).  For AtomlessBoolean the structure is the generated subalgebra of the
// tuple entries.
struct Configuration {
  FiniteStructure structure;
  std::vector<int> xs;
  std::vector<int> ys;

  bool operator==(const Configuration&) const = default;
  std::string encode() const;
};

// Partition of the 2n tuple positions by coincidence of entries; returns
// block ids in first-occurrence order over xs then ys.
std::vector<int> equality_pattern(const Configuration& c);

// All quantifier-free n-types over the empty set, deterministically ordered.
std::vector<TypeSpec> enumerate_tuple_types(ClassKind kind, int n, const Limits& limits = {});
long long count_orbits(ClassKind kind, int n, const Limits& limits = {});

// All pair types at window n: configurations of two injective n-tuples whose
// labeled induced structures agree (the two windows carry the same type).
std::vector<Configuration> enumerate_pair_types(ClassKind kind, int n, const Limits& limits = {});

// All configurations whose x-tuple realizes p and y-tuple realizes q,
// deterministically ordered.  `accept` may prune (joint restriction).
std::vector<Configuration> enumerate_joint_configurations(
    const TypeSpec& p, const TypeSpec& q, const Limits& limits = {},
    const std::function<bool(const Configuration&)>& accept = nullptr);

namespace detail {

// Streaming versions used internally (no structure materialization): a joint
// configuration of (p, q) is a TypeSpec of arity p.arity + q.arity whose two
// restrictions equal p and q.
TypeSpec restrict_type(const TypeSpec& t, int begin, int count);
void for_each_joint_type(const TypeSpec& p, const TypeSpec& q, const Limits& limits,
                         const std::function<void(const TypeSpec&)>& fn);
Configuration materialize_configuration(const TypeSpec& t, int m, int n);

}  // namespace detail

}  // namespace oligoscope

#endif  // OLIGOSCOPE_TYPES_HPP_
