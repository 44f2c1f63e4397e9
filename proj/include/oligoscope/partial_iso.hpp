#ifndef OLIGOSCOPE_PARTIAL_ISO_HPP_
#define OLIGOSCOPE_PARTIAL_ISO_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oligoscope/structures.hpp"

namespace oligoscope {

// A partial isomorphism between two copies of a window {0, ..., window-1}.
// `pairs` is a partial injection, sorted by first coordinate; (a, b) means the
// left copy's a corresponds to the right copy's b.  The optional context gives
// the relations on each side; the induced map must then be an isomorphism of
// induced substructures.
struct PartialIso {
  ClassKind kind;
  int window = 0;
  std::vector<std::pair<int, int>> pairs;
  // left and right window structures, both of size `window`
  std::optional<std::pair<FiniteStructure, FiniteStructure>> context;

  static PartialIso identity(ClassKind kind, int window);
  static PartialIso empty(ClassKind kind, int window);
  // partial identity on a subset A of the window
  static PartialIso partial_identity(ClassKind kind, int window, const std::vector<int>& subset);
  static PartialIso from_permutation(ClassKind kind, const std::vector<int>& images);

  PartialIso with_context(FiniteStructure left, FiniteStructure right) const;

  void validate() const;  // throws DomainError

  bool same_graph(const PartialIso& o) const { return pairs == o.pairs; }
  bool operator==(const PartialIso&) const = default;

  std::vector<int> domain() const;
  std::vector<int> range() const;
  bool is_total() const { return static_cast<int>(pairs.size()) == window; }
  bool is_partial_identity() const;
  std::optional<int> apply(int a) const;

  std::string encode() const;  // graph only; deterministic order key
};

// Relational composition: (a, c) whenever (a, b) in p and (b, c) in q.
PartialIso compose(const PartialIso& p, const PartialIso& q);
PartialIso involution(const PartialIso& p);
bool is_idempotent(const PartialIso& p);

// Every partial isomorphism of the window structure (context on both sides),
// sorted by graph encoding.  For PureSet this is the full symmetric inverse
// monoid on `window` points.
std::vector<PartialIso> all_partial_isos(const FiniteStructure& window_structure);
std::vector<PartialIso> all_partial_isos(ClassKind kind, int window);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_PARTIAL_ISO_HPP_
