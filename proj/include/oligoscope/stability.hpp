#ifndef OLIGOSCOPE_STABILITY_HPP_
#define OLIGOSCOPE_STABILITY_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oligoscope/formula.hpp"
#include "oligoscope/types.hpp"

namespace oligoscope {

// A half-graph certificate: tuples a^1..a^L, b^1..b^L inside one structure
// with evaluate(phi, (a^i, b^j)) true exactly when i < j (i > j if flipped).
struct OrderWitness {
  ClassKind kind;
  FiniteStructure structure;
  std::vector<std::vector<int>> a_tuples;
  std::vector<std::vector<int>> b_tuples;
  bool flipped = false;

  int length() const { return static_cast<int>(a_tuples.size()); }
};

// Re-evaluates all L^2 instances (and tuple types when p, q are given).
// Throws DomainError("bad_witness", ...) on any mismatch.
void verify_witness(const Formula& phi, const OrderWitness& w,
                    const TypeSpec* p = nullptr, const TypeSpec* q = nullptr);

struct WitnessSearchResult {
  std::optional<OrderWitness> witness;
  bool budget_exhausted = false;
  long long nodes = 0;
};

// Backtracking search for a verified half-graph of length L; none is not a
// proof of stability unless budget_exhausted is false.
WitnessSearchResult find_order_witness(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                                       int length, const Limits& limits = {});

enum class StabilityStatus { Stable, Unstable, Unknown };

struct StabilityVerdict {
  StabilityStatus status = StabilityStatus::Unknown;
  std::optional<Formula> reduct;            // Stable
  std::optional<OrderWitness> witness;      // Unstable, when found within budget
  // Unstable fallback certificate: two configurations sharing the stable
  // invariant on which the formula differs.
  std::optional<std::pair<Configuration, Configuration>> counterexample;
  long long configurations = 0;
  bool witness_budget_exhausted = false;
};

// Decision procedure: enumerate configurations realizing p /\ q, group them by
// the kind's stable invariant (equality pattern, or minimal blocks for the
// boolean kind), and test constancy of phi on each group.  `restrict_to`
// optionally confines the configuration space to those satisfying it.
StabilityVerdict classify_stability(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                                    const Limits& limits = {},
                                    const Formula* restrict_to = nullptr);

// Reduct in the stable sublanguage, equivalent to phi on every configuration
// realizing p /\ q; throws DomainError("unstable", ...) if phi is unstable.
Formula stable_reduct(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                      const Limits& limits = {}, const Formula* restrict_to = nullptr);

// Minimal blocks (I, J) of the bipartite meet relation a_i /\ b_j != 0 after
// both tuples are refined into the atoms of the algebras they generate.
std::vector<std::pair<std::vector<int>, std::vector<int>>> boolean_blocks(const Configuration& c);

// The two iterated limits read off a verified half-graph: (0, 1) for the
// i < j orientation, (1, 0) flipped.
std::pair<int, int> double_limit_table(const Formula& phi, const OrderWitness& w);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_STABILITY_HPP_
