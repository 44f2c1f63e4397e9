#ifndef OLIGOSCOPE_FORMULA_HPP_
#define OLIGOSCOPE_FORMULA_HPP_

#include <string>
#include <vector>

#include "oligoscope/rational.hpp"
#include "oligoscope/structures.hpp"
#include "oligoscope/types.hpp"

namespace oligoscope {

// Terms of the boolean-algebra language: variables, 0, 1, meet (^), join (v),
// complement (~).
struct BoolTerm {
  enum class Op { Var, Zero, One, Meet, Join, Compl };
  Op op = Op::Zero;
  int group = 0;  // 0 = x, 1 = y
  int index = 0;
  std::vector<BoolTerm> kids;

  static BoolTerm var(int group, int index);
  static BoolTerm zero() { return {}; }
  static BoolTerm one();
  static BoolTerm meet(BoolTerm a, BoolTerm b);
  static BoolTerm join(BoolTerm a, BoolTerm b);
  static BoolTerm complement(BoolTerm a);

  bool operator==(const BoolTerm&) const = default;
};

// Quantifier-free formulas in two groups of variables x0.., y0..; implication
// is desugared to !a | b at parse time.
struct FNode {
  enum class Op { True, False, Not, And, Or, Eq, Edge, Less, TermEq, DistCmp };
  enum class Cmp { Eq, Le, Ge };

  Op op = Op::True;
  std::vector<FNode> kids;
  int g1 = 0, i1 = 0, g2 = 0, i2 = 0;  // variable references
  BoolTerm t1, t2;                     // TermEq payload
  Cmp cmp = Cmp::Eq;                   // DistCmp payload
  Rational threshold;

  static FNode truth(bool b);
  static FNode negation(FNode a);
  static FNode conj(FNode a, FNode b);
  static FNode disj(FNode a, FNode b);
  static FNode eq(int g1, int i1, int g2, int i2);
  static FNode edge(int g1, int i1, int g2, int i2);
  static FNode less(int g1, int i1, int g2, int i2);
  static FNode term_eq(BoolTerm a, BoolTerm b);
  static FNode dist_cmp(int g1, int i1, int g2, int i2, Cmp cmp, Rational threshold);

  bool operator==(const FNode&) const = default;
};

struct Formula {
  ClassKind kind;
  int arity_x = 0;
  int arity_y = 0;
  FNode root;

  bool operator==(const Formula&) const = default;
  void validate() const;  // atom/kind agreement, variable bounds
};

// Grammar, precedence high to low: atoms; !; &; |; ->; parentheses.  Atoms:
//   x0 = y1        (all kinds; boolean kinds read it as a term equality)
//   E(x0, y0)      random-graph
//   x0 < y0        dense-linear-order
//   t = s          atomless-boolean terms over ^ v ~ 0 1
//   d(x0,y0) <= 1/2   urysohn-rational, relations <=, >=, =
//   true, false
Formula parse_formula(const std::string& text, ClassKind kind, int arity_x, int arity_y);
std::string print_formula(const Formula& f);
std::string print_node(const FNode& n, ClassKind kind);

bool evaluate(const Formula& f, const Configuration& c);

// Atom semantics against arbitrary backing state (used by the witness search).
class AtomEnv {
 public:
  virtual ~AtomEnv() = default;
  virtual int point(int group, int index) const = 0;
  virtual bool edge_between(int p, int q) const = 0;
  virtual bool less_than(int p, int q) const = 0;
  virtual unsigned mask_of_var(int group, int index) const = 0;
  virtual unsigned full_mask() const = 0;
  virtual Rational dist_between(int p, int q) const = 0;
};

bool evaluate_node(const FNode& n, const AtomEnv& env);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_FORMULA_HPP_
