#include "oligoscope/formula.hpp"

#include <cctype>
#include <sstream>

namespace oligoscope {

BoolTerm BoolTerm::var(int group, int index) {
  BoolTerm t;
  t.op = Op::Var;
  t.group = group;
  t.index = index;
  return t;
}

BoolTerm BoolTerm::one() {
  BoolTerm t;
  t.op = Op::One;
  return t;
}

BoolTerm BoolTerm::meet(BoolTerm a, BoolTerm b) {
  BoolTerm t;
  t.op = Op::Meet;
  t.kids = {std::move(a), std::move(b)};
  return t;
}

BoolTerm BoolTerm::join(BoolTerm a, BoolTerm b) {
  BoolTerm t;
  t.op = Op::Join;
  t.kids = {std::move(a), std::move(b)};
  return t;
}

BoolTerm BoolTerm::complement(BoolTerm a) {
  BoolTerm t;
  t.op = Op::Compl;
  t.kids = {std::move(a)};
  return t;
}

FNode FNode::truth(bool b) {
  FNode n;
  n.op = b ? Op::True : Op::False;
  return n;
}

FNode FNode::negation(FNode a) {
  FNode n;
  n.op = Op::Not;
  n.kids = {std::move(a)};
  return n;
}

FNode FNode::conj(FNode a, FNode b) {
  FNode n;
  n.op = Op::And;
  n.kids = {std::move(a), std::move(b)};
  return n;
}

FNode FNode::disj(FNode a, FNode b) {
  FNode n;
  n.op = Op::Or;
  n.kids = {std::move(a), std::move(b)};
  return n;
}

FNode FNode::eq(int g1, int i1, int g2, int i2) {
  FNode n;
  n.op = Op::Eq;
  n.g1 = g1; n.i1 = i1; n.g2 = g2; n.i2 = i2;
  return n;
}

FNode FNode::edge(int g1, int i1, int g2, int i2) {
  FNode n = eq(g1, i1, g2, i2);
  n.op = Op::Edge;
  return n;
}

FNode FNode::less(int g1, int i1, int g2, int i2) {
  FNode n = eq(g1, i1, g2, i2);
  n.op = Op::Less;
  return n;
}

FNode FNode::term_eq(BoolTerm a, BoolTerm b) {
  FNode n;
  n.op = Op::TermEq;
  n.t1 = std::move(a);
  n.t2 = std::move(b);
  return n;
}

FNode FNode::dist_cmp(int g1, int i1, int g2, int i2, Cmp cmp, Rational threshold) {
  FNode n = eq(g1, i1, g2, i2);
  n.op = Op::DistCmp;
  n.cmp = cmp;
  n.threshold = threshold;
  return n;
}

namespace {

void check_var(const Formula& f, int group, int index) {
  int bound = group == 0 ? f.arity_x : f.arity_y;
  if (index < 0 || index >= bound)
    throw DomainError("arity", "variable index " + std::to_string(index) +
                                   " out of declared arity");
}

void check_term(const Formula& f, const BoolTerm& t) {
  if (t.op == BoolTerm::Op::Var) check_var(f, t.group, t.index);
  for (const auto& k : t.kids) check_term(f, k);
}

void check_node(const Formula& f, const FNode& n) {
  using Op = FNode::Op;
  switch (n.op) {
    case Op::True:
    case Op::False:
      break;
    case Op::Not:
    case Op::And:
    case Op::Or:
      for (const auto& k : n.kids) check_node(f, k);
      break;
    case Op::Eq:
      check_var(f, n.g1, n.i1);
      check_var(f, n.g2, n.i2);
      break;
    case Op::Edge:
      if (f.kind.tag != ClassKind::Tag::RandomGraph)
        throw DomainError("atom_kind_mismatch", "edge atom outside random-graph");
      check_var(f, n.g1, n.i1);
      check_var(f, n.g2, n.i2);
      break;
    case Op::Less:
      if (f.kind.tag != ClassKind::Tag::DenseLinearOrder)
        throw DomainError("atom_kind_mismatch", "order atom outside dense-linear-order");
      check_var(f, n.g1, n.i1);
      check_var(f, n.g2, n.i2);
      break;
    case Op::TermEq:
      if (f.kind.tag != ClassKind::Tag::AtomlessBoolean)
        throw DomainError("atom_kind_mismatch", "term atom outside atomless-boolean");
      check_term(f, n.t1);
      check_term(f, n.t2);
      break;
    case Op::DistCmp: {
      if (f.kind.tag != ClassKind::Tag::UrysohnRational)
        throw DomainError("atom_kind_mismatch", "distance atom outside urysohn-rational");
      check_var(f, n.g1, n.i1);
      check_var(f, n.g2, n.i2);
      Rational steps = n.threshold * Rational(f.kind.denominator);
      if (steps.den() != 1 || n.threshold < Rational(0) || n.threshold > Rational(1))
        throw DomainError("bad_rational", "distance threshold off the grid");
      break;
    }
  }
}

}  // namespace

void Formula::validate() const { check_node(*this, root); }

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  ClassKind kind;

  explicit Parser(const std::string& t, ClassKind k) : text(t), kind(k) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw DomainError("parse_error", msg + " at position " + std::to_string(pos));
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  bool peek(const std::string& tok) {
    skip_ws();
    return text.compare(pos, tok.size(), tok) == 0;
  }

  bool peek_word(const std::string& word) {
    skip_ws();
    if (text.compare(pos, word.size(), word) != 0) return false;
    size_t after = pos + word.size();
    return after >= text.size() || !std::isalnum(static_cast<unsigned char>(text[after]));
  }

  bool eat_word(const std::string& word) {
    if (!peek_word(word)) return false;
    pos += word.size();
    return true;
  }

  std::pair<int, int> parse_var() {
    skip_ws();
    if (pos >= text.size() || (text[pos] != 'x' && text[pos] != 'y')) fail("expected a variable");
    int group = text[pos] == 'x' ? 0 : 1;
    ++pos;
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected a variable index");
    return {group, std::stoi(text.substr(start, pos - start))};
  }

  Rational parse_rational() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/'))
      ++pos;
    if (pos == start) fail("expected a rational");
    return Rational::parse(text.substr(start, pos - start));
  }

  BoolTerm parse_term() { return parse_term_join(); }

  BoolTerm parse_term_join() {
    BoolTerm t = parse_term_meet();
    while (peek_word("v")) {
      eat_word("v");
      t = BoolTerm::join(std::move(t), parse_term_meet());
    }
    return t;
  }

  BoolTerm parse_term_meet() {
    BoolTerm t = parse_term_unary();
    while (eat("^")) t = BoolTerm::meet(std::move(t), parse_term_unary());
    return t;
  }

  BoolTerm parse_term_unary() {
    skip_ws();
    if (eat("~")) return BoolTerm::complement(parse_term_unary());
    if (eat("(")) {
      BoolTerm t = parse_term();
      if (!eat(")")) fail("expected ')'");
      return t;
    }
    if (pos < text.size() && text[pos] == '0') { ++pos; return BoolTerm::zero(); }
    if (pos < text.size() && text[pos] == '1') { ++pos; return BoolTerm::one(); }
    auto [g, i] = parse_var();
    return BoolTerm::var(g, i);
  }

  FNode parse_atom() {
    skip_ws();
    if (eat_word("true")) return FNode::truth(true);
    if (eat_word("false")) return FNode::truth(false);

    if (kind.tag == ClassKind::Tag::AtomlessBoolean) {
      BoolTerm t1 = parse_term();
      if (!eat("=")) fail("expected '=' in term equality");
      BoolTerm t2 = parse_term();
      return FNode::term_eq(std::move(t1), std::move(t2));
    }
    if (kind.tag == ClassKind::Tag::RandomGraph && peek_word("E")) {
      eat_word("E");
      if (!eat("(")) fail("expected '(' after E");
      auto [g1, i1] = parse_var();
      if (!eat(",")) fail("expected ','");
      auto [g2, i2] = parse_var();
      if (!eat(")")) fail("expected ')'");
      return FNode::edge(g1, i1, g2, i2);
    }
    if (kind.tag == ClassKind::Tag::UrysohnRational && peek_word("d")) {
      eat_word("d");
      if (!eat("(")) fail("expected '(' after d");
      auto [g1, i1] = parse_var();
      if (!eat(",")) fail("expected ','");
      auto [g2, i2] = parse_var();
      if (!eat(")")) fail("expected ')'");
      FNode::Cmp cmp;
      if (eat("<=")) cmp = FNode::Cmp::Le;
      else if (eat(">=")) cmp = FNode::Cmp::Ge;
      else if (eat("=")) cmp = FNode::Cmp::Eq;
      else fail("expected '<=', '>=' or '='");
      return FNode::dist_cmp(g1, i1, g2, i2, cmp, parse_rational());
    }
    auto [g1, i1] = parse_var();
    skip_ws();
    if (peek("<") && !peek("<=")) {
      if (kind.tag != ClassKind::Tag::DenseLinearOrder)
        throw DomainError("atom_kind_mismatch",
                          "order atom in a " + kind.name() + " formula");
      eat("<");
      auto [g2, i2] = parse_var();
      return FNode::less(g1, i1, g2, i2);
    }
    if (!eat("=")) fail("expected '=' or a kind relation");
    auto [g2, i2] = parse_var();
    return FNode::eq(g1, i1, g2, i2);
  }

  FNode parse_unary() {
    skip_ws();
    if (eat("!")) return FNode::negation(parse_unary());
    if (peek("(")) {
      // boolean terms also use parentheses; try a parenthesized formula first
      size_t save = pos;
      if (kind.tag == ClassKind::Tag::AtomlessBoolean) {
        try {
          eat("(");
          FNode inner = parse_formula_node();
          if (eat(")")) return inner;
          fail("expected ')'");
        } catch (const DomainError&) {
          pos = save;
          return parse_atom();
        }
      }
      eat("(");
      FNode inner = parse_formula_node();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    return parse_atom();
  }

  FNode parse_and() {
    FNode n = parse_unary();
    while (true) {
      skip_ws();
      // boolean meet '^' binds inside atoms only; formula '&' is distinct
      if (eat("&")) n = FNode::conj(std::move(n), parse_unary());
      else break;
    }
    return n;
  }

  FNode parse_or() {
    FNode n = parse_and();
    while (true) {
      skip_ws();
      if (peek("|")) {
        eat("|");
        n = FNode::disj(std::move(n), parse_and());
      } else {
        break;
      }
    }
    return n;
  }

  FNode parse_formula_node() {
    FNode n = parse_or();
    skip_ws();
    if (eat("->")) {
      FNode rhs = parse_formula_node();  // right associative
      n = FNode::disj(FNode::negation(std::move(n)), std::move(rhs));
    }
    return n;
  }
};

}  // namespace

Formula parse_formula(const std::string& text, ClassKind kind, int arity_x, int arity_y) {
  Parser p(text, kind);
  Formula f;
  f.kind = kind;
  f.arity_x = arity_x;
  f.arity_y = arity_y;
  f.root = p.parse_formula_node();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  f.validate();
  return f;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string var_name(int group, int index) {
  return (group == 0 ? "x" : "y") + std::to_string(index);
}

std::string print_term(const BoolTerm& t, int parent_prec) {
  // precedence: compl 3, meet 2, join 1
  switch (t.op) {
    case BoolTerm::Op::Var: return var_name(t.group, t.index);
    case BoolTerm::Op::Zero: return "0";
    case BoolTerm::Op::One: return "1";
    case BoolTerm::Op::Compl: return "~" + print_term(t.kids[0], 3);
    case BoolTerm::Op::Meet: {
      std::string s = print_term(t.kids[0], 2) + " ^ " + print_term(t.kids[1], 3);
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
    case BoolTerm::Op::Join: {
      std::string s = print_term(t.kids[0], 1) + " v " + print_term(t.kids[1], 2);
      return parent_prec > 1 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

// precedence: atom/not 4, and 3, or 2
std::string print_rec(const FNode& n, int parent_prec) {
  using Op = FNode::Op;
  switch (n.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Not: return "!" + print_rec(n.kids[0], 4);
    case Op::And: {
      std::string s = print_rec(n.kids[0], 3) + " & " + print_rec(n.kids[1], 4);
      return parent_prec > 3 ? "(" + s + ")" : s;
    }
    case Op::Or: {
      std::string s = print_rec(n.kids[0], 2) + " | " + print_rec(n.kids[1], 3);
      return parent_prec > 2 ? "(" + s + ")" : s;
    }
    case Op::Eq: return var_name(n.g1, n.i1) + " = " + var_name(n.g2, n.i2);
    case Op::Edge: return "E(" + var_name(n.g1, n.i1) + "," + var_name(n.g2, n.i2) + ")";
    case Op::Less: return var_name(n.g1, n.i1) + " < " + var_name(n.g2, n.i2);
    case Op::TermEq: {
      // keep term equalities unambiguous inside formulas
      std::string s = print_term(n.t1, 0) + " = " + print_term(n.t2, 0);
      return parent_prec > 3 ? "(" + s + ")" : s;
    }
    case Op::DistCmp: {
      std::string rel = n.cmp == FNode::Cmp::Le ? "<=" : (n.cmp == FNode::Cmp::Ge ? ">=" : "=");
      return "d(" + var_name(n.g1, n.i1) + "," + var_name(n.g2, n.i2) + ") " + rel + " " +
             n.threshold.str();
    }
  }
  return "?";
}

}  // namespace

std::string print_node(const FNode& n, ClassKind kind) {
  (void)kind;
  return print_rec(n, 0);
}

std::string print_formula(const Formula& f) { return print_rec(f.root, 0); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

unsigned eval_term(const BoolTerm& t, const AtomEnv& env) {
  switch (t.op) {
    case BoolTerm::Op::Var: return env.mask_of_var(t.group, t.index);
    case BoolTerm::Op::Zero: return 0;
    case BoolTerm::Op::One: return env.full_mask();
    case BoolTerm::Op::Meet: return eval_term(t.kids[0], env) & eval_term(t.kids[1], env);
    case BoolTerm::Op::Join: return eval_term(t.kids[0], env) | eval_term(t.kids[1], env);
    case BoolTerm::Op::Compl: return env.full_mask() & ~eval_term(t.kids[0], env);
  }
  return 0;
}

}  // namespace

bool evaluate_node(const FNode& n, const AtomEnv& env) {
  using Op = FNode::Op;
  switch (n.op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Not: return !evaluate_node(n.kids[0], env);
    case Op::And: return evaluate_node(n.kids[0], env) && evaluate_node(n.kids[1], env);
    case Op::Or: return evaluate_node(n.kids[0], env) || evaluate_node(n.kids[1], env);
    case Op::Eq: return env.point(n.g1, n.i1) == env.point(n.g2, n.i2);
    case Op::Edge: return env.edge_between(env.point(n.g1, n.i1), env.point(n.g2, n.i2));
    case Op::Less: return env.less_than(env.point(n.g1, n.i1), env.point(n.g2, n.i2));
    case Op::TermEq: return eval_term(n.t1, env) == eval_term(n.t2, env);
    case Op::DistCmp: {
      Rational d = env.dist_between(env.point(n.g1, n.i1), env.point(n.g2, n.i2));
      switch (n.cmp) {
        case FNode::Cmp::Eq: return d == n.threshold;
        case FNode::Cmp::Le: return d <= n.threshold;
        case FNode::Cmp::Ge: return d >= n.threshold;
      }
      return false;
    }
  }
  return false;
}

namespace {

class ConfigurationEnv : public AtomEnv {
 public:
  ConfigurationEnv(const Formula& f, const Configuration& c) : c_(c) {
    if (static_cast<int>(c.xs.size()) != f.arity_x || static_cast<int>(c.ys.size()) != f.arity_y)
      throw DomainError("arity", "configuration tuple lengths differ from formula arities");
  }

  int point(int group, int index) const override {
    const auto& tuple = group == 0 ? c_.xs : c_.ys;
    if (index < 0 || index >= static_cast<int>(tuple.size()))
      throw DomainError("arity", "variable index out of range");
    return tuple[static_cast<size_t>(index)];
  }
  bool edge_between(int p, int q) const override { return c_.structure.adjacent(p, q); }
  bool less_than(int p, int q) const override { return c_.structure.less(p, q); }
  unsigned mask_of_var(int group, int index) const override {
    return c_.structure.mask_of(point(group, index));
  }
  unsigned full_mask() const override { return c_.structure.full_mask(); }
  Rational dist_between(int p, int q) const override {
    if (p == q) return Rational(0);
    return c_.structure.distance(p, q);
  }

 private:
  const Configuration& c_;
};

}  // namespace

bool evaluate(const Formula& f, const Configuration& c) {
  if (f.kind != c.structure.kind)
    throw DomainError("kind_mismatch", "formula and configuration kinds differ");
  ConfigurationEnv env(f, c);
  return evaluate_node(f.root, env);
}

}  // namespace oligoscope
