#include <doctest.h>

#include <functional>
#include <random>

#include "oligoscope/formula.hpp"

using namespace oligoscope;

TEST_CASE("parsing builds the expected trees") {
  Formula f = parse_formula("E(x0,y0) & !(x0 = y0)", ClassKind::random_graph(), 1, 1);
  REQUIRE(f.root.op == FNode::Op::And);
  CHECK(f.root.kids[0].op == FNode::Op::Edge);
  CHECK(f.root.kids[1].op == FNode::Op::Not);
  CHECK(f.root.kids[1].kids[0].op == FNode::Op::Eq);
}

TEST_CASE("atoms must match the declared kind") {
  CHECK_THROWS_AS(parse_formula("x0 < y0", ClassKind::random_graph(), 1, 1), DomainError);
  CHECK_THROWS_AS(parse_formula("E(x0,y0)", ClassKind::dense_linear_order(), 1, 1), DomainError);
  CHECK_THROWS_AS(parse_formula("x0 = y3", ClassKind::pure_set(), 1, 1), DomainError);
  CHECK_THROWS_AS(parse_formula("d(x0,y0) <= 1/3", ClassKind::urysohn_rational(4), 1, 1),
                  DomainError);
}

TEST_CASE("boolean term precedence: complement, then meet, then join") {
  Formula f = parse_formula("(x0 ^ x1) v ~y0 = 1", ClassKind::atomless_boolean(), 2, 1);
  REQUIRE(f.root.op == FNode::Op::TermEq);
  const BoolTerm& lhs = f.root.t1;
  REQUIRE(lhs.op == BoolTerm::Op::Join);
  CHECK(lhs.kids[0].op == BoolTerm::Op::Meet);
  CHECK(lhs.kids[1].op == BoolTerm::Op::Compl);
  CHECK(f.root.t2.op == BoolTerm::Op::One);
}

TEST_CASE("implication desugars to negation and disjunction") {
  Formula f = parse_formula("x0 = y0 -> x0 = y1", ClassKind::pure_set(), 1, 2);
  REQUIRE(f.root.op == FNode::Op::Or);
  CHECK(f.root.kids[0].op == FNode::Op::Not);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_formula("E(x0,y0) &", ClassKind::random_graph(), 1, 1);
    FAIL("expected a parse error");
  } catch (const DomainError& e) {
    CHECK(e.code() == "parse_error");
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("evaluation on hand-built configurations") {
  SUBCASE("equality") {
    Configuration c{FiniteStructure::pure_set(1), {0}, {0}};
    CHECK(evaluate(parse_formula("x0 = y0", ClassKind::pure_set(), 1, 1), c));
  }
  SUBCASE("edges") {
    Configuration c{FiniteStructure::graph(2, {{0, 1}}), {0}, {1}};
    CHECK(evaluate(parse_formula("E(x0,y0)", ClassKind::random_graph(), 1, 1), c));
  }
  SUBCASE("disjoint boolean meet") {
    FiniteStructure alg = FiniteStructure::full_boolean_algebra(2);
    Configuration c{alg, {alg.boolean_index_of(0b01)}, {alg.boolean_index_of(0b10)}};
    CHECK(evaluate(parse_formula("x0 ^ y0 = 0", ClassKind::atomless_boolean(), 1, 1), c));
    CHECK(!evaluate(parse_formula("x0 v y0 = 0", ClassKind::atomless_boolean(), 1, 1), c));
  }
  SUBCASE("grid distances compare exactly") {
    FiniteStructure m = FiniteStructure::metric_space(
        4, {{Rational(0), Rational(1, 2)}, {Rational(1, 2), Rational(0)}});
    Configuration c{m, {0}, {1}};
    CHECK(evaluate(parse_formula("d(x0,y0) <= 1/2", ClassKind::urysohn_rational(4), 1, 1), c));
    CHECK(evaluate(parse_formula("d(x0,y0) >= 1/2", ClassKind::urysohn_rational(4), 1, 1), c));
    CHECK(!evaluate(parse_formula("d(x0,y0) = 1/4", ClassKind::urysohn_rational(4), 1, 1), c));
  }
}

TEST_CASE("equality pattern of configurations") {
  Configuration shared{FiniteStructure::pure_set(1), {0}, {0}};
  CHECK(equality_pattern(shared) == std::vector<int>{0, 0});

  Configuration mixed{FiniteStructure::pure_set(3), {0, 1}, {2, 1}};
  CHECK(equality_pattern(mixed) == std::vector<int>{0, 1, 2, 1});

  Configuration distinct{FiniteStructure::pure_set(4), {0, 1}, {2, 3}};
  CHECK(equality_pattern(distinct) == std::vector<int>{0, 1, 2, 3});
}

namespace {

FNode random_node(std::mt19937_64& rng, ClassKind kind, int m, int n, int depth) {
  auto var = [&](int arity) { return static_cast<int>(rng() % static_cast<unsigned>(arity)); };
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 3 == 0) return FNode::truth(rng() % 2 == 0);
    switch (kind.tag) {
      case ClassKind::Tag::PureSet:
        return FNode::eq(0, var(m), 1, var(n));
      case ClassKind::Tag::RandomGraph:
        return rng() % 2 ? FNode::edge(0, var(m), 1, var(n)) : FNode::eq(0, var(m), 1, var(n));
      case ClassKind::Tag::DenseLinearOrder:
        return rng() % 2 ? FNode::less(0, var(m), 1, var(n)) : FNode::eq(0, var(m), 1, var(n));
      case ClassKind::Tag::AtomlessBoolean: {
        std::function<BoolTerm(int)> term = [&](int d) -> BoolTerm {
          if (d == 0) {
            switch (rng() % 4) {
              case 0: return BoolTerm::zero();
              case 1: return BoolTerm::one();
              case 2: return BoolTerm::var(0, var(m));
              default: return BoolTerm::var(1, var(n));
            }
          }
          switch (rng() % 3) {
            case 0: return BoolTerm::meet(term(d - 1), term(d - 1));
            case 1: return BoolTerm::join(term(d - 1), term(d - 1));
            default: return BoolTerm::complement(term(d - 1));
          }
        };
        return FNode::term_eq(term(2), term(2));
      }
      case ClassKind::Tag::UrysohnRational: {
        FNode::Cmp cmp = static_cast<FNode::Cmp>(rng() % 3);
        Rational t(static_cast<long long>(rng() % (kind.denominator + 1)), kind.denominator);
        return FNode::dist_cmp(0, var(m), 1, var(n), cmp, t);
      }
    }
  }
  switch (rng() % 3) {
    case 0: return FNode::negation(random_node(rng, kind, m, n, depth - 1));
    case 1:
      return FNode::conj(random_node(rng, kind, m, n, depth - 1),
                         random_node(rng, kind, m, n, depth - 1));
    default:
      return FNode::disj(random_node(rng, kind, m, n, depth - 1),
                         random_node(rng, kind, m, n, depth - 1));
  }
}

}  // namespace

TEST_CASE("print then parse is the identity on random trees") {
  std::mt19937_64 rng(20240817);
  for (ClassKind kind : {ClassKind::pure_set(), ClassKind::random_graph(),
                         ClassKind::dense_linear_order(), ClassKind::atomless_boolean(),
                         ClassKind::urysohn_rational(4)}) {
    for (int trial = 0; trial < 200; ++trial) {
      Formula f{kind, 2, 2, random_node(rng, kind, 2, 2, 3)};
      f.validate();
      Formula back = parse_formula(print_formula(f), kind, 2, 2);
      CHECK(back.root == f.root);
    }
  }
}

TEST_CASE("evaluation is invariant under configuration isomorphism") {
  // relabel the universe of a graph configuration by every permutation
  FiniteStructure g = FiniteStructure::graph(4, {{0, 1}, {1, 2}, {2, 3}});
  Configuration base{g, {0, 2}, {1, 3}};
  Formula phi = parse_formula("E(x0,y0) | (E(x1,y1) & !(x0 = y1))", ClassKind::random_graph(), 2, 2);
  bool expected = evaluate(phi, base);
  std::vector<int> perm = {0, 1, 2, 3};
  do {
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : g.edges)
      edges.emplace_back(perm[static_cast<size_t>(a)], perm[static_cast<size_t>(b)]);
    FiniteStructure h = FiniteStructure::graph(4, edges);
    auto map = [&](const std::vector<int>& t) {
      std::vector<int> out;
      for (int v : t) out.push_back(perm[static_cast<size_t>(v)]);
      return out;
    };
    Configuration moved{h, map(base.xs), map(base.ys)};
    CHECK(evaluate(phi, moved) == expected);
    CHECK(equality_pattern(moved) == equality_pattern(base));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("evaluation rejects arity mismatches") {
  Formula phi = parse_formula("x0 = y0", ClassKind::pure_set(), 1, 1);
  Configuration c{FiniteStructure::pure_set(2), {0, 1}, {1}};
  CHECK_THROWS_AS(evaluate(phi, c), DomainError);
}
