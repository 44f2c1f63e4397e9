#include <doctest.h>

#include <map>
#include <set>

#include "oligoscope/stability.hpp"

using namespace oligoscope;

namespace {

const ClassKind kGraph = ClassKind::random_graph();
const ClassKind kOrder = ClassKind::dense_linear_order();
const ClassKind kBool = ClassKind::atomless_boolean();
const ClassKind kGrid4 = ClassKind::urysohn_rational(4);

Formula parse1(const std::string& text, ClassKind kind) { return parse_formula(text, kind, 1, 1); }

TypeSpec d1(ClassKind kind) { return TypeSpec::distinct(kind, 1); }

// every AST of depth <= `depth` over the kind's (1,1) atoms plus true/false
std::vector<FNode> ast_corpus(ClassKind kind, int depth) {
  std::vector<FNode> atoms = {FNode::truth(true), FNode::truth(false)};
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      atoms.push_back(FNode::eq(0, 0, 1, 0));
      break;
    case ClassKind::Tag::RandomGraph:
      atoms.push_back(FNode::eq(0, 0, 1, 0));
      atoms.push_back(FNode::edge(0, 0, 1, 0));
      break;
    case ClassKind::Tag::DenseLinearOrder:
      atoms.push_back(FNode::eq(0, 0, 1, 0));
      atoms.push_back(FNode::less(0, 0, 1, 0));
      break;
    case ClassKind::Tag::AtomlessBoolean:
      atoms.push_back(FNode::term_eq(BoolTerm::var(0, 0), BoolTerm::var(1, 0)));
      atoms.push_back(
          FNode::term_eq(BoolTerm::meet(BoolTerm::var(0, 0), BoolTerm::var(1, 0)), BoolTerm::zero()));
      break;
    case ClassKind::Tag::UrysohnRational:
      atoms.push_back(FNode::eq(0, 0, 1, 0));
      atoms.push_back(FNode::dist_cmp(0, 0, 1, 0, FNode::Cmp::Le, Rational(1, 2)));
      break;
  }
  std::vector<FNode> level = atoms;
  for (int d = 0; d < depth; ++d) {
    std::vector<FNode> next = level;
    for (const auto& a : level) next.push_back(FNode::negation(a));
    for (const auto& a : level)
      for (const auto& b : level) {
        next.push_back(FNode::conj(a, b));
        next.push_back(FNode::disj(a, b));
      }
    level = std::move(next);
  }
  return level;
}

}  // namespace

TEST_CASE("order witness for the order relation itself") {
  Formula less = parse1("x0 < y0", kOrder);
  TypeSpec t = d1(kOrder);
  auto r = find_order_witness(less, t, t, 4);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->length() == 4);
  verify_witness(less, *r.witness, &t, &t);
}

TEST_CASE("equality admits no witness of length three in any kind") {
  for (ClassKind kind : {ClassKind::pure_set(), kGraph, kOrder, kGrid4}) {
    Formula eq = parse1("x0 = y0", kind);
    auto r = find_order_witness(eq, d1(kind), d1(kind), 3);
    CHECK(!r.witness.has_value());
    CHECK(!r.budget_exhausted);  // the point search space is finite
  }
  Formula eqb = parse1("x0 = y0", kBool);
  auto rb = find_order_witness(eqb, d1(kBool), d1(kBool), 3);
  CHECK(!rb.witness.has_value());
  // equality does admit a length-2 half-graph, so 3 is the sharp bound
  Formula eqg = parse1("x0 = y0", kGraph);
  CHECK(find_order_witness(eqg, d1(kGraph), d1(kGraph), 2).witness.has_value());
}

TEST_CASE("edge half-graph of length five") {
  Formula edge = parse1("E(x0,y0)", kGraph);
  TypeSpec t = d1(kGraph);
  auto r = find_order_witness(edge, t, t, 5);
  REQUIRE(r.witness.has_value());
  verify_witness(edge, *r.witness, &t, &t);
  auto [lo, hi] = double_limit_table(edge, *r.witness);
  CHECK(lo == 0);
  CHECK(hi == 1);
  CHECK(!r.witness->flipped);
}

TEST_CASE("double limit table demands a verified witness") {
  Formula edge = parse1("E(x0,y0)", kGraph);
  auto r = find_order_witness(edge, d1(kGraph), d1(kGraph), 3);
  REQUIRE(r.witness.has_value());
  OrderWitness broken = *r.witness;
  std::swap(broken.a_tuples[0], broken.a_tuples[2]);
  CHECK_THROWS_AS(double_limit_table(edge, broken), DomainError);
}

TEST_CASE("witnesses truncate to shorter witnesses") {
  Formula less = parse1("x0 < y0", kOrder);
  TypeSpec t = d1(kOrder);
  auto r = find_order_witness(less, t, t, 4);
  REQUIRE(r.witness.has_value());
  OrderWitness shorter = *r.witness;
  shorter.a_tuples.pop_back();
  shorter.b_tuples.pop_back();
  verify_witness(less, shorter, &t, &t);
}

TEST_CASE("classifier verdicts on the worked examples") {
  SUBCASE("edge relation is unstable") {
    auto v = classify_stability(parse1("E(x0,y0)", kGraph), d1(kGraph), d1(kGraph));
    CHECK(v.status == StabilityStatus::Unstable);
    REQUIRE(v.witness.has_value());
    verify_witness(parse1("E(x0,y0)", kGraph), *v.witness);
    REQUIRE(v.counterexample.has_value());
    // the pair shares the invariant but separates the formula
    Formula phi = parse1("E(x0,y0)", kGraph);
    CHECK(equality_pattern(v.counterexample->first) == equality_pattern(v.counterexample->second));
    CHECK(evaluate(phi, v.counterexample->first) != evaluate(phi, v.counterexample->second));
  }
  SUBCASE("equality is stable with itself as reduct") {
    auto v = classify_stability(parse1("x0 = y0", kGraph), d1(kGraph), d1(kGraph));
    CHECK(v.status == StabilityStatus::Stable);
    REQUIRE(v.reduct.has_value());
    CHECK(print_formula(*v.reduct) == "x0 = y0");
  }
  SUBCASE("order relation is unstable") {
    auto v = classify_stability(parse1("x0 < y0", kOrder), d1(kOrder), d1(kOrder));
    CHECK(v.status == StabilityStatus::Unstable);
    CHECK(v.witness.has_value());
  }
  SUBCASE("term equalities are stable") {
    auto v = classify_stability(parse1("x0 = y0", kBool), d1(kBool), d1(kBool));
    CHECK(v.status == StabilityStatus::Stable);
  }
  SUBCASE("disjoint meet over proper elements is unstable with a verified certificate") {
    Formula phi = parse1("x0 ^ y0 = 0", kBool);
    TypeSpec t = d1(kBool);
    auto v = classify_stability(phi, t, t);
    CHECK(v.status == StabilityStatus::Unstable);
    REQUIRE(v.witness.has_value());
    verify_witness(phi, *v.witness, &t, &t);
    REQUIRE(v.counterexample.has_value());
    CHECK(evaluate(phi, v.counterexample->first) != evaluate(phi, v.counterexample->second));
  }
  SUBCASE("grid threshold is unstable; constants are stable") {
    auto v = classify_stability(parse1("d(x0,y0) <= 1/2", kGrid4), d1(kGrid4), d1(kGrid4));
    CHECK(v.status == StabilityStatus::Unstable);
    CHECK(classify_stability(parse1("true", kGrid4), d1(kGrid4), d1(kGrid4)).status ==
          StabilityStatus::Stable);
    CHECK(classify_stability(parse1("false", kGrid4), d1(kGrid4), d1(kGrid4)).status ==
          StabilityStatus::Stable);
  }
}

TEST_CASE("stable reducts") {
  SUBCASE("restricted to forced equality the mixed formula collapses to true") {
    Formula phi = parse1("E(x0,y0) | x0 = y0", kGraph);
    Formula restr = parse1("x0 = y0", kGraph);
    Formula r = stable_reduct(phi, d1(kGraph), d1(kGraph), {}, &restr);
    // on that class edges never hold and equality always does
    CHECK(print_formula(r) == "x0 = y0");
    Configuration c{FiniteStructure::pure_set(1), {0}, {0}};
    c.structure = FiniteStructure::graph(1, {});
    CHECK(evaluate(r, c));
  }
  SUBCASE("formulas already in the sublanguage are their own reduct") {
    Formula phi = parse1("x0 = y0", kGraph);
    CHECK(stable_reduct(phi, d1(kGraph), d1(kGraph)).root == phi.root);
    Formula bphi = parse_formula("x0 v x1 = y0", kBool, 2, 1);
    TypeSpec p2 = TypeSpec::distinct(kBool, 2);
    CHECK(stable_reduct(bphi, p2, d1(kBool)).root == bphi.root);
  }
  SUBCASE("reducts of unstable formulas are refused") {
    CHECK_THROWS_AS(stable_reduct(parse1("E(x0,y0)", kGraph), d1(kGraph), d1(kGraph)),
                    DomainError);
  }
  SUBCASE("reducts depend only on the invariant") {
    Formula phi = parse1("E(x0,y0) | !(x0 = y0)", kGraph);  // true unless x0 = y0
    auto v = classify_stability(phi, d1(kGraph), d1(kGraph));
    REQUIRE(v.status == StabilityStatus::Stable);
    // evaluate the reduct on two configurations sharing the pattern
    Configuration with_edge{FiniteStructure::graph(2, {{0, 1}}), {0}, {1}};
    Configuration without{FiniteStructure::graph(2, {}), {0}, {1}};
    CHECK(evaluate(*v.reduct, with_edge) == evaluate(*v.reduct, without));
  }
}

TEST_CASE("boolean blocks") {
  FiniteStructure alg = FiniteStructure::full_boolean_algebra(2);
  int a0 = alg.boolean_index_of(0b01), a1 = alg.boolean_index_of(0b10);

  SUBCASE("diagonal partitions give singleton blocks") {
    Configuration c{alg, {a0, a1}, {a0, a1}};
    auto blocks = boolean_blocks(c);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0] == std::pair<std::vector<int>, std::vector<int>>{{0}, {0}});
    CHECK(blocks[1] == std::pair<std::vector<int>, std::vector<int>>{{1}, {1}});
  }
  SUBCASE("everything meets everything: one block") {
    FiniteStructure alg4 = FiniteStructure::full_boolean_algebra(4);
    // crosswise partitions: every cell of one meets every cell of the other
    int p0 = alg4.boolean_index_of(0b0011), p1 = alg4.boolean_index_of(0b1100);
    int q0 = alg4.boolean_index_of(0b0101), q1 = alg4.boolean_index_of(0b1010);
    Configuration c{alg4, {p0, p1}, {q0, q1}};
    auto blocks = boolean_blocks(c);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].first.size() == 2);
    CHECK(blocks[0].second.size() == 2);
  }
  SUBCASE("a single missing meet keeps one minimal block") {
    // a0 /\ b0 = 0 only: the bipartite graph stays connected
    FiniteStructure alg3 = FiniteStructure::full_boolean_algebra(3);
    int pa0 = alg3.boolean_index_of(0b001), pa1 = alg3.boolean_index_of(0b110);
    int qb0 = alg3.boolean_index_of(0b010), qb1 = alg3.boolean_index_of(0b101);
    Configuration c{alg3, {pa0, pa1}, {qb0, qb1}};
    auto blocks = boolean_blocks(c);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].first == std::vector<int>{0, 1});
    CHECK(blocks[0].second == std::vector<int>{0, 1});
  }
  SUBCASE("non-partition tuples are atomized first") {
    Configuration c{alg, {alg.boolean_index_of(0b11)}, {a0}};
    auto blocks = boolean_blocks(c);
    CHECK(blocks.size() >= 1);
  }
}

TEST_CASE("classifier and witness search agree on the depth-two corpus") {
  for (ClassKind kind : {kGraph, kOrder, kBool, kGrid4}) {
    TypeSpec t = d1(kind);
    // group the corpus semantically: the truth vector over the configuration
    // space determines both the verdict and the witness search behaviour
    auto configs = enumerate_joint_configurations(t, t);
    std::map<std::string, Formula> classes;
    for (const auto& node : ast_corpus(kind, 2)) {
      Formula phi{kind, 1, 1, node};
      std::string key;
      for (const auto& c : configs) key += evaluate(phi, c) ? '1' : '0';
      classes.emplace(key, phi);
    }
    Limits budget;
    budget.search_budget = kind.tag == ClassKind::Tag::AtomlessBoolean ? 400'000 : 5'000'000;
    for (const auto& [key, phi] : classes) {
      auto v = classify_stability(phi, t, t);
      auto w = find_order_witness(phi, t, t, 4, budget);
      bool classified_unstable = v.status == StabilityStatus::Unstable;
      INFO("kind=", kind.name(), " formula=", print_formula(phi));
      CHECK(classified_unstable == w.witness.has_value());
      if (w.witness) verify_witness(phi, *w.witness, &t, &t);
    }
  }
}

TEST_CASE("unstable certificates re-verify") {
  for (ClassKind kind : {kGraph, kOrder, kBool, kGrid4}) {
    TypeSpec t = d1(kind);
    for (const auto& node : ast_corpus(kind, 1)) {
      Formula phi{kind, 1, 1, node};
      auto v = classify_stability(phi, t, t);
      if (v.status != StabilityStatus::Unstable) continue;
      REQUIRE(v.counterexample.has_value());
      CHECK(evaluate(phi, v.counterexample->first) != evaluate(phi, v.counterexample->second));
      if (v.witness) verify_witness(phi, *v.witness, &t, &t);
    }
  }
}

TEST_CASE("configuration caps are enforced") {
  Limits tight;
  tight.config_cap = 1;
  CHECK_THROWS_AS(
      classify_stability(parse1("E(x0,y0)", kGraph), d1(kGraph), d1(kGraph), tight),
      DomainError);
}
