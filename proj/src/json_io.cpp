#include "oligoscope/json_io.hpp"

#include <sstream>

namespace oligoscope {

json to_json(const ClassKind& kind) {
  json j;
  j["name"] = kind.name();
  if (kind.tag == ClassKind::Tag::UrysohnRational) j["denominator"] = kind.denominator;
  return j;
}

ClassKind kind_from_json(const json& j) {
  if (j.is_string()) return ClassKind::from_name(j.get<std::string>());
  return ClassKind::from_name(j.at("name").get<std::string>(), j.value("denominator", 1));
}

json to_json(const FiniteStructure& s) {
  json j;
  j["kind"] = to_json(s.kind);
  j["size"] = s.size;
  switch (s.kind.tag) {
    case ClassKind::Tag::PureSet:
      j["payload"] = json::object();
      break;
    case ClassKind::Tag::RandomGraph: {
      json edges = json::array();
      for (auto [a, b] : s.edges) edges.push_back(json::array({a, b}));
      j["payload"] = {{"edges", edges}};
      break;
    }
    case ClassKind::Tag::DenseLinearOrder:
      j["payload"] = {{"order", s.order}};
      break;
    case ClassKind::Tag::AtomlessBoolean:
      j["payload"] = {{"atoms", s.atom_count}, {"elements", s.elements}};
      break;
    case ClassKind::Tag::UrysohnRational: {
      json rows = json::array();
      for (const auto& row : s.dist) {
        json r = json::array();
        for (const auto& d : row) r.push_back(d.str());
        rows.push_back(r);
      }
      j["payload"] = {{"dist", rows}};
      break;
    }
  }
  return j;
}

FiniteStructure structure_from_json(const json& j) {
  ClassKind kind = kind_from_json(j.at("kind"));
  int size = j.at("size").get<int>();
  const json& payload = j.at("payload");
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      return FiniteStructure::pure_set(size);
    case ClassKind::Tag::RandomGraph: {
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : payload.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      return FiniteStructure::graph(size, std::move(edges));
    }
    case ClassKind::Tag::DenseLinearOrder:
      return FiniteStructure::linear_order(payload.at("order").get<std::vector<int>>());
    case ClassKind::Tag::AtomlessBoolean:
      return FiniteStructure::boolean_algebra(payload.at("atoms").get<int>(),
                                              payload.at("elements").get<std::vector<unsigned>>());
    case ClassKind::Tag::UrysohnRational: {
      std::vector<std::vector<Rational>> dist;
      for (const auto& row : payload.at("dist")) {
        std::vector<Rational> r;
        for (const auto& d : row) r.push_back(Rational::parse(d.get<std::string>()));
        dist.push_back(std::move(r));
      }
      return FiniteStructure::metric_space(kind.denominator, std::move(dist));
    }
  }
  throw DomainError("bad_kind", "unknown kind");
}

json to_json(const Embedding& e) {
  return json{{"source", to_json(e.source)}, {"target", to_json(e.target)}, {"map", e.map}};
}

json to_json(const PartialIso& p) {
  json pairs = json::array();
  for (auto [a, b] : p.pairs) pairs.push_back(json::array({a, b}));
  json j{{"kind", to_json(p.kind)}, {"window", p.window}, {"pairs", pairs}};
  if (p.context)
    j["context"] = json::array({to_json(p.context->first), to_json(p.context->second)});
  return j;
}

PartialIso partial_iso_from_json(const json& j) {
  PartialIso p;
  p.kind = kind_from_json(j.at("kind"));
  p.window = j.at("window").get<int>();
  for (const auto& e : j.at("pairs")) p.pairs.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  std::sort(p.pairs.begin(), p.pairs.end());
  if (j.contains("context"))
    p.context = std::make_pair(structure_from_json(j.at("context").at(0)),
                               structure_from_json(j.at("context").at(1)));
  p.validate();
  return p;
}

json to_json(const StarSemigroupTable& t) {
  json elements = json::array();
  for (const auto& e : t.elements) elements.push_back(to_json(e));
  return json{{"elements", elements},
              {"product", t.product},
              {"star", t.star},
              {"generators", t.generators}};
}

json to_json(const TypeSpec& t) {
  json j{{"kind", to_json(t.kind)}, {"arity", t.arity}, {"pattern", t.pattern}};
  switch (t.kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph: {
      json edges = json::array();
      for (auto [a, b] : t.edges) edges.push_back(json::array({a, b}));
      j["edges"] = edges;
      break;
    }
    case ClassKind::Tag::DenseLinearOrder:
      j["ranks"] = t.ranks;
      break;
    case ClassKind::Tag::AtomlessBoolean:
      j["support"] = t.support;
      break;
    case ClassKind::Tag::UrysohnRational:
      j["grid"] = t.grid;
      break;
  }
  return j;
}

TypeSpec type_from_json(const json& j) {
  TypeSpec t;
  t.kind = kind_from_json(j.at("kind"));
  t.arity = j.at("arity").get<int>();
  t.pattern = j.at("pattern").get<std::vector<int>>();
  if (j.contains("edges"))
    for (const auto& e : j.at("edges")) t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  if (j.contains("ranks")) t.ranks = j.at("ranks").get<std::vector<int>>();
  if (j.contains("support")) t.support = j.at("support").get<std::vector<unsigned>>();
  if (j.contains("grid")) t.grid = j.at("grid").get<std::vector<std::vector<int>>>();
  return t;
}

json to_json(const Configuration& c) {
  return json{{"structure", to_json(c.structure)}, {"xs", c.xs}, {"ys", c.ys}};
}

Configuration configuration_from_json(const json& j) {
  Configuration c;
  c.structure = structure_from_json(j.at("structure"));
  c.xs = j.at("xs").get<std::vector<int>>();
  c.ys = j.at("ys").get<std::vector<int>>();
  return c;
}

namespace {

json term_to_json(const BoolTerm& t) {
  switch (t.op) {
    case BoolTerm::Op::Var:
      return json{{"op", "var"}, {"group", t.group == 0 ? "x" : "y"}, {"index", t.index}};
    case BoolTerm::Op::Zero:
      return json{{"op", "zero"}};
    case BoolTerm::Op::One:
      return json{{"op", "one"}};
    case BoolTerm::Op::Meet:
      return json{{"op", "meet"}, {"args", json::array({term_to_json(t.kids[0]), term_to_json(t.kids[1])})}};
    case BoolTerm::Op::Join:
      return json{{"op", "join"}, {"args", json::array({term_to_json(t.kids[0]), term_to_json(t.kids[1])})}};
    case BoolTerm::Op::Compl:
      return json{{"op", "compl"}, {"args", json::array({term_to_json(t.kids[0])})}};
  }
  return {};
}

BoolTerm term_from_json(const json& j) {
  std::string op = j.at("op").get<std::string>();
  if (op == "var")
    return BoolTerm::var(j.at("group").get<std::string>() == "x" ? 0 : 1, j.at("index").get<int>());
  if (op == "zero") return BoolTerm::zero();
  if (op == "one") return BoolTerm::one();
  if (op == "meet") return BoolTerm::meet(term_from_json(j.at("args").at(0)), term_from_json(j.at("args").at(1)));
  if (op == "join") return BoolTerm::join(term_from_json(j.at("args").at(0)), term_from_json(j.at("args").at(1)));
  if (op == "compl") return BoolTerm::complement(term_from_json(j.at("args").at(0)));
  throw DomainError("bad_formula_json", "unknown term op: " + op);
}

json var_ref(int g, int i) {
  return json{{"group", g == 0 ? "x" : "y"}, {"index", i}};
}

json node_to_json(const FNode& n) {
  using Op = FNode::Op;
  switch (n.op) {
    case Op::True:
      return json{{"op", "true"}};
    case Op::False:
      return json{{"op", "false"}};
    case Op::Not:
      return json{{"op", "not"}, {"args", json::array({node_to_json(n.kids[0])})}};
    case Op::And:
      return json{{"op", "and"}, {"args", json::array({node_to_json(n.kids[0]), node_to_json(n.kids[1])})}};
    case Op::Or:
      return json{{"op", "or"}, {"args", json::array({node_to_json(n.kids[0]), node_to_json(n.kids[1])})}};
    case Op::Eq:
      return json{{"op", "eq"}, {"left", var_ref(n.g1, n.i1)}, {"right", var_ref(n.g2, n.i2)}};
    case Op::Edge:
      return json{{"op", "edge"}, {"left", var_ref(n.g1, n.i1)}, {"right", var_ref(n.g2, n.i2)}};
    case Op::Less:
      return json{{"op", "less"}, {"left", var_ref(n.g1, n.i1)}, {"right", var_ref(n.g2, n.i2)}};
    case Op::TermEq:
      return json{{"op", "term-eq"}, {"left", term_to_json(n.t1)}, {"right", term_to_json(n.t2)}};
    case Op::DistCmp: {
      std::string rel = n.cmp == FNode::Cmp::Le ? "<=" : (n.cmp == FNode::Cmp::Ge ? ">=" : "=");
      return json{{"op", "dist-cmp"},
                  {"left", var_ref(n.g1, n.i1)},
                  {"right", var_ref(n.g2, n.i2)},
                  {"rel", rel},
                  {"threshold", n.threshold.str()}};
    }
  }
  return {};
}

std::pair<int, int> var_from_json(const json& j) {
  return {j.at("group").get<std::string>() == "x" ? 0 : 1, j.at("index").get<int>()};
}

FNode node_from_json(const json& j) {
  std::string op = j.at("op").get<std::string>();
  if (op == "true") return FNode::truth(true);
  if (op == "false") return FNode::truth(false);
  if (op == "not") return FNode::negation(node_from_json(j.at("args").at(0)));
  if (op == "and")
    return FNode::conj(node_from_json(j.at("args").at(0)), node_from_json(j.at("args").at(1)));
  if (op == "or")
    return FNode::disj(node_from_json(j.at("args").at(0)), node_from_json(j.at("args").at(1)));
  if (op == "eq" || op == "edge" || op == "less") {
    auto [g1, i1] = var_from_json(j.at("left"));
    auto [g2, i2] = var_from_json(j.at("right"));
    if (op == "eq") return FNode::eq(g1, i1, g2, i2);
    if (op == "edge") return FNode::edge(g1, i1, g2, i2);
    return FNode::less(g1, i1, g2, i2);
  }
  if (op == "term-eq")
    return FNode::term_eq(term_from_json(j.at("left")), term_from_json(j.at("right")));
  if (op == "dist-cmp") {
    auto [g1, i1] = var_from_json(j.at("left"));
    auto [g2, i2] = var_from_json(j.at("right"));
    std::string rel = j.at("rel").get<std::string>();
    FNode::Cmp cmp = rel == "<=" ? FNode::Cmp::Le : (rel == ">=" ? FNode::Cmp::Ge : FNode::Cmp::Eq);
    return FNode::dist_cmp(g1, i1, g2, i2, cmp, Rational::parse(j.at("threshold").get<std::string>()));
  }
  throw DomainError("bad_formula_json", "unknown node op: " + op);
}

}  // namespace

json to_json(const Formula& f) {
  return json{{"kind", to_json(f.kind)},
              {"arity_x", f.arity_x},
              {"arity_y", f.arity_y},
              {"ast", node_to_json(f.root)},
              {"text", print_formula(f)}};
}

Formula formula_from_json(const json& j) {
  Formula f;
  f.kind = kind_from_json(j.at("kind"));
  f.arity_x = j.at("arity_x").get<int>();
  f.arity_y = j.at("arity_y").get<int>();
  f.root = node_from_json(j.at("ast"));
  f.validate();
  return f;
}

json to_json(const OrderWitness& w) {
  return json{{"structure", to_json(w.structure)},
              {"a_tuples", w.a_tuples},
              {"b_tuples", w.b_tuples},
              {"orientation_flipped", w.flipped}};
}

json to_json(const StabilityVerdict& v) {
  json j;
  switch (v.status) {
    case StabilityStatus::Stable: j["status"] = "Stable"; break;
    case StabilityStatus::Unstable: j["status"] = "Unstable"; break;
    case StabilityStatus::Unknown: j["status"] = "Unknown"; break;
  }
  if (v.reduct) j["reduct"] = to_json(*v.reduct);
  if (v.witness) j["witness"] = to_json(*v.witness);
  if (v.counterexample)
    j["counterexample"] = json::array(
        {to_json(v.counterexample->first), to_json(v.counterexample->second)});
  j["configurations"] = v.configurations;
  j["witness_budget_exhausted"] = v.witness_budget_exhausted;
  return j;
}

json to_json(const CouplingMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rank(); ++i) {
    json row = json::array();
    for (int j2 = 0; j2 < m.rank(); ++j2) row.push_back(m.at(i, j2).str());
    rows.push_back(row);
  }
  return json{{"n", m.rank()}, {"entries", rows}};
}

CouplingMatrix coupling_from_json(const json& j) {
  int n = j.at("n").get<int>();
  std::vector<Rational> e;
  for (const auto& row : j.at("entries"))
    for (const auto& v : row) e.push_back(Rational::parse(v.get<std::string>()));
  return CouplingMatrix(n, std::move(e));
}

std::string coupling_to_csv(const CouplingMatrix& m) {
  std::ostringstream os;
  for (int i = 0; i < m.rank(); ++i) {
    for (int j = 0; j < m.rank(); ++j) {
      if (j) os << ",";
      os << m.at(i, j).str();
    }
    os << "\n";
  }
  return os.str();
}

CouplingMatrix coupling_from_csv(const std::string& text) {
  std::vector<Rational> e;
  int rows = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) e.push_back(Rational::parse(cell));
  }
  return CouplingMatrix(rows, std::move(e));
}

json to_json(const ContractionMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int j2 = 0; j2 < m.n; ++j2)
      row.push_back(json::array({m.at(i, j2).real(), m.at(i, j2).imag()}));
    rows.push_back(row);
  }
  return json{{"n", m.n}, {"entries", rows}};
}

ContractionMatrix contraction_from_json(const json& j) {
  ContractionMatrix m;
  m.n = j.at("n").get<int>();
  for (const auto& row : j.at("entries"))
    for (const auto& v : row) {
      if (v.is_array())
        m.e.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
      else
        m.e.emplace_back(v.get<double>(), 0.0);
    }
  if (static_cast<int>(m.e.size()) != m.n * m.n)
    throw DomainError("bad_contraction", "entry count differs from rank^2");
  return m;
}

}  // namespace oligoscope
