#include "oligoscope/stability.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>
#include <sstream>

namespace oligoscope {

namespace {

// ---------------------------------------------------------------------------
// Evaluation against a joint type (no structure materialization)

class JointTypeEnv : public AtomEnv {
 public:
  JointTypeEnv(const TypeSpec& t, int arity_x) : t_(t), m_(arity_x) {}

  int point(int group, int index) const override {
    int pos = group == 0 ? index : m_ + index;
    return t_.pattern[static_cast<size_t>(pos)];
  }
  bool edge_between(int p, int q) const override {
    auto e = std::minmax(p, q);
    return std::binary_search(t_.edges.begin(), t_.edges.end(),
                              std::make_pair(e.first, e.second));
  }
  bool less_than(int p, int q) const override {
    return t_.ranks[static_cast<size_t>(p)] < t_.ranks[static_cast<size_t>(q)];
  }
  unsigned mask_of_var(int group, int index) const override {
    int block = point(group, index);
    unsigned mask = 0;
    for (size_t j = 0; j < t_.support.size(); ++j)
      if ((t_.support[j] >> block) & 1u) mask |= (1u << j);
    return mask;
  }
  unsigned full_mask() const override {
    return t_.support.size() >= 32 ? ~0u : ((1u << t_.support.size()) - 1u);
  }
  Rational dist_between(int p, int q) const override {
    if (p == q) return Rational(0);
    return Rational(t_.grid[static_cast<size_t>(p)][static_cast<size_t>(q)],
                    t_.kind.denominator);
  }

 private:
  const TypeSpec& t_;
  int m_;
};

// ---------------------------------------------------------------------------
// Stable invariant keys

std::string pattern_key(const TypeSpec& joint) {
  std::ostringstream os;
  for (int b : joint.pattern) os << b << ",";
  return os.str();
}

// Minimal blocks of the atomized tuples, straight from the joint support:
// x-cells are signatures over x positions, y-cells over y positions, and two
// cells meet exactly when some joint cell projects onto both.  The key packs
// each connected component as (x-cell bitmask, y-cell bitmask).
std::string boolean_block_key(const TypeSpec& joint, int m, int n) {
  int xs_space = 1 << m, ys_space = 1 << n;
  int slots = xs_space + ys_space;
  int parent[64];
  bool present[64] = {false};
  for (int i = 0; i < slots; ++i) parent[i] = i;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  for (unsigned cell : joint.support) {
    unsigned xsig = 0, ysig = 0;
    for (int i = 0; i < m; ++i)
      if ((cell >> joint.pattern[static_cast<size_t>(i)]) & 1u) xsig |= (1u << i);
    for (int j = 0; j < n; ++j)
      if ((cell >> joint.pattern[static_cast<size_t>(m + j)]) & 1u) ysig |= (1u << j);
    int a = static_cast<int>(xsig);
    int b = xs_space + static_cast<int>(ysig);
    present[a] = present[b] = true;
    parent[find(a)] = find(b);
  }
  unsigned xmask[64] = {0}, ymask[64] = {0};
  for (int s = 0; s < slots; ++s) {
    if (!present[s]) continue;
    int root = find(s);
    if (s < xs_space)
      xmask[root] |= (1u << s);
    else
      ymask[root] |= (1u << (s - xs_space));
  }
  unsigned long long packed[64];
  int count = 0;
  for (int s = 0; s < slots; ++s)
    if (present[s] && find(s) == s)
      packed[count++] = (static_cast<unsigned long long>(xmask[s]) << 32) | ymask[s];
  std::sort(packed, packed + count);
  return std::string(reinterpret_cast<const char*>(packed),
                     static_cast<size_t>(count) * sizeof(unsigned long long));
}

std::string invariant_key(const TypeSpec& joint, ClassKind kind, int m, int n) {
  if (kind.tag == ClassKind::Tag::AtomlessBoolean) return boolean_block_key(joint, m, n);
  return pattern_key(joint);
}

bool in_stable_sublanguage(const FNode& node, ClassKind kind) {
  using Op = FNode::Op;
  switch (node.op) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Not:
    case Op::And:
    case Op::Or: {
      for (const auto& k : node.kids)
        if (!in_stable_sublanguage(k, kind)) return false;
      return true;
    }
    case Op::Eq:
      return true;
    case Op::TermEq:
      return kind.tag == ClassKind::Tag::AtomlessBoolean;
    case Op::Edge:
    case Op::Less:
    case Op::DistCmp:
      return false;
  }
  return false;
}

FNode conj_all(std::vector<FNode> parts) {
  if (parts.empty()) return FNode::truth(true);
  FNode acc = std::move(parts.front());
  for (size_t i = 1; i < parts.size(); ++i) acc = FNode::conj(std::move(acc), std::move(parts[i]));
  return acc;
}

FNode disj_all(std::vector<FNode> parts) {
  if (parts.empty()) return FNode::truth(false);
  FNode acc = std::move(parts.front());
  for (size_t i = 1; i < parts.size(); ++i) acc = FNode::disj(std::move(acc), std::move(parts[i]));
  return acc;
}

// Characteristic formula of a cross equality pattern: which x_i = y_j hold.
FNode pattern_characteristic(const TypeSpec& joint, int m, int n) {
  std::vector<FNode> parts;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      FNode atom = FNode::eq(0, i, 1, j);
      bool holds = joint.pattern[static_cast<size_t>(i)] ==
                   joint.pattern[static_cast<size_t>(m + j)];
      parts.push_back(holds ? atom : FNode::negation(std::move(atom)));
    }
  return conj_all(std::move(parts));
}

// Term for the union of the given x-cells (signatures over x positions).
BoolTerm cells_term(const std::vector<unsigned>& sigs, int group, int arity) {
  std::vector<BoolTerm> cells;
  for (unsigned sig : sigs) {
    BoolTerm cell;
    bool first = true;
    for (int i = 0; i < arity; ++i) {
      BoolTerm lit = BoolTerm::var(group, i);
      if (!((sig >> i) & 1u)) lit = BoolTerm::complement(std::move(lit));
      cell = first ? std::move(lit) : BoolTerm::meet(std::move(cell), std::move(lit));
      first = false;
    }
    if (first) cell = BoolTerm::one();  // arity 0
    cells.push_back(std::move(cell));
  }
  if (cells.empty()) return BoolTerm::zero();
  BoolTerm acc = std::move(cells.front());
  for (size_t i = 1; i < cells.size(); ++i) acc = BoolTerm::join(std::move(acc), std::move(cells[i]));
  return acc;
}

// Characteristic formula of a boolean block class: the pattern of satisfied
// equalities "union of x-cells = union of y-cells" over all cell subsets.
FNode boolean_characteristic(const TypeSpec& joint, const TypeSpec& p, const TypeSpec& q) {
  int m = p.arity, n = q.arity;
  // which joint cells sit under which x-cell / y-cell signature
  auto x_cells_of = [&](unsigned cell) {
    unsigned sig = 0;
    for (int i = 0; i < m; ++i)
      if ((cell >> joint.pattern[static_cast<size_t>(i)]) & 1u) sig |= (1u << i);
    return sig;
  };
  auto y_cells_of = [&](unsigned cell) {
    unsigned sig = 0;
    for (int j = 0; j < n; ++j)
      if ((cell >> joint.pattern[static_cast<size_t>(m + j)]) & 1u) sig |= (1u << j);
    return sig;
  };
  const std::vector<unsigned>& px = p.support;
  const std::vector<unsigned>& qy = q.support;
  if (px.size() > 12 || qy.size() > 12)
    throw DomainError("cap_exceeded", "boolean reduct would be too large");
  std::vector<FNode> parts;
  for (unsigned I = 1; I < (1u << px.size()); ++I)
    for (unsigned J = 1; J < (1u << qy.size()); ++J) {
      // does the union of x-cells in I coincide with the union of y-cells in J?
      bool equal = true;
      for (unsigned cell : joint.support) {
        bool in_I = false, in_J = false;
        unsigned xs = x_cells_of(cell), ys = y_cells_of(cell);
        for (size_t a = 0; a < px.size(); ++a)
          if ((I >> a) & 1u) in_I |= (px[a] == xs);
        for (size_t b = 0; b < qy.size(); ++b)
          if ((J >> b) & 1u) in_J |= (qy[b] == ys);
        if (in_I != in_J) {
          equal = false;
          break;
        }
      }
      std::vector<unsigned> xsel, ysel;
      for (size_t a = 0; a < px.size(); ++a)
        if ((I >> a) & 1u) xsel.push_back(px[a]);
      for (size_t b = 0; b < qy.size(); ++b)
        if ((J >> b) & 1u) ysel.push_back(qy[b]);
      FNode atom = FNode::term_eq(cells_term(xsel, 0, m), cells_term(ysel, 1, n));
      parts.push_back(equal ? std::move(atom) : FNode::negation(std::move(atom)));
    }
  return conj_all(std::move(parts));
}

}  // namespace

// ---------------------------------------------------------------------------
// Witness verification

void verify_witness(const Formula& phi, const OrderWitness& w, const TypeSpec* p,
                    const TypeSpec* q) {
  int L = w.length();
  if (L < 2) throw DomainError("bad_witness", "witness shorter than 2");
  if (static_cast<int>(w.b_tuples.size()) != L)
    throw DomainError("bad_witness", "tuple families of different lengths");
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      Configuration c{w.structure, w.a_tuples[static_cast<size_t>(i)],
                      w.b_tuples[static_cast<size_t>(j)]};
      bool want = w.flipped ? (i > j) : (i < j);
      if (evaluate(phi, c) != want)
        throw DomainError("bad_witness", "half-graph pattern fails at (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
    }
  if (p)
    for (const auto& t : w.a_tuples)
      if (!(type_of_tuple(w.structure, t) == *p))
        throw DomainError("bad_witness", "an x-tuple does not realize its type");
  if (q)
    for (const auto& t : w.b_tuples)
      if (!(type_of_tuple(w.structure, t) == *q))
        throw DomainError("bad_witness", "a y-tuple does not realize its type");
}

// ---------------------------------------------------------------------------
// Witness search

namespace {

struct BudgetExceeded {};

// Backtracking state for the point-based kinds.
class PointSearch : public AtomEnv {
 public:
  PointSearch(const Formula& phi, const TypeSpec& p, const TypeSpec& q, int length,
              const Limits& limits)
      : phi_(phi), p_(p), q_(q), length_(length), limits_(limits), kind_(p.kind) {}

  std::optional<OrderWitness> run(bool flipped, long long& nodes) {
    flipped_ = flipped;
    nodes_ = &nodes;
    a_tuples_.clear();
    b_tuples_.clear();
    points_ = 0;
    adj_.clear();
    rank_of_.clear();
    du_.clear();
    found_.reset();
    place_round(0);
    return found_;
  }

 private:
  // tuple placement alternates a^1, b^1, a^2, b^2, ...
  void place_round(int step) {
    if (found_) return;
    if (step == 2 * length_) {
      OrderWitness w;
      w.kind = kind_;
      w.structure = materialize();
      w.a_tuples = a_tuples_;
      w.b_tuples = b_tuples_;
      w.flipped = flipped_;
      verify_witness(phi_, w, &p_, &q_);
      found_ = std::move(w);
      return;
    }
    bool is_a = (step % 2 == 0);
    const TypeSpec& spec = is_a ? p_ : q_;
    std::vector<int> assigned;
    place_position(spec, is_a, assigned, 0, step);
  }

  void place_position(const TypeSpec& spec, bool is_a, std::vector<int>& assigned, int i,
                      int step) {
    if (found_) return;
    if (i == spec.arity) {
      auto& family = is_a ? a_tuples_ : b_tuples_;
      family.push_back(assigned);
      if (checks_pass(is_a)) place_round(step + 1);
      family.pop_back();
      return;
    }
    if (++(*nodes_) > limits_.search_budget) throw BudgetExceeded{};

    int block = spec.pattern[static_cast<size_t>(i)];
    // a repeated block is forced to the earlier point
    for (int j = 0; j < i; ++j)
      if (spec.pattern[static_cast<size_t>(j)] == block) {
        assigned.push_back(assigned[static_cast<size_t>(j)]);
        place_position(spec, is_a, assigned, i + 1, step);
        assigned.pop_back();
        return;
      }

    // reuse an existing point
    for (int e = 0; e < points_; ++e) {
      if (!reuse_ok(spec, assigned, i, e)) continue;
      assigned.push_back(e);
      place_position(spec, is_a, assigned, i + 1, step);
      assigned.pop_back();
    }
    // or create a fresh one, enumerating its relations to old points
    fresh_point(spec, is_a, assigned, i, step);
  }

  bool reuse_ok(const TypeSpec& spec, const std::vector<int>& assigned, int i, int e) {
    for (int j = 0; j < i; ++j) {
      int pj = assigned[static_cast<size_t>(j)];
      if (pj == e) return false;  // distinct blocks need distinct points
      int bi = spec.pattern[static_cast<size_t>(i)];
      int bj = spec.pattern[static_cast<size_t>(j)];
      switch (kind_.tag) {
        case ClassKind::Tag::PureSet:
          break;
        case ClassKind::Tag::RandomGraph: {
          bool want = std::binary_search(spec.edges.begin(), spec.edges.end(),
                                         std::pair<int, int>(std::min(bi, bj), std::max(bi, bj)));
          if (adj_[static_cast<size_t>(e)][static_cast<size_t>(pj)] != want) return false;
          break;
        }
        case ClassKind::Tag::DenseLinearOrder: {
          bool want = spec.ranks[static_cast<size_t>(bi)] < spec.ranks[static_cast<size_t>(bj)];
          if ((rank_of_[static_cast<size_t>(e)] < rank_of_[static_cast<size_t>(pj)]) != want)
            return false;
          break;
        }
        case ClassKind::Tag::UrysohnRational: {
          int want = spec.grid[static_cast<size_t>(bi)][static_cast<size_t>(bj)];
          if (du_[static_cast<size_t>(e)][static_cast<size_t>(pj)] != want) return false;
          break;
        }
        case ClassKind::Tag::AtomlessBoolean:
          break;  // handled elsewhere
      }
    }
    return true;
  }

  void fresh_point(const TypeSpec& spec, bool is_a, std::vector<int>& assigned, int i, int step) {
    int bi = spec.pattern[static_cast<size_t>(i)];
    switch (kind_.tag) {
      case ClassKind::Tag::PureSet: {
        push_point_pure();
        assigned.push_back(points_ - 1);
        place_position(spec, is_a, assigned, i + 1, step);
        assigned.pop_back();
        pop_point_pure();
        break;
      }
      case ClassKind::Tag::RandomGraph: {
        // relations to current-tuple points are forced by the type
        std::vector<int> old_pts;
        for (int e = 0; e < points_; ++e)
          if (std::find(assigned.begin(), assigned.end(), e) == assigned.end())
            old_pts.push_back(e);
        if (old_pts.size() > 25) throw DomainError("cap_exceeded", "graph search frontier too wide");
        for (unsigned mask = 0; mask < (1u << old_pts.size()); ++mask) {
          std::vector<bool> row(static_cast<size_t>(points_) + 1, false);
          for (size_t t = 0; t < old_pts.size(); ++t)
            if ((mask >> t) & 1u) row[static_cast<size_t>(old_pts[t])] = true;
          for (int j = 0; j < i; ++j) {
            int bj = spec.pattern[static_cast<size_t>(j)];
            bool want = std::binary_search(spec.edges.begin(), spec.edges.end(),
                                           std::pair<int, int>(std::min(bi, bj), std::max(bi, bj)));
            row[static_cast<size_t>(assigned[static_cast<size_t>(j)])] = want;
          }
          push_point_graph(row);
          assigned.push_back(points_ - 1);
          place_position(spec, is_a, assigned, i + 1, step);
          assigned.pop_back();
          pop_point_graph();
        }
        break;
      }
      case ClassKind::Tag::DenseLinearOrder: {
        int lo = 0, hi = points_;
        for (int j = 0; j < i; ++j) {
          int bj = spec.pattern[static_cast<size_t>(j)];
          int pj_rank = rank_of_[static_cast<size_t>(assigned[static_cast<size_t>(j)])];
          bool below = spec.ranks[static_cast<size_t>(bi)] < spec.ranks[static_cast<size_t>(bj)];
          if (below) hi = std::min(hi, pj_rank);
          else lo = std::max(lo, pj_rank + 1);
        }
        for (int gap = lo; gap <= hi; ++gap) {
          push_point_order(gap);
          assigned.push_back(points_ - 1);
          place_position(spec, is_a, assigned, i + 1, step);
          assigned.pop_back();
          pop_point_order();
        }
        break;
      }
      case ClassKind::Tag::UrysohnRational: {
        std::vector<int> d(static_cast<size_t>(points_), 0);
        std::vector<bool> forced(static_cast<size_t>(points_), false);
        for (int j = 0; j < i; ++j) {
          int bj = spec.pattern[static_cast<size_t>(j)];
          d[static_cast<size_t>(assigned[static_cast<size_t>(j)])] =
              spec.grid[static_cast<size_t>(bi)][static_cast<size_t>(bj)];
          forced[static_cast<size_t>(assigned[static_cast<size_t>(j)])] = true;
        }
        enumerate_distances(spec, is_a, assigned, i, step, d, forced, 0);
        break;
      }
      case ClassKind::Tag::AtomlessBoolean:
        break;  // boolean search lives elsewhere
    }
  }

  void enumerate_distances(const TypeSpec& spec, bool is_a, std::vector<int>& assigned, int i,
                           int step, std::vector<int>& d, const std::vector<bool>& forced, int e) {
    if (found_) return;
    if (e == points_) {
      push_point_metric(d);
      assigned.push_back(points_ - 1);
      place_position(spec, is_a, assigned, i + 1, step);
      assigned.pop_back();
      pop_point_metric();
      return;
    }
    auto triangle_ok = [&](int upto) {
      for (int f = 0; f < upto; ++f) {
        int ab = du_[static_cast<size_t>(e)][static_cast<size_t>(f)];
        int ae = d[static_cast<size_t>(e)], af = d[static_cast<size_t>(f)];
        if (ab > ae + af || ae > ab + af || af > ab + ae) return false;
      }
      return true;
    };
    if (forced[static_cast<size_t>(e)]) {
      if (triangle_ok(e)) enumerate_distances(spec, is_a, assigned, i, step, d, forced, e + 1);
      return;
    }
    for (int u = 1; u <= kind_.denominator; ++u) {
      d[static_cast<size_t>(e)] = u;
      if (triangle_ok(e)) enumerate_distances(spec, is_a, assigned, i, step, d, forced, e + 1);
    }
    d[static_cast<size_t>(e)] = 0;
  }

  // point bookkeeping ------------------------------------------------------
  void push_point_pure() { ++points_; }
  void pop_point_pure() { --points_; }

  void push_point_graph(const std::vector<bool>& row) {
    for (int e = 0; e < points_; ++e) adj_[static_cast<size_t>(e)].push_back(row[static_cast<size_t>(e)]);
    std::vector<bool> full_row(row.begin(), row.begin() + points_);
    full_row.push_back(false);
    adj_.push_back(std::move(full_row));
    ++points_;
  }
  void pop_point_graph() {
    adj_.pop_back();
    --points_;
    for (int e = 0; e < points_; ++e) adj_[static_cast<size_t>(e)].pop_back();
  }

  void push_point_order(int gap) {
    for (int e = 0; e < points_; ++e)
      if (rank_of_[static_cast<size_t>(e)] >= gap) ++rank_of_[static_cast<size_t>(e)];
    rank_of_.push_back(gap);
    ++points_;
  }
  void pop_point_order() {
    int gap = rank_of_.back();
    rank_of_.pop_back();
    --points_;
    for (int e = 0; e < points_; ++e)
      if (rank_of_[static_cast<size_t>(e)] > gap) --rank_of_[static_cast<size_t>(e)];
  }

  void push_point_metric(const std::vector<int>& d) {
    for (int e = 0; e < points_; ++e) du_[static_cast<size_t>(e)].push_back(d[static_cast<size_t>(e)]);
    std::vector<int> row(d.begin(), d.begin() + points_);
    row.push_back(0);
    du_.push_back(std::move(row));
    ++points_;
  }
  void pop_point_metric() {
    du_.pop_back();
    --points_;
    for (int e = 0; e < points_; ++e) du_[static_cast<size_t>(e)].pop_back();
  }

  // phi checks on every pair completed by the newest tuple
  bool checks_pass(bool newest_is_a) {
    int na = static_cast<int>(a_tuples_.size());
    int nb = static_cast<int>(b_tuples_.size());
    if (newest_is_a) {
      int i = na - 1;
      for (int j = 0; j < nb; ++j)
        if (!check_pair(i, j)) return false;
    } else {
      int j = nb - 1;
      for (int i = 0; i < na; ++i)
        if (!check_pair(i, j)) return false;
    }
    return true;
  }

  bool check_pair(int i, int j) {
    eval_a_ = i;
    eval_b_ = j;
    bool want = flipped_ ? (i > j) : (i < j);
    return evaluate_node(phi_.root, *this) == want;
  }

  // AtomEnv over the search state
  int point(int group, int index) const override {
    const auto& t = group == 0 ? a_tuples_[static_cast<size_t>(eval_a_)]
                               : b_tuples_[static_cast<size_t>(eval_b_)];
    return t[static_cast<size_t>(index)];
  }
  bool edge_between(int p, int q) const override {
    return adj_[static_cast<size_t>(p)][static_cast<size_t>(q)];
  }
  bool less_than(int p, int q) const override {
    return rank_of_[static_cast<size_t>(p)] < rank_of_[static_cast<size_t>(q)];
  }
  unsigned mask_of_var(int, int) const override {
    throw DomainError("internal", "boolean atom in point search");
  }
  unsigned full_mask() const override {
    throw DomainError("internal", "boolean atom in point search");
  }
  Rational dist_between(int p, int q) const override {
    if (p == q) return Rational(0);
    return Rational(du_[static_cast<size_t>(p)][static_cast<size_t>(q)], kind_.denominator);
  }

  FiniteStructure materialize() const {
    switch (kind_.tag) {
      case ClassKind::Tag::PureSet:
        return FiniteStructure::pure_set(points_);
      case ClassKind::Tag::RandomGraph: {
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < points_; ++a)
          for (int b = a + 1; b < points_; ++b)
            if (adj_[static_cast<size_t>(a)][static_cast<size_t>(b)]) edges.emplace_back(a, b);
        return FiniteStructure::graph(points_, edges);
      }
      case ClassKind::Tag::DenseLinearOrder:
        return FiniteStructure::linear_order(rank_of_);
      case ClassKind::Tag::UrysohnRational: {
        std::vector<std::vector<Rational>> d(
            static_cast<size_t>(points_),
            std::vector<Rational>(static_cast<size_t>(points_), Rational(0)));
        for (int a = 0; a < points_; ++a)
          for (int b = 0; b < points_; ++b)
            if (a != b)
              d[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                  Rational(du_[static_cast<size_t>(a)][static_cast<size_t>(b)], kind_.denominator);
        return FiniteStructure::metric_space(kind_.denominator, d);
      }
      case ClassKind::Tag::AtomlessBoolean:
        break;
    }
    throw DomainError("internal", "unexpected kind in point search");
  }

  const Formula& phi_;
  const TypeSpec& p_;
  const TypeSpec& q_;
  int length_;
  const Limits& limits_;
  ClassKind kind_;
  bool flipped_ = false;
  long long* nodes_ = nullptr;

  int points_ = 0;
  std::vector<std::vector<bool>> adj_;
  std::vector<int> rank_of_;
  std::vector<std::vector<int>> du_;
  std::vector<std::vector<int>> a_tuples_, b_tuples_;
  int eval_a_ = 0, eval_b_ = 0;
  std::optional<OrderWitness> found_;
};

// Search over atom refinements for the boolean kind.  Tuples are placed as
// partitions of 1 (the types are atomized first); each placement chooses, for
// every current ambient atom, the nonempty set of new parts meeting it.
class BooleanSearch : public AtomEnv {
 public:
  BooleanSearch(const Formula& phi_orig, const TypeSpec& p_orig, const TypeSpec& q_orig,
                int length, const Limits& limits)
      : length_(length), limits_(limits) {
    mx_ = static_cast<int>(p_orig.support.size());
    nx_ = static_cast<int>(q_orig.support.size());
    phi_ = rewrite(phi_orig, p_orig, q_orig);
    p_sup_ = p_orig.support;
    q_sup_ = q_orig.support;
    p_pattern_ = p_orig.pattern;
    q_pattern_ = q_orig.pattern;
  }

  std::optional<OrderWitness> run(bool flipped, long long& nodes) {
    flipped_ = flipped;
    nodes_ = &nodes;
    truncated_ = false;
    // iterative deepening over the total atom budget: small witnesses first,
    // and the heavy refinement tails are never entered unless needed
    int floor_atoms = std::max(mx_, nx_);
    for (int budget = floor_atoms; budget <= atom_ceiling(); ++budget) {
      atom_budget_ = budget;
      atoms_ = 0;
      a_tuples_.clear();
      b_tuples_.clear();
      memo_.clear();
      found_.reset();
      round_pruned_ = false;
      place_round(0);
      if (found_) return found_;
      if (!round_pruned_) return std::nullopt;  // exhausted without hitting the cap
    }
    truncated_ = true;  // bounded refinement: absence is not a proof
    return std::nullopt;
  }

  bool truncated() const { return truncated_; }

 private:
  int atom_ceiling() const { return std::min(31, mx_ + nx_ + length_ + 1); }

 public:

 private:
  // original variables become joins of their cells
  Formula rewrite(const Formula& orig, const TypeSpec& p, const TypeSpec& q) {
    Formula f;
    f.kind = orig.kind;
    f.arity_x = mx_;
    f.arity_y = nx_;
    f.root = rewrite_node(orig.root, p, q);
    return f;
  }

  BoolTerm var_as_cells(int group, int index, const TypeSpec& p, const TypeSpec& q) {
    const auto& sup = group == 0 ? p.support : q.support;
    const auto& pattern = group == 0 ? p.pattern : q.pattern;
    int block = pattern[static_cast<size_t>(index)];
    BoolTerm acc = BoolTerm::zero();
    bool first = true;
    for (size_t c = 0; c < sup.size(); ++c)
      if ((sup[c] >> block) & 1u) {
        BoolTerm cell = BoolTerm::var(group, static_cast<int>(c));
        acc = first ? std::move(cell) : BoolTerm::join(std::move(acc), std::move(cell));
        first = false;
      }
    return acc;
  }

  BoolTerm rewrite_term(const BoolTerm& t, const TypeSpec& p, const TypeSpec& q) {
    if (t.op == BoolTerm::Op::Var) return var_as_cells(t.group, t.index, p, q);
    BoolTerm r = t;
    for (auto& k : r.kids) k = rewrite_term(k, p, q);
    return r;
  }

  FNode rewrite_node(const FNode& n, const TypeSpec& p, const TypeSpec& q) {
    FNode r = n;
    for (auto& k : r.kids) k = rewrite_node(k, p, q);
    if (n.op == FNode::Op::TermEq) {
      r.t1 = rewrite_term(n.t1, p, q);
      r.t2 = rewrite_term(n.t2, p, q);
    } else if (n.op == FNode::Op::Eq) {
      r.op = FNode::Op::TermEq;
      r.t1 = var_as_cells(n.g1, n.i1, p, q);
      r.t2 = var_as_cells(n.g2, n.i2, p, q);
    }
    return r;
  }

  void place_round(int step) {
    if (found_) return;
    if (step == 2 * length_) {
      OrderWitness w = materialize();
      // reconstructed witness carries the original tuples; verified by caller
      found_ = std::move(w);
      return;
    }
    if (!memo_.emplace(state_key(step)).second) return;  // already explored and failed
    bool is_a = (step % 2 == 0);
    int parts = is_a ? mx_ : nx_;
    if (atoms_ == 0) {
      // first tuple: one fresh atom per part
      std::vector<unsigned> masks;
      for (int j = 0; j < parts; ++j) masks.push_back(1u << j);
      apply_refinement(is_a, std::vector<unsigned>{}, masks, parts, step);
      return;
    }
    // choose, per current atom, the nonempty set of new parts meeting it;
    // fewest splits first so small witnesses are found early
    std::vector<int> order;
    for (int s = 1; s < (1 << parts); ++s) order.push_back(s);
    std::stable_sort(order.begin(), order.end(), [](int a, int b) {
      return __builtin_popcount(static_cast<unsigned>(a)) <
             __builtin_popcount(static_cast<unsigned>(b));
    });
    std::vector<int> choice(static_cast<size_t>(atoms_), 0);
    choose_atom(is_a, parts, order, choice, 0, 0, step);
  }

  std::string state_key(int step) const {
    // atoms are canonically sorted by signature, so the tuple masks are the state
    std::ostringstream os;
    os << step << ":" << atoms_ << ":";
    for (const auto& t : a_tuples_)
      for (unsigned m : t) os << m << ",";
    os << ";";
    for (const auto& t : b_tuples_)
      for (unsigned m : t) os << m << ",";
    return os.str();
  }

  void choose_atom(bool is_a, int parts, const std::vector<int>& order, std::vector<int>& choice,
                   int atom, int acc, int step) {
    if (found_) return;
    if (acc + (atoms_ - atom) > atom_budget_) {
      round_pruned_ = true;
      return;
    }
    if (atom == atoms_) {
      unsigned covered = 0;
      for (int c : choice) covered |= static_cast<unsigned>(c);
      if (covered != (1u << parts) - 1u) return;  // some part would be zero
      commit_refinement(is_a, parts, choice, step);
      return;
    }
    if (++(*nodes_) > limits_.search_budget) throw BudgetExceeded{};
    for (int s : order) {
      choice[static_cast<size_t>(atom)] = s;
      choose_atom(is_a, parts, order, choice, atom + 1,
                  acc + __builtin_popcount(static_cast<unsigned>(s)), step);
    }
  }

  void commit_refinement(bool is_a, int parts, const std::vector<int>& choice, int step) {
    // split atom a into one new atom per part in choice[a]
    int new_atoms = 0;
    for (int c : choice) new_atoms += __builtin_popcount(static_cast<unsigned>(c));
    if (new_atoms > atom_budget_) {
      round_pruned_ = true;
      return;  // covered by a later deepening round
    }
    std::vector<unsigned> expansion(static_cast<size_t>(atoms_), 0);  // old atom -> new bits
    std::vector<unsigned> part_mask(static_cast<size_t>(parts), 0);
    int next = 0;
    for (int a = 0; a < atoms_; ++a)
      for (int j = 0; j < parts; ++j)
        if ((choice[static_cast<size_t>(a)] >> j) & 1) {
          expansion[static_cast<size_t>(a)] |= (1u << next);
          part_mask[static_cast<size_t>(j)] |= (1u << next);
          ++next;
        }
    apply_refinement(is_a, expansion, part_mask, new_atoms, step);
  }

  void apply_refinement(bool is_a, const std::vector<unsigned>& expansion,
                        const std::vector<unsigned>& new_tuple, int new_atom_count, int step) {
    // snapshot
    auto save_a = a_tuples_;
    auto save_b = b_tuples_;
    int save_atoms = atoms_;

    if (!expansion.empty()) {
      auto expand = [&](unsigned mask) {
        unsigned out = 0;
        for (int a = 0; a < save_atoms; ++a)
          if ((mask >> a) & 1u) out |= expansion[static_cast<size_t>(a)];
        return out;
      };
      for (auto& t : a_tuples_)
        for (auto& m : t) m = expand(m);
      for (auto& t : b_tuples_)
        for (auto& m : t) m = expand(m);
    }
    atoms_ = new_atom_count;
    auto& family = is_a ? a_tuples_ : b_tuples_;
    family.push_back(new_tuple);
    merge_equivalent_atoms();

    if (checks_pass(is_a)) place_round(step + 1);

    a_tuples_ = std::move(save_a);
    b_tuples_ = std::move(save_b);
    atoms_ = save_atoms;
  }

  // In the atomless model only the set of nonzero membership signatures
  // matters; merging duplicate atoms and sorting makes states canonical and
  // keeps the refinement tree small.
  void merge_equivalent_atoms() {
    std::vector<unsigned long long> sig(static_cast<size_t>(atoms_), 0);
    int bit = 0;
    auto account = [&](const std::vector<std::vector<unsigned>>& family) {
      for (const auto& t : family)
        for (unsigned m : t) {
          for (int a = 0; a < atoms_; ++a)
            if ((m >> a) & 1u) sig[static_cast<size_t>(a)] |= (1ull << bit);
          ++bit;
        }
    };
    account(a_tuples_);
    account(b_tuples_);
    std::vector<unsigned long long> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) == atoms_) {
      bool sorted = std::is_sorted(sig.begin(), sig.end());
      if (sorted) return;
    }
    std::vector<int> new_index(static_cast<size_t>(atoms_), 0);
    for (int a = 0; a < atoms_; ++a)
      new_index[static_cast<size_t>(a)] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), sig[static_cast<size_t>(a)]) -
          distinct.begin());
    auto remap = [&](unsigned m) {
      unsigned out = 0;
      for (int a = 0; a < atoms_; ++a)
        if ((m >> a) & 1u) out |= (1u << new_index[static_cast<size_t>(a)]);
      return out;
    };
    for (auto& t : a_tuples_)
      for (auto& m : t) m = remap(m);
    for (auto& t : b_tuples_)
      for (auto& m : t) m = remap(m);
    atoms_ = static_cast<int>(distinct.size());
  }

  bool checks_pass(bool newest_is_a) {
    int na = static_cast<int>(a_tuples_.size());
    int nb = static_cast<int>(b_tuples_.size());
    if (newest_is_a) {
      for (int j = 0; j < nb; ++j)
        if (!check_pair(na - 1, j)) return false;
    } else {
      for (int i = 0; i < na; ++i)
        if (!check_pair(i, nb - 1)) return false;
    }
    return true;
  }

  bool check_pair(int i, int j) {
    eval_a_ = i;
    eval_b_ = j;
    bool want = flipped_ ? (i > j) : (i < j);
    return evaluate_node(phi_.root, *this) == want;
  }

  int point(int, int) const override {
    throw DomainError("internal", "point atom in boolean search");
  }
  bool edge_between(int, int) const override {
    throw DomainError("internal", "edge atom in boolean search");
  }
  bool less_than(int, int) const override {
    throw DomainError("internal", "order atom in boolean search");
  }
  unsigned mask_of_var(int group, int index) const override {
    const auto& t = group == 0 ? a_tuples_[static_cast<size_t>(eval_a_)]
                               : b_tuples_[static_cast<size_t>(eval_b_)];
    return t[static_cast<size_t>(index)];
  }
  unsigned full_mask() const override {
    return atoms_ >= 32 ? ~0u : ((1u << atoms_) - 1u);
  }
  Rational dist_between(int, int) const override {
    throw DomainError("internal", "distance atom in boolean search");
  }

  OrderWitness materialize() const {
    // original tuple entry = join of the cells whose signature contains its block
    auto original = [&](const std::vector<unsigned>& cells, const std::vector<unsigned>& sup,
                        const std::vector<int>& pattern) {
      std::vector<unsigned> out;
      for (int block : pattern) {
        unsigned m = 0;
        for (size_t c = 0; c < sup.size(); ++c)
          if ((sup[c] >> block) & 1u) m |= cells[c];
        out.push_back(m);
      }
      return out;
    };
    std::set<unsigned> gens = {0u, (atoms_ >= 32 ? ~0u : (1u << atoms_) - 1u)};
    std::vector<std::vector<unsigned>> a_orig, b_orig;
    for (const auto& t : a_tuples_) {
      a_orig.push_back(original(t, p_sup_, p_pattern_));
      for (unsigned m : a_orig.back()) gens.insert(m);
    }
    for (const auto& t : b_tuples_) {
      b_orig.push_back(original(t, q_sup_, q_pattern_));
      for (unsigned m : b_orig.back()) gens.insert(m);
    }
    unsigned full = atoms_ >= 32 ? ~0u : ((1u << atoms_) - 1u);
    std::set<unsigned> closure = gens;
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<unsigned> cur(closure.begin(), closure.end());
      if (cur.size() > (1u << 16)) throw DomainError("cap_exceeded", "witness algebra too large");
      for (unsigned x : cur)
        for (unsigned y : cur) {
          if (closure.insert(x & y).second) grew = true;
          if (closure.insert(x | y).second) grew = true;
        }
      for (unsigned x : cur)
        if (closure.insert(full & ~x).second) grew = true;
    }
    FiniteStructure s;
    s.kind = ClassKind::atomless_boolean();
    s.atom_count = atoms_;
    s.elements.assign(closure.begin(), closure.end());
    s.size = static_cast<int>(s.elements.size());
    s.validate();
    OrderWitness w;
    w.kind = s.kind;
    w.flipped = flipped_;
    for (const auto& t : a_orig) {
      std::vector<int> idx;
      for (unsigned m : t) idx.push_back(s.boolean_index_of(m));
      w.a_tuples.push_back(idx);
    }
    for (const auto& t : b_orig) {
      std::vector<int> idx;
      for (unsigned m : t) idx.push_back(s.boolean_index_of(m));
      w.b_tuples.push_back(idx);
    }
    w.structure = std::move(s);
    return w;
  }

  Formula phi_;
  int mx_, nx_;  // atomized arities
  std::vector<unsigned> p_sup_, q_sup_;
  std::vector<int> p_pattern_, q_pattern_;
  int length_;
  const Limits& limits_;
  bool flipped_ = false;
  long long* nodes_ = nullptr;
  bool truncated_ = false;
  int atom_budget_ = 31;
  bool round_pruned_ = false;
  std::unordered_set<std::string> memo_;

  int atoms_ = 0;
  std::vector<std::vector<unsigned>> a_tuples_, b_tuples_;  // cell masks
  int eval_a_ = 0, eval_b_ = 0;
  std::optional<OrderWitness> found_;
};

}  // namespace

WitnessSearchResult find_order_witness(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                                       int length, const Limits& limits) {
  if (phi.kind != p.kind || phi.kind != q.kind)
    throw DomainError("kind_mismatch", "formula and type kinds differ");
  if (phi.arity_x != p.arity || phi.arity_y != q.arity)
    throw DomainError("arity", "formula arities differ from the given types");
  if (length < 2) throw DomainError("bad_length", "witness length must be at least 2");
  phi.validate();

  WitnessSearchResult result;
  if (phi.kind.tag == ClassKind::Tag::AtomlessBoolean) {
    BooleanSearch search(phi, p, q, length, limits);
    try {
      for (bool flipped : {false, true}) {
        auto w = search.run(flipped, result.nodes);
        if (w) {
          verify_witness(phi, *w, &p, &q);
          result.witness = std::move(w);
          return result;
        }
        result.budget_exhausted |= search.truncated();
      }
    } catch (const BudgetExceeded&) {
      result.budget_exhausted = true;
    }
    return result;
  }

  PointSearch search(phi, p, q, length, limits);
  try {
    for (bool flipped : {false, true}) {
      auto w = search.run(flipped, result.nodes);
      if (w) {
        result.witness = std::move(w);
        return result;
      }
    }
  } catch (const BudgetExceeded&) {
    result.budget_exhausted = true;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Classifier

StabilityVerdict classify_stability(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                                    const Limits& limits, const Formula* restrict_to) {
  if (phi.kind != p.kind || phi.kind != q.kind)
    throw DomainError("kind_mismatch", "formula and type kinds differ");
  if (phi.arity_x != p.arity || phi.arity_y != q.arity)
    throw DomainError("arity", "formula arities differ from the given types");
  phi.validate();
  if (restrict_to) restrict_to->validate();

  int m = p.arity, n = q.arity;
  struct Group {
    bool value = false;
    TypeSpec first;
  };
  std::map<std::string, Group> groups;
  std::vector<TypeSpec> ordered;  // enumeration order, for the reduct
  std::optional<std::pair<TypeSpec, TypeSpec>> discord;
  long long count = 0;

  detail::for_each_joint_type(p, q, limits, [&](const TypeSpec& joint) {
    if (discord) return;
    JointTypeEnv env(joint, m);
    if (restrict_to && !evaluate_node(restrict_to->root, env)) return;
    if (++count > limits.config_cap)
      throw DomainError("cap_exceeded", "configuration space exceeds cap");
    bool value = evaluate_node(phi.root, env);
    std::string key = invariant_key(joint, phi.kind, m, n);
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(key, Group{value, joint});
      ordered.push_back(joint);
    } else if (it->second.value != value) {
      discord = std::make_pair(it->second.first, joint);
    }
  });
  if (count == 0)
    throw DomainError("empty_configuration_space",
                      "no configuration realizes the given types under the restriction");

  StabilityVerdict verdict;
  verdict.configurations = count;

  if (discord) {
    verdict.status = StabilityStatus::Unstable;
    verdict.counterexample = std::make_pair(
        detail::materialize_configuration(discord->first, m, n),
        detail::materialize_configuration(discord->second, m, n));
    WitnessSearchResult ws = find_order_witness(phi, p, q, limits.witness_length, limits);
    verdict.witness = std::move(ws.witness);
    verdict.witness_budget_exhausted = ws.budget_exhausted;
    return verdict;
  }

  verdict.status = StabilityStatus::Stable;
  Formula reduct;
  reduct.kind = phi.kind;
  reduct.arity_x = m;
  reduct.arity_y = n;
  if (in_stable_sublanguage(phi.root, phi.kind)) {
    reduct.root = phi.root;  // already its own reduct; nothing to re-verify
    verdict.reduct = std::move(reduct);
    return verdict;
  }
  {
    std::vector<FNode> parts;
    std::set<std::string> taken;
    for (const auto& joint : ordered) {
      std::string key = invariant_key(joint, phi.kind, m, n);
      if (!groups.at(key).value || taken.count(key)) continue;
      taken.insert(key);
      if (phi.kind.tag == ClassKind::Tag::AtomlessBoolean)
        parts.push_back(boolean_characteristic(joint, p, q));
      else
        parts.push_back(pattern_characteristic(joint, m, n));
    }
    reduct.root = disj_all(std::move(parts));
  }
  reduct.validate();
  // the reduct must agree with phi on the whole configuration space
  detail::for_each_joint_type(p, q, limits, [&](const TypeSpec& joint) {
    JointTypeEnv env(joint, m);
    if (restrict_to && !evaluate_node(restrict_to->root, env)) return;
    if (evaluate_node(reduct.root, env) != evaluate_node(phi.root, env))
      throw DomainError("internal", "reduct disagrees with the formula");
  });
  verdict.reduct = std::move(reduct);
  return verdict;
}

Formula stable_reduct(const Formula& phi, const TypeSpec& p, const TypeSpec& q,
                      const Limits& limits, const Formula* restrict_to) {
  StabilityVerdict v = classify_stability(phi, p, q, limits, restrict_to);
  if (v.status != StabilityStatus::Stable)
    throw DomainError("unstable", "formula is unstable on the given types");
  return *v.reduct;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> boolean_blocks(const Configuration& c) {
  if (c.structure.kind.tag != ClassKind::Tag::AtomlessBoolean)
    throw DomainError("kind_mismatch", "blocks are defined for the boolean kind");
  TypeSpec joint = type_of_tuple(c.structure, [&] {
    std::vector<int> all = c.xs;
    all.insert(all.end(), c.ys.begin(), c.ys.end());
    return all;
  }());
  int m = static_cast<int>(c.xs.size());
  int n = static_cast<int>(c.ys.size());

  // x-cells and y-cells in signature order; meets from the joint support
  std::vector<unsigned> xs, ys;
  std::vector<std::pair<unsigned, unsigned>> meets;
  for (unsigned cell : joint.support) {
    unsigned xsig = 0, ysig = 0;
    for (int i = 0; i < m; ++i)
      if ((cell >> joint.pattern[static_cast<size_t>(i)]) & 1u) xsig |= (1u << i);
    for (int j = 0; j < n; ++j)
      if ((cell >> joint.pattern[static_cast<size_t>(m + j)]) & 1u) ysig |= (1u << j);
    xs.push_back(xsig);
    ys.push_back(ysig);
    meets.emplace_back(xsig, ysig);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  size_t total = xs.size() + ys.size();
  std::vector<int> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[static_cast<size_t>(v)] != v) v = parent[static_cast<size_t>(v)];
    return v;
  };
  for (auto [xsig, ysig] : meets) {
    int a = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), xsig) - xs.begin());
    int b = static_cast<int>(xs.size()) +
            static_cast<int>(std::lower_bound(ys.begin(), ys.end(), ysig) - ys.begin());
    parent[static_cast<size_t>(find(a))] = find(b);
  }
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> comps;
  for (size_t i = 0; i < xs.size(); ++i)
    comps[find(static_cast<int>(i))].first.push_back(static_cast<int>(i));
  for (size_t i = 0; i < ys.size(); ++i)
    comps[find(static_cast<int>(xs.size() + i))].second.push_back(static_cast<int>(i));
  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  for (auto& [root, comp] : comps) out.push_back(comp);
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<int, int> double_limit_table(const Formula& phi, const OrderWitness& w) {
  verify_witness(phi, w);
  int L = w.length();
  Configuration low{w.structure, w.a_tuples[static_cast<size_t>(L - 1)], w.b_tuples[0]};
  Configuration high{w.structure, w.a_tuples[0], w.b_tuples[static_cast<size_t>(L - 1)]};
  return {evaluate(phi, low) ? 1 : 0, evaluate(phi, high) ? 1 : 0};
}

}  // namespace oligoscope
