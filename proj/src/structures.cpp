#include "oligoscope/structures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace oligoscope {

ClassKind ClassKind::urysohn_rational(int denominator) {
  if (denominator < 1)
    throw DomainError("bad_denominator", "grid denominator must be >= 1");
  return {Tag::UrysohnRational, denominator};
}

std::string ClassKind::name() const {
  switch (tag) {
    case Tag::PureSet: return "pure-set";
    case Tag::RandomGraph: return "random-graph";
    case Tag::DenseLinearOrder: return "dense-linear-order";
    case Tag::AtomlessBoolean: return "atomless-boolean";
    case Tag::UrysohnRational: return "urysohn-rational";
  }
  return "?";
}

ClassKind ClassKind::from_name(const std::string& name, int denominator) {
  if (name == "pure-set") return pure_set();
  if (name == "random-graph") return random_graph();
  if (name == "dense-linear-order") return dense_linear_order();
  if (name == "atomless-boolean") return atomless_boolean();
  if (name == "urysohn-rational") return urysohn_rational(denominator);
  throw DomainError("bad_kind", "unknown class kind: '" + name + "'");
}

FiniteStructure FiniteStructure::pure_set(int n) {
  FiniteStructure s;
  s.kind = ClassKind::pure_set();
  s.size = n;
  s.validate();
  return s;
}

FiniteStructure FiniteStructure::graph(int n, std::vector<std::pair<int, int>> edges) {
  FiniteStructure s;
  s.kind = ClassKind::random_graph();
  s.size = n;
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  s.edges = std::move(edges);
  s.validate();
  return s;
}

FiniteStructure FiniteStructure::linear_order(int n) {
  std::vector<int> ranks(static_cast<size_t>(n));
  std::iota(ranks.begin(), ranks.end(), 0);
  return linear_order(std::move(ranks));
}

FiniteStructure FiniteStructure::linear_order(std::vector<int> ranks) {
  FiniteStructure s;
  s.kind = ClassKind::dense_linear_order();
  s.size = static_cast<int>(ranks.size());
  s.order = std::move(ranks);
  s.validate();
  return s;
}

FiniteStructure FiniteStructure::boolean_algebra(int atom_count, std::vector<unsigned> elements) {
  FiniteStructure s;
  s.kind = ClassKind::atomless_boolean();
  s.atom_count = atom_count;
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  s.size = static_cast<int>(elements.size());
  s.elements = std::move(elements);
  s.validate();
  return s;
}

FiniteStructure FiniteStructure::full_boolean_algebra(int atom_count) {
  if (atom_count < 0 || atom_count > 20)
    throw DomainError("cap_exceeded", "boolean algebra too large to materialize");
  std::vector<unsigned> elems;
  elems.reserve(1u << atom_count);
  for (unsigned m = 0; m < (1u << atom_count); ++m) elems.push_back(m);
  return boolean_algebra(atom_count, std::move(elems));
}

FiniteStructure FiniteStructure::metric_space(int denominator,
                                              std::vector<std::vector<Rational>> dist) {
  FiniteStructure s;
  s.kind = ClassKind::urysohn_rational(denominator);
  s.size = static_cast<int>(dist.size());
  s.dist = std::move(dist);
  s.validate();
  return s;
}

void FiniteStructure::validate() const {
  if (size < 0) throw DomainError("bad_structure", "negative size");
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph: {
      for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= size || b >= size)
          throw DomainError("bad_structure", "edge endpoint out of range");
        if (a == b) throw DomainError("bad_structure", "loop edge");
        if (a > b) throw DomainError("bad_structure", "edge not normalized");
      }
      if (!std::is_sorted(edges.begin(), edges.end()))
        throw DomainError("bad_structure", "edge list not sorted");
      break;
    }
    case ClassKind::Tag::DenseLinearOrder: {
      if (static_cast<int>(order.size()) != size)
        throw DomainError("bad_structure", "rank array size mismatch");
      std::vector<bool> seen(static_cast<size_t>(size), false);
      for (int r : order) {
        if (r < 0 || r >= size || seen[static_cast<size_t>(r)])
          throw DomainError("bad_structure", "ranks are not a permutation");
        seen[static_cast<size_t>(r)] = true;
      }
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      if (atom_count < 0 || atom_count > 31)
        throw DomainError("bad_structure", "atom count out of range");
      if (static_cast<int>(elements.size()) != size)
        throw DomainError("bad_structure", "element list size mismatch");
      if (!std::is_sorted(elements.begin(), elements.end()))
        throw DomainError("bad_structure", "boolean elements not sorted");
      std::set<unsigned> uni(elements.begin(), elements.end());
      if (uni.size() != elements.size())
        throw DomainError("bad_structure", "duplicate boolean element");
      unsigned full = full_mask();
      for (unsigned m : elements)
        if ((m & ~full) != 0) throw DomainError("bad_structure", "element mask out of range");
      if (!uni.count(0u) || !uni.count(full))
        throw DomainError("bad_structure", "boolean universe must contain 0 and 1");
      for (unsigned a : elements)
        for (unsigned b : elements) {
          if (!uni.count(a & b) || !uni.count(a | b))
            throw DomainError("bad_structure", "boolean universe not closed under meet/join");
        }
      for (unsigned a : elements)
        if (!uni.count(full & ~a))
          throw DomainError("bad_structure", "boolean universe not closed under complement");
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      if (static_cast<int>(dist.size()) != size)
        throw DomainError("bad_structure", "distance matrix size mismatch");
      Rational one(1), zero(0);
      Rational unit(1, kind.denominator);
      for (int a = 0; a < size; ++a) {
        if (static_cast<int>(dist[a].size()) != size)
          throw DomainError("bad_structure", "distance matrix not square");
        if (dist[a][a] != zero) throw DomainError("bad_structure", "nonzero diagonal");
        for (int b = 0; b < size; ++b) {
          const Rational& d = dist[a][b];
          if (d != dist[b][a]) throw DomainError("bad_structure", "asymmetric distances");
          if (a != b && (d <= zero || d > one))
            throw DomainError("bad_structure", "distance outside (0,1]");
          Rational steps = d / unit;
          if (steps.den() != 1)
            throw DomainError("bad_structure", "distance not on the 1/" +
                                                   std::to_string(kind.denominator) + " grid");
        }
      }
      for (int a = 0; a < size; ++a)
        for (int b = 0; b < size; ++b)
          for (int c = 0; c < size; ++c)
            if (dist[a][b] > dist[a][c] + dist[c][b])
              throw DomainError("bad_structure", "triangle inequality violated");
      break;
    }
  }
}

std::string FiniteStructure::encode() const {
  std::ostringstream os;
  os << kind.name();
  if (kind.tag == ClassKind::Tag::UrysohnRational) os << "/" << kind.denominator;
  os << ":" << size << ":";
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph:
      for (auto [a, b] : edges) os << a << "-" << b << ",";
      break;
    case ClassKind::Tag::DenseLinearOrder:
      for (int r : order) os << r << ",";
      break;
    case ClassKind::Tag::AtomlessBoolean:
      os << atom_count << ";";
      for (unsigned m : elements) os << m << ",";
      break;
    case ClassKind::Tag::UrysohnRational:
      for (const auto& row : dist)
        for (const auto& d : row) os << d.str() << ",";
      break;
  }
  return os.str();
}

bool FiniteStructure::adjacent(int a, int b) const {
  auto e = std::minmax(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(e.first, e.second));
}

bool FiniteStructure::less(int a, int b) const {
  return order[static_cast<size_t>(a)] < order[static_cast<size_t>(b)];
}

int FiniteStructure::boolean_index_of(unsigned mask) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), mask);
  if (it == elements.end() || *it != mask) return -1;
  return static_cast<int>(it - elements.begin());
}

const Rational& FiniteStructure::distance(int a, int b) const {
  return dist[static_cast<size_t>(a)][static_cast<size_t>(b)];
}

namespace {

// Pairwise relation compatibility of mapping i -> mi, j -> mj.  Boolean needs
// a whole-map check on top of this (see boolean_map_ok).
bool pair_ok(const FiniteStructure& s, const FiniteStructure& t, int i, int j, int mi, int mj) {
  switch (s.kind.tag) {
    case ClassKind::Tag::PureSet: return true;
    case ClassKind::Tag::RandomGraph: return s.adjacent(i, j) == t.adjacent(mi, mj);
    case ClassKind::Tag::DenseLinearOrder: return s.less(i, j) == t.less(mi, mj);
    case ClassKind::Tag::AtomlessBoolean: return true;  // handled globally
    case ClassKind::Tag::UrysohnRational: return s.distance(i, j) == t.distance(mi, mj);
  }
  return false;
}

// A map between boolean structures extends to an isomorphism of generated
// subalgebras iff the zero/nonzero pattern of all meet-complement cells over
// the mapped tuple agrees on both sides.
bool boolean_map_ok(const FiniteStructure& s, const FiniteStructure& t,
                    const std::vector<int>& domain, const std::vector<int>& image) {
  size_t k = domain.size();
  if (k > 20) throw DomainError("cap_exceeded", "boolean tuple too long");
  unsigned sfull = s.full_mask(), tfull = t.full_mask();
  for (unsigned sel = 0; sel < (1u << k); ++sel) {
    unsigned cs = sfull, ct = tfull;
    for (size_t i = 0; i < k; ++i) {
      unsigned ms = s.mask_of(domain[i]), mt = t.mask_of(image[i]);
      if (sel & (1u << i)) {
        cs &= ms;
        ct &= mt;
      } else {
        cs &= ~ms;
        ct &= ~mt;
      }
    }
    if ((cs == 0) != (ct == 0)) return false;
  }
  return true;
}

bool whole_map_ok(const FiniteStructure& s, const FiniteStructure& t,
                  const std::vector<int>& map) {
  if (s.kind.tag == ClassKind::Tag::AtomlessBoolean) {
    std::vector<int> domain(map.size());
    std::iota(domain.begin(), domain.end(), 0);
    return boolean_map_ok(s, t, domain, map);
  }
  return true;
}

}  // namespace

bool is_embedding_map(const FiniteStructure& source, const FiniteStructure& target,
                      const std::vector<int>& map) {
  if (source.kind != target.kind) return false;
  if (static_cast<int>(map.size()) != source.size) return false;
  std::vector<bool> used(static_cast<size_t>(target.size), false);
  for (int m : map) {
    if (m < 0 || m >= target.size || used[static_cast<size_t>(m)]) return false;
    used[static_cast<size_t>(m)] = true;
  }
  for (int i = 0; i < source.size; ++i)
    for (int j = i + 1; j < source.size; ++j)
      if (!pair_ok(source, target, i, j, map[static_cast<size_t>(i)], map[static_cast<size_t>(j)]))
        return false;
  return whole_map_ok(source, target, map);
}

void Embedding::validate() const {
  if (!is_embedding_map(source, target, map))
    throw DomainError("bad_embedding", "map does not preserve and reflect relations");
}

bool is_isomorphism(const Embedding& f) {
  return f.source.size == f.target.size && is_embedding_map(f.source, f.target, f.map);
}

namespace {

void search_embeddings(const FiniteStructure& c, const FiniteStructure& a,
                       std::vector<int>& partial, std::vector<bool>& used,
                       bool first_only, std::vector<std::vector<int>>& out) {
  if (first_only && !out.empty()) return;
  int i = static_cast<int>(partial.size());
  if (i == c.size) {
    if (whole_map_ok(c, a, partial)) out.push_back(partial);
    return;
  }
  for (int cand = 0; cand < a.size; ++cand) {
    if (used[static_cast<size_t>(cand)]) continue;
    bool ok = true;
    for (int j = 0; j < i && ok; ++j)
      ok = pair_ok(c, a, j, i, partial[static_cast<size_t>(j)], cand);
    if (!ok) continue;
    partial.push_back(cand);
    used[static_cast<size_t>(cand)] = true;
    search_embeddings(c, a, partial, used, first_only, out);
    used[static_cast<size_t>(cand)] = false;
    partial.pop_back();
  }
}

}  // namespace

std::optional<Embedding> find_isomorphism(const FiniteStructure& s, const FiniteStructure& t) {
  if (s.kind != t.kind || s.size != t.size) return std::nullopt;
  std::vector<std::vector<int>> out;
  std::vector<int> partial;
  std::vector<bool> used(static_cast<size_t>(t.size), false);
  search_embeddings(s, t, partial, used, /*first_only=*/true, out);
  if (out.empty()) return std::nullopt;
  return Embedding{s, t, out.front()};
}

std::vector<std::vector<int>> enumerate_embeddings(const FiniteStructure& c,
                                                   const FiniteStructure& a) {
  if (c.kind != a.kind) return {};
  std::vector<std::vector<int>> out;
  std::vector<int> partial;
  std::vector<bool> used(static_cast<size_t>(a.size), false);
  search_embeddings(c, a, partial, used, /*first_only=*/false, out);
  return out;
}

std::vector<std::vector<int>> automorphisms(const FiniteStructure& s) {
  return enumerate_embeddings(s, s);
}

std::pair<FiniteStructure, Embedding> induced_substructure(const FiniteStructure& s,
                                                           const std::vector<int>& subset) {
  std::vector<bool> seen(static_cast<size_t>(s.size), false);
  for (int e : subset) {
    if (e < 0 || e >= s.size) throw DomainError("out_of_range", "subset element out of range");
    if (seen[static_cast<size_t>(e)]) throw DomainError("duplicate", "duplicate subset element");
    seen[static_cast<size_t>(e)] = true;
  }

  FiniteStructure r;
  r.kind = s.kind;
  std::vector<int> incl = subset;

  switch (s.kind.tag) {
    case ClassKind::Tag::PureSet:
      r.size = static_cast<int>(subset.size());
      break;
    case ClassKind::Tag::RandomGraph: {
      r.size = static_cast<int>(subset.size());
      for (size_t i = 0; i < subset.size(); ++i)
        for (size_t j = i + 1; j < subset.size(); ++j)
          if (s.adjacent(subset[i], subset[j]))
            r.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
      std::sort(r.edges.begin(), r.edges.end());
      break;
    }
    case ClassKind::Tag::DenseLinearOrder: {
      r.size = static_cast<int>(subset.size());
      std::vector<std::pair<int, int>> by_rank;
      for (size_t i = 0; i < subset.size(); ++i)
        by_rank.emplace_back(s.order[static_cast<size_t>(subset[i])], static_cast<int>(i));
      std::sort(by_rank.begin(), by_rank.end());
      r.order.assign(subset.size(), 0);
      for (size_t rank = 0; rank < by_rank.size(); ++rank)
        r.order[static_cast<size_t>(by_rank[rank].second)] = static_cast<int>(rank);
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      // Close the chosen masks under meet, join, complement (plus 0 and 1).
      unsigned full = s.full_mask();
      std::set<unsigned> closure = {0u, full};
      for (int e : subset) closure.insert(s.mask_of(e));
      bool grew = true;
      while (grew) {
        grew = false;
        std::vector<unsigned> cur(closure.begin(), closure.end());
        for (unsigned a : cur)
          for (unsigned b : cur) {
            if (closure.insert(a & b).second) grew = true;
            if (closure.insert(a | b).second) grew = true;
          }
        for (unsigned a : cur)
          if (closure.insert(full & ~a).second) grew = true;
      }
      r.atom_count = s.atom_count;
      r.elements.assign(closure.begin(), closure.end());
      r.size = static_cast<int>(r.elements.size());
      incl.clear();
      for (unsigned m : r.elements) {
        int idx = s.boolean_index_of(m);
        if (idx < 0)
          throw DomainError("bad_structure", "ambient universe not closed under operations");
        incl.push_back(idx);
      }
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      r.size = static_cast<int>(subset.size());
      r.dist.assign(subset.size(), std::vector<Rational>(subset.size(), Rational(0)));
      for (size_t i = 0; i < subset.size(); ++i)
        for (size_t j = 0; j < subset.size(); ++j)
          r.dist[i][j] = s.distance(subset[i], subset[j]);
      break;
    }
  }
  r.validate();
  Embedding inc{r, s, incl};
  inc.validate();
  return {std::move(r), std::move(inc)};
}

namespace {

std::vector<int> boolean_atoms(const FiniteStructure& s) {
  // Minimal nonzero elements of the universe.
  std::vector<int> atoms;
  for (int i = 0; i < s.size; ++i) {
    unsigned m = s.mask_of(i);
    if (m == 0) continue;
    bool minimal = true;
    for (int j = 0; j < s.size && minimal; ++j) {
      unsigned o = s.mask_of(j);
      if (o != 0 && o != m && (o & ~m) == 0) minimal = false;
    }
    if (minimal) atoms.push_back(i);
  }
  return atoms;
}

}  // namespace

Amalgam free_amalgam(const Embedding& e1, const Embedding& e2, OrderTiePolicy policy) {
  const FiniteStructure& c = e1.source;
  if (!(e2.source == c)) throw DomainError("amalgam_mismatch", "embeddings have different sources");
  const FiniteStructure& a = e1.target;
  const FiniteStructure& b = e2.target;
  if (a.kind != c.kind || b.kind != c.kind)
    throw DomainError("kind_mismatch", "amalgamation requires a single kind");
  e1.validate();
  e2.validate();

  if (c.kind.tag == ClassKind::Tag::AtomlessBoolean) {
    // Relatively independent product over the common subalgebra: new atoms
    // are pairs of an a-atom and a b-atom lying under the same c-atom.
    std::vector<int> c_atoms = boolean_atoms(c);
    std::vector<int> a_atoms = boolean_atoms(a);
    std::vector<int> b_atoms = boolean_atoms(b);
    auto c_atom_over = [&](const FiniteStructure& t, const Embedding& e, int atom_idx) {
      unsigned am = t.mask_of(atom_idx);
      for (int ci : c_atoms) {
        unsigned cm = t.mask_of(e.map[static_cast<size_t>(ci)]);
        if ((am & ~cm) == 0) return ci;
      }
      throw DomainError("bad_structure", "atom not under any shared atom");
    };
    std::vector<std::pair<int, int>> pairs;  // (a-atom index, b-atom index)
    for (int ai : a_atoms)
      for (int bi : b_atoms)
        if (c_atom_over(a, e1, ai) == c_atom_over(b, e2, bi)) pairs.emplace_back(ai, bi);
    int new_atoms = static_cast<int>(pairs.size());
    if (new_atoms > 20) throw DomainError("cap_exceeded", "amalgam atom count too large");
    auto lift_a = [&](unsigned am) {
      unsigned m = 0;
      for (size_t p = 0; p < pairs.size(); ++p)
        if ((a.mask_of(pairs[p].first) & ~am) == 0) m |= (1u << p);
      return m;
    };
    auto lift_b = [&](unsigned bm) {
      unsigned m = 0;
      for (size_t p = 0; p < pairs.size(); ++p)
        if ((b.mask_of(pairs[p].second) & ~bm) == 0) m |= (1u << p);
      return m;
    };
    std::set<unsigned> gens;
    for (int i = 0; i < a.size; ++i) gens.insert(lift_a(a.mask_of(i)));
    for (int i = 0; i < b.size; ++i) gens.insert(lift_b(b.mask_of(i)));
    unsigned full = new_atoms >= 32 ? ~0u : ((1u << new_atoms) - 1u);
    std::set<unsigned> closure = gens;
    closure.insert(0u);
    closure.insert(full);
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<unsigned> cur(closure.begin(), closure.end());
      for (unsigned x : cur)
        for (unsigned y : cur) {
          if (closure.insert(x & y).second) grew = true;
          if (closure.insert(x | y).second) grew = true;
        }
      for (unsigned x : cur)
        if (closure.insert(full & ~x).second) grew = true;
    }
    FiniteStructure whole;
    whole.kind = c.kind;
    whole.atom_count = new_atoms;
    whole.elements.assign(closure.begin(), closure.end());
    whole.size = static_cast<int>(whole.elements.size());
    whole.validate();
    std::vector<int> fa, fb;
    for (int i = 0; i < a.size; ++i) fa.push_back(whole.boolean_index_of(lift_a(a.mask_of(i))));
    for (int i = 0; i < b.size; ++i) fb.push_back(whole.boolean_index_of(lift_b(b.mask_of(i))));
    Embedding emb_a{a, whole, fa};
    Embedding emb_b{b, whole, fb};
    emb_a.validate();
    emb_b.validate();
    for (int i = 0; i < c.size; ++i)
      if (fa[static_cast<size_t>(e1.map[static_cast<size_t>(i)])] !=
          fb[static_cast<size_t>(e2.map[static_cast<size_t>(i)])])
        throw DomainError("amalgam_mismatch", "embeddings do not commute over the source");
    return {std::move(whole), std::move(emb_a), std::move(emb_b)};
  }

  // Point-based kinds: universe = a's points, then b's points not glued to a.
  std::vector<int> b_to_whole(static_cast<size_t>(b.size), -1);
  for (int i = 0; i < c.size; ++i)
    b_to_whole[static_cast<size_t>(e2.map[static_cast<size_t>(i)])] =
        e1.map[static_cast<size_t>(i)];
  int next = a.size;
  std::vector<int> fresh_b;  // b-indices in b order
  for (int i = 0; i < b.size; ++i)
    if (b_to_whole[static_cast<size_t>(i)] < 0) {
      b_to_whole[static_cast<size_t>(i)] = next++;
      fresh_b.push_back(i);
    }
  int n = next;

  FiniteStructure whole;
  whole.kind = c.kind;
  whole.size = n;

  switch (c.kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph: {
      std::set<std::pair<int, int>> es;
      for (auto [x, y] : a.edges) es.insert(std::minmax(x, y));
      for (auto [x, y] : b.edges) {
        auto p = std::minmax(b_to_whole[static_cast<size_t>(x)], b_to_whole[static_cast<size_t>(y)]);
        es.insert(p);
      }
      whole.edges.assign(es.begin(), es.end());
      break;
    }
    case ClassKind::Tag::DenseLinearOrder: {
      // Shared anchors cut both chains into segments; within a segment the
      // a-side precedes the b-side (or conversely, per policy).
      std::vector<std::pair<int, int>> anchors;  // (a-rank, whole-id)
      std::vector<int> anchor_b_rank;
      for (int i = 0; i < c.size; ++i) {
        int ai = e1.map[static_cast<size_t>(i)];
        anchors.emplace_back(a.order[static_cast<size_t>(ai)], ai);
      }
      std::sort(anchors.begin(), anchors.end());
      auto seg_of_a = [&](int elem) {
        int rank = a.order[static_cast<size_t>(elem)];
        int seg = 0;
        while (seg < static_cast<int>(anchors.size()) && anchors[static_cast<size_t>(seg)].first < rank)
          ++seg;
        return seg;  // number of anchors strictly below
      };
      std::vector<int> anchor_in_b;  // b-index of each anchor, sorted by order
      for (auto& [ar, aid] : anchors) {
        int b_idx = -1;
        for (int i = 0; i < c.size; ++i)
          if (e1.map[static_cast<size_t>(i)] == aid) b_idx = e2.map[static_cast<size_t>(i)];
        anchor_in_b.push_back(b_idx);
      }
      auto seg_of_b = [&](int elem) {
        int rank = b.order[static_cast<size_t>(elem)];
        int seg = 0;
        while (seg < static_cast<int>(anchor_in_b.size()) &&
               b.order[static_cast<size_t>(anchor_in_b[static_cast<size_t>(seg)])] < rank)
          ++seg;
        return seg;
      };
      std::vector<int> chain;  // whole ids in increasing order
      int num_segs = static_cast<int>(anchors.size()) + 1;
      for (int seg = 0; seg < num_segs; ++seg) {
        std::vector<std::pair<int, int>> a_part, b_part;
        for (int i = 0; i < a.size; ++i) {
          bool is_anchor = false;
          for (auto& [r, id] : anchors) is_anchor |= (id == i);
          if (!is_anchor && seg_of_a(i) == seg)
            a_part.emplace_back(a.order[static_cast<size_t>(i)], i);
        }
        for (int i = 0; i < b.size; ++i) {
          bool is_anchor = std::find(anchor_in_b.begin(), anchor_in_b.end(), i) != anchor_in_b.end();
          if (!is_anchor && seg_of_b(i) == seg)
            b_part.emplace_back(b.order[static_cast<size_t>(i)], b_to_whole[static_cast<size_t>(i)]);
        }
        std::sort(a_part.begin(), a_part.end());
        std::sort(b_part.begin(), b_part.end());
        if (policy == OrderTiePolicy::ASideFirst) {
          for (auto& [r, id] : a_part) chain.push_back(id);
          for (auto& [r, id] : b_part) chain.push_back(id);
        } else {
          for (auto& [r, id] : b_part) chain.push_back(id);
          for (auto& [r, id] : a_part) chain.push_back(id);
        }
        if (seg < static_cast<int>(anchors.size()))
          chain.push_back(anchors[static_cast<size_t>(seg)].second);
      }
      whole.order.assign(static_cast<size_t>(n), 0);
      for (size_t rank = 0; rank < chain.size(); ++rank)
        whole.order[static_cast<size_t>(chain[rank])] = static_cast<int>(rank);
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      Rational one(1);
      whole.dist.assign(static_cast<size_t>(n), std::vector<Rational>(static_cast<size_t>(n), Rational(0)));
      auto set_d = [&](int x, int y, const Rational& d) {
        whole.dist[static_cast<size_t>(x)][static_cast<size_t>(y)] = d;
        whole.dist[static_cast<size_t>(y)][static_cast<size_t>(x)] = d;
      };
      for (int x = 0; x < a.size; ++x)
        for (int y = x + 1; y < a.size; ++y) set_d(x, y, a.distance(x, y));
      for (int x = 0; x < b.size; ++x)
        for (int y = x + 1; y < b.size; ++y)
          set_d(b_to_whole[static_cast<size_t>(x)], b_to_whole[static_cast<size_t>(y)], b.distance(x, y));
      // Cross distances: shortest path through the shared part, capped at 1.
      for (int x = 0; x < a.size; ++x) {
        bool x_shared = false;
        for (int i = 0; i < c.size; ++i) x_shared |= (e1.map[static_cast<size_t>(i)] == x);
        if (x_shared) continue;
        for (int yb : fresh_b) {
          Rational best = one;
          for (int i = 0; i < c.size; ++i) {
            Rational via = a.distance(x, e1.map[static_cast<size_t>(i)]) +
                           b.distance(e2.map[static_cast<size_t>(i)], yb);
            if (via < best) best = via;
          }
          set_d(x, b_to_whole[static_cast<size_t>(yb)], best);
        }
      }
      break;
    }
    case ClassKind::Tag::AtomlessBoolean:
      break;  // unreachable
  }
  whole.validate();

  std::vector<int> fa(static_cast<size_t>(a.size));
  std::iota(fa.begin(), fa.end(), 0);
  Embedding emb_a{a, whole, fa};
  Embedding emb_b{b, whole, b_to_whole};
  emb_a.validate();
  emb_b.validate();
  return {std::move(whole), std::move(emb_a), std::move(emb_b)};
}

namespace {

std::vector<int> identity_perm(int n) {
  std::vector<int> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

}  // namespace

FiniteStructure canonical_form(const FiniteStructure& s) {
  switch (s.kind.tag) {
    case ClassKind::Tag::PureSet:
      return s;
    case ClassKind::Tag::DenseLinearOrder:
      return FiniteStructure::linear_order(s.size);
    case ClassKind::Tag::AtomlessBoolean: {
      int k = static_cast<int>(boolean_atoms(s).size());
      return FiniteStructure::full_boolean_algebra(k);
    }
    case ClassKind::Tag::RandomGraph: {
      if (s.size > 8) throw DomainError("cap_exceeded", "canonical form limited to 8 points");
      std::vector<int> perm = identity_perm(s.size);
      std::vector<std::pair<int, int>> best;
      bool have = false;
      do {
        std::vector<std::pair<int, int>> mapped;
        for (auto [x, y] : s.edges)
          mapped.push_back(std::minmax(perm[static_cast<size_t>(x)], perm[static_cast<size_t>(y)]));
        std::sort(mapped.begin(), mapped.end());
        if (!have || mapped < best) {
          best = mapped;
          have = true;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      return FiniteStructure::graph(s.size, best);
    }
    case ClassKind::Tag::UrysohnRational: {
      if (s.size > 8) throw DomainError("cap_exceeded", "canonical form limited to 8 points");
      std::vector<int> perm = identity_perm(s.size);
      std::vector<std::vector<Rational>> best;
      std::string best_key;
      bool have = false;
      do {
        std::vector<std::vector<Rational>> mapped(
            static_cast<size_t>(s.size), std::vector<Rational>(static_cast<size_t>(s.size), Rational(0)));
        for (int x = 0; x < s.size; ++x)
          for (int y = 0; y < s.size; ++y)
            mapped[static_cast<size_t>(perm[static_cast<size_t>(x)])]
                  [static_cast<size_t>(perm[static_cast<size_t>(y)])] = s.distance(x, y);
        std::ostringstream os;
        for (auto& row : mapped)
          for (auto& d : row) os << d.str() << ",";
        std::string key = os.str();
        if (!have || key < best_key) {
          best = mapped;
          best_key = key;
          have = true;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      return FiniteStructure::metric_space(s.kind.denominator, best);
    }
  }
  throw DomainError("bad_kind", "unknown kind");
}

std::vector<FiniteStructure> enumerate_age(ClassKind kind, int n, const Limits& limits) {
  long long counter = 0;
  auto charge = [&](long long amount) {
    counter += amount;
    if (counter > limits.enumeration_cap)
      throw DomainError("cap_exceeded", "age enumeration exceeds configured cap");
  };

  std::map<std::string, FiniteStructure> reps;  // canonical encode -> structure
  auto offer = [&](const FiniteStructure& s) {
    FiniteStructure canon = canonical_form(s);
    reps.emplace(canon.encode(), canon);
  };

  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      for (int s = 0; s <= n; ++s) {
        charge(1);
        offer(FiniteStructure::pure_set(s));
      }
      break;
    case ClassKind::Tag::DenseLinearOrder:
      for (int s = 0; s <= n; ++s) {
        charge(1);
        offer(FiniteStructure::linear_order(s));
      }
      break;
    case ClassKind::Tag::AtomlessBoolean:
      // Finite members are algebras with 2^k elements, k >= 1.
      for (int k = 1; (1 << k) <= n; ++k) {
        charge(1);
        offer(FiniteStructure::full_boolean_algebra(k));
      }
      break;
    case ClassKind::Tag::RandomGraph:
      for (int s = 0; s <= n; ++s) {
        int m = s * (s - 1) / 2;
        if (m > 30) throw DomainError("cap_exceeded", "graph size too large");
        charge(1LL << m);
        std::vector<std::pair<int, int>> all_pairs;
        for (int x = 0; x < s; ++x)
          for (int y = x + 1; y < s; ++y) all_pairs.emplace_back(x, y);
        for (unsigned bits = 0; bits < (1u << m); ++bits) {
          std::vector<std::pair<int, int>> edges;
          for (int e = 0; e < m; ++e)
            if (bits & (1u << e)) edges.push_back(all_pairs[static_cast<size_t>(e)]);
          offer(FiniteStructure::graph(s, edges));
        }
      }
      break;
    case ClassKind::Tag::UrysohnRational: {
      int q = kind.denominator;
      for (int s = 0; s <= n; ++s) {
        int m = s * (s - 1) / 2;
        long long total = 1;
        for (int e = 0; e < m; ++e) {
          total *= q;
          if (total > limits.enumeration_cap) break;
        }
        charge(total);
        std::vector<std::pair<int, int>> all_pairs;
        for (int x = 0; x < s; ++x)
          for (int y = x + 1; y < s; ++y) all_pairs.emplace_back(x, y);
        std::vector<int> units(static_cast<size_t>(m), 1);  // grid steps 1..q
        while (true) {
          std::vector<std::vector<Rational>> d(static_cast<size_t>(s),
                                               std::vector<Rational>(static_cast<size_t>(s), Rational(0)));
          for (int e = 0; e < m; ++e) {
            auto [x, y] = all_pairs[static_cast<size_t>(e)];
            d[static_cast<size_t>(x)][static_cast<size_t>(y)] = Rational(units[static_cast<size_t>(e)], q);
            d[static_cast<size_t>(y)][static_cast<size_t>(x)] = Rational(units[static_cast<size_t>(e)], q);
          }
          bool triangle = true;
          for (int x = 0; x < s && triangle; ++x)
            for (int y = 0; y < s && triangle; ++y)
              for (int z = 0; z < s && triangle; ++z)
                if (d[static_cast<size_t>(x)][static_cast<size_t>(y)] >
                    d[static_cast<size_t>(x)][static_cast<size_t>(z)] +
                        d[static_cast<size_t>(z)][static_cast<size_t>(y)])
                  triangle = false;
          if (triangle) offer(FiniteStructure::metric_space(q, d));
          int e = m - 1;
          while (e >= 0 && units[static_cast<size_t>(e)] == q) {
            units[static_cast<size_t>(e)] = 1;
            --e;
          }
          if (e < 0) break;
          ++units[static_cast<size_t>(e)];
        }
      }
      break;
    }
  }

  std::vector<FiniteStructure> out;
  for (auto& [key, s] : reps) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), [](const FiniteStructure& a, const FiniteStructure& b) {
    if (a.size != b.size) return a.size < b.size;
    return a.encode() < b.encode();
  });
  return out;
}

}  // namespace oligoscope
