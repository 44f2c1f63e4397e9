#include "oligoscope/semigroup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace oligoscope {

int StarSemigroupTable::index_of(const PartialIso& p) const {
  std::string key = p.encode();
  auto it = std::lower_bound(elements.begin(), elements.end(), key,
                             [](const PartialIso& e, const std::string& k) { return e.encode() < k; });
  if (it == elements.end() || it->encode() != key) return -1;
  return static_cast<int>(it - elements.begin());
}

void StarSemigroupTable::validate() const {
  size_t n = elements.size();
  if (product.size() != n || star.size() != n)
    throw DomainError("bad_table", "table size mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (product[i].size() != n) throw DomainError("bad_table", "product row size mismatch");
    if (star[i] < 0 || star[i] >= static_cast<int>(n) ||
        star[static_cast<size_t>(star[i])] != static_cast<int>(i))
      throw DomainError("bad_table", "star is not an involution");
    for (size_t j = 0; j < n; ++j)
      if (product[i][j] < 0 || product[i][j] >= static_cast<int>(n))
        throw DomainError("bad_table", "product entry out of range");
  }
}

StarSemigroupTable generate_star_semigroup(const std::vector<PartialIso>& gens,
                                           const Limits& limits) {
  if (gens.empty()) throw DomainError("empty_generators", "no generators given");
  for (const auto& g : gens) {
    g.validate();
    if (g.kind != gens.front().kind || g.window != gens.front().window)
      throw DomainError("window_mismatch", "generators live in different windows");
  }
  std::map<std::string, PartialIso> closure;
  std::vector<PartialIso> frontier;
  for (const auto& g : gens)
    if (closure.emplace(g.encode(), g).second) frontier.push_back(g);
  while (!frontier.empty()) {
    std::vector<PartialIso> next;
    auto offer = [&](PartialIso p) {
      if (closure.size() > static_cast<size_t>(limits.closure_cap))
        throw DomainError("cap_exceeded", "closure exceeds configured cap");
      auto [it, fresh] = closure.emplace(p.encode(), std::move(p));
      if (fresh) next.push_back(it->second);
    };
    for (const auto& f : frontier) {
      offer(involution(f));
      for (const auto& [key, e] : closure) {
        (void)key;
        offer(compose(f, e));
        offer(compose(e, f));
      }
    }
    frontier = std::move(next);
  }

  StarSemigroupTable t;
  for (auto& [key, p] : closure) t.elements.push_back(p);  // map order == encode order
  size_t n = t.elements.size();
  t.product.assign(n, std::vector<int>(n, -1));
  t.star.assign(n, -1);
  for (size_t i = 0; i < n; ++i) {
    t.star[i] = t.index_of(involution(t.elements[i]));
    for (size_t j = 0; j < n; ++j)
      t.product[i][j] = t.index_of(compose(t.elements[i], t.elements[j]));
  }
  for (const auto& g : gens) t.generators.push_back(t.index_of(g));
  t.validate();
  return t;
}

namespace {

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

PartialIso green_canonical_witness(const PartialIso& p, const PartialIso& q) {
  // maps q(a) to p(a) wherever both are defined
  PartialIso r;
  r.kind = p.kind;
  r.window = p.window;
  for (auto [a, b] : p.pairs) {
    auto qa = q.apply(a);
    if (qa) r.pairs.emplace_back(*qa, b);
  }
  std::sort(r.pairs.begin(), r.pairs.end());
  if (q.context && p.context) r.context = std::make_pair(q.context->second, p.context->second);
  return r;
}

bool green_leq(const PartialIso& p, const PartialIso& q) {
  if (p.kind != q.kind || p.window != q.window)
    throw DomainError("window_mismatch", "green comparison across windows");
  if (!subset(p.domain(), q.domain())) return false;
  // factoring through q must reproduce p exactly
  return compose(q, green_canonical_witness(p, q)).same_graph(p);
}

bool green_equiv(const PartialIso& p, const PartialIso& q) {
  return green_leq(p, q) && green_leq(q, p);
}

std::optional<PartialIso> green_leq_witness(const PartialIso& p, const PartialIso& q,
                                            const std::vector<PartialIso>& universe) {
  for (const auto& r : universe)
    if (compose(q, r).same_graph(p)) return r;
  return std::nullopt;
}

bool green_leq(const PartialIso& p, const PartialIso& q, const StarSemigroupTable& universe) {
  return green_leq_witness(p, q, universe.elements).has_value();
}

PartialIso least_idempotent(const StarSemigroupTable& s) {
  std::vector<int> idem;
  for (size_t i = 0; i < s.elements.size(); ++i)
    if (s.product[i][i] == static_cast<int>(i)) idem.push_back(static_cast<int>(i));
  if (idem.empty()) throw DomainError("no_idempotent", "star-closed table without idempotent");
  int best = -1;
  for (int i : idem) {
    bool least = true;
    for (int j : idem)
      if (!green_leq(s.elements[static_cast<size_t>(i)], s.elements[static_cast<size_t>(j)])) {
        least = false;
        break;
      }
    if (least) {
      if (best >= 0) throw DomainError("not_unique", "least idempotent is not unique");
      best = i;
    }
  }
  if (best < 0) throw DomainError("no_least", "no least idempotent found");
  return s.elements[static_cast<size_t>(best)];
}

std::vector<PartialIso> central_idempotents(const FiniteStructure& window_structure,
                                            const Limits& limits) {
  int n = window_structure.size;
  if (n > 20 || (1LL << n) > limits.enumeration_cap)
    throw DomainError("cap_exceeded", "window too large for the subset scan");
  std::vector<std::vector<int>> autos = automorphisms(window_structure);
  std::vector<PartialIso> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool invariant = true;
    for (const auto& g : autos) {
      unsigned image = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) image |= (1u << g[static_cast<size_t>(i)]);
      if (image != mask) {
        invariant = false;
        break;
      }
    }
    if (!invariant) continue;
    std::vector<int> subset_elems;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset_elems.push_back(i);
    out.push_back(PartialIso::partial_identity(window_structure.kind, n, subset_elems));
  }
  std::sort(out.begin(), out.end(),
            [](const PartialIso& a, const PartialIso& b) { return a.encode() < b.encode(); });
  return out;
}

StarSemigroupTable maximal_group(const PartialIso& e, const FiniteStructure& window_structure) {
  if (!is_idempotent(e) || !e.is_partial_identity())
    throw DomainError("not_idempotent", "maximal group needs an idempotent partial identity");
  std::vector<int> a = e.domain();
  auto [sub, inc] = induced_substructure(window_structure, a);
  (void)inc;
  std::vector<std::vector<int>> autos = automorphisms(sub);
  std::vector<PartialIso> members;
  for (const auto& sigma : autos) {
    PartialIso p;
    p.kind = e.kind;
    p.window = e.window;
    for (size_t i = 0; i < a.size(); ++i)
      p.pairs.emplace_back(a[i], a[static_cast<size_t>(sigma[i])]);
    std::sort(p.pairs.begin(), p.pairs.end());
    // membership identities for H(e)
    if (!compose(p, e).same_graph(p) || !compose(e, p).same_graph(p))
      throw DomainError("internal", "maximal group member fails pe = ep = p");
    if (!compose(p, involution(p)).same_graph(e) || !compose(involution(p), p).same_graph(e))
      throw DomainError("internal", "maximal group member fails p p* = p* p = e");
    members.push_back(std::move(p));
  }
  return generate_star_semigroup(members);
}

PartialIso restrict_action(const PartialIso& e, const PartialIso& g,
                           const FiniteStructure& window_structure) {
  std::vector<PartialIso> central = central_idempotents(window_structure);
  bool is_central = false;
  for (const auto& c : central) is_central |= c.same_graph(e);
  if (!is_central) throw DomainError("not_central", "idempotent is not central in this window");
  if (!g.is_total()) throw DomainError("not_total", "g must be a total automorphism");
  std::vector<int> images(static_cast<size_t>(g.window));
  for (auto [a, b] : g.pairs) images[static_cast<size_t>(a)] = b;
  if (!is_embedding_map(window_structure, window_structure, images))
    throw DomainError("not_automorphism", "g does not preserve the window structure");
  return compose(g, e);
}

std::optional<AmalgamationTriple> amalgamation_triple(const PartialIso& p, const PartialIso& x,
                                                      const PartialIso& y,
                                                      const FiniteStructure& window_structure,
                                                      const Limits& limits) {
  int n = window_structure.size;
  if (p.window != n || x.window != n || y.window != n)
    throw DomainError("window_mismatch", "inputs live in different windows");
  if (!x.is_total() || !y.is_total())
    throw DomainError("not_total", "x and y must be total automorphisms");
  auto perm_of = [&](const PartialIso& t) {
    std::vector<int> images(static_cast<size_t>(n));
    for (auto [a, b] : t.pairs) images[static_cast<size_t>(a)] = b;
    if (!is_embedding_map(window_structure, window_structure, images))
      throw DomainError("not_automorphism", "total map does not preserve the window structure");
    return images;
  };
  perm_of(x);
  perm_of(y);
  if (!compose(x, p).same_graph(compose(y, p)))
    throw DomainError("precondition", "compose(x, p) differs from compose(y, p)");

  std::vector<int> dom = p.domain();

  // Glue two copies of the window along p: the u-copy's domain-of-p part is
  // identified with the w-copy's range-of-p part.
  auto [shared, shared_inc] = induced_substructure(window_structure, dom);
  std::vector<int> into_ran;
  if (p.kind.tag == ClassKind::Tag::AtomlessBoolean) {
    // extend p to the generated subalgebra via the cell correspondence
    size_t k = dom.size();
    if (k > 20) throw DomainError("cap_exceeded", "partial iso support too large");
    unsigned full = window_structure.full_mask();
    std::vector<unsigned> cell_dom(1u << k, 0), cell_ran(1u << k, 0);
    for (unsigned sig = 0; sig < (1u << k); ++sig) {
      unsigned cd = full, cr = full;
      for (size_t i = 0; i < k; ++i) {
        unsigned md = window_structure.mask_of(dom[i]);
        unsigned mr = window_structure.mask_of(*p.apply(dom[i]));
        cd &= ((sig >> i) & 1u) ? md : ~md;
        cr &= ((sig >> i) & 1u) ? mr : ~mr;
      }
      cell_dom[sig] = cd;
      cell_ran[sig] = cr;
    }
    for (int si = 0; si < shared.size; ++si) {
      unsigned s = shared.mask_of(si);
      unsigned image = 0;
      for (unsigned sig = 0; sig < (1u << k); ++sig)
        if (cell_dom[sig] != 0 && (cell_dom[sig] & ~s) == 0) image |= cell_ran[sig];
      int idx = window_structure.boolean_index_of(image);
      if (idx < 0) throw DomainError("internal", "extension image missing from window");
      into_ran.push_back(idx);
    }
  } else {
    for (int d : dom) into_ran.push_back(*p.apply(d));
  }
  Embedding e1{shared, window_structure, into_ran};
  Embedding e2 = shared_inc;
  e1.validate();
  e2.validate();
  Amalgam am = free_amalgam(e1, e2);
  int big = am.whole.size;
  if (big > n + limits.amalgam_growth) return std::nullopt;

  auto lift = [&](const std::vector<int>& images) {
    PartialIso t;
    t.kind = p.kind;
    t.window = big;
    for (int i = 0; i < n; ++i) t.pairs.emplace_back(i, images[static_cast<size_t>(i)]);
    std::sort(t.pairs.begin(), t.pairs.end());
    return t;
  };
  PartialIso w = lift(am.from_a.map);
  PartialIso u = lift(am.from_b.map);
  // v = u after the window automorphism x^{-1} y; then compose(x, v) = compose(y, u)
  PartialIso correction = compose(involution(x), y);
  PartialIso v;
  v.kind = p.kind;
  v.window = big;
  for (auto [a, b] : correction.pairs) {
    auto ub = u.apply(b);
    if (!ub) throw DomainError("internal", "correction left the window");
    v.pairs.emplace_back(a, *ub);
  }
  std::sort(v.pairs.begin(), v.pairs.end());

  // verify the two equations before returning
  auto pad = [&](const PartialIso& t) {
    PartialIso r = t;
    r.window = big;
    r.context.reset();
    return r;
  };
  PartialIso p_big = pad(p), x_big = pad(x), y_big = pad(y);
  if (!compose(u, involution(w)).same_graph(p_big)) return std::nullopt;
  if (!compose(v, involution(w)).same_graph(p_big)) return std::nullopt;
  if (!compose(y_big, u).same_graph(compose(x_big, v))) return std::nullopt;
  return AmalgamationTriple{std::move(w), std::move(u), std::move(v), std::move(am.whole)};
}

Rational hamming_left(const std::vector<int>& g, const std::vector<int>& h) {
  if (g.size() != h.size()) throw DomainError("size_mismatch", "permutation sizes differ");
  int diff = 0;
  for (size_t i = 0; i < g.size(); ++i)
    if (g[i] != h[i]) ++diff;
  if (g.empty()) return Rational(0);
  return Rational(diff, static_cast<long long>(g.size()));
}

namespace {

std::vector<int> inverse_perm(const std::vector<int>& g) {
  std::vector<int> inv(g.size());
  for (size_t i = 0; i < g.size(); ++i) inv[static_cast<size_t>(g[i])] = static_cast<int>(i);
  return inv;
}

void check_perm(const std::vector<int>& g) {
  std::vector<bool> seen(g.size(), false);
  for (int v : g) {
    if (v < 0 || v >= static_cast<int>(g.size()) || seen[static_cast<size_t>(v)])
      throw DomainError("bad_permutation", "not a permutation");
    seen[static_cast<size_t>(v)] = true;
  }
}

}  // namespace

Rational hamming_right(const std::vector<int>& g, const std::vector<int>& h) {
  return hamming_left(inverse_perm(g), inverse_perm(h));
}

Rational roelcke_distance(const std::vector<int>& g, const std::vector<int>& h,
                          const Limits& limits) {
  if (g.size() != h.size()) throw DomainError("size_mismatch", "permutation sizes differ");
  check_perm(g);
  check_perm(h);
  int n = static_cast<int>(g.size());
  if (n > limits.roelcke_cap)
    throw DomainError("cap_exceeded", "window exceeds the brute-force cap");
  if (n == 0) return Rational(0);
  std::vector<int> f(static_cast<size_t>(n));
  std::iota(f.begin(), f.end(), 0);
  Rational best(1);
  do {
    Rational dr = hamming_right(g, f);
    Rational dl = hamming_left(f, h);
    Rational m = dr > dl ? dr : dl;
    if (m < best) best = m;
  } while (std::next_permutation(f.begin(), f.end()));
  return best;
}

}  // namespace oligoscope
