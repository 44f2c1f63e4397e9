#include "oligoscope/types.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace oligoscope {

namespace {

void charge(long long& counter, long long amount, const Limits& limits) {
  counter += amount;
  if (counter > limits.enumeration_cap)
    throw DomainError("cap_exceeded", "type enumeration exceeds configured cap");
}

int max_block(const std::vector<int>& pattern) {
  int k = -1;
  for (int b : pattern) k = std::max(k, b);
  return k + 1;
}

// Distinct blocks must name distinct elements; only the boolean payload can
// silently identify two blocks.
bool boolean_separated(int k, const std::vector<unsigned>& support) {
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      bool split = false;
      for (unsigned cell : support) {
        bool has_i = (cell >> i) & 1u, has_j = (cell >> j) & 1u;
        if (has_i != has_j) { split = true; break; }
      }
      if (!split) return false;
    }
  return true;
}

// Enumerates every payload on k labeled points of the kind, deterministic
// order.  The callback receives a TypeSpec with only payload fields set.
void for_each_payload(ClassKind kind, int k, const Limits& limits, long long& counter,
                      const std::function<void(TypeSpec&)>& fn) {
  TypeSpec scratch;
  scratch.kind = kind;
  switch (kind.tag) {
    case ClassKind::Tag::PureSet: {
      charge(counter, 1, limits);
      fn(scratch);
      break;
    }
    case ClassKind::Tag::RandomGraph: {
      int m = k * (k - 1) / 2;
      if (m > 30) throw DomainError("cap_exceeded", "graph payload too large");
      std::vector<std::pair<int, int>> all_pairs;
      for (int x = 0; x < k; ++x)
        for (int y = x + 1; y < k; ++y) all_pairs.emplace_back(x, y);
      for (unsigned bits = 0; bits < (1u << m); ++bits) {
        charge(counter, 1, limits);
        scratch.edges.clear();
        for (int e = 0; e < m; ++e)
          if (bits & (1u << e)) scratch.edges.push_back(all_pairs[static_cast<size_t>(e)]);
        fn(scratch);
      }
      break;
    }
    case ClassKind::Tag::DenseLinearOrder: {
      std::vector<int> ranks(static_cast<size_t>(k));
      std::iota(ranks.begin(), ranks.end(), 0);
      do {
        charge(counter, 1, limits);
        scratch.ranks = ranks;
        fn(scratch);
      } while (std::next_permutation(ranks.begin(), ranks.end()));
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      if (k > 4) throw DomainError("cap_exceeded", "boolean payload arity too large");
      unsigned cells = 1u << k;
      unsigned long long total = 1ull << cells;
      for (unsigned long long T = 1; T < total; ++T) {
        charge(counter, 1, limits);
        scratch.support.clear();
        for (unsigned c = 0; c < cells; ++c)
          if (T & (1ull << c)) scratch.support.push_back(c);
        if (!boolean_separated(k, scratch.support)) continue;
        fn(scratch);
      }
      if (k == 0) {
        // no blocks: the single type is the empty tuple over {0, 1}
        // (handled above: T = 1 yields support {0}), nothing more to do
      }
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      int q = kind.denominator;
      int m = k * (k - 1) / 2;
      std::vector<std::pair<int, int>> all_pairs;
      for (int x = 0; x < k; ++x)
        for (int y = x + 1; y < k; ++y) all_pairs.emplace_back(x, y);
      std::vector<int> units(static_cast<size_t>(m), 1);
      while (true) {
        charge(counter, 1, limits);
        scratch.grid.assign(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k), 0));
        for (int e = 0; e < m; ++e) {
          auto [x, y] = all_pairs[static_cast<size_t>(e)];
          scratch.grid[static_cast<size_t>(x)][static_cast<size_t>(y)] = units[static_cast<size_t>(e)];
          scratch.grid[static_cast<size_t>(y)][static_cast<size_t>(x)] = units[static_cast<size_t>(e)];
        }
        bool triangle = true;
        for (int x = 0; x < k && triangle; ++x)
          for (int y = 0; y < k && triangle; ++y)
            for (int z = 0; z < k && triangle; ++z)
              if (scratch.grid[static_cast<size_t>(x)][static_cast<size_t>(y)] >
                  scratch.grid[static_cast<size_t>(x)][static_cast<size_t>(z)] +
                      scratch.grid[static_cast<size_t>(z)][static_cast<size_t>(y)])
                triangle = false;
        if (triangle) fn(scratch);
        if (m == 0) break;
        int e = m - 1;
        while (e >= 0 && units[static_cast<size_t>(e)] == q) {
          units[static_cast<size_t>(e)] = 1;
          --e;
        }
        if (e < 0) break;
        ++units[static_cast<size_t>(e)];
      }
      break;
    }
  }
}

// Restricted growth strings: all set partitions of n positions, lex order.
void for_each_pattern(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> pattern(static_cast<size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int next) {
    if (i == n) {
      fn(pattern);
      return;
    }
    for (int b = 0; b <= next; ++b) {
      pattern[static_cast<size_t>(i)] = b;
      rec(i + 1, b == next ? next + 1 : next);
    }
  };
  if (n == 0) {
    fn(pattern);
    return;
  }
  rec(0, 0);
}

void for_each_tuple_type(ClassKind kind, int n, const Limits& limits,
                         const std::function<void(const TypeSpec&)>& fn) {
  long long counter = 0;
  for_each_pattern(n, [&](const std::vector<int>& pattern) {
    int k = max_block(pattern);
    for_each_payload(kind, k, limits, counter, [&](TypeSpec& payload) {
      payload.arity = n;
      payload.pattern = pattern;
      fn(payload);
    });
  });
}

}  // namespace

std::string TypeSpec::encode() const {
  std::ostringstream os;
  os << kind.name();
  if (kind.tag == ClassKind::Tag::UrysohnRational) os << "/" << kind.denominator;
  os << "#" << arity << "|";
  for (int b : pattern) os << b << ",";
  os << "|";
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph:
      for (auto [a, b] : edges) os << a << "-" << b << ",";
      break;
    case ClassKind::Tag::DenseLinearOrder:
      for (int r : ranks) os << r << ",";
      break;
    case ClassKind::Tag::AtomlessBoolean:
      for (unsigned c : support) os << c << ",";
      break;
    case ClassKind::Tag::UrysohnRational:
      for (const auto& row : grid)
        for (int u : row) os << u << ",";
      break;
  }
  return os.str();
}

int TypeSpec::block_count() const { return max_block(pattern); }

TypeSpec TypeSpec::distinct(ClassKind kind, int arity) {
  TypeSpec t;
  t.kind = kind;
  t.arity = arity;
  t.pattern.resize(static_cast<size_t>(arity));
  std::iota(t.pattern.begin(), t.pattern.end(), 0);
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
    case ClassKind::Tag::RandomGraph:
      break;
    case ClassKind::Tag::DenseLinearOrder: {
      t.ranks.resize(static_cast<size_t>(arity));
      std::iota(t.ranks.begin(), t.ranks.end(), 0);
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      if (arity > 4) throw DomainError("cap_exceeded", "generic boolean type arity too large");
      for (unsigned c = 0; c < (1u << arity); ++c) t.support.push_back(c);
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      if (arity > 1)
        throw DomainError("bad_type",
                          "no canonical distinct type for metric tuples of arity > 1");
      t.grid.assign(static_cast<size_t>(arity),
                    std::vector<int>(static_cast<size_t>(arity), 0));
      break;
    }
  }
  return t;
}

FiniteStructure TypeSpec::realize() const {
  int k = block_count();
  switch (kind.tag) {
    case ClassKind::Tag::PureSet:
      return FiniteStructure::pure_set(k);
    case ClassKind::Tag::RandomGraph:
      return FiniteStructure::graph(k, edges);
    case ClassKind::Tag::DenseLinearOrder:
      return FiniteStructure::linear_order(ranks);
    case ClassKind::Tag::AtomlessBoolean: {
      if (support.size() > 16)
        throw DomainError("cap_exceeded", "boolean type too large to materialize");
      return FiniteStructure::full_boolean_algebra(static_cast<int>(support.size()));
    }
    case ClassKind::Tag::UrysohnRational: {
      std::vector<std::vector<Rational>> d(
          static_cast<size_t>(k), std::vector<Rational>(static_cast<size_t>(k), Rational(0)));
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          d[static_cast<size_t>(a)][static_cast<size_t>(b)] =
              Rational(grid[static_cast<size_t>(a)][static_cast<size_t>(b)], kind.denominator);
      return FiniteStructure::metric_space(kind.denominator, d);
    }
  }
  throw DomainError("bad_kind", "unknown kind");
}

std::vector<int> TypeSpec::realize_tuple() const {
  if (kind.tag != ClassKind::Tag::AtomlessBoolean) return pattern;
  std::vector<int> tuple;
  for (int b : pattern) {
    unsigned mask = 0;
    for (size_t j = 0; j < support.size(); ++j)
      if ((support[j] >> b) & 1u) mask |= (1u << j);
    // in the full algebra over |support| atoms, element index equals mask
    tuple.push_back(static_cast<int>(mask));
  }
  return tuple;
}

TypeSpec type_of_tuple(const FiniteStructure& s, const std::vector<int>& tuple) {
  TypeSpec t;
  t.kind = s.kind;
  t.arity = static_cast<int>(tuple.size());
  std::vector<int> blocks;  // representative element of each block
  for (int e : tuple) {
    if (e < 0 || e >= s.size) throw DomainError("out_of_range", "tuple entry out of range");
    int b = -1;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i] == e) b = static_cast<int>(i);
    if (b < 0) {
      b = static_cast<int>(blocks.size());
      blocks.push_back(e);
    }
    t.pattern.push_back(b);
  }
  int k = static_cast<int>(blocks.size());
  switch (s.kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph:
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          if (s.adjacent(blocks[static_cast<size_t>(i)], blocks[static_cast<size_t>(j)]))
            t.edges.emplace_back(i, j);
      break;
    case ClassKind::Tag::DenseLinearOrder: {
      std::vector<std::pair<int, int>> by_rank;
      for (int i = 0; i < k; ++i)
        by_rank.emplace_back(s.order[static_cast<size_t>(blocks[static_cast<size_t>(i)])], i);
      std::sort(by_rank.begin(), by_rank.end());
      t.ranks.assign(static_cast<size_t>(k), 0);
      for (size_t r = 0; r < by_rank.size(); ++r)
        t.ranks[static_cast<size_t>(by_rank[r].second)] = static_cast<int>(r);
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      if (k > 20) throw DomainError("cap_exceeded", "boolean tuple too long");
      unsigned full = s.full_mask();
      for (unsigned sig = 0; sig < (1u << k); ++sig) {
        unsigned cell = full;
        for (int i = 0; i < k; ++i) {
          unsigned m = s.mask_of(blocks[static_cast<size_t>(i)]);
          cell &= ((sig >> i) & 1u) ? m : ~m;
        }
        if (cell != 0) t.support.push_back(sig);
      }
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      int q = s.kind.denominator;
      t.grid.assign(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k), 0));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          Rational units = s.distance(blocks[static_cast<size_t>(i)], blocks[static_cast<size_t>(j)]) *
                           Rational(q);
          t.grid[static_cast<size_t>(i)][static_cast<size_t>(j)] = static_cast<int>(units.num());
        }
      break;
    }
  }
  return t;
}

namespace detail {

// Restriction of a type to `count` positions starting at `begin`.
TypeSpec restrict_type(const TypeSpec& t, int begin, int count) {
  TypeSpec r;
  r.kind = t.kind;
  r.arity = count;
  std::vector<int> old_blocks;  // new block id -> old block id
  for (int i = 0; i < count; ++i) {
    int ob = t.pattern[static_cast<size_t>(begin + i)];
    int nb = -1;
    for (size_t j = 0; j < old_blocks.size(); ++j)
      if (old_blocks[j] == ob) nb = static_cast<int>(j);
    if (nb < 0) {
      nb = static_cast<int>(old_blocks.size());
      old_blocks.push_back(ob);
    }
    r.pattern.push_back(nb);
  }
  int k = static_cast<int>(old_blocks.size());
  switch (t.kind.tag) {
    case ClassKind::Tag::PureSet:
      break;
    case ClassKind::Tag::RandomGraph: {
      auto has_edge = [&](int a, int b) {
        auto p = std::minmax(a, b);
        return std::binary_search(t.edges.begin(), t.edges.end(),
                                  std::make_pair(p.first, p.second));
      };
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          if (has_edge(old_blocks[static_cast<size_t>(i)], old_blocks[static_cast<size_t>(j)]))
            r.edges.emplace_back(i, j);
      break;
    }
    case ClassKind::Tag::DenseLinearOrder: {
      std::vector<std::pair<int, int>> by_rank;
      for (int i = 0; i < k; ++i)
        by_rank.emplace_back(t.ranks[static_cast<size_t>(old_blocks[static_cast<size_t>(i)])], i);
      std::sort(by_rank.begin(), by_rank.end());
      r.ranks.assign(static_cast<size_t>(k), 0);
      for (size_t rank = 0; rank < by_rank.size(); ++rank)
        r.ranks[static_cast<size_t>(by_rank[rank].second)] = static_cast<int>(rank);
      break;
    }
    case ClassKind::Tag::AtomlessBoolean: {
      std::set<unsigned> sigs;
      for (unsigned cell : t.support) {
        unsigned sig = 0;
        for (int i = 0; i < k; ++i)
          if ((cell >> old_blocks[static_cast<size_t>(i)]) & 1u) sig |= (1u << i);
        sigs.insert(sig);
      }
      r.support.assign(sigs.begin(), sigs.end());
      break;
    }
    case ClassKind::Tag::UrysohnRational: {
      r.grid.assign(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k), 0));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          r.grid[static_cast<size_t>(i)][static_cast<size_t>(j)] =
              t.grid[static_cast<size_t>(old_blocks[static_cast<size_t>(i)])]
                    [static_cast<size_t>(old_blocks[static_cast<size_t>(j)])];
      break;
    }
  }
  return r;
}

// Joint patterns over m+n positions whose x/y restrictions are exactly the
// given patterns; distinct y-blocks may merge into distinct x-blocks.
void for_each_joint_pattern(const std::vector<int>& px, const std::vector<int>& py,
                            const std::function<void(const std::vector<int>&)>& fn) {
  int m = static_cast<int>(px.size());
  int n = static_cast<int>(py.size());
  int kx = max_block(px);
  int ky = max_block(py);
  // assignment of each y-block: an x-block or a fresh id
  std::vector<int> assign(static_cast<size_t>(ky), -1);
  std::vector<bool> x_used(static_cast<size_t>(kx), false);
  std::function<void(int)> rec = [&](int yb) {
    if (yb == ky) {
      std::vector<int> pattern(static_cast<size_t>(m + n));
      for (int i = 0; i < m; ++i) pattern[static_cast<size_t>(i)] = px[static_cast<size_t>(i)];
      // fresh ids numbered by first occurrence along y
      std::vector<int> fresh_id(static_cast<size_t>(ky), -1);
      int next = kx;
      for (int j = 0; j < n; ++j) {
        int b = py[static_cast<size_t>(j)];
        int target = assign[static_cast<size_t>(b)];
        if (target >= 0) {
          pattern[static_cast<size_t>(m + j)] = target;
        } else {
          if (fresh_id[static_cast<size_t>(b)] < 0) fresh_id[static_cast<size_t>(b)] = next++;
          pattern[static_cast<size_t>(m + j)] = fresh_id[static_cast<size_t>(b)];
        }
      }
      fn(pattern);
      return;
    }
    for (int xb = 0; xb < kx; ++xb) {
      if (x_used[static_cast<size_t>(xb)]) continue;
      assign[static_cast<size_t>(yb)] = xb;
      x_used[static_cast<size_t>(xb)] = true;
      rec(yb + 1);
      x_used[static_cast<size_t>(xb)] = false;
    }
    assign[static_cast<size_t>(yb)] = -1;  // fresh
    rec(yb + 1);
  };
  rec(0);
}

void for_each_joint_type(const TypeSpec& p, const TypeSpec& q, const Limits& limits,
                         const std::function<void(const TypeSpec&)>& fn) {
  if (p.kind != q.kind) throw DomainError("kind_mismatch", "type kinds differ");
  long long counter = 0;
  int m = p.arity, n = q.arity;

  if (p.kind.tag == ClassKind::Tag::AtomlessBoolean) {
    // hot path: supports are bitmasks over joint cells; restrictions and
    // block separation reduce to precomputed per-cell signatures
    for_each_joint_pattern(p.pattern, q.pattern, [&](const std::vector<int>& pattern) {
      int k = max_block(pattern);
      if (k > 4) throw DomainError("cap_exceeded", "boolean payload arity too large");
      unsigned cells = 1u << k;
      // sub-block numbering must match restrict_type's first-occurrence order
      auto sub_blocks = [&](int begin, int count) {
        std::vector<int> of_joint(static_cast<size_t>(k), -1);
        int next = 0;
        for (int i = 0; i < count; ++i) {
          int jb = pattern[static_cast<size_t>(begin + i)];
          if (of_joint[static_cast<size_t>(jb)] < 0) of_joint[static_cast<size_t>(jb)] = next++;
        }
        return of_joint;
      };
      std::vector<int> x_of = sub_blocks(0, m), y_of = sub_blocks(m, n);
      std::vector<unsigned> xsig(cells, 0), ysig(cells, 0);
      for (unsigned c = 0; c < cells; ++c)
        for (int b = 0; b < k; ++b)
          if ((c >> b) & 1u) {
            if (x_of[static_cast<size_t>(b)] >= 0) xsig[c] |= (1u << x_of[static_cast<size_t>(b)]);
            if (y_of[static_cast<size_t>(b)] >= 0) ysig[c] |= (1u << y_of[static_cast<size_t>(b)]);
          }
      unsigned p_mask = 0, q_mask = 0;
      for (unsigned s : p.support) p_mask |= (1u << s);
      for (unsigned s : q.support) q_mask |= (1u << s);
      std::vector<unsigned long long> sep;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          unsigned long long mask = 0;
          for (unsigned c = 0; c < cells; ++c)
            if (((c >> i) & 1u) != ((c >> j) & 1u)) mask |= (1ull << c);
          sep.push_back(mask);
        }
      TypeSpec scratch;
      scratch.kind = p.kind;
      scratch.arity = m + n;
      scratch.pattern = pattern;
      unsigned long long total = 1ull << cells;
      for (unsigned long long T = 1; T < total; ++T) {
        charge(counter, 1, limits);
        bool ok = true;
        for (unsigned long long s : sep)
          if (!(T & s)) {
            ok = false;
            break;
          }
        if (!ok) continue;
        unsigned seen_x = 0, seen_y = 0;
        for (unsigned long long rest = T; rest;) {
          unsigned c = static_cast<unsigned>(__builtin_ctzll(rest));
          rest &= rest - 1;
          seen_x |= (1u << xsig[c]);
          seen_y |= (1u << ysig[c]);
        }
        if (seen_x != p_mask || seen_y != q_mask) continue;
        scratch.support.clear();
        for (unsigned c = 0; c < cells; ++c)
          if (T & (1ull << c)) scratch.support.push_back(c);
        fn(scratch);
      }
    });
    return;
  }

  for_each_joint_pattern(p.pattern, q.pattern, [&](const std::vector<int>& pattern) {
    int k = max_block(pattern);
    for_each_payload(p.kind, k, limits, counter, [&](TypeSpec& payload) {
      payload.arity = m + n;
      payload.pattern = pattern;
      if (!(restrict_type(payload, 0, m) == p)) return;
      if (!(restrict_type(payload, m, n) == q)) return;
      fn(payload);
    });
  });
}

Configuration materialize_configuration(const TypeSpec& t, int m, int n) {
  Configuration c;
  c.structure = t.realize();
  std::vector<int> tuple = t.realize_tuple();
  c.xs.assign(tuple.begin(), tuple.begin() + m);
  c.ys.assign(tuple.begin() + m, tuple.begin() + m + n);
  return c;
}

}  // namespace detail

std::string Configuration::encode() const {
  std::ostringstream os;
  os << structure.encode() << "|xs:";
  for (int x : xs) os << x << ",";
  os << "|ys:";
  for (int y : ys) os << y << ",";
  return os.str();
}

std::vector<int> equality_pattern(const Configuration& c) {
  std::vector<int> all = c.xs;
  all.insert(all.end(), c.ys.begin(), c.ys.end());
  std::vector<int> blocks;
  std::vector<int> pattern;
  for (int e : all) {
    int b = -1;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (blocks[i] == e) b = static_cast<int>(i);
    if (b < 0) {
      b = static_cast<int>(blocks.size());
      blocks.push_back(e);
    }
    pattern.push_back(b);
  }
  return pattern;
}

std::vector<TypeSpec> enumerate_tuple_types(ClassKind kind, int n, const Limits& limits) {
  std::vector<TypeSpec> out;
  for_each_tuple_type(kind, n, limits, [&](const TypeSpec& t) { out.push_back(t); });
  std::sort(out.begin(), out.end(),
            [](const TypeSpec& a, const TypeSpec& b) { return a.encode() < b.encode(); });
  return out;
}

long long count_orbits(ClassKind kind, int n, const Limits& limits) {
  long long count = 0;
  for_each_tuple_type(kind, n, limits, [&](const TypeSpec&) { ++count; });
  return count;
}

std::vector<Configuration> enumerate_pair_types(ClassKind kind, int n, const Limits& limits) {
  TypeSpec window = TypeSpec::distinct(ClassKind::pure_set(), n);  // injective pattern only
  std::vector<Configuration> out;
  long long counter = 0;
  detail::for_each_joint_pattern(window.pattern, window.pattern,
                                 [&](const std::vector<int>& pattern) {
    int k = max_block(pattern);
    for_each_payload(kind, k, limits, counter, [&](TypeSpec& payload) {
      payload.arity = 2 * n;
      payload.pattern = pattern;
      TypeSpec left = detail::restrict_type(payload, 0, n);
      TypeSpec right = detail::restrict_type(payload, n, n);
      if (!(left == right)) return;  // both windows must carry the same type
      if (kind.tag == ClassKind::Tag::AtomlessBoolean)
        charge(counter, 1LL << payload.support.size(), limits);
      out.push_back(detail::materialize_configuration(payload, n, n));
    });
  });
  std::sort(out.begin(), out.end(), [](const Configuration& a, const Configuration& b) {
    return a.encode() < b.encode();
  });
  return out;
}

std::vector<Configuration> enumerate_joint_configurations(
    const TypeSpec& p, const TypeSpec& q, const Limits& limits,
    const std::function<bool(const Configuration&)>& accept) {
  std::vector<Configuration> out;
  long long material = 0;
  detail::for_each_joint_type(p, q, limits, [&](const TypeSpec& t) {
    if (t.kind.tag == ClassKind::Tag::AtomlessBoolean) {
      material += 1LL << t.support.size();
      if (material > limits.enumeration_cap)
        throw DomainError("cap_exceeded", "configuration materialization exceeds cap");
    }
    Configuration c = detail::materialize_configuration(t, p.arity, q.arity);
    if (accept && !accept(c)) return;
    out.push_back(std::move(c));
  });
  std::sort(out.begin(), out.end(), [](const Configuration& a, const Configuration& b) {
    return a.encode() < b.encode();
  });
  return out;
}

}  // namespace oligoscope
