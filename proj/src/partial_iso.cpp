#include "oligoscope/partial_iso.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace oligoscope {

PartialIso PartialIso::identity(ClassKind kind, int window) {
  PartialIso p;
  p.kind = kind;
  p.window = window;
  for (int i = 0; i < window; ++i) p.pairs.emplace_back(i, i);
  return p;
}

PartialIso PartialIso::empty(ClassKind kind, int window) {
  PartialIso p;
  p.kind = kind;
  p.window = window;
  return p;
}

PartialIso PartialIso::partial_identity(ClassKind kind, int window,
                                        const std::vector<int>& subset) {
  PartialIso p;
  p.kind = kind;
  p.window = window;
  for (int a : subset) p.pairs.emplace_back(a, a);
  std::sort(p.pairs.begin(), p.pairs.end());
  p.validate();
  return p;
}

PartialIso PartialIso::from_permutation(ClassKind kind, const std::vector<int>& images) {
  PartialIso p;
  p.kind = kind;
  p.window = static_cast<int>(images.size());
  for (size_t i = 0; i < images.size(); ++i)
    p.pairs.emplace_back(static_cast<int>(i), images[i]);
  p.validate();
  return p;
}

PartialIso PartialIso::with_context(FiniteStructure left, FiniteStructure right) const {
  PartialIso p = *this;
  p.context = std::make_pair(std::move(left), std::move(right));
  p.validate();
  return p;
}

void PartialIso::validate() const {
  if (window < 0) throw DomainError("bad_partial_iso", "negative window");
  std::vector<bool> dom(static_cast<size_t>(window), false), ran(static_cast<size_t>(window), false);
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= window || b >= window)
      throw DomainError("bad_partial_iso", "pair out of window");
    if (dom[static_cast<size_t>(a)]) throw DomainError("bad_partial_iso", "repeated first coordinate");
    if (ran[static_cast<size_t>(b)]) throw DomainError("bad_partial_iso", "repeated second coordinate");
    dom[static_cast<size_t>(a)] = ran[static_cast<size_t>(b)] = true;
  }
  if (!std::is_sorted(pairs.begin(), pairs.end()))
    throw DomainError("bad_partial_iso", "pairs not sorted");
  if (context) {
    const auto& [left, right] = *context;
    if (left.kind != kind || right.kind != kind)
      throw DomainError("kind_mismatch", "context kind differs");
    if (left.size != window || right.size != window)
      throw DomainError("bad_partial_iso", "context size differs from window");
    std::vector<int> d, r;
    for (auto [a, b] : pairs) {
      d.push_back(a);
      r.push_back(b);
    }
    // the induced map dom -> ran must be an isomorphism of induced substructures
    if (kind.tag == ClassKind::Tag::AtomlessBoolean) {
      // check directly on cells of the mapped tuples
      std::vector<int> dom_t = d, ran_t = r;
      // zero/nonzero cell patterns must agree
      size_t k = dom_t.size();
      if (k > 20) throw DomainError("cap_exceeded", "partial iso support too large");
      unsigned lfull = left.full_mask(), rfull = right.full_mask();
      for (unsigned sig = 0; sig < (1u << k); ++sig) {
        unsigned cl = lfull, cr = rfull;
        for (size_t i = 0; i < k; ++i) {
          unsigned ml = left.mask_of(dom_t[i]), mr = right.mask_of(ran_t[i]);
          cl &= ((sig >> i) & 1u) ? ml : ~ml;
          cr &= ((sig >> i) & 1u) ? mr : ~mr;
        }
        if ((cl == 0) != (cr == 0))
          throw DomainError("bad_partial_iso", "induced map is not an isomorphism");
      }
    } else {
      for (size_t i = 0; i < d.size(); ++i)
        for (size_t j = i + 1; j < d.size(); ++j) {
          bool ok = true;
          switch (kind.tag) {
            case ClassKind::Tag::PureSet: break;
            case ClassKind::Tag::RandomGraph:
              ok = left.adjacent(d[i], d[j]) == right.adjacent(r[i], r[j]);
              break;
            case ClassKind::Tag::DenseLinearOrder:
              ok = left.less(d[i], d[j]) == right.less(r[i], r[j]);
              break;
            case ClassKind::Tag::UrysohnRational:
              ok = left.distance(d[i], d[j]) == right.distance(r[i], r[j]);
              break;
            case ClassKind::Tag::AtomlessBoolean: break;
          }
          if (!ok) throw DomainError("bad_partial_iso", "induced map is not an isomorphism");
        }
    }
  }
}

std::vector<int> PartialIso::domain() const {
  std::vector<int> d;
  for (auto [a, b] : pairs) {
    (void)b;
    d.push_back(a);
  }
  return d;
}

std::vector<int> PartialIso::range() const {
  std::vector<int> r;
  for (auto [a, b] : pairs) {
    (void)a;
    r.push_back(b);
  }
  std::sort(r.begin(), r.end());
  return r;
}

bool PartialIso::is_partial_identity() const {
  for (auto [a, b] : pairs)
    if (a != b) return false;
  return true;
}

std::optional<int> PartialIso::apply(int a) const {
  for (auto [x, y] : pairs)
    if (x == a) return y;
  return std::nullopt;
}

std::string PartialIso::encode() const {
  std::ostringstream os;
  for (auto [a, b] : pairs) os << a << ">" << b << ",";
  return os.str();
}

namespace {

void check_composable(const PartialIso& p, const PartialIso& q) {
  if (p.kind != q.kind) throw DomainError("kind_mismatch", "kinds differ");
  if (p.window != q.window) throw DomainError("window_mismatch", "windows differ");
  if (p.context && q.context && !(p.context->second == q.context->first))
    throw DomainError("context_mismatch", "inner contexts differ");
}

}  // namespace

PartialIso compose(const PartialIso& p, const PartialIso& q) {
  check_composable(p, q);
  PartialIso r;
  r.kind = p.kind;
  r.window = p.window;
  for (auto [a, b] : p.pairs) {
    auto c = q.apply(b);
    if (c) r.pairs.emplace_back(a, *c);
  }
  std::sort(r.pairs.begin(), r.pairs.end());
  if (p.context && q.context) r.context = std::make_pair(p.context->first, q.context->second);
  return r;
}

PartialIso involution(const PartialIso& p) {
  PartialIso r;
  r.kind = p.kind;
  r.window = p.window;
  for (auto [a, b] : p.pairs) r.pairs.emplace_back(b, a);
  std::sort(r.pairs.begin(), r.pairs.end());
  if (p.context) r.context = std::make_pair(p.context->second, p.context->first);
  return r;
}

bool is_idempotent(const PartialIso& p) { return compose(p, p).same_graph(p); }

std::vector<PartialIso> all_partial_isos(const FiniteStructure& window_structure) {
  int n = window_structure.size;
  std::vector<PartialIso> out;
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> used(static_cast<size_t>(n), false);

  // recurse over elements; each is unmapped or mapped to an unused target
  std::function<void(int)> rec = [&](int a) {
    if (a == n) {
      PartialIso p;
      p.kind = window_structure.kind;
      p.window = n;
      p.pairs = pairs;
      p.context = std::make_pair(window_structure, window_structure);
      try {
        p.validate();
      } catch (const DomainError&) {
        return;
      }
      out.push_back(std::move(p));
      return;
    }
    rec(a + 1);  // a unmapped
    for (int b = 0; b < n; ++b) {
      if (used[static_cast<size_t>(b)]) continue;
      bool ok = true;
      for (auto [x, y] : pairs) {
        switch (window_structure.kind.tag) {
          case ClassKind::Tag::PureSet:
          case ClassKind::Tag::AtomlessBoolean:
            break;
          case ClassKind::Tag::RandomGraph:
            ok = window_structure.adjacent(x, a) == window_structure.adjacent(y, b);
            break;
          case ClassKind::Tag::DenseLinearOrder:
            ok = window_structure.less(x, a) == window_structure.less(y, b);
            break;
          case ClassKind::Tag::UrysohnRational:
            ok = window_structure.distance(x, a) == window_structure.distance(y, b);
            break;
        }
        if (!ok) break;
      }
      if (!ok) continue;
      pairs.emplace_back(a, b);
      used[static_cast<size_t>(b)] = true;
      rec(a + 1);
      used[static_cast<size_t>(b)] = false;
      pairs.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end(),
            [](const PartialIso& a, const PartialIso& b) { return a.encode() < b.encode(); });
  return out;
}

std::vector<PartialIso> all_partial_isos(ClassKind kind, int window) {
  if (kind.tag != ClassKind::Tag::PureSet)
    throw DomainError("context_required", "non pure-set windows need a window structure");
  std::vector<PartialIso> out = all_partial_isos(FiniteStructure::pure_set(window));
  for (auto& p : out) p.context.reset();
  return out;
}

}  // namespace oligoscope
