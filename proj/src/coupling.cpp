#include "oligoscope/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "oligoscope/error.hpp"

namespace oligoscope {

CouplingMatrix::CouplingMatrix(int n, std::vector<Rational> entries) : n_(n), e_(std::move(entries)) {
  validate();
}

void CouplingMatrix::validate() const {
  if (n_ <= 0) throw DomainError("bad_coupling", "rank must be positive");
  if (static_cast<int>(e_.size()) != n_ * n_)
    throw DomainError("bad_coupling", "entry count differs from rank^2");
  Rational marginal(1, n_);
  for (int i = 0; i < n_; ++i) {
    Rational row(0), col(0);
    for (int j = 0; j < n_; ++j) {
      if (at(i, j) < Rational(0)) throw DomainError("bad_coupling", "negative entry");
      row += at(i, j);
      col += at(j, i);
    }
    if (row != marginal || col != marginal)
      throw DomainError("bad_coupling", "marginals differ from 1/n");
  }
}

CouplingMatrix CouplingMatrix::identity(int n) {
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i) e[static_cast<size_t>(i * n + i)] = Rational(1, n);
  return CouplingMatrix(n, std::move(e));
}

CouplingMatrix CouplingMatrix::independent(int n) {
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(1, static_cast<long long>(n) * n));
  return CouplingMatrix(n, std::move(e));
}

CouplingMatrix CouplingMatrix::permutation(const std::vector<int>& images) {
  int n = static_cast<int>(images.size());
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i) {
    int j = images[static_cast<size_t>(i)];
    if (j < 0 || j >= n) throw DomainError("bad_permutation", "image out of range");
    e[static_cast<size_t>(i * n + j)] = Rational(1, n);
  }
  return CouplingMatrix(n, std::move(e));
}

CouplingMatrix CouplingMatrix::from_partition(int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<int> block_of(static_cast<size_t>(n), -1);
  std::vector<int> block_size;
  for (size_t b = 0; b < blocks.size(); ++b) {
    for (int v : blocks[b]) {
      if (v < 0 || v >= n || block_of[static_cast<size_t>(v)] != -1)
        throw DomainError("bad_partition", "blocks must partition {0..n-1}");
      block_of[static_cast<size_t>(v)] = static_cast<int>(b);
    }
    block_size.push_back(static_cast<int>(blocks[b].size()));
  }
  for (int v = 0; v < n; ++v)
    if (block_of[static_cast<size_t>(v)] < 0)
      throw DomainError("bad_partition", "blocks must cover {0..n-1}");
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (block_of[static_cast<size_t>(i)] == block_of[static_cast<size_t>(j)])
        e[static_cast<size_t>(i * n + j)] =
            Rational(1, static_cast<long long>(n) *
                            block_size[static_cast<size_t>(block_of[static_cast<size_t>(i)])]);
  return CouplingMatrix(n, std::move(e));
}

CouplingMatrix coupling_compose(const CouplingMatrix& a, const CouplingMatrix& b) {
  if (a.rank() != b.rank()) throw DomainError("rank_mismatch", "coupling ranks differ");
  int n = a.rank();
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      Rational s(0);
      for (int j = 0; j < n; ++j) s += a.at(i, j) * b.at(j, k);
      e[static_cast<size_t>(i * n + k)] = s * Rational(n);
    }
  return CouplingMatrix(n, std::move(e));
}

CouplingMatrix coupling_involution(const CouplingMatrix& a) {
  int n = a.rank();
  std::vector<Rational> e(static_cast<size_t>(n * n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e[static_cast<size_t>(i * n + j)] = a.at(j, i);
  return CouplingMatrix(n, std::move(e));
}

bool coupling_is_idempotent(const CouplingMatrix& a) { return coupling_compose(a, a) == a; }

std::vector<std::vector<std::vector<int>>> set_partitions(int n, const Limits& limits) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> block_of(static_cast<size_t>(n), 0);
  long long count = 0;
  std::function<void(int, int)> rec = [&](int i, int next) {
    if (i == n) {
      if (++count > limits.enumeration_cap)
        throw DomainError("cap_exceeded", "partition enumeration exceeds cap");
      std::vector<std::vector<int>> blocks(static_cast<size_t>(next));
      for (int v = 0; v < n; ++v) blocks[static_cast<size_t>(block_of[static_cast<size_t>(v)])].push_back(v);
      out.push_back(std::move(blocks));
      return;
    }
    for (int b = 0; b <= next; ++b) {
      block_of[static_cast<size_t>(i)] = b;
      rec(i + 1, b == next ? next + 1 : next);
    }
  };
  if (n == 0) {
    out.push_back({});
    return out;
  }
  rec(0, 0);
  return out;
}

std::vector<CouplingMatrix> coupling_idempotent_scan(int n, const Limits& limits) {
  std::vector<CouplingMatrix> out;
  for (const auto& blocks : set_partitions(n, limits)) {
    CouplingMatrix e = CouplingMatrix::from_partition(n, blocks);
    if (!coupling_is_idempotent(e))
      throw DomainError("internal", "partition coupling is not idempotent");
    if (!(coupling_involution(e) == e))
      throw DomainError("internal", "partition coupling is not self-adjoint");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CouplingMatrix> coupling_idempotent_scan(const std::vector<CouplingMatrix>& candidates) {
  std::vector<CouplingMatrix> out;
  for (const auto& c : candidates)
    if (coupling_is_idempotent(c)) out.push_back(c);
  return out;
}

std::vector<CouplingMatrix> coupling_central_idempotents(int n, const Limits& limits) {
  std::vector<std::vector<int>> perm_images;
  std::vector<int> id(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) id[static_cast<size_t>(i)] = i;
  std::vector<int> p = id;
  long long count = 0;
  do {
    if (++count > limits.enumeration_cap)
      throw DomainError("cap_exceeded", "permutation scan exceeds cap");
    perm_images.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  std::vector<CouplingMatrix> out;
  for (const auto& blocks : set_partitions(n, limits)) {
    CouplingMatrix e = CouplingMatrix::from_partition(n, blocks);
    bool central = true;
    for (const auto& images : perm_images) {
      CouplingMatrix g = CouplingMatrix::permutation(images);
      if (!(coupling_compose(e, g) == coupling_compose(g, e))) {
        central = false;
        break;
      }
    }
    if (central) out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::vector<int>> partition_join(int n, const std::vector<std::vector<int>>& p,
                                             const std::vector<std::vector<int>>& q) {
  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int v) {
    while (parent[static_cast<size_t>(v)] != v) v = parent[static_cast<size_t>(v)];
    return v;
  };
  auto unite_blocks = [&](const std::vector<std::vector<int>>& blocks) {
    for (const auto& b : blocks)
      for (size_t i = 1; i < b.size(); ++i)
        parent[static_cast<size_t>(find(b[i]))] = find(b[0]);
  };
  unite_blocks(p);
  unite_blocks(q);
  std::vector<std::vector<int>> roots(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) roots[static_cast<size_t>(find(v))].push_back(v);
  std::vector<std::vector<int>> out;
  for (auto& b : roots)
    if (!b.empty()) out.push_back(std::move(b));
  return out;
}

CouplingMatrixF CouplingMatrixF::from_exact(const CouplingMatrix& a) {
  CouplingMatrixF f;
  f.n = a.rank();
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) f.e.push_back(a.at(i, j).to_double());
  return f;
}

void CouplingMatrixF::check_marginals(double tol) const {
  double marginal = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    double row = 0, col = 0;
    for (int j = 0; j < n; ++j) {
      row += e[static_cast<size_t>(i * n + j)];
      col += e[static_cast<size_t>(j * n + i)];
    }
    if (std::abs(row - marginal) > n * tol || std::abs(col - marginal) > n * tol)
      throw DomainError("bad_coupling", "marginals violated beyond tolerance");
  }
}

CouplingMatrixF coupling_compose(const CouplingMatrixF& a, const CouplingMatrixF& b) {
  if (a.n != b.n) throw DomainError("rank_mismatch", "coupling ranks differ");
  CouplingMatrixF c;
  c.n = a.n;
  c.e.assign(static_cast<size_t>(a.n) * a.n, 0.0);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      double s = 0;
      for (int j = 0; j < a.n; ++j)
        s += a.e[static_cast<size_t>(i * a.n + j)] * b.e[static_cast<size_t>(j * a.n + k)];
      c.e[static_cast<size_t>(i * a.n + k)] = s * a.n;
    }
  return c;
}

}  // namespace oligoscope
