#ifndef OLIGOSCOPE_COUPLING_HPP_
#define OLIGOSCOPE_COUPLING_HPP_

#include <string>
#include <vector>

#include "oligoscope/limits.hpp"
#include "oligoscope/rational.hpp"

namespace oligoscope {

// A self-coupling of the uniform measure on n points: nonnegative entries
// with every row and column summing to 1/n (i.e. (1/n) times a doubly
// stochastic matrix).  Exact rational arithmetic throughout.
class CouplingMatrix {
 public:
  CouplingMatrix(int n, std::vector<Rational> entries);  // row-major, validated

  static CouplingMatrix identity(int n);      // diag(1/n)
  static CouplingMatrix independent(int n);   // all entries 1/n^2
  static CouplingMatrix permutation(const std::vector<int>& images);
  static CouplingMatrix from_partition(int n, const std::vector<std::vector<int>>& blocks);

  int rank() const { return n_; }
  const Rational& at(int i, int j) const { return e_[static_cast<size_t>(i * n_ + j)]; }

  bool operator==(const CouplingMatrix& o) const { return n_ == o.n_ && e_ == o.e_; }

 private:
  void validate() const;
  int n_;
  std::vector<Rational> e_;
};

// Discretized fiberwise product for uniform marginals:
// C[i][k] = n * sum_j a[i][j] * b[j][k].
CouplingMatrix coupling_compose(const CouplingMatrix& a, const CouplingMatrix& b);
CouplingMatrix coupling_involution(const CouplingMatrix& a);
bool coupling_is_idempotent(const CouplingMatrix& a);

// All set partitions of {0..n-1} in a deterministic order.
std::vector<std::vector<std::vector<int>>> set_partitions(int n, const Limits& limits = {});

// Partition idempotents (all of them in "partitions" mode), each checked to be
// idempotent and self-adjoint; or the subset of `candidates` that squares to
// itself.
std::vector<CouplingMatrix> coupling_idempotent_scan(int n, const Limits& limits = {});
std::vector<CouplingMatrix> coupling_idempotent_scan(const std::vector<CouplingMatrix>& candidates);

// Partition idempotents commuting with every permutation coupling; exactly the
// identity and independent couplings for n >= 2.
std::vector<CouplingMatrix> coupling_central_idempotents(int n, const Limits& limits = {});

// Join (finest common coarsening) of two partitions.
std::vector<std::vector<int>> partition_join(int n, const std::vector<std::vector<int>>& p,
                                             const std::vector<std::vector<int>>& q);

// Float-tolerance twin used where exactness is not required.
struct CouplingMatrixF {
  int n = 0;
  std::vector<double> e;  // row-major

  static CouplingMatrixF from_exact(const CouplingMatrix& a);
  void check_marginals(double tol) const;  // throws beyond n * tol
};

CouplingMatrixF coupling_compose(const CouplingMatrixF& a, const CouplingMatrixF& b);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_COUPLING_HPP_
