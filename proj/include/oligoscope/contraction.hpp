#ifndef OLIGOSCOPE_CONTRACTION_HPP_
#define OLIGOSCOPE_CONTRACTION_HPP_

#include <complex>
#include <vector>

#include "oligoscope/limits.hpp"

namespace oligoscope {

// A finite-rank operator, kept inside the unit ball of operators by a
// tolerance-checked norm bound.
struct ContractionMatrix {
  int n = 0;
  std::vector<std::complex<double>> e;  // row-major

  static ContractionMatrix identity(int n);
  static ContractionMatrix zero(int n);

  const std::complex<double>& at(int i, int j) const { return e[static_cast<size_t>(i * n + j)]; }
  std::complex<double>& at(int i, int j) { return e[static_cast<size_t>(i * n + j)]; }

  void check_contraction(double tol) const;  // throws if operator norm > 1 + tol
};

ContractionMatrix contraction_compose(const ContractionMatrix& a, const ContractionMatrix& b,
                                      double tol = 1e-9);
ContractionMatrix contraction_adjoint(const ContractionMatrix& a);

// Largest singular value with certified two-sided bounds: Rayleigh quotients
// of the powered Gram matrix from below, normalized traces from above.
// Throws DomainError("no_convergence", ...) if the gap stays above tol.
double operator_norm(const ContractionMatrix& a, double tol = 1e-9, int max_iterations = 128);

// Finite-rank shadow of "idempotents are self-adjoint": an idempotent inside
// the unit ball must be an orthogonal projection.  Returns true when e is
// self-adjoint within tol; otherwise its operator norm provably exceeds 1 and
// the function returns false after asserting that.
bool check_projection(const ContractionMatrix& e, double tol = 1e-9);

}  // namespace oligoscope

#endif  // OLIGOSCOPE_CONTRACTION_HPP_
