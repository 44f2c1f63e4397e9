#include "oligoscope/contraction.hpp"

#include <cmath>

#include "oligoscope/error.hpp"

namespace oligoscope {

namespace {

using CMat = std::vector<std::complex<double>>;

CMat multiply(const CMat& a, const CMat& b, int n) {
  CMat c(static_cast<size_t>(n) * n, {0.0, 0.0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::complex<double> s = 0;
      for (int k = 0; k < n; ++k)
        s += a[static_cast<size_t>(i * n + k)] * b[static_cast<size_t>(k * n + j)];
      c[static_cast<size_t>(i * n + j)] = s;
    }
  return c;
}

CMat adjoint_of(const CMat& a, int n) {
  CMat c(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c[static_cast<size_t>(i * n + j)] = std::conj(a[static_cast<size_t>(j * n + i)]);
  return c;
}

double trace_real(const CMat& a, int n) {
  double t = 0;
  for (int i = 0; i < n; ++i) t += a[static_cast<size_t>(i * n + i)].real();
  return t;
}

double frobenius(const CMat& a) {
  double s = 0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

ContractionMatrix ContractionMatrix::identity(int n) {
  ContractionMatrix m;
  m.n = n;
  m.e.assign(static_cast<size_t>(n) * n, {0.0, 0.0});
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

ContractionMatrix ContractionMatrix::zero(int n) {
  ContractionMatrix m;
  m.n = n;
  m.e.assign(static_cast<size_t>(n) * n, {0.0, 0.0});
  return m;
}

void ContractionMatrix::check_contraction(double tol) const {
  if (operator_norm(*this, tol) > 1.0 + tol)
    throw DomainError("not_contraction", "operator norm exceeds 1");
}

ContractionMatrix contraction_compose(const ContractionMatrix& a, const ContractionMatrix& b,
                                      double tol) {
  if (a.n != b.n) throw DomainError("rank_mismatch", "contraction ranks differ");
  ContractionMatrix c;
  c.n = a.n;
  c.e = multiply(a.e, b.e, a.n);
  // submultiplicativity, checked rather than assumed
  double na = operator_norm(a, tol), nb = operator_norm(b, tol), nc = operator_norm(c, tol);
  if (nc > na * nb + 10 * tol)
    throw DomainError("internal", "norm submultiplicativity violated");
  return c;
}

ContractionMatrix contraction_adjoint(const ContractionMatrix& a) {
  ContractionMatrix c;
  c.n = a.n;
  c.e = adjoint_of(a.e, a.n);
  return c;
}

double operator_norm(const ContractionMatrix& a, double tol, int max_iterations) {
  int n = a.n;
  if (n == 0) return 0.0;
  CMat gram = multiply(adjoint_of(a.e, n), a.e, n);  // hermitian PSD
  double top = trace_real(gram, n);
  if (top <= 0) return 0.0;

  // Repeated squaring of the Gram matrix, rescaled to avoid overflow.
  // After m squarings M ~ gram^{2^m} / scale:
  //   upper: tr(gram^{2^m})^{1/2^m} >= lambda_max, converging down;
  //   lower: Rayleigh quotient of gram at a dominant column, converging up.
  CMat m = gram;
  double log_scale = 0.0;  // log of the cumulative normalization
  double power = 1.0;      // 2^m
  double lower = 0.0, upper = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    double tr = trace_real(m, n);
    if (!(tr > 0)) break;
    upper = std::exp((std::log(tr) + log_scale) / power);

    // dominant column of m as the Rayleigh vector
    int best_col = 0;
    double best = -1;
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += std::norm(m[static_cast<size_t>(i * n + j)]);
      if (s > best) {
        best = s;
        best_col = j;
      }
    }
    std::vector<std::complex<double>> v(static_cast<size_t>(n));
    double vv = 0;
    for (int i = 0; i < n; ++i) {
      v[static_cast<size_t>(i)] = m[static_cast<size_t>(i * n + best_col)];
      vv += std::norm(v[static_cast<size_t>(i)]);
    }
    if (vv > 0) {
      std::complex<double> vgv = 0;
      for (int i = 0; i < n; ++i) {
        std::complex<double> gi = 0;
        for (int k = 0; k < n; ++k) gi += gram[static_cast<size_t>(i * n + k)] * v[static_cast<size_t>(k)];
        vgv += std::conj(v[static_cast<size_t>(i)]) * gi;
      }
      lower = std::max(lower, vgv.real() / vv);
    }

    if (upper - lower <= tol * std::max(1.0, upper))
      return std::sqrt((upper + lower) / 2);

    double f = frobenius(m);
    if (!(f > 0)) break;
    for (auto& z : m) z /= f;
    log_scale = 2 * (log_scale + std::log(f));
    m = multiply(m, m, n);
    power *= 2;
  }
  if (upper - lower <= std::sqrt(tol) * std::max(1.0, upper))
    return std::sqrt((upper + lower) / 2);
  throw DomainError("no_convergence", "operator norm bounds did not converge");
}

bool check_projection(const ContractionMatrix& e, double tol) {
  ContractionMatrix sq;
  sq.n = e.n;
  sq.e = multiply(e.e, e.e, e.n);
  double idem_gap = 0;
  for (size_t i = 0; i < e.e.size(); ++i) idem_gap = std::max(idem_gap, std::abs(sq.e[i] - e.e[i]));
  if (idem_gap > tol) throw DomainError("not_idempotent", "input is not idempotent within tolerance");

  ContractionMatrix adj = contraction_adjoint(e);
  double sa_gap = 0;
  for (size_t i = 0; i < e.e.size(); ++i) sa_gap = std::max(sa_gap, std::abs(adj.e[i] - e.e[i]));
  if (sa_gap <= tol) return true;

  // a non-self-adjoint idempotent cannot be a contraction
  double norm = operator_norm(e, tol);
  if (norm <= 1.0 + tol)
    throw DomainError("internal", "non-self-adjoint idempotent inside the unit ball");
  return false;
}

}  // namespace oligoscope
