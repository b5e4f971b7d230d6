#pragma once
// Non-archimedean local heights and local height integrals for PGL_n over Q_p.
//
// A primitive integral matrix g (entries coprime, det != 0) has a Cartan
// decomposition g = k1 * diag(p^{m_1},...,p^{m_n}) * k2 with k1,k2 in
// GL_n(Z_p) and m_1 <= ... <= m_n, m_1 = 0.  The nonnegative exponents
// a_i = m_{i+1} - m_i >= 0 (i = 1..n-1) record the cell of g, and the local
// height attached to s = (s_1,...,s_{n-1}) is p^{sum_i s_i a_i}.
//
// The local height integral sums vol(cell(a)) * p^{-<s,a>} over all cells;
// cell volumes come from hecke_volume().  cell_sum_local_integral truncates
// the sum to the box max_i a_i <= a_max and returns a rigorous bound on the
// discarded tail.

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "manin/qcounts.hpp"
#include "manin/rootsys.hpp"

namespace manin {

struct CartanExponents {
  std::vector<int> a;  // a_i = m_{i+1} - m_i, size n-1
  long long p = 0;
};

// Integral matrix with gcd of entries 1 and nonzero determinant, stored exactly.
// canonical() divides out the content and normalizes the sign so the first
// nonzero entry (row-major) is positive.
struct PrimitiveMatrix {
  int n = 0;
  std::vector<mpz_class> e;  // row-major, size n*n

  static PrimitiveMatrix canonical(int n, std::vector<mpz_class> entries);
  static PrimitiveMatrix raw(int n, std::vector<mpz_class> entries);

  const mpz_class& at(int i, int j) const { return e[static_cast<size_t>(i) * n + j]; }
  mpz_class& at(int i, int j) { return e[static_cast<size_t>(i) * n + j]; }
  mpz_class det() const;  // exact, fraction-free elimination
};

// Diagonal of the Smith normal form (d_1 | d_2 | ... | d_n, all positive).
std::vector<mpz_class> snf_diagonal(const PrimitiveMatrix& g);

// p-part exponents of the SNF diagonal computed two independent ways:
// by elimination (snf_diagonal) and by gcds of k x k minors.  Both are exposed
// so tests can cross-check them.
std::vector<int> snf_exponents_elimination(const PrimitiveMatrix& g, long long p);
std::vector<int> snf_exponents_minors(const PrimitiveMatrix& g, long long p);

// Cartan cell of a primitive matrix at p: a_i = m_{i+1} - m_i from the sorted
// p-adic elementary divisor exponents (m_1 = 0 by primitivity at p... not
// assumed: the minimum is subtracted).
CartanExponents smith_exponents(const PrimitiveMatrix& g, long long p);

// p^{sum_i s_i a_i} as a long double, and exactly as a rational when every
// s_i is a nonnegative integer.
long double local_height(const std::vector<long double>& s, const CartanExponents& ce);
mpq_class local_height_exact(const std::vector<long long>& s, const CartanExponents& ce);

// Consistency check used by tests: the height of g computed from its Cartan
// cell equals the height computed from the elementary divisors directly.
// Returns the pair (cell route, divisor route) as exact rationals; integer s.
std::pair<mpq_class, mpq_class> schwartz_height_check(const PrimitiveMatrix& g,
                                                      long long p,
                                                      const std::vector<long long>& s);

struct CellSum {
  std::complex<long double> value{0.0L, 0.0L};
  long double tail_bound = 0.0L;  // rigorous bound on |discarded terms|
};

// Sum of vol(cell(a)) * chi(a) * p^{-<s,a>} over the box 0 <= a_i <= a_max.
// chi is an optional unit-modulus twist: chi(a) = prod_i twist[i]^{a_i}.
// Requires s_i > kappa_i for convergence (throws std::domain_error otherwise).
CellSum cell_sum_local_integral(
    const RootDatum& datum, long long p, const std::vector<long double>& s, int a_max,
    const std::optional<std::vector<std::complex<long double>>>& twist = std::nullopt);

// Closed form of the full local integral: summing the geometric series in
// each cell coordinate gives
//   J_p(s) = sum_A R_A(p) * prod_{alpha in A} 1/(p^{s_alpha-kappa_alpha} - 1).
// Same convergence requirement as the cell sum.
long double stratum_local_integral(const RootDatum& datum, long long p,
                                   const std::vector<long double>& s);

}  // namespace manin
