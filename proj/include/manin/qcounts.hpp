#pragma once
// Exact point counts over finite fields as integer polynomials in q,
// Hecke double-coset volumes, and a brute-force coset-enumeration oracle.

#include <string>
#include <vector>

#include <gmpxx.h>

#include "manin/rootsys.hpp"

namespace manin {

// Subsets of the simple roots as bitmasks over 0..rank-1.
using Subset = unsigned;

inline Subset subset_of(std::initializer_list<int> idx) {
  Subset a = 0;
  for (int i : idx) a |= (1u << i);
  return a;
}
inline int subset_size(Subset a) { return __builtin_popcount(a); }

// Integer-coefficient polynomial in q, ascending degree, no trailing zeros.
struct QPolynomial {
  std::vector<mpz_class> c;

  QPolynomial() = default;
  explicit QPolynomial(long v) { c.assign(1, mpz_class(v)); normalize(); }
  static QPolynomial monomial(int deg, long coef = 1);

  void normalize();
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  const mpz_class& coeff(int k) const;

  QPolynomial operator+(const QPolynomial& o) const;
  QPolynomial operator-(const QPolynomial& o) const;
  QPolynomial operator*(const QPolynomial& o) const;
  bool operator==(const QPolynomial& o) const { return c == o.c; }

  // Exact division; throws if the division leaves a remainder.
  QPolynomial divexact(const QPolynomial& den) const;

  mpz_class eval(const mpz_class& q) const;
  mpq_class eval_q(const mpq_class& q) const;
  long double eval_ld(long double q) const;

  // Sum of absolute values of the coefficients.
  mpz_class l1_norm() const;

  std::string to_string() const;  // ascending, e.g. "1 + q + q^2"
};

// #PGL_n(F_q) = (prod_{i=0}^{n-1}(q^n - q^i)) / (q-1); requires a PGL datum.
QPolynomial order_g(const RootDatum& datum);

// [G : P_A]_q where P_A is the standard parabolic whose Levi has simple roots
// complement(A); equals the sum of q^{l(w)} over minimal coset representatives.
QPolynomial parabolic_index(const RootDatum& datum, Subset A);

// #D_A^0(F_q) = [G:P_A]_q^2 * #M_A^ad(F_q), M_A^ad the adjoint semisimple
// quotient of the Levi (product of PGL blocks for type A).
QPolynomial d_a0_count(const RootDatum& datum, Subset A);

// #X(F_q) = sum over all subsets A of d_a0_count(A).
QPolynomial x_count(const RootDatum& datum);

// Exact stratum weight R_A(q) = d_a0_count(A)(q)*(q-1)^{#A} / #G(q).
mpq_class stratum_ratio(const RootDatum& datum, Subset A, const mpz_class& q);

// vol(K t(a) K) with vol(K)=1: q^{sum kappa*a} * R_{supp(a)}(q).
// Exact; throws if the result is not a positive integer.
mpz_class hecke_volume(const RootDatum& datum, const std::vector<int>& a, const mpz_class& q);

// Number of right K-cosets in K t K for t = diag(p^{e_1},...,p^{e_n}),
// counted as Hermite-normal-form matrices with the given Smith normal form.
// Brute force; n <= 3, p <= 5, sum(e) <= 4.
long long coset_count_oracle(int n, long long p, std::vector<int> e);

// #(W_A \ W / W_A) where W_A is generated by the simple reflections in A.
long long double_coset_count(const RootDatum& datum, Subset A);

// max over subsets A; the constant c in the volume bound
// vol(K t K) <= delta_B(t) * (1 + c/q).
long long max_double_coset_count(const RootDatum& datum);

}  // namespace manin
