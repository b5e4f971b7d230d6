#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "manin/qcounts.hpp"
#include "manin/rootsys.hpp"

using namespace manin;

namespace {

// Brute-force #PGL_n(F_p): invertible matrices mod p, divided by p-1.
long brute_pgl_order(int n, long p) {
  long total = 1;
  for (int k = 0; k < n * n; ++k) total *= p;
  long invertible = 0;
  std::vector<long> m(static_cast<size_t>(n) * n, 0);
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (auto& x : m) {
      x = c % p;
      c /= p;
    }
    long det = 0;
    if (n == 2) {
      det = m[0] * m[3] - m[1] * m[2];
    } else {
      det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
            m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    if (det % p != 0) ++invertible;
  }
  return invertible / (p - 1);
}

QPolynomial q_integer(int k) {  // 1 + q + ... + q^{k-1}
  QPolynomial s;
  for (int i = 0; i < k; ++i) s = s + QPolynomial::monomial(i);
  return s;
}

}  // namespace

TEST_CASE("polynomial arithmetic and exact division") {
  QPolynomial q = QPolynomial::monomial(1);
  QPolynomial one(1);
  QPolynomial prod = (q - one) * (q + one);
  CHECK(prod.to_string() == "-1 + q^2");
  CHECK(prod.divexact(q - one) == (q + one));
  CHECK(prod.divexact(q + one) == (q - one));
  CHECK_THROWS_AS(prod.divexact(q + QPolynomial(2)), std::domain_error);
  CHECK((q * q + q).to_string() == "q + q^2");
  CHECK(QPolynomial(0).is_zero());
  CHECK((prod - prod).is_zero());
  CHECK(prod.eval(3) == 8);
  CHECK(prod.eval_q(mpq_class(1, 2)) == mpq_class(-3, 4));
  CHECK(prod.eval_ld(2.0L) == doctest::Approx(3.0));
  CHECK(prod.l1_norm() == 2);
  CHECK(prod.degree() == 2);
  CHECK(prod.coeff(0) == -1);
  CHECK(prod.coeff(1) == 0);
  CHECK(prod.coeff(2) == 1);
  CHECK(prod.coeff(17) == 0);
}

TEST_CASE("group orders match brute-force counts over small fields") {
  RootDatum g2 = build_pgl(2);
  RootDatum g3 = build_pgl(3);
  CHECK(order_g(g2).eval(2) == 6);
  CHECK(order_g(g2).eval(3) == 24);
  CHECK(order_g(g3).eval(2) == 168);
  for (long p : {2L, 3L, 5L}) CHECK(order_g(g2).eval(p) == brute_pgl_order(2, p));
  for (long p : {2L, 3L}) CHECK(order_g(g3).eval(p) == brute_pgl_order(3, p));
  CHECK_THROWS_AS(order_g(build_from_cartan("A1", build_pgl(2).cartan)),
                  std::invalid_argument);
}

TEST_CASE("parabolic indices: extremes, factorization, q=1 coset counts") {
  for (int n = 2; n <= 5; ++n) {
    RootDatum d = build_pgl(n);
    CHECK(parabolic_index(d, 0) == QPolynomial(1));
    // full flag variety: length generating function factors as [2]_q...[n]_q
    Subset all = (1u << d.rank) - 1;
    QPolynomial poincare = parabolic_index(d, all);
    QPolynomial expect(1);
    for (int k = 2; k <= n; ++k) expect = expect * q_integer(k);
    CHECK(poincare == expect);
    long fact = 1;
    for (int k = 2; k <= n; ++k) fact *= k;
    CHECK(poincare.eval(1) == fact);
  }
  RootDatum d3 = build_pgl(3);
  CHECK(parabolic_index(d3, subset_of({0})) == q_integer(3));  // projective plane
  CHECK(parabolic_index(d3, subset_of({0})).eval(1) == 3);
  RootDatum d4 = build_pgl(4);
  CHECK(parabolic_index(d4, subset_of({0, 2})).eval(1) == 12);
  CHECK(parabolic_index(d4, subset_of({1})).eval(1) == 6);
}

TEST_CASE("stratum point counts and compactification count") {
  RootDatum d2 = build_pgl(2);
  QPolynomial q = QPolynomial::monomial(1);
  QPolynomial one(1);
  CHECK(d_a0_count(d2, 0) == order_g(d2));                    // open stratum is the group
  CHECK(d_a0_count(d2, subset_of({0})) == (q + one) * (q + one));
  QPolynomial x2 = x_count(d2);
  CHECK(x2.to_string() == "1 + q + q^2 + q^3");

  RootDatum d3 = build_pgl(3);
  CHECK(d_a0_count(d3, subset_of({0})).eval(2) == 294);
  CHECK(d_a0_count(d3, subset_of({1})).eval(2) == 294);

  // #X(F_q) is monic of degree dim X = n^2 - 1
  for (int n = 2; n <= 4; ++n) {
    RootDatum d = build_pgl(n);
    QPolynomial x = x_count(d);
    CHECK(x.degree() == n * n - 1);
    CHECK(x.coeff(x.degree()) == 1);
  }
}

TEST_CASE("hecke volumes: closed form for PGL_2") {
  RootDatum d = build_pgl(2);
  for (long p : {2L, 3L, 5L}) {
    CHECK(hecke_volume(d, {0}, p) == 1);
    mpz_class expect = p + 1;
    for (int e = 1; e <= 4; ++e) {
      CHECK(hecke_volume(d, {e}, p) == expect);
      expect *= p;
    }
  }
}

TEST_CASE("hecke volumes match the lattice-coset oracle") {
  RootDatum d2 = build_pgl(2);
  RootDatum d3 = build_pgl(3);
  for (long p : {2L, 3L, 5L}) {
    for (int a1 = 0; a1 <= 4; ++a1) {
      long long vol = hecke_volume(d2, {a1}, p).get_si();
      CHECK(vol == coset_count_oracle(2, p, {0, a1}));
    }
    for (int a1 = 0; a1 <= 2; ++a1) {
      for (int a2 = 0; 2 * a1 + a2 <= 4; ++a2) {
        long long vol = hecke_volume(d3, {a1, a2}, p).get_si();
        CHECK(vol == coset_count_oracle(3, p, {0, a1, a1 + a2}));
      }
    }
  }
  // frozen examples
  CHECK(hecke_volume(d3, {1, 0}, 2) == 7);
  CHECK(hecke_volume(d3, {1, 1}, 2) == 42);
  CHECK(hecke_volume(d3, {0, 2}, 2) == 28);
}

TEST_CASE("oracle bounds") {
  CHECK_THROWS_AS(coset_count_oracle(4, 2, {0, 0, 0, 1}), std::domain_error);
  CHECK_THROWS_AS(coset_count_oracle(2, 7, {0, 1}), std::domain_error);
  CHECK_THROWS_AS(coset_count_oracle(2, 2, {0, 5}), std::domain_error);
  CHECK(coset_count_oracle(2, 2, {0, 0}) == 1);
  CHECK(coset_count_oracle(2, 2, {1, 1}) == 1);  // central shift
  CHECK(coset_count_oracle(3, 2, {0, 1, 1}) == 7);
}

TEST_CASE("volume generating function matches the stratum decomposition") {
  // Over a box of cells 0 <= a_i <= N, sum vol(a) * q^{-<s,a>} equals
  // sum_A R_A(q) * prod_{alpha in A} sum_{k=1..N} q^{(kappa-s)k}, exactly.
  const int N = 12;
  for (int n : {2, 3}) {
    RootDatum d = build_pgl(n);
    mpz_class q(2);
    std::vector<long long> s(static_cast<size_t>(d.rank));
    for (int i = 0; i < d.rank; ++i) s[static_cast<size_t>(i)] = d.kappa(i) + 1;

    auto qpow = [&](long long e) {  // q^e as exact rational, e may be negative
      mpz_class num;
      mpz_pow_ui(num.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(std::abs(e)));
      return e >= 0 ? mpq_class(num) : mpq_class(1, num);
    };

    mpq_class lhs(0);
    std::vector<int> a(static_cast<size_t>(d.rank), 0);
    while (true) {
      long long dot = 0;
      for (int i = 0; i < d.rank; ++i) dot += s[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
      lhs += mpq_class(hecke_volume(d, a, q)) * qpow(-dot);
      int pos = 0;
      while (pos < d.rank && a[static_cast<size_t>(pos)] == N) a[static_cast<size_t>(pos++)] = 0;
      if (pos == d.rank) break;
      ++a[static_cast<size_t>(pos)];
    }

    mpq_class rhs(0);
    for (Subset A = 0; A < (1u << d.rank); ++A) {
      mpq_class term = stratum_ratio(d, A, q);
      for (int i = 0; i < d.rank; ++i) {
        if (!(A & (1u << i))) continue;
        mpq_class geo(0);
        for (int k = 1; k <= N; ++k)
          geo += qpow(static_cast<long long>(k) * (d.kappa(i) - s[static_cast<size_t>(i)]));
        term *= geo;
      }
      rhs += term;
    }
    lhs.canonicalize();
    rhs.canonicalize();
    CHECK(lhs == rhs);
  }
}

TEST_CASE("double coset counts") {
  RootDatum d2 = build_pgl(2);
  CHECK(double_coset_count(d2, 0) == 2);
  CHECK(double_coset_count(d2, subset_of({0})) == 1);
  for (int n = 2; n <= 4; ++n) {
    RootDatum d = build_pgl(n);
    Subset all = (1u << d.rank) - 1;
    CHECK(double_coset_count(d, all) == 1);
    CHECK(max_double_coset_count(d) == static_cast<long long>(d.weyl.size()));
  }
}
