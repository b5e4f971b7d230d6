#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "manin/detail/numeric.hpp"
#include "manin/locpadic.hpp"
#include "manin/rootsys.hpp"

using namespace manin;

namespace {
PrimitiveMatrix mat2(long a, long b, long c, long d) {
  return PrimitiveMatrix::canonical(2, {mpz_class(a), mpz_class(b), mpz_class(c), mpz_class(d)});
}
}  // namespace

TEST_CASE("canonicalization: content, sign, singularity") {
  PrimitiveMatrix m = PrimitiveMatrix::canonical(2, {-2, 0, 0, -2});
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(1, 1) == 1);
  PrimitiveMatrix k = PrimitiveMatrix::canonical(2, {0, -3, 6, 9});
  CHECK(k.at(0, 1) == 1);  // first nonzero entry made positive
  CHECK(k.at(1, 0) == -2);
  CHECK_THROWS_AS(PrimitiveMatrix::canonical(2, {0, 0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(PrimitiveMatrix::canonical(2, {1, 2, 2, 4}), std::invalid_argument);
  CHECK_THROWS_AS(PrimitiveMatrix::canonical(2, {1, 2, 3}), std::invalid_argument);
  CHECK(mat2(2, 0, 0, 3).det() == 6);
  CHECK(PrimitiveMatrix::raw(2, {2, 4, 6, 8}).det() == -8);
}

TEST_CASE("smith normal form diagonals") {
  CHECK(snf_diagonal(PrimitiveMatrix::raw(2, {2, 0, 0, 3})) ==
        std::vector<mpz_class>{1, 6});
  CHECK(snf_diagonal(PrimitiveMatrix::raw(2, {2, 4, 6, 8})) ==
        std::vector<mpz_class>{2, 4});
  CHECK(snf_diagonal(PrimitiveMatrix::raw(3, {1, 0, 0, 0, 2, 0, 0, 0, 12})) ==
        std::vector<mpz_class>{1, 2, 12});
  CHECK(snf_diagonal(PrimitiveMatrix::raw(2, {0, 1, 1, 0})) ==
        std::vector<mpz_class>{1, 1});
  // singular matrices end the chain with zeros
  CHECK(snf_diagonal(PrimitiveMatrix::raw(2, {1, 2, 2, 4})) ==
        std::vector<mpz_class>{1, 0});
}

TEST_CASE("elimination and minor-gcd exponents agree on random matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> entry(-30, 30);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<mpz_class> e;
      for (int k = 0; k < n * n; ++k) e.emplace_back(entry(rng));
      PrimitiveMatrix m = PrimitiveMatrix::raw(n, e);
      if (m.det() == 0) continue;
      for (long long p : {2LL, 3LL, 5LL, 7LL}) {
        auto a = snf_exponents_elimination(m, p);
        auto b = snf_exponents_minors(m, p);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
      }
    }
  }
}

TEST_CASE("sum of cell exponents equals the valuation of the determinant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> entry(-40, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<mpz_class> e;
    for (int k = 0; k < 9; ++k) e.emplace_back(entry(rng));
    PrimitiveMatrix m = PrimitiveMatrix::raw(3, e);
    mpz_class d = m.det();
    if (d == 0) continue;
    for (long long p : {2LL, 3LL}) {
      auto exps = snf_exponents_elimination(m, p);
      int total = 0;
      for (int x : exps) total += x;
      mpz_class v = abs(d);
      int vp = 0;
      while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p))) {
        v /= static_cast<long>(p);
        ++vp;
      }
      CHECK(total == vp);
    }
  }
}

TEST_CASE("cartan cells of diagonal matrices") {
  PrimitiveMatrix d3 = PrimitiveMatrix::raw(3, {1, 0, 0, 0, 2, 0, 0, 0, 4});
  CHECK(smith_exponents(d3, 2).a == std::vector<int>{1, 1});
  PrimitiveMatrix d3b = PrimitiveMatrix::raw(3, {1, 0, 0, 0, 1, 0, 0, 0, 2});
  CHECK(smith_exponents(d3b, 2).a == std::vector<int>{0, 1});
  PrimitiveMatrix d3c = PrimitiveMatrix::raw(3, {1, 0, 0, 0, 2, 0, 0, 0, 2});
  CHECK(smith_exponents(d3c, 2).a == std::vector<int>{1, 0});
  // scaling the matrix does not change the cell
  PrimitiveMatrix d3s = PrimitiveMatrix::raw(3, {3, 0, 0, 0, 6, 0, 0, 0, 12});
  CHECK(smith_exponents(d3s, 2).a == std::vector<int>{1, 1});
  CHECK(smith_exponents(d3s, 3).a == std::vector<int>{0, 0});
}

TEST_CASE("local heights") {
  PrimitiveMatrix g = mat2(1, 0, 0, 9);
  CartanExponents ce = smith_exponents(g, 3);
  CHECK(ce.a == std::vector<int>{2});
  CHECK(local_height_exact({2}, ce) == mpq_class(81));
  CHECK(local_height({2.0L}, ce) == doctest::Approx(81.0));
  CHECK(local_height({mpq_class(3, 2).get_d()}, ce) == doctest::Approx(27.0));
  CartanExponents other = smith_exponents(g, 2);
  CHECK(other.a == std::vector<int>{0});
  CHECK(local_height_exact({2}, other) == 1);
}

TEST_CASE("two independent height routes agree exactly") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> entry(-50, 50);
  int checked = 0;
  while (checked < 150) {
    std::vector<mpz_class> e;
    for (int k = 0; k < 9; ++k) e.emplace_back(entry(rng));
    mpz_class g(0);
    for (const auto& v : e) g = gcd(g, v);
    if (g == 0) continue;
    PrimitiveMatrix m = PrimitiveMatrix::raw(3, e);
    if (m.det() == 0) continue;
    for (long long p : {2LL, 3LL, 5LL}) {
      auto [cell, minors] = schwartz_height_check(m, p, {3, 4});
      CHECK(cell == minors);
    }
    ++checked;
  }
}

TEST_CASE("stratum weights obey the double-coset bound") {
  for (int n = 2; n <= 4; ++n) {
    RootDatum d = build_pgl(n);
    long c = static_cast<long>(max_double_coset_count(d));
    for (long q : {2L, 3L, 5L, 7L}) {
      for (Subset A = 0; A < (1u << d.rank); ++A) {
        mpq_class bound(q + c, q);
        CHECK(stratum_ratio(d, A, q) <= bound);
      }
    }
  }
}

TEST_CASE("cell sum: rank-one frozen values") {
  RootDatum d = build_pgl(2);
  CellSum plain = cell_sum_local_integral(d, 2, {2.0L}, 60);
  CHECK(std::abs(plain.value.imag()) < 1e-18L);
  CHECK(static_cast<double>(plain.value.real()) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(static_cast<double>(plain.tail_bound) < 1e-15);

  std::vector<std::complex<long double>> minus_one{{-1.0L, 0.0L}};
  CellSum twisted = cell_sum_local_integral(d, 2, {2.0L}, 60, minus_one);
  CHECK(static_cast<double>(twisted.value.real()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(twisted.value.imag()) < 1e-18L);
}

TEST_CASE("cell sum matches the closed-form stratum formula") {
  // J_p(s) = sum_A R_A(p) prod_{alpha in A} 1/(p^{s_alpha-kappa_alpha} - 1),
  // the summed geometric series in each cell coordinate (R_A already carries
  // the (p-1)^{#A} torus factor).
  for (int n : {2, 3}) {
    RootDatum d = build_pgl(n);
    for (long p : {2L, 3L, 5L}) {
      std::vector<long double> s;
      std::vector<long long> s_int;
      for (int i = 0; i < d.rank; ++i) {
        s.push_back(static_cast<long double>(d.kappa(i)) + 1.0L + i);
        s_int.push_back(d.kappa(i) + 1 + i);
      }
      CellSum direct = cell_sum_local_integral(d, p, s, 120);
      mpq_class closed(0);
      for (Subset A = 0; A < (1u << d.rank); ++A) {
        mpq_class term = stratum_ratio(d, A, p);
        for (int i = 0; i < d.rank; ++i) {
          if (!(A & (1u << i))) continue;
          mpz_class pw;
          mpz_class pz(p);
          mpz_pow_ui(pw.get_mpz_t(), pz.get_mpz_t(),
                     static_cast<unsigned long>(s_int[static_cast<size_t>(i)] - d.kappa(i)));
          term /= mpq_class(pw - 1, 1);
        }
        closed += term;
      }
      closed.canonicalize();
      long double closed_ld = manin::detail::mpq_to_ld(closed);
      CHECK(std::abs(static_cast<double>(direct.value.real() - closed_ld)) <
            1e-12 * static_cast<double>(closed_ld));
    }
  }
}

TEST_CASE("shifted geometric exponent is rejected by the rank-one oracle") {
  // With the exponent s - kappa + 1 the closed form gives 1.5 at (p, s) = (2, 2),
  // but the direct cell sum gives 2.5; the adopted exponent is s - kappa.
  RootDatum d = build_pgl(2);
  CellSum direct = cell_sum_local_integral(d, 2, {2.0L}, 60);
  long double shifted = 1.0L;  // R_empty
  shifted += manin::detail::mpq_to_ld(stratum_ratio(d, 1, 2)) * (2.0L - 1.0L) /
             (powl(2.0L, 2.0L - 1.0L + 1.0L) - 1.0L);
  CHECK(static_cast<double>(shifted) == doctest::Approx(1.5));
  CHECK(std::abs(static_cast<double>(direct.value.real() - shifted)) > 0.5);
}

TEST_CASE("cell sum guards") {
  RootDatum d2 = build_pgl(2);
  CHECK_THROWS_AS(cell_sum_local_integral(d2, 2, {1.0L}, 10), std::domain_error);
  CHECK_THROWS_AS(cell_sum_local_integral(d2, 2, {0.5L}, 10), std::domain_error);
  CHECK_THROWS_AS(cell_sum_local_integral(d2, 1, {2.0L}, 10), std::invalid_argument);
  CHECK_THROWS_AS(cell_sum_local_integral(d2, 2, {2.0L, 2.0L}, 10), std::invalid_argument);
  std::vector<std::complex<long double>> bad{{2.0L, 0.0L}};
  CHECK_THROWS_AS(cell_sum_local_integral(d2, 2, {2.0L}, 10, bad), std::invalid_argument);
  RootDatum d6 = build_pgl(6);
  std::vector<long double> s6{6.0L, 9.0L, 10.0L, 9.0L, 6.0L};
  CHECK_THROWS_AS(cell_sum_local_integral(d6, 2, s6, 40), std::domain_error);
}

TEST_CASE("tail bound decreases geometrically and covers the truncation error") {
  RootDatum d = build_pgl(3);
  std::vector<long double> s{3.0L, 3.0L};
  CellSum coarse = cell_sum_local_integral(d, 2, s, 12);
  CellSum fine = cell_sum_local_integral(d, 2, s, 80);
  CHECK(static_cast<double>(coarse.tail_bound) > 0.0);
  CHECK(static_cast<double>(fine.tail_bound) < static_cast<double>(coarse.tail_bound));
  // the fine sum sits inside the coarse sum's certified interval
  CHECK(std::abs(static_cast<double>(fine.value.real() - coarse.value.real())) <=
        static_cast<double>(coarse.tail_bound));
}

TEST_CASE("stratum closed form equals the limit of the cell sums") {
  // PGL_2 at s=2, p=2: sum_a vol(a) 2^{-2a} = 1 + sum_{a>=1} 2^{a-1}(2+1) 2^{-2a}
  //                  = 1 + (3/2) sum 2^{-a} = 5/2.
  RootDatum d2 = build_pgl(2);
  CHECK(static_cast<double>(stratum_local_integral(d2, 2, {2.0L})) == doctest::Approx(2.5));

  RootDatum d3 = build_pgl(3);
  for (long long p : {2LL, 3LL, 5LL}) {
    for (const std::vector<long double>& s :
         {std::vector<long double>{3.0L, 3.0L}, std::vector<long double>{4.5L, 3.0L},
          std::vector<long double>{2.25L, 2.5L}}) {
      const long double closed = stratum_local_integral(d3, p, s);
      const CellSum truncated = cell_sum_local_integral(d3, p, s, 60);
      CHECK(std::abs(static_cast<double>(closed - truncated.value.real())) <=
            static_cast<double>(truncated.tail_bound) + 1e-15 * static_cast<double>(closed));
    }
  }
  CHECK_THROWS_AS(stratum_local_integral(d2, 2, {1.0L}), std::domain_error);
}
