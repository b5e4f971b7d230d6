#include "manin/locpadic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "manin/detail/numeric.hpp"

namespace manin {

namespace {

void require_square(int n, const std::vector<mpz_class>& entries) {
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
  if (entries.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
    throw std::invalid_argument("entry count must equal n*n");
}

int valuation(mpz_class v, long long p) {
  if (v == 0) throw std::logic_error("valuation of zero");
  v = abs(v);
  int e = 0;
  mpz_class pz(static_cast<long>(p));
  while (mpz_divisible_p(v.get_mpz_t(), pz.get_mpz_t())) {
    v /= pz;
    ++e;
  }
  return e;
}

// determinant of a k x k mpz matrix by fraction-free elimination
mpz_class bareiss_det(std::vector<mpz_class> a, int k) {
  mpz_class sign(1), prev(1);
  auto at = [&](int i, int j) -> mpz_class& { return a[static_cast<size_t>(i) * k + j]; };
  for (int t = 0; t < k - 1; ++t) {
    if (at(t, t) == 0) {
      int piv = -1;
      for (int i = t + 1; i < k; ++i)
        if (at(i, t) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      for (int j = 0; j < k; ++j) std::swap(at(t, j), at(piv, j));
      sign = -sign;
    }
    for (int i = t + 1; i < k; ++i)
      for (int j = t + 1; j < k; ++j)
        at(i, j) = (at(i, j) * at(t, t) - at(i, t) * at(t, j)) / prev;
    prev = at(t, t);
  }
  return sign * at(k - 1, k - 1);
}

}  // namespace

PrimitiveMatrix PrimitiveMatrix::canonical(int n, std::vector<mpz_class> entries) {
  require_square(n, entries);
  mpz_class g(0);
  for (const auto& v : entries) g = gcd(g, v);
  if (g == 0) throw std::invalid_argument("zero matrix cannot be made primitive");
  for (auto& v : entries) v /= g;
  for (const auto& v : entries) {
    if (v == 0) continue;
    if (v < 0)
      for (auto& w : entries) w = -w;
    break;
  }
  PrimitiveMatrix m;
  m.n = n;
  m.e = std::move(entries);
  if (m.det() == 0) throw std::invalid_argument("matrix must be nonsingular");
  return m;
}

PrimitiveMatrix PrimitiveMatrix::raw(int n, std::vector<mpz_class> entries) {
  require_square(n, entries);
  PrimitiveMatrix m;
  m.n = n;
  m.e = std::move(entries);
  return m;
}

mpz_class PrimitiveMatrix::det() const { return bareiss_det(e, n); }

std::vector<mpz_class> snf_diagonal(const PrimitiveMatrix& g) {
  const int n = g.n;
  std::vector<mpz_class> a = g.e;
  auto at = [&](int i, int j) -> mpz_class& { return a[static_cast<size_t>(i) * n + j]; };

  for (int t = 0; t < n; ++t) {
    while (true) {
      int pi = -1, pj = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j)
          if (at(i, j) != 0 &&
              (pi < 0 || abs(at(i, j)) < abs(at(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi < 0) break;  // submatrix is zero
      if (pi != t)
        for (int j = 0; j < n; ++j) std::swap(at(t, j), at(pi, j));
      if (pj != t)
        for (int i = 0; i < n; ++i) std::swap(at(i, t), at(i, pj));

      bool clean = true;
      for (int i = t + 1; i < n; ++i) {
        if (at(i, t) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), at(i, t).get_mpz_t(), at(t, t).get_mpz_t());
        for (int j = t; j < n; ++j) at(i, j) -= q * at(t, j);
        if (at(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (at(t, j) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), at(t, j).get_mpz_t(), at(t, t).get_mpz_t());
        for (int i = t; i < n; ++i) at(i, j) -= q * at(i, t);
        if (at(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      bool divides_all = true;
      for (int i = t + 1; i < n && divides_all; ++i)
        for (int j = t + 1; j < n && divides_all; ++j)
          if (!mpz_divisible_p(at(i, j).get_mpz_t(), at(t, t).get_mpz_t())) {
            for (int k = t; k < n; ++k) at(t, k) += at(i, k);
            divides_all = false;
          }
      if (divides_all) break;
    }
  }

  std::vector<mpz_class> d(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) d[static_cast<size_t>(t)] = abs(at(t, t));
  return d;
}

std::vector<int> snf_exponents_elimination(const PrimitiveMatrix& g, long long p) {
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  std::vector<mpz_class> d = snf_diagonal(g);
  std::vector<int> e;
  e.reserve(d.size());
  for (const auto& v : d) {
    if (v == 0) throw std::domain_error("matrix is singular");
    e.push_back(valuation(v, p));
  }
  return e;
}

std::vector<int> snf_exponents_minors(const PrimitiveMatrix& g, long long p) {
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  const int n = g.n;
  std::vector<mpz_class> dk(static_cast<size_t>(n) + 1);
  dk[0] = 1;
  for (int k = 1; k <= n; ++k) {
    mpz_class gc(0);
    std::vector<int> ri(static_cast<size_t>(k)), ci(static_cast<size_t>(k));
    // iterate over all k-subsets of rows and columns
    std::function<void(int, int)> rows = [&](int start, int depth) {
      if (depth == k) {
        std::function<void(int, int)> cols = [&](int cstart, int cdepth) {
          if (cdepth == k) {
            std::vector<mpz_class> sub(static_cast<size_t>(k) * k);
            for (int i = 0; i < k; ++i)
              for (int j = 0; j < k; ++j)
                sub[static_cast<size_t>(i) * k + j] =
                    g.at(ri[static_cast<size_t>(i)], ci[static_cast<size_t>(j)]);
            gc = gcd(gc, bareiss_det(std::move(sub), k));
            return;
          }
          for (int c = cstart; c < n; ++c) {
            ci[static_cast<size_t>(cdepth)] = c;
            cols(c + 1, cdepth + 1);
          }
        };
        cols(0, 0);
        return;
      }
      for (int r = start; r < n; ++r) {
        ri[static_cast<size_t>(depth)] = r;
        rows(r + 1, depth + 1);
      }
    };
    rows(0, 0);
    dk[static_cast<size_t>(k)] = abs(gc);
  }
  std::vector<int> e;
  e.reserve(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) {
    if (dk[static_cast<size_t>(k)] == 0) throw std::domain_error("matrix is singular");
    mpz_class div = dk[static_cast<size_t>(k)] / dk[static_cast<size_t>(k) - 1];
    e.push_back(valuation(div, p));
  }
  return e;
}

CartanExponents smith_exponents(const PrimitiveMatrix& g, long long p) {
  std::vector<int> m = snf_exponents_elimination(g, p);
  std::sort(m.begin(), m.end());  // differences below are invariant under scaling
  CartanExponents ce;
  ce.p = p;
  ce.a.reserve(m.size() - 1);
  for (size_t i = 0; i + 1 < m.size(); ++i) ce.a.push_back(m[i + 1] - m[i]);
  return ce;
}

long double local_height(const std::vector<long double>& s, const CartanExponents& ce) {
  if (s.size() != ce.a.size())
    throw std::invalid_argument("height exponent size must equal the rank");
  long double dot = 0.0L;
  for (size_t i = 0; i < s.size(); ++i) dot += s[i] * static_cast<long double>(ce.a[i]);
  return exp2l(dot * log2l(static_cast<long double>(ce.p)));
}

mpq_class local_height_exact(const std::vector<long long>& s, const CartanExponents& ce) {
  if (s.size() != ce.a.size())
    throw std::invalid_argument("height exponent size must equal the rank");
  long long dot = 0;
  for (size_t i = 0; i < s.size(); ++i) dot += s[i] * ce.a[i];
  mpz_class pz(static_cast<long>(ce.p)), pw;
  mpz_pow_ui(pw.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(std::llabs(dot)));
  return dot >= 0 ? mpq_class(pw) : mpq_class(1, pw);
}

std::pair<mpq_class, mpq_class> schwartz_height_check(const PrimitiveMatrix& g,
                                                      long long p,
                                                      const std::vector<long long>& s) {
  // route 1: Cartan cell from the elimination-based normal form
  CartanExponents ce = smith_exponents(g, p);
  mpq_class via_cell = local_height_exact(s, ce);

  // route 2: cell from gcds of minors, computed independently
  std::vector<int> m = snf_exponents_minors(g, p);
  std::sort(m.begin(), m.end());
  CartanExponents ce2;
  ce2.p = p;
  for (size_t i = 0; i + 1 < m.size(); ++i) ce2.a.push_back(m[i + 1] - m[i]);
  mpq_class via_minors = local_height_exact(s, ce2);
  return {via_cell, via_minors};
}

CellSum cell_sum_local_integral(
    const RootDatum& datum, long long p, const std::vector<long double>& s, int a_max,
    const std::optional<std::vector<std::complex<long double>>>& twist) {
  if (static_cast<int>(s.size()) != datum.rank)
    throw std::invalid_argument("s size must equal the rank");
  if (a_max < 0) throw std::invalid_argument("a_max must be nonnegative");
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  if (twist && static_cast<int>(twist->size()) != datum.rank)
    throw std::invalid_argument("twist size must equal the rank");
  for (int i = 0; i < datum.rank; ++i) {
    if (!(s[static_cast<size_t>(i)] > static_cast<long double>(datum.kappa(i))))
      throw std::domain_error("local integral diverges unless s_alpha > kappa_alpha");
    if (twist && std::abs(std::abs((*twist)[static_cast<size_t>(i)]) - 1.0L) > 1e-12L)
      throw std::invalid_argument("twist entries must have unit modulus");
  }

  double cells = std::pow(static_cast<double>(a_max) + 1.0, datum.rank);
  if (cells > 5e6)
    throw std::domain_error("cell box too large (" + std::to_string(cells) + " cells)");

  const mpz_class q(static_cast<long>(p));
  const long double log2p = log2l(static_cast<long double>(p));

  // exact stratum weights, converted once
  std::vector<long double> ratio(static_cast<size_t>(1) << datum.rank);
  for (Subset A = 0; A < (1u << datum.rank); ++A)
    ratio[A] = detail::mpq_to_ld(stratum_ratio(datum, A, q));

  // per-coordinate twist power tables
  std::vector<std::vector<std::complex<long double>>> tw;
  if (twist) {
    tw.resize(static_cast<size_t>(datum.rank));
    for (int i = 0; i < datum.rank; ++i) {
      tw[static_cast<size_t>(i)].resize(static_cast<size_t>(a_max) + 1);
      std::complex<long double> acc{1.0L, 0.0L};
      for (int k = 0; k <= a_max; ++k) {
        tw[static_cast<size_t>(i)][static_cast<size_t>(k)] = acc;
        acc *= (*twist)[static_cast<size_t>(i)];
      }
    }
  }

  CellSum out;
  std::vector<int> a(static_cast<size_t>(datum.rank), 0);
  while (true) {
    long double expo = 0.0L;
    Subset supp = 0;
    for (int i = 0; i < datum.rank; ++i) {
      if (a[static_cast<size_t>(i)] > 0) supp |= (1u << i);
      expo += (static_cast<long double>(datum.kappa(i)) - s[static_cast<size_t>(i)]) *
              static_cast<long double>(a[static_cast<size_t>(i)]);
    }
    long double weight = ratio[supp] * exp2l(expo * log2p);
    if (twist) {
      std::complex<long double> chi{1.0L, 0.0L};
      for (int i = 0; i < datum.rank; ++i)
        chi *= tw[static_cast<size_t>(i)][static_cast<size_t>(a[static_cast<size_t>(i)])];
      out.value += chi * weight;
    } else {
      out.value += weight;
    }
    int pos = 0;
    while (pos < datum.rank && a[static_cast<size_t>(pos)] == a_max)
      a[static_cast<size_t>(pos++)] = 0;
    if (pos == datum.rank) break;
    ++a[static_cast<size_t>(pos)];
  }

  // tail over the complement of the box: vol(a) <= delta_B(a) * (1 + c/p)
  long double c_bound = static_cast<long double>(max_double_coset_count(datum));
  long double full = 1.0L, boxed = 1.0L;
  for (int i = 0; i < datum.rank; ++i) {
    long double x = exp2l((static_cast<long double>(datum.kappa(i)) - s[static_cast<size_t>(i)]) * log2p);
    full *= 1.0L / (1.0L - x);
    boxed *= (1.0L - powl(x, static_cast<long double>(a_max) + 1.0L)) / (1.0L - x);
  }
  out.tail_bound = (1.0L + c_bound / static_cast<long double>(p)) * (full - boxed);
  return out;
}

long double stratum_local_integral(const RootDatum& datum, long long p,
                                   const std::vector<long double>& s) {
  if (static_cast<int>(s.size()) != datum.rank)
    throw std::invalid_argument("s size must equal the rank");
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  const long double log2p = log2l(static_cast<long double>(p));
  std::vector<long double> geo(static_cast<size_t>(datum.rank));
  for (int i = 0; i < datum.rank; ++i) {
    long double margin = s[static_cast<size_t>(i)] - static_cast<long double>(datum.kappa(i));
    if (!(margin > 0.0L))
      throw std::domain_error("local integral diverges unless s_alpha > kappa_alpha");
    geo[static_cast<size_t>(i)] = 1.0L / (exp2l(margin * log2p) - 1.0L);
  }
  const mpz_class q(static_cast<long>(p));
  long double total = 0.0L;
  for (Subset A = 0; A < (1u << datum.rank); ++A) {
    long double term = detail::mpq_to_ld(stratum_ratio(datum, A, q));
    for (int i = 0; i < datum.rank; ++i)
      if ((A >> i) & 1u) term *= geo[static_cast<size_t>(i)];
    total += term;
  }
  return total;
}

}  // namespace manin
