#include "manin/qcounts.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "manin/detail/numeric.hpp"

namespace manin {

namespace {

std::vector<int> flatten(const Eigen::MatrixXi& m) {
  std::vector<int> v(static_cast<size_t>(m.size()));
  size_t k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v[k++] = m(i, j);
  return v;
}

// #PGL_m(F_q) as a polynomial; trivial group for m <= 1.
QPolynomial pgl_order_poly(int m) {
  if (m <= 1) return QPolynomial(1);
  QPolynomial gl(1);
  for (int i = 0; i < m; ++i)
    gl = gl * (QPolynomial::monomial(m) - QPolynomial::monomial(i));
  return gl.divexact(QPolynomial::monomial(1) - QPolynomial(1));
}

void require_pgl(const RootDatum& datum) {
  if (datum.n_pgl < 2)
    throw std::invalid_argument("this computation requires a PGL datum");
}

void require_subset(const RootDatum& datum, Subset a) {
  if (a >= (1u << datum.rank)) throw std::invalid_argument("subset out of range");
}

}  // namespace

QPolynomial QPolynomial::monomial(int deg, long coef) {
  if (deg < 0) throw std::invalid_argument("monomial degree must be nonnegative");
  QPolynomial p;
  p.c.assign(static_cast<size_t>(deg) + 1, mpz_class(0));
  p.c.back() = coef;
  p.normalize();
  return p;
}

void QPolynomial::normalize() {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

const mpz_class& QPolynomial::coeff(int k) const {
  static const mpz_class zero(0);
  if (k < 0 || k >= static_cast<int>(c.size())) return zero;
  return c[static_cast<size_t>(k)];
}

QPolynomial QPolynomial::operator+(const QPolynomial& o) const {
  QPolynomial r;
  r.c.resize(std::max(c.size(), o.c.size()), mpz_class(0));
  for (size_t k = 0; k < r.c.size(); ++k) {
    if (k < c.size()) r.c[k] += c[k];
    if (k < o.c.size()) r.c[k] += o.c[k];
  }
  r.normalize();
  return r;
}

QPolynomial QPolynomial::operator-(const QPolynomial& o) const {
  QPolynomial r;
  r.c.resize(std::max(c.size(), o.c.size()), mpz_class(0));
  for (size_t k = 0; k < r.c.size(); ++k) {
    if (k < c.size()) r.c[k] += c[k];
    if (k < o.c.size()) r.c[k] -= o.c[k];
  }
  r.normalize();
  return r;
}

QPolynomial QPolynomial::operator*(const QPolynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  QPolynomial r;
  r.c.assign(c.size() + o.c.size() - 1, mpz_class(0));
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
  r.normalize();
  return r;
}

QPolynomial QPolynomial::divexact(const QPolynomial& den) const {
  if (den.is_zero()) throw std::domain_error("polynomial division by zero");
  QPolynomial rem = *this;
  QPolynomial quot;
  if (rem.is_zero()) return quot;
  if (rem.degree() < den.degree())
    throw std::domain_error("inexact polynomial division (degree too low)");
  quot.c.assign(static_cast<size_t>(rem.degree() - den.degree()) + 1, mpz_class(0));
  const mpz_class& dlead = den.c.back();
  while (!rem.is_zero() && rem.degree() >= den.degree()) {
    const mpz_class& lead = rem.c.back();
    if (!mpz_divisible_p(lead.get_mpz_t(), dlead.get_mpz_t()))
      throw std::domain_error("inexact polynomial division (leading coefficient)");
    mpz_class f = lead / dlead;
    int shift = rem.degree() - den.degree();
    quot.c[static_cast<size_t>(shift)] = f;
    for (int k = 0; k <= den.degree(); ++k)
      rem.c[static_cast<size_t>(shift + k)] -= f * den.c[static_cast<size_t>(k)];
    rem.normalize();
  }
  if (!rem.is_zero()) throw std::domain_error("inexact polynomial division (remainder)");
  quot.normalize();
  return quot;
}

mpz_class QPolynomial::eval(const mpz_class& q) const {
  mpz_class v(0);
  for (size_t k = c.size(); k-- > 0;) v = v * q + c[k];
  return v;
}

mpq_class QPolynomial::eval_q(const mpq_class& q) const {
  mpq_class v(0);
  for (size_t k = c.size(); k-- > 0;) v = v * q + mpq_class(c[k]);
  v.canonicalize();
  return v;
}

long double QPolynomial::eval_ld(long double q) const {
  long double v = 0.0L;
  for (size_t k = c.size(); k-- > 0;) v = v * q + detail::mpz_to_ld(c[k]);
  return v;
}

mpz_class QPolynomial::l1_norm() const {
  mpz_class s(0);
  for (const auto& x : c) s += abs(x);
  return s;
}

std::string QPolynomial::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0) continue;
    mpz_class a = abs(c[k]);
    bool neg = c[k] < 0;
    if (first) {
      if (neg) out << "-";
      first = false;
    } else {
      out << (neg ? " - " : " + ");
    }
    if (k == 0) {
      out << a.get_str();
    } else {
      if (a != 1) out << a.get_str() << "*";
      out << "q";
      if (k > 1) out << "^" << k;
    }
  }
  return out.str();
}

QPolynomial order_g(const RootDatum& datum) {
  require_pgl(datum);
  return pgl_order_poly(datum.n_pgl);
}

QPolynomial parabolic_index(const RootDatum& datum, Subset a) {
  require_subset(datum, a);
  QPolynomial total;
  for (const auto& w : datum.weyl) {
    bool minimal = true;
    for (int j = 0; j < datum.rank && minimal; ++j) {
      if (a & (1u << j)) continue;  // alpha_j in the Levi: no condition
      if (!(w.mat.col(j).array() >= 0).all()) minimal = false;
    }
    if (minimal) total = total + QPolynomial::monomial(w.length);
  }
  return total;
}

QPolynomial d_a0_count(const RootDatum& datum, Subset a) {
  require_pgl(datum);
  require_subset(datum, a);
  QPolynomial idx = parabolic_index(datum, a);
  QPolynomial result = idx * idx;
  // Adjoint Levi factor: consecutive runs of simple roots outside A give
  // PGL blocks (run of r roots -> PGL_{r+1}).
  int run = 0;
  for (int j = 0; j <= datum.rank; ++j) {
    bool in_levi = (j < datum.rank) && !(a & (1u << j));
    if (in_levi) {
      ++run;
    } else if (run > 0) {
      result = result * pgl_order_poly(run + 1);
      run = 0;
    }
  }
  return result;
}

QPolynomial x_count(const RootDatum& datum) {
  require_pgl(datum);
  QPolynomial total;
  for (Subset a = 0; a < (1u << datum.rank); ++a) total = total + d_a0_count(datum, a);
  return total;
}

mpq_class stratum_ratio(const RootDatum& datum, Subset a, const mpz_class& q) {
  require_pgl(datum);
  require_subset(datum, a);
  mpz_class num = d_a0_count(datum, a).eval(q);
  mpz_class torus(1);
  for (int k = 0; k < subset_size(a); ++k) torus *= (q - 1);
  mpq_class r(num * torus, order_g(datum).eval(q));
  r.canonicalize();
  return r;
}

mpz_class hecke_volume(const RootDatum& datum, const std::vector<int>& a,
                       const mpz_class& q) {
  require_pgl(datum);
  if (q < 2) throw std::invalid_argument("q must be at least 2");
  Subset supp = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0) supp |= (1u << i);
  long long expo = delta_b_exponent(datum, a);  // validates sizes and signs
  mpz_class qpow;
  mpz_pow_ui(qpow.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(expo));
  mpq_class v = mpq_class(qpow) * stratum_ratio(datum, supp, q);
  v.canonicalize();
  if (v.get_den() != 1 || v <= 0)
    throw std::domain_error("hecke volume is not a positive integer");
  return v.get_num();
}

long long coset_count_oracle(int n, long long p, std::vector<int> e) {
  if (n < 1 || n > 3) throw std::domain_error("oracle supports n <= 3");
  if (p != 2 && p != 3 && p != 5) throw std::domain_error("oracle supports p in {2,3,5}");
  if (static_cast<int>(e.size()) != n)
    throw std::invalid_argument("exponent vector size must equal n");
  std::sort(e.begin(), e.end());
  const int base = e.front();
  for (int& x : e) x -= base;  // scaling by p^min does not change the count
  int total = std::accumulate(e.begin(), e.end(), 0);
  if (total > 4) throw std::domain_error("oracle supports sum of exponents <= 4");

  auto powll = [](long long b, int k) {
    long long r = 1;
    while (k-- > 0) r *= b;
    return r;
  };

  // p-adic valuations of the Smith normal form of a small integer matrix,
  // by gcds of k x k minors (ascending divisibility chain).
  auto snf_exps = [&](const std::vector<long long>& h) {
    std::vector<long long> dk(static_cast<size_t>(n) + 1, 0);
    dk[0] = 1;
    // gcd of all k x k minors
    std::vector<int> rows(n), cols(n);
    for (int k = 1; k <= n; ++k) {
      long long g = 0;
      std::vector<int> ri(k), ci(k);
      std::function<void(int, int)> pick_rows = [&](int start, int depth) {
        if (depth == k) {
          std::function<void(int, int)> pick_cols = [&](int cstart, int cdepth) {
            if (cdepth == k) {
              // determinant of the k x k submatrix (k <= 3: direct formulas)
              long long det = 0;
              if (k == 1) {
                det = h[static_cast<size_t>(ri[0]) * n + ci[0]];
              } else if (k == 2) {
                long long a00 = h[static_cast<size_t>(ri[0]) * n + ci[0]];
                long long a01 = h[static_cast<size_t>(ri[0]) * n + ci[1]];
                long long a10 = h[static_cast<size_t>(ri[1]) * n + ci[0]];
                long long a11 = h[static_cast<size_t>(ri[1]) * n + ci[1]];
                det = a00 * a11 - a01 * a10;
              } else {
                long long m[3][3];
                for (int i = 0; i < 3; ++i)
                  for (int j = 0; j < 3; ++j)
                    m[i][j] = h[static_cast<size_t>(ri[i]) * n + ci[j]];
                det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
              }
              g = std::gcd(g, std::abs(det));
              return;
            }
            for (int cextra = cstart; cextra < n; ++cextra) {
              ci[cdepth] = cextra;
              pick_cols(cextra + 1, cdepth + 1);
            }
          };
          pick_cols(0, 0);
          return;
        }
        for (int rextra = start; rextra < n; ++rextra) {
          ri[depth] = rextra;
          pick_rows(rextra + 1, depth + 1);
        }
      };
      pick_rows(0, 0);
      dk[static_cast<size_t>(k)] = g;
    }
    std::vector<int> exps;
    for (int k = 1; k <= n; ++k) {
      long long s = dk[static_cast<size_t>(k)] / dk[static_cast<size_t>(k) - 1];
      int v = 0;
      while (s % p == 0) {
        s /= p;
        ++v;
      }
      exps.push_back(v);
    }
    std::sort(exps.begin(), exps.end());
    return exps;
  };

  // Enumerate Hermite normal forms: upper triangular, diagonal p^{f_j} with
  // sum f_j = total, entries above the diagonal reduced modulo the column
  // pivot: 0 <= h_ij < h_jj for i < j.
  long long count = 0;
  std::vector<int> f(static_cast<size_t>(n), 0);
  std::function<void(int, int)> diag = [&](int pos, int remaining) {
    if (pos == n) {
      if (remaining != 0) return;
      std::vector<long long> h(static_cast<size_t>(n) * n, 0);
      for (int i = 0; i < n; ++i) h[static_cast<size_t>(i) * n + i] = powll(p, f[static_cast<size_t>(i)]);
      // odometer over the strictly-upper entries
      std::vector<std::pair<int, int>> slots;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
      std::function<void(size_t)> fill = [&](size_t si) {
        if (si == slots.size()) {
          if (snf_exps(h) == e) ++count;
          return;
        }
        auto [i, j] = slots[si];
        long long lim = h[static_cast<size_t>(j) * n + j];
        for (long long v = 0; v < lim; ++v) {
          h[static_cast<size_t>(i) * n + j] = v;
          fill(si + 1);
        }
        h[static_cast<size_t>(i) * n + j] = 0;
      };
      fill(0);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      f[static_cast<size_t>(pos)] = v;
      diag(pos + 1, remaining - v);
    }
  };
  diag(0, total);
  return count;
}

long long double_coset_count(const RootDatum& datum, Subset a) {
  require_subset(datum, a);
  std::map<std::vector<int>, int> index;
  for (size_t k = 0; k < datum.weyl.size(); ++k)
    index.emplace(flatten(datum.weyl[k].mat), static_cast<int>(k));

  std::vector<Eigen::MatrixXi> gens;
  for (int i = 0; i < datum.rank; ++i)
    if (a & (1u << i)) gens.push_back(simple_reflection_matrix(datum.cartan, i));

  std::vector<char> seen(datum.weyl.size(), 0);
  long long orbits = 0;
  for (size_t start = 0; start < datum.weyl.size(); ++start) {
    if (seen[start]) continue;
    ++orbits;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      const Eigen::MatrixXi& m = datum.weyl[static_cast<size_t>(cur)].mat;
      for (const auto& g : gens) {
        for (const Eigen::MatrixXi& nm : {Eigen::MatrixXi(g * m), Eigen::MatrixXi(m * g)}) {
          auto it = index.find(flatten(nm));
          if (it == index.end()) throw std::logic_error("Weyl multiplication left the group");
          if (!seen[static_cast<size_t>(it->second)]) {
            seen[static_cast<size_t>(it->second)] = 1;
            stack.push_back(it->second);
          }
        }
      }
    }
  }
  return orbits;
}

long long max_double_coset_count(const RootDatum& datum) {
  long long best = 0;
  for (Subset a = 0; a < (1u << datum.rank); ++a)
    best = std::max(best, double_coset_count(datum, a));
  return best;
}

}  // namespace manin
