#include "manin/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "manin/detail/numeric.hpp"
#include "manin/detail/rng.hpp"
#include "manin/locpadic.hpp"

namespace manin {

namespace {

long long igcd(long long a, long long b) { return std::gcd(a, b); }

long long iabs(long long v) { return v < 0 ? -v : v; }

// Exact test m^e <= bound for integer m >= 0 and rational bound.
bool pow_le(long long m, int e, const mpq_class& bound) {
  if (m <= 0) return 0 <= bound;
  mpz_class mp(static_cast<long>(m)), powed;
  mpz_pow_ui(powed.get_mpz_t(), mp.get_mpz_t(), static_cast<unsigned long>(e));
  return mpq_class(powed) <= bound;
}

// Largest integer t >= 0 with t^e <= bound, starting from a floating hint.
long long largest_with_pow_le(int e, const mpq_class& bound, long long hint) {
  long long t = std::max<long long>(hint, 0);
  while (t > 0 && !pow_le(t, e, bound)) --t;
  while (pow_le(t + 1, e, bound)) ++t;
  return t;
}

// Exact test sv1^{2s} <= bound where sv1^2 = (F + sqrt(F^2 - 4 det^2)) / 2.
// Expanding (F + sqrt(D))^s = A + C sqrt(D) with integers A, C >= 0 turns the
// comparison 2^{-s} (A + C sqrt(D)) <= bound into a rational one.
bool sv_pow_le(const mpz_class& f, const mpz_class& det_sq, int s, const mpq_class& bound) {
  const mpz_class d_rad = f * f - 4 * det_sq;  // (sv1^2 - sv2^2)^2 >= 0
  mpz_class a = 1, c = 0;
  for (int k = 0; k < s; ++k) {
    const mpz_class na = a * f + c * d_rad;
    const mpz_class nc = a + c * f;
    a = na;
    c = nc;
  }
  mpz_class two_s = 1;
  mpz_mul_2exp(two_s.get_mpz_t(), two_s.get_mpz_t(), static_cast<unsigned long>(s));
  const mpq_class rhs = bound * two_s - a;  // remaining room for c sqrt(D)
  if (rhs < 0) return false;
  return mpq_class(c * c * d_rad) <= rhs * rhs;
}

}  // namespace

std::vector<std::pair<long long, int>> factorize(long long v) {
  if (v == 0) throw std::invalid_argument("cannot factor 0");
  std::vector<std::pair<long long, int>> out;
  unsigned long long m = static_cast<unsigned long long>(iabs(v));
  for (unsigned long long p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(static_cast<long long>(p), e);
  }
  if (m > 1) out.emplace_back(static_cast<long long>(m), 1);
  return out;
}

void point_stream(int n, long long T,
                  const std::function<void(const std::vector<long long>&)>& f) {
  if (n != 2 && n != 3) throw std::domain_error("point_stream supports n = 2 and 3");
  if (T < 1) throw std::invalid_argument("T must be at least 1");
  const int cells = n * n;
  const double side = 2.0 * static_cast<double>(T) + 1.0;
  const double volume = std::pow(side, cells);
  if (volume > 2e9) {
    std::ostringstream msg;
    msg << "box of about " << volume << " candidate tuples exceeds the enumeration budget";
    throw std::domain_error(msg.str());
  }

  std::vector<long long> g(static_cast<size_t>(cells), -T);
  while (true) {
    int first = 0;
    while (first < cells && g[static_cast<size_t>(first)] == 0) ++first;
    if (first < cells && g[static_cast<size_t>(first)] > 0) {
      long long content = 0;
      for (long long v : g) content = igcd(content, iabs(v));
      if (content == 1) {
        long long det;
        if (n == 2) {
          det = g[0] * g[3] - g[1] * g[2];
        } else {
          det = g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
                g[2] * (g[3] * g[7] - g[4] * g[6]);
        }
        if (det != 0) f(g);
      }
    }
    int pos = cells - 1;  // odometer: last cell fastest => row-major lex order
    while (pos >= 0 && g[static_cast<size_t>(pos)] == T) g[static_cast<size_t>(pos--)] = -T;
    if (pos < 0) break;
    ++g[static_cast<size_t>(pos)];
  }
}

long long point_stream_count(int n, long long T) {
  long long count = 0;
  point_stream(n, T, [&](const std::vector<long long>&) { ++count; });
  return count;
}

long double height_of_point(const SVector& L, ArchMetric metric,
                            const std::vector<long long>& g, int n) {
  if (static_cast<int>(L.size()) != n - 1)
    throw std::invalid_argument("L must have n-1 coordinates");
  if (static_cast<int>(g.size()) != n * n)
    throw std::invalid_argument("g must have n*n entries");
  std::vector<long long> s_int(L.size());
  for (size_t i = 0; i < L.size(); ++i) {
    if (L[i].get_den() != 1 || L[i] < 1)
      throw std::invalid_argument("height_of_point needs positive integer L");
    s_int[i] = L[i].get_num().get_si();
  }

  std::vector<mpz_class> entries(g.size());
  for (size_t i = 0; i < g.size(); ++i) entries[i] = static_cast<long>(g[i]);
  const PrimitiveMatrix pm = PrimitiveMatrix::canonical(n, std::move(entries));

  mpq_class finite = 1;
  const long long det_ll = mpz_get_si(pm.det().get_mpz_t());
  for (const auto& [p, e] : factorize(det_ll)) {
    (void)e;
    finite *= local_height_exact(s_int, smith_exponents(pm, p));
  }

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = pm.at(i, j).get_d();
  std::vector<long double> s_ld(L.size());
  for (size_t i = 0; i < L.size(); ++i) s_ld[i] = static_cast<long double>(s_int[i]);
  return arch_height(metric, s_ld, m) * detail::mpq_to_ld(finite);
}

std::vector<double> default_checkpoints(double B_max) {
  if (!(B_max >= 4096.0)) throw std::invalid_argument("B_max too small for a checkpoint grid");
  const long long m_max = largest_with_pow_le(
      4, mpq_class(B_max), static_cast<long long>(std::floor(std::pow(B_max, 0.25))) + 2);
  const long long m_min = std::max<long long>(2, (m_max + 19) / 20);
  const int points = 12;
  std::vector<double> out;
  for (int k = 0; k < points; ++k) {
    const double frac = static_cast<double>(k) / (points - 1);
    const double m_real = static_cast<double>(m_min) *
                          std::pow(static_cast<double>(m_max) / static_cast<double>(m_min), frac);
    const long long m = std::llround(m_real);
    const double b = static_cast<double>(m * m * m * m);
    if (out.empty() || b > out.back()) out.push_back(b);
  }
  return out;
}

std::string CountRun::to_csv(bool timing) const {
  std::ostringstream csv;
  csv << (timing ? "B,N,elapsed_s\n" : "B,N\n");
  char buf[64];
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", checkpoints[i]);
    csv << buf << "," << counts[i];
    if (timing) {
      std::snprintf(buf, sizeof buf, "%.3f", elapsed_s);
      csv << "," << buf;
    }
    csv << "\n";
  }
  return csv.str();
}

CountRun count_run(int n, const SVector& L, ArchMetric metric, double B_max,
                   const std::vector<double>& checkpoints, int shards) {
  const auto t_start = std::chrono::steady_clock::now();
  if (n != 2) throw std::domain_error("count_run supports n = 2");
  if (L.size() != 1 || L[0].get_den() != 1 || L[0] < 1 || L[0] > 8)
    throw std::invalid_argument("count_run needs L = (s) with integer 1 <= s <= 8");
  if (shards < 1) throw std::invalid_argument("shards must be positive");
  if (checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
  const int s = static_cast<int>(L[0].get_num().get_si());
  const int two_s = 2 * s;

  std::vector<double> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  if (!(cps.front() >= 1.0) || !(cps.back() <= B_max))
    throw std::invalid_argument("checkpoints must lie in [1, B_max]");

  // For integer L = (s) the finite local heights telescope against the
  // |det|^{-s} inside the archimedean factor, leaving H(g) = norm(g)^{2s} on
  // the primitive representative; every metric norm dominates max |g_ij|, so
  // the whole count lives in the box max |g_ij| <= T with T^{2s} <= B_max.
  const long long T = largest_with_pow_le(
      two_s, mpq_class(B_max),
      static_cast<long long>(std::floor(std::pow(B_max, 1.0 / two_s))) + 2);
  if (T < 1) throw std::invalid_argument("B_max too small: empty search box");
  const double volume = std::pow(2.0 * static_cast<double>(T) + 1.0, 4.0);
  if (volume > 4.5e9) {
    std::ostringstream msg;
    msg << "box of about " << volume << " candidate tuples exceeds the counting budget";
    throw std::domain_error(msg.str());
  }

  // Per-checkpoint thresholds, all exact:
  //   sup: max entry <= radius[i]        (H = max^{2s})
  //   l2 : Frobenius square F <= fmax[i] (H = F^s)
  //   sv : sv1^{2s} <= B_i, long double prefilter + exact edge adjudication
  std::vector<long long> radius, fmax;
  std::vector<long double> sv_sq;
  const size_t n_cp = cps.size();
  for (double b : cps) {
    const mpq_class bq(b);
    if (metric == ArchMetric::SupNorm) {
      radius.push_back(largest_with_pow_le(
          two_s, bq, static_cast<long long>(std::floor(std::pow(b, 1.0 / two_s))) + 2));
    } else if (metric == ArchMetric::L2Norm) {
      fmax.push_back(largest_with_pow_le(
          s, bq, static_cast<long long>(std::floor(std::pow(b, 1.0 / s))) + 2));
    } else {
      sv_sq.push_back(powl(static_cast<long double>(b), 1.0L / s));
    }
  }

  // Shard-local work merges through integer accumulators, so the result is
  // independent of the shard count by construction.
  std::vector<long long> hist, range_diff;
  std::vector<long long> sv_first(n_cp, 0);
  if (metric == ArchMetric::SupNorm) {
    hist.assign(static_cast<size_t>(T) + 1, 0);
    range_diff.assign(static_cast<size_t>(T) + 2, 0);
  } else if (metric == ArchMetric::L2Norm) {
    hist.assign(static_cast<size_t>(4 * T * T) + 1, 0);
  }

  const auto classify_sv = [&](long long a, long long b, long long c, long long d) {
    const long long f = a * a + b * b + c * c + d * d;
    const long long det = a * d - b * c;
    const long double fl = static_cast<long double>(f);
    const long double ds = static_cast<long double>(det) * static_cast<long double>(det);
    const long double sv1_sq = 0.5L * (fl + sqrtl(std::max(fl * fl - 4.0L * ds, 0.0L)));
    size_t idx = static_cast<size_t>(
        std::lower_bound(sv_sq.begin(), sv_sq.end(), sv1_sq * (1.0L - 1e-9L)) - sv_sq.begin());
    while (idx < n_cp) {
      const long double rel = (sv1_sq - sv_sq[idx]) / sv_sq[idx];
      if (rel < -1e-9L) break;  // clearly below the threshold
      if (rel > 1e-9L) {        // clearly above: try the next checkpoint
        ++idx;
        continue;
      }
      if (sv_pow_le(mpz_class(static_cast<long>(f)),
                    mpz_class(static_cast<long>(det)) * mpz_class(static_cast<long>(det)), s,
                    mpq_class(cps[idx])))
        break;
      ++idx;
    }
    if (idx < n_cp) ++sv_first[idx];
  };

  for (int shard = 0; shard < shards; ++shard) {
    for (long long a = shard; a <= T; a += shards) {
      const long long b_lo = (a == 0) ? 1 : -T;  // a = 0 => b is the leading entry
      for (long long b = b_lo; b <= T; ++b) {
        const long long g2 = igcd(a, iabs(b));
        for (long long c = -T; c <= T; ++c) {
          if (a == 0 && c == 0) continue;  // det = -bc would vanish for every d
          const long long g3 = igcd(g2, iabs(c));
          const long long m3 = std::max({a, iabs(b), iabs(c)});
          long long d_zero = 0;
          bool has_zero = false;  // the unique d with det = 0, when integral
          if (a > 0 && (b * c) % a == 0) {
            d_zero = (b * c) / a;
            has_zero = (d_zero >= -T && d_zero <= T);
          }
          if (metric == ArchMetric::SupNorm && g3 == 1) {
            // Aggregate the whole d-line: key max(m3, |d|) equals m3 for the
            // 2*m3+1 values |d| <= m3 and r for the two values d = +-r with
            // r in [m3+1, T] (a running-sum range update).
            hist[static_cast<size_t>(m3)] += 2 * m3 + 1;
            if (m3 + 1 <= T) range_diff[static_cast<size_t>(m3) + 1] += 2;
            if (has_zero) hist[static_cast<size_t>(std::max(m3, iabs(d_zero)))] -= 1;
          } else {
            for (long long d = -T; d <= T; ++d) {
              if (has_zero && d == d_zero) continue;
              if (igcd(g3, iabs(d)) != 1) continue;
              if (metric == ArchMetric::SupNorm) {
                hist[static_cast<size_t>(std::max(m3, iabs(d)))] += 1;
              } else if (metric == ArchMetric::L2Norm) {
                hist[static_cast<size_t>(a * a + b * b + c * c + d * d)] += 1;
              } else {
                classify_sv(a, b, c, d);
              }
            }
          }
        }
      }
    }
  }

  CountRun run;
  run.n = n;
  run.L_string = svector_to_string(L);
  run.metric = arch_metric_name(metric);
  run.B_max = B_max;
  run.T = T;
  run.checkpoints = cps;
  run.shards = shards;
  run.counts.assign(n_cp, 0);

  if (metric == ArchMetric::SupNorm) {
    std::vector<long long> prefix(hist.size() + 1, 0);
    long long running = 0;
    for (size_t r = 0; r < hist.size(); ++r) {
      running += range_diff[r];
      prefix[r + 1] = prefix[r] + hist[r] + running;
    }
    for (size_t i = 0; i < n_cp; ++i)
      run.counts[i] = prefix[static_cast<size_t>(std::min(radius[i], T)) + 1];
  } else if (metric == ArchMetric::L2Norm) {
    std::vector<long long> prefix(hist.size() + 1, 0);
    for (size_t r = 0; r < hist.size(); ++r) prefix[r + 1] = prefix[r] + hist[r];
    for (size_t i = 0; i < n_cp; ++i)
      run.counts[i] = prefix[static_cast<size_t>(std::min(fmax[i], 4 * T * T)) + 1];
  } else {
    long long acc = 0;
    for (size_t i = 0; i < n_cp; ++i) {
      acc += sv_first[i];
      run.counts[i] = acc;
    }
  }

  run.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return run;
}

bool box_bound_holds(const SVector& L, ArchMetric metric, double B, long long T,
                     std::uint64_t seed, int trials) {
  if (L.size() != 1) throw std::invalid_argument("box_bound_holds is an n = 2 property");
  detail::Rng rng(detail::splitmix64(seed));
  std::vector<long long> g(4);
  for (int trial = 0; trial < trials; ++trial) {
    long long content, det;
    do {
      const int forced = static_cast<int>(rng.bits() % 4);
      for (int k = 0; k < 4; ++k) {
        if (k == forced) {
          g[static_cast<size_t>(k)] = (rng.bits() & 1u) ? (T + 1) : -(T + 1);
        } else {
          g[static_cast<size_t>(k)] = static_cast<long long>(
                                          rng.bits() % (2 * static_cast<unsigned long long>(T) + 3)) -
                                      (T + 1);
        }
      }
      content = 0;
      for (long long v : g) content = igcd(content, iabs(v));
      det = g[0] * g[3] - g[1] * g[2];
    } while (content != 1 || det == 0);
    if (!(height_of_point(L, metric, g, 2) > static_cast<long double>(B))) return false;
  }
  return true;
}

}  // namespace manin
