#include "manin/locarch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "manin/detail/rng.hpp"

namespace manin {

namespace {

constexpr long double kPi = detail::Rng::kPi;

long double sq(long double x) { return x * x; }

// Entries of g as long doubles.
void load(const Eigen::MatrixXd& g, long double (&m)[3][3], int n) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = static_cast<long double>(g(i, j));
}

long double det2(const long double (&m)[3][3]) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

long double det3(const long double (&m)[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Descending eigenvalues of a symmetric positive semidefinite 2x2 or 3x3
// matrix, via the quadratic formula / trigonometric cubic formula.
void psd_eigenvalues(const long double a[3][3], int n, long double lam[3]) {
  if (n == 1) {
    lam[0] = a[0][0];
    return;
  }
  if (n == 2) {
    const long double tr = a[0][0] + a[1][1];
    const long double df = a[0][0] - a[1][1];
    const long double disc = sqrtl(sq(df) + 4.0L * sq(a[0][1]));
    lam[0] = 0.5L * (tr + disc);
    lam[1] = 0.5L * (tr - disc);
    return;
  }
  // n == 3: lambda^3 - I1 lambda^2 + I2 lambda - I3 = 0.
  const long double i1 = a[0][0] + a[1][1] + a[2][2];
  const long double i2 = a[0][0] * a[1][1] - sq(a[0][1]) + a[0][0] * a[2][2] -
                         sq(a[0][2]) + a[1][1] * a[2][2] - sq(a[1][2]);
  const long double i3 =
      a[0][0] * (a[1][1] * a[2][2] - sq(a[1][2])) -
      a[0][1] * (a[0][1] * a[2][2] - a[1][2] * a[0][2]) +
      a[0][2] * (a[0][1] * a[1][2] - a[1][1] * a[0][2]);
  const long double p = i2 - i1 * i1 / 3.0L;
  const long double q = -i3 + i1 * i2 / 3.0L - 2.0L * i1 * i1 * i1 / 27.0L;
  long double r2 = -p / 3.0L;
  if (r2 < 0.0L) r2 = 0.0L;  // symmetric matrix: roots real; clamp roundoff
  const long double r = sqrtl(r2);
  long double c = 0.0L;
  if (r > 0.0L) {
    c = -q / (2.0L * r * r * r);
    c = std::clamp(c, -1.0L, 1.0L);
  }
  const long double phi = acosl(c) / 3.0L;
  // cos(phi) >= cos(phi - 2pi/3) ordering gives descending roots as below.
  lam[0] = i1 / 3.0L + 2.0L * r * cosl(phi);
  lam[1] = i1 / 3.0L + 2.0L * r * cosl(phi - 2.0L * kPi / 3.0L);
  lam[2] = i1 / 3.0L + 2.0L * r * cosl(phi + 2.0L * kPi / 3.0L);
  std::sort(lam, lam + 3, std::greater<long double>());
}

std::vector<long double> singular_values_impl(const long double (&m)[3][3], int n) {
  long double gram[3][3] = {{0.0L}};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      long double s = 0.0L;
      for (int k = 0; k < n; ++k) s += m[k][i] * m[k][j];
      gram[i][j] = gram[j][i] = s;
    }
  long double lam[3] = {0.0L, 0.0L, 0.0L};
  psd_eigenvalues(gram, n, lam);
  std::vector<long double> sv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) sv[static_cast<size_t>(i)] = sqrtl(std::max(lam[i], 0.0L));
  // Recover the smallest value from the determinant when possible: the
  // product of singular values must equal |det|, and the subtraction in the
  // eigenvalue formulas loses relative accuracy exactly there.
  const long double ad = fabsl(n == 2 ? det2(m) : (n == 3 ? det3(m) : m[0][0]));
  long double head = 1.0L;
  for (int i = 0; i + 1 < n; ++i) head *= sv[static_cast<size_t>(i)];
  if (head > 0.0L && ad > 0.0L) {
    const long double alt = ad / head;
    if (alt <= sv[static_cast<size_t>(n - 2)]) sv[static_cast<size_t>(n - 1)] = alt;
  }
  return sv;
}

}  // namespace

std::string arch_metric_name(ArchMetric m) {
  switch (m) {
    case ArchMetric::SingularValue: return "singular-value";
    case ArchMetric::SupNorm: return "sup";
    case ArchMetric::L2Norm: return "l2";
  }
  throw std::logic_error("unknown metric");
}

ArchMetric arch_metric_from_string(const std::string& name) {
  if (name == "singular-value" || name == "sv") return ArchMetric::SingularValue;
  if (name == "sup") return ArchMetric::SupNorm;
  if (name == "l2") return ArchMetric::L2Norm;
  throw std::invalid_argument("unknown metric name: " + name);
}

std::vector<long double> singular_values_smalln(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  if (n < 1 || n > 3 || g.cols() != n)
    throw std::invalid_argument("singular_values_smalln needs a square matrix with n <= 3");
  long double m[3][3] = {{0.0L}};
  load(g, m, n);
  return singular_values_impl(m, n);
}

long double arch_height(ArchMetric metric, const std::vector<long double>& s,
                        const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  if (g.cols() != n || n < 2) throw std::invalid_argument("g must be square with n >= 2");
  if (static_cast<int>(s.size()) != n - 1)
    throw std::invalid_argument("s must have n-1 entries");
  long double m[3][3] = {{0.0L}};
  if (metric == ArchMetric::SingularValue) {
    if (n > 3) throw std::domain_error("singular-value height implemented for n <= 3");
    load(g, m, n);
    const std::vector<long double> sv = singular_values_impl(m, n);
    if (!(sv[static_cast<size_t>(n - 1)] > 0.0L)) return INFINITY;
    long double log2h = 0.0L;
    for (int i = 0; i + 1 < n; ++i)
      log2h += s[static_cast<size_t>(i)] *
               log2l(sv[static_cast<size_t>(i)] / sv[static_cast<size_t>(i + 1)]);
    return exp2l(log2h);
  }
  if (n != 2) throw std::domain_error("sup/l2 heights implemented for n = 2");
  load(g, m, 2);
  const long double ad = fabsl(det2(m));
  if (!(ad > 0.0L)) return INFINITY;
  long double norm2 = 0.0L;
  if (metric == ArchMetric::SupNorm) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) norm2 = std::max(norm2, fabsl(m[i][j]));
    norm2 *= norm2;
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) norm2 += sq(m[i][j]);
  }
  return powl(norm2 / ad, s[0]);
}

bool mc_variance_finite(const RootDatum& datum, ArchMetric metric,
                        const std::vector<long double>& s) {
  const int n = datum.n_pgl;
  if (static_cast<int>(s.size()) != n - 1) return false;
  if (n == 2) return s[0] > 1.5L;
  if (n == 3 && metric == ArchMetric::SingularValue)
    return s[0] > 4.0L && s[1] > 2.5L;
  return false;
}

ArchValue arch_integral_mc(const RootDatum& datum, ArchMetric metric,
                           const std::vector<long double>& s, double t_gauge,
                           const McBudget& budget) {
  const int n = datum.n_pgl;
  if (static_cast<int>(s.size()) != n - 1)
    throw std::invalid_argument("s must have n-1 entries");
  if (!(t_gauge > 0.0)) throw std::invalid_argument("t_gauge must be positive");
  if (budget.samples < 2 || budget.shards < 1)
    throw std::invalid_argument("budget needs at least 2 samples and 1 shard");
  if (metric != ArchMetric::SingularValue && n != 2)
    throw std::domain_error("sup/l2 integrals implemented for n = 2");
  if (metric == ArchMetric::SingularValue && n > 3)
    throw std::domain_error("singular-value integral implemented for n <= 3");

  const long double t = static_cast<long double>(t_gauge);
  const bool cone = (metric == ArchMetric::SupNorm);
  // Gaussian proposal: entries iid with density exp(-pi x^2); the estimator
  // weight is H^{-1}(gbar) ||g||_F^t |det g|^{-n} pi^{t/2} / Gamma(t/2).
  const long double gauss_norm = powl(kPi, t / 2.0L) / tgammal(t / 2.0L);
  const long double inv_sqrt_2pi = 1.0L / sqrtl(2.0L * kPi);

  Eigen::MatrixXd g(n, n);
  // Welford accumulators: the naive sum-of-squares loses all precision at the
  // zero-variance calibration points.
  long double mean = 0.0L, m2 = 0.0L;
  const std::int64_t per = budget.samples / budget.shards;
  const std::int64_t extra = budget.samples % budget.shards;
  std::int64_t n_total = 0;
  for (int shard = 0; shard < budget.shards; ++shard) {
    detail::Rng rng(detail::shard_seed(budget.seed, shard));
    const std::int64_t quota = per + (shard < extra ? 1 : 0);
    for (std::int64_t it = 0; it < quota; ++it) {
      long double w = 0.0L;
      if (cone) {
        // Uniform sample of the sup-norm unit sphere in M_2(R): one of the
        // 8 faces {g_ab = +-1}, remaining entries uniform in (-1, 1).  The
        // induced slice measure carries |det|^{-2}, faces have total mass 64,
        // and the PGL normalization halves it:
        //   I = 32 * E[ H^{-1}(u) |det u|^{-2} ].
        const std::uint64_t face = rng.bits() & 7u;
        const int pos = static_cast<int>(face >> 1);
        for (int k = 0; k < 4; ++k)
          g(k / 2, k % 2) = (k == pos) ? ((face & 1u) ? -1.0 : 1.0)
                                       : static_cast<double>(rng.symmetric());
        long double m[3][3] = {{0.0L}};
        load(g, m, 2);
        const long double ad = fabsl(det2(m));
        const long double h = arch_height(metric, s, g);
        if (std::isfinite(h) && ad > 0.0L) w = 32.0L / (h * ad * ad);
      } else {
        long double fro2 = 0.0L;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const long double x = rng.normal() * inv_sqrt_2pi;
            g(i, j) = static_cast<double>(x);
          }
        long double m[3][3] = {{0.0L}};
        load(g, m, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) fro2 += sq(m[i][j]);
        const long double ad = fabsl(n == 2 ? det2(m) : det3(m));
        const long double h = arch_height(metric, s, g);
        if (std::isfinite(h) && ad > 0.0L)
          w = gauss_norm * powl(fro2, t / 2.0L) * powl(ad, -static_cast<long double>(n)) / h;
      }
      ++n_total;
      const long double delta = w - mean;
      mean += delta / static_cast<long double>(n_total);
      m2 += delta * (w - mean);
    }
  }

  ArchValue out;
  out.n_samples = n_total;
  const long double nn = static_cast<long double>(n_total);
  out.value = mean;
  long double var = m2 / (nn - 1.0L);
  if (var < 0.0L) var = 0.0L;
  out.stderr_ = sqrtl(var / nn);
  out.heavy_tail = !mc_variance_finite(datum, metric, s) ||
                   (!cone && !(t > static_cast<long double>(n * n) / 2.0L));
  out.unconverged = !std::isfinite(static_cast<double>(out.value)) ||
                    !std::isfinite(static_cast<double>(out.stderr_));
  if (!out.unconverged && budget.max_rel_err > 0.0)
    out.unconverged = out.stderr_ > static_cast<long double>(budget.max_rel_err) * fabsl(out.value);
  return out;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre recurrence in long double precision.
struct Gl16 {
  long double x[16];
  long double w[16];
  Gl16() {
    const int n = 16;
    for (int k = 0; k < n / 2; ++k) {
      long double t = cosl(kPi * (static_cast<long double>(k) + 0.75L) /
                           (static_cast<long double>(n) + 0.5L));
      long double dp = 0.0L;
      for (int iter = 0; iter < 100; ++iter) {
        long double p0 = 1.0L, p1 = t;
        for (int j = 2; j <= n; ++j) {
          const long double p2 = ((2.0L * j - 1.0L) * t * p1 - (j - 1.0L) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0L);
        const long double step = p1 / dp;
        t -= step;
        if (fabsl(step) < 1e-20L) break;
      }
      x[k] = -t;
      x[n - 1 - k] = t;
      w[k] = w[n - 1 - k] = 2.0L / ((1.0L - t * t) * dp * dp);
    }
  }
};

const Gl16& gl16() {
  static const Gl16 table;
  return table;
}

// Composite GL16 over [0, 1] with dyadically graded panels toward 0 (the
// integrands may have an integrable power singularity there).
template <typename F>
long double integrate01(F&& f, int level) {
  const Gl16& gl = gl16();
  const int depth = 8 + 2 * level;
  long double total = 0.0L;
  long double hi = 1.0L;
  for (int j = 0; j <= depth; ++j) {
    const long double lo = (j == depth) ? 0.0L : hi * 0.5L;
    const long double mid = 0.5L * (lo + hi), half = 0.5L * (hi - lo);
    long double panel = 0.0L;
    for (int k = 0; k < 16; ++k) panel += gl.w[k] * f(mid + half * gl.x[k]);
    total += panel * half;
    hi = lo;
  }
  return total;
}

template <typename F>
long double integrate_square(F&& f, int level) {
  return integrate01(
      [&](long double u) {
        return integrate01([&](long double v) { return f(u, v); }, level);
      },
      level);
}

long double quad_value(const RootDatum& datum, ArchMetric metric,
                       const std::vector<long double>& s, int level) {
  const int n = datum.n_pgl;
  if (n == 2) {
    const long double s1 = s[0];
    if (metric == ArchMetric::SingularValue)
      return 2.0L * kPi * kPi *
             integrate01([&](long double u) { return powl(u, s1 - 2.0L) * (1.0L - u * u); },
                         level);
    if (metric == ArchMetric::L2Norm)
      return 2.0L * kPi * kPi *
             integrate01(
                 [&](long double u) {
                   return powl(u, s1 - 2.0L) * powl(1.0L + u * u, -s1) * (1.0L - u * u);
                 },
                 level);
    // Sup norm: integrate over one face of the unit cube in M_2(R).
    return (16.0L / (s1 - 1.0L)) *
           integrate_square(
               [&](long double u, long double v) {
                 return powl(1.0L - u * v, s1 - 1.0L) + powl(1.0L + u * v, s1 - 1.0L);
               },
               level);
  }
  // n == 3, singular-value metric in KAK coordinates u = sv2/sv1, v = sv3/sv2.
  const long double s1 = s[0], s2 = s[1];
  return 16.0L * kPi * kPi * kPi * kPi *
         integrate_square(
             [&](long double u, long double v) {
               return powl(u, s1 - 3.0L) * powl(v, s2 - 3.0L) * (1.0L - u * u) *
                      (1.0L - v * v) * (1.0L - u * u * v * v);
             },
             level);
}

}  // namespace

QuadValue arch_integral_quadrature(const RootDatum& datum, ArchMetric metric,
                                   const std::vector<long double>& s, int level) {
  const int n = datum.n_pgl;
  if (static_cast<int>(s.size()) != n - 1)
    throw std::invalid_argument("s must have n-1 entries");
  if (level < 1) throw std::invalid_argument("level must be at least 1");
  QuadValue out;
  const bool ok = (n == 2) || (n == 3 && metric == ArchMetric::SingularValue);
  if (!ok) return out;  // supported = false
  for (int i = 0; i < n - 1; ++i)
    if (!(s[static_cast<size_t>(i)] > static_cast<long double>(datum.kappa(i))))
      throw std::domain_error("archimedean integral diverges unless s_alpha > kappa_alpha");
  out.supported = true;
  out.value = quad_value(datum, metric, s, level);
  const long double coarse = quad_value(datum, metric, s, std::max(1, level - 1));
  out.abs_err = fabsl(out.value - coarse) + 1e-18L * fabsl(out.value);
  return out;
}

ArchValue arch_integral(const RootDatum& datum, ArchMetric metric,
                        const std::vector<long double>& s, const McBudget& budget) {
  if (mc_variance_finite(datum, metric, s)) {
    ArchValue v = arch_integral_mc(datum, metric, s,
                                   static_cast<double>(datum.n_pgl * datum.n_pgl), budget);
    if (!v.unconverged) return v;
  }
  const QuadValue q = arch_integral_quadrature(datum, metric, s, 6);
  if (!q.supported)
    throw std::domain_error("no convergent evaluator for this (n, metric, s)");
  ArchValue out;
  out.value = q.value;
  out.stderr_ = q.abs_err;
  out.n_samples = 0;
  out.unconverged = false;
  out.heavy_tail = true;
  return out;
}

}  // namespace manin
