#include "manin/euler.hpp"

#include <algorithm>
#include <map>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "manin/detail/numeric.hpp"
#include "manin/locpadic.hpp"
#include "manin/qcounts.hpp"

namespace manin {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

// Margins s_alpha - kappa_alpha as exact rationals.
std::vector<mpq_class> margins_of(const RootDatum& datum, const SVector& s) {
  if (static_cast<int>(s.size()) != datum.rank)
    throw std::invalid_argument("s size must equal the rank");
  std::vector<mpq_class> m(s.size());
  for (int i = 0; i < datum.rank; ++i) {
    m[static_cast<size_t>(i)] = s[static_cast<size_t>(i)] - datum.kappa(i);
    if (m[static_cast<size_t>(i)] <= 0)
      throw std::domain_error("local factor needs s_alpha > kappa_alpha");
  }
  return m;
}

// Coefficient polynomials of F_p as a polynomial in the variables
// x_alpha = p^{-(s_alpha - kappa_alpha)}:
//   F_p = p^{-dim} sum_B Q_B(p) x^B,  Q_B = sum_{A subset B} (-1)^{#B-#A} P_A,
// with P_A = d_a0_count(A) * (q-1)^{#A}.
std::vector<QPolynomial> stratum_coefficients(const RootDatum& datum) {
  const Subset full = (1u << datum.rank);
  const QPolynomial qm1 = QPolynomial::monomial(1) - QPolynomial(1);
  std::vector<QPolynomial> p_poly(full);
  for (Subset a = 0; a < full; ++a) {
    QPolynomial poly = d_a0_count(datum, a);
    for (int k = 0; k < subset_size(a); ++k) poly = poly * qm1;
    p_poly[a] = poly;
  }
  std::vector<QPolynomial> q_poly(full);
  for (Subset b = 0; b < full; ++b) {
    QPolynomial acc;
    for (Subset a = b;; a = (a - 1) & b) {
      if ((subset_size(b) - subset_size(a)) % 2 == 1)
        acc = acc - p_poly[a];
      else
        acc = acc + p_poly[a];
      if (a == 0) break;
    }
    q_poly[b] = acc;
  }
  return q_poly;
}

long double wls_2x2(const std::vector<double>& w, const std::vector<double>& x,
                    const std::vector<double>& y, double& slope, double& intercept) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (det == 0) throw std::invalid_argument("degenerate fit");
  intercept = (sxx * sy - sx * sxy) / det;
  slope = (sw * sxy - sx * sy) / det;
  return det;
}

}  // namespace

long double zeta_em(long double s) {
  if (!(s > 1.0L)) throw std::domain_error("zeta_em needs s > 1");
  // Euler-Maclaurin with N leading terms and Bernoulli corrections.
  const int n_lead = 24;
  static const long double bern[] = {
      1.0L / 6.0L,     -1.0L / 30.0L,    1.0L / 42.0L,  -1.0L / 30.0L,
      5.0L / 66.0L,    -691.0L / 2730.0L, 7.0L / 6.0L,
  };
  long double sum = 0.0L;
  for (int k = 1; k < n_lead; ++k) sum += powl(static_cast<long double>(k), -s);
  const long double nl = static_cast<long double>(n_lead);
  sum += powl(nl, 1.0L - s) / (s - 1.0L) + 0.5L * powl(nl, -s);
  long double rising = s;            // s (s+1) ... (s+2k-2)
  long double npow = powl(nl, -s - 1.0L);
  long double fact = 2.0L;           // (2k)!
  for (size_t k = 0; k < sizeof(bern) / sizeof(bern[0]); ++k) {
    sum += bern[k] / fact * rising * npow;
    rising *= (s + 2.0L * k + 1.0L) * (s + 2.0L * k + 2.0L);
    npow /= nl * nl;
    fact *= (2.0L * k + 3.0L) * (2.0L * k + 4.0L);
  }
  return sum;
}

std::vector<long long> primes_upto(long long n) {
  std::vector<long long> primes;
  if (n < 2) return primes;
  std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
  for (long long i = 2; i <= n; ++i) {
    if (comp[static_cast<size_t>(i)]) continue;
    primes.push_back(i);
    for (long long j = i * i; j <= n; j += i) comp[static_cast<size_t>(j)] = true;
  }
  return primes;
}

long double local_factor(const RootDatum& datum, const PoleData& pole, const SVector& s,
                         long long p) {
  (void)pole;
  const auto margins = margins_of(datum, s);
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  const long double log2p = log2l(static_cast<long double>(p));
  std::vector<long double> x(margins.size());
  for (size_t i = 0; i < margins.size(); ++i)
    x[i] = exp2l(-detail::mpq_to_ld(margins[i]) * log2p);

  const mpz_class q(static_cast<long>(p));
  const int dim = datum.n_pgl * datum.n_pgl - 1;
  const long double pdim = exp2l(static_cast<long double>(dim) * log2p);
  const QPolynomial qm1 = QPolynomial::monomial(1) - QPolynomial(1);
  long double total = 0.0L;
  for (Subset a = 0; a < (1u << datum.rank); ++a) {
    QPolynomial poly = d_a0_count(datum, a);
    for (int k = 0; k < subset_size(a); ++k) poly = poly * qm1;
    long double term = detail::mpz_to_ld(poly.eval(q));
    for (int i = 0; i < datum.rank; ++i)
      term *= ((a >> i) & 1u) ? x[static_cast<size_t>(i)] : (1.0L - x[static_cast<size_t>(i)]);
    total += term;
  }
  return total / pdim;
}

mpq_class local_factor_exact(const RootDatum& datum, const PoleData& pole, const SVector& s,
                             long long p) {
  (void)pole;
  const auto margins = margins_of(datum, s);
  if (p < 2) throw std::invalid_argument("p must be at least 2");
  const mpz_class q(static_cast<long>(p));
  std::vector<mpq_class> x(margins.size());
  for (size_t i = 0; i < margins.size(); ++i) {
    if (margins[i].get_den() != 1)
      throw std::invalid_argument("exact local factor needs integral margins");
    mpz_class denom;
    mpz_pow_ui(denom.get_mpz_t(), q.get_mpz_t(), margins[i].get_num().get_ui());
    x[i] = mpq_class(1, denom);
    x[i].canonicalize();
  }
  const int dim = datum.n_pgl * datum.n_pgl - 1;
  mpz_class pdim;
  mpz_pow_ui(pdim.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(dim));
  const QPolynomial qm1 = QPolynomial::monomial(1) - QPolynomial(1);
  mpq_class total = 0;
  for (Subset a = 0; a < (1u << datum.rank); ++a) {
    QPolynomial poly = d_a0_count(datum, a);
    for (int k = 0; k < subset_size(a); ++k) poly = poly * qm1;
    mpq_class term(poly.eval(q));
    for (int i = 0; i < datum.rank; ++i)
      term *= ((a >> i) & 1u) ? x[static_cast<size_t>(i)] : (1 - x[static_cast<size_t>(i)]);
    total += term;
  }
  total /= mpq_class(pdim);
  return total;
}

EulerProduct regularized_product(const RootDatum& datum, const PoleData& pole,
                                 const SVector& s, long long p_max) {
  const auto margins = margins_of(datum, s);
  if (p_max < 100) throw std::invalid_argument("p_max must be at least 100");
  for (int i = 0; i < datum.rank; ++i) {
    const bool on_pole = (pole.argmax >> i) & 1u;
    if (margins[static_cast<size_t>(i)] < (on_pole ? mpq_class(1, 2) : mpq_class(3, 2)))
      throw std::domain_error("margins too small for a convergent stripped product");
  }

  EulerProduct out;
  out.p_max = p_max;
  out.exact_path = std::all_of(margins.begin(), margins.end(),
                               [](const mpq_class& m) { return m.get_den() == 1; });

  long double log_value = 0.0L;
  for (long long p : primes_upto(p_max)) {
    const long double f = out.exact_path
                              ? detail::mpq_to_ld(local_factor_exact(datum, pole, s, p))
                              : local_factor(datum, pole, s, p);
    if (!(f > 0.0L)) throw std::runtime_error("nonpositive local factor");
    log_value += logl(f);
  }
  out.value = expl(log_value);

  // Tail bound from the exact Laurent expansion of F_p - 1 in powers of
  // p^{-1/lcm}: each stratum coefficient Q_B contributes monomials
  // c p^{k - dim - sum_B margins}; terms at equal exponents cancel exactly
  // (this is what makes the rank-one factor collapse to 1 - p^{-4}), and only
  // the surviving coefficients enter the bound
  //   |F_p - 1| <= sum_e |c_e| p^{-e} <= C p^{-gamma},  gamma = min surviving e.
  const int dim = datum.n_pgl * datum.n_pgl - 1;
  const auto q_poly = stratum_coefficients(datum);
  std::map<mpq_class, mpz_class> laurent;
  for (Subset b = 0; b < (1u << datum.rank); ++b) {
    QPolynomial qb = q_poly[b];
    if (b == 0) {
      // Q_0 = #G; the constant 1 in F_p comes from its leading term, so only
      // the remainder #G - q^dim contributes to F_p - 1.
      qb = qb - QPolynomial::monomial(dim);
    }
    if (qb.is_zero()) continue;
    mpq_class msum = 0;
    for (int i = 0; i < datum.rank; ++i)
      if ((b >> i) & 1u) msum += margins[static_cast<size_t>(i)];
    for (int k = 0; k <= qb.degree(); ++k) {
      if (qb.coeff(k) == 0) continue;
      laurent[mpq_class(dim - k) + msum] += qb.coeff(k);
    }
  }
  long double c_total = 0.0L, gamma = 1e30L;
  for (const auto& [expo, coef] : laurent) {
    if (coef == 0) continue;
    gamma = std::min(gamma, detail::mpq_to_ld(expo));
    mpz_class a = abs(coef);
    c_total += detail::mpz_to_ld(a);
  }
  if (!(gamma > 1.0L)) throw std::domain_error("tail exponent must exceed 1");
  const long double pm = static_cast<long double>(p_max);
  if (!(c_total * powl(pm, -gamma) < 0.5L))
    throw std::domain_error("p_max too small for the tail bound");
  out.tail_rel_bound = 2.0L * c_total * powl(pm, 1.0L - gamma) / (gamma - 1.0L);
  return out;
}

long double partial_local_product(const RootDatum& datum, const std::vector<long double>& s,
                                  long long p_max, int a_max) {
  long double log2_value = 0.0L;
  for (long long p : primes_upto(p_max)) {
    const long double jp = (a_max > 0)
                               ? cell_sum_local_integral(datum, p, s, a_max).value.real()
                               : stratum_local_integral(datum, p, s);
    if (!(jp > 0.0L)) throw std::runtime_error("nonpositive local integral");
    log2_value += log2l(jp);
  }
  return exp2l(log2_value);
}

PredictionReport leading_constant(const RootDatum& datum, const SVector& L, ArchMetric metric,
                                  const PredictOptions& opts) {
  PredictionReport r;
  r.label = datum.label;
  r.L_string = svector_to_string(L);
  r.metric = arch_metric_name(metric);
  r.seed = opts.mc.seed;

  const PoleData pole = manin_invariants(datum, L);
  r.sigma = pole.sigma.get_str();
  r.multiplicity = pole.multiplicity;
  r.b_exponent = pole.multiplicity;
  r.a_exponent_num = pole.sigma.get_num().get_si();
  r.a_exponent_den = pole.sigma.get_den().get_si();
  for (int i = 0; i < datum.rank; ++i)
    if ((pole.argmax >> i) & 1u) r.argmax.push_back(i + 1);
  r.tamagawa = datum.n_pgl;

  r.character_count = character_count_pgl(datum.n_pgl, L);
  if (r.character_count > 1) {
    r.refused = true;
    std::ostringstream why;
    why << "the pole at the convergence abscissa carries " << r.character_count
        << " character twists; the single-term leading-constant formula does not apply";
    r.refusal_reason = why.str();
    return r;
  }

  const SVector s = svector_scale(L, pole.sigma);

  // prod_{alpha in S} 1/s_alpha and the zeta values off the pole set.
  mpq_class residue = 1;
  for (int i = 0; i < datum.rank; ++i) {
    const mpq_class margin = s[static_cast<size_t>(i)] - datum.kappa(i);
    if ((pole.argmax >> i) & 1u)
      residue /= s[static_cast<size_t>(i)];
    else
      r.zeta_values.push_back(static_cast<double>(zeta_em(detail::mpq_to_ld(margin))));
  }
  r.residue_product = residue.get_str();

  const EulerProduct euler = regularized_product(datum, pole, s, opts.p_max);
  r.euler_value = static_cast<double>(euler.value);
  r.euler_tail_rel_bound = static_cast<double>(euler.tail_rel_bound);
  r.euler_p_max = euler.p_max;
  r.euler_exact_path = euler.exact_path;

  const std::vector<long double> s_ld = svector_to_ld(s);
  const ArchValue arch = arch_integral(datum, metric, s_ld, opts.mc);
  r.arch_value = static_cast<double>(arch.value);
  r.arch_stderr = static_cast<double>(arch.stderr_);
  r.arch_samples = arch.n_samples;
  r.arch_method = arch.n_samples > 0 ? "mc" : "quadrature";
  r.arch_heavy_tail = arch.heavy_tail;
  const QuadValue quad = arch_integral_quadrature(datum, metric, s_ld, opts.quad_level);
  if (quad.supported) {
    r.quad_value = static_cast<double>(quad.value);
    r.quad_abs_err = static_cast<double>(quad.abs_err);
  }

  const mpq_class divisor = pole.sigma * [&] {
    mpz_class f = 1;
    for (int k = 2; k < pole.multiplicity; ++k) f *= k;
    return mpq_class(f);
  }();
  r.tauberian_divisor = divisor.get_str();

  long double theta = 1.0L / static_cast<long double>(datum.n_pgl);
  theta *= detail::mpq_to_ld(residue);
  for (double z : r.zeta_values) theta *= static_cast<long double>(z);
  theta *= euler.value;
  theta *= arch.value;
  theta /= detail::mpq_to_ld(divisor);
  r.theta = static_cast<double>(theta);
  long double rel = euler.tail_rel_bound;
  if (arch.value != 0.0L) rel += fabsl(arch.stderr_ / arch.value);
  r.theta_rel_err = static_cast<double>(rel);
  return r;
}

nlohmann::ordered_json PredictionReport::to_json() const {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["class"] = L_string;
  j["metric"] = metric;
  j["pole"] = {{"sigma", sigma},
               {"argmax", argmax},
               {"multiplicity", multiplicity},
               {"a_exponent", {{"num", a_exponent_num}, {"den", a_exponent_den}}},
               {"b_exponent", b_exponent}};
  j["character_count"] = character_count;
  j["refused"] = refused;
  if (refused) {
    j["refusal_reason"] = refusal_reason;
    return j;
  }
  j["factors"] = {
      {"tamagawa", tamagawa},
      {"residue_product", residue_product},
      {"zeta_values", zeta_values},
      {"euler",
       {{"value", euler_value},
        {"tail_rel_bound", euler_tail_rel_bound},
        {"p_max", euler_p_max},
        {"exact_path", euler_exact_path}}},
      {"arch",
       {{"value", arch_value},
        {"stderr", arch_stderr},
        {"samples", arch_samples},
        {"method", arch_method},
        {"heavy_tail", arch_heavy_tail}}},
      {"quadrature", {{"value", quad_value}, {"abs_err", quad_abs_err}}},
      {"tauberian_divisor", tauberian_divisor}};
  j["theta"] = theta;
  j["theta_rel_err"] = theta_rel_err;
  j["provenance"] = {{"config_hash", config_hash},
                     {"git_revision", git_revision},
                     {"seed", seed}};
  return j;
}

std::string PredictionReport::to_markdown() const {
  std::ostringstream md;
  md << "# Leading-constant prediction: " << label << ", class (" << L_string << "), "
     << metric << " metric\n\n";
  md << "| quantity | value |\n|---|---|\n";
  md << "| growth exponent a | " << sigma << " |\n";
  md << "| log-power exponent b | " << b_exponent << " |\n";
  md << "| pole coordinates (1-based) | ";
  for (size_t i = 0; i < argmax.size(); ++i) md << (i ? "," : "") << argmax[i];
  md << " |\n";
  md << "| character count | " << character_count << " |\n";
  if (refused) {
    md << "| refused | " << refusal_reason << " |\n";
    return md.str();
  }
  md << "| tamagawa number | " << tamagawa << " |\n";
  md << "| residue product | " << residue_product << " |\n";
  md << "| euler product | " << euler_value << " (tail <= " << euler_tail_rel_bound
     << ", p_max " << euler_p_max << ") |\n";
  md << "| archimedean integral | " << arch_value << " +- " << arch_stderr << " ("
     << arch_method << ") |\n";
  md << "| tauberian divisor | " << tauberian_divisor << " |\n";
  md << "| theta | " << theta << " (rel err <= " << theta_rel_err << ") |\n";
  md << "\nProvenance: config " << config_hash << ", revision " << git_revision << ", seed "
     << seed << ".\n";
  return md.str();
}

TauberianFit tauberian_fit(const std::vector<std::pair<double, double>>& checkpoints,
                           double a, int b) {
  if (checkpoints.size() < 8)
    throw std::invalid_argument("need at least 8 checkpoints for the fit");
  double b_min = 1e300, b_max = 0;
  for (const auto& [bb, nn] : checkpoints) {
    if (!(bb > 1.0)) throw std::invalid_argument("checkpoints need B > 1");
    (void)nn;
    b_min = std::min(b_min, bb);
    b_max = std::max(b_max, bb);
  }
  if (b_max < 100.0 * b_min)
    throw std::invalid_argument("checkpoints must span at least two decades");

  // Model N(B) = theta B^a (log B)^{b-1} (1 + c1/log B): linear in
  // (theta, theta*c1) against y = N / (B^a (log B)^{b-1}).
  std::vector<double> w, x, y;
  for (const auto& [bb, nn] : checkpoints) {
    const double lb = std::log(bb);
    const double scale = std::pow(bb, a) * std::pow(lb, b - 1);
    w.push_back(bb);
    x.push_back(1.0 / lb);
    y.push_back(nn / scale);
  }
  double slope = 0, intercept = 0;
  wls_2x2(w, x, y, slope, intercept);

  TauberianFit fit;
  fit.theta = intercept;
  fit.c1 = intercept != 0.0 ? slope / intercept : 0.0;
  fit.n_points = static_cast<int>(checkpoints.size());
  size_t last = 0;
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    const double model = intercept + slope * x[i];
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(y[i] - model));
    if (checkpoints[i].first >= checkpoints[last].first) last = i;
  }
  const double model_last = intercept + slope * x[last];
  fit.last_ratio = model_last != 0.0 ? y[last] / model_last : 0.0;
  return fit;
}

}  // namespace manin
