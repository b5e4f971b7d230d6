#pragma once
// Euler products over all primes, the leading constant of the point-count
// asymptotic, and the Tauberian checkpoint fit.
//
// For a class L with pole data (sigma, S, m) write s = sigma * L.  The local
// factor at p strips the geometric-series factor in every coordinate:
//   F_p = omega_p * J_p(s) * prod_alpha (1 - p^{-(s_alpha - kappa_alpha)})
//       = p^{-dim} * sum_A P_A(p) * prod_{a in A} x_a * prod_{a notin A} (1 - x_a)
// with x_a = p^{-(s_a - kappa_a)}, P_A = d_a0_count(A) * (q-1)^{#A} (monic of
// degree dim = n^2 - 1), and omega_p = #G(F_p)/p^dim.  Then F_p = 1 + O(p^{-gamma})
// with gamma >= 3/2 when every margin s_alpha - kappa_alpha is >= 1 on the pole
// set S and >= 3/2 off it; the infinite product converges and is evaluated with
// a rigorous tail bound from degree/coefficient estimates of the Q_B = sum_{A
// subset B} +-P_A expansion.  The zeta factors removed off the pole set are
// finite and reappear as explicit zeta values in the leading constant.
//
// leading_constant() assembles
//   Theta = tau(G)^{-1} * prod_{alpha in S} (1/s_alpha)
//         * prod_{alpha notin S} zeta(s_alpha - kappa_alpha)
//         * E(s) * I_inf(s) * (sigma * (m-1)!)^{-1}
// refusing classes whose pole has extra character contributions (d > 1).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "manin/locarch.hpp"
#include "manin/picard.hpp"
#include "manin/rootsys.hpp"

namespace manin {

// Riemann zeta for real s > 1, Euler-Maclaurin, abs error < 1e-15 for s >= 1.1.
long double zeta_em(long double s);

std::vector<long long> primes_upto(long long n);

// F_p as described above; s given exactly.  exact variant requires integral
// s - kappa margins and returns the exact rational value.
long double local_factor(const RootDatum& datum, const PoleData& pole,
                         const SVector& s, long long p);
mpq_class local_factor_exact(const RootDatum& datum, const PoleData& pole,
                             const SVector& s, long long p);

struct EulerProduct {
  long double value = 0.0L;
  long double tail_rel_bound = 0.0L;  // rigorous bound on |log(tail)|
  long long p_max = 0;
  bool exact_path = false;  // integral margins: Laurent-expansion tail bound
};

// prod_p F_p over p <= p_max with a rigorous tail bound for the rest.
// Preconditions: every margin s_alpha - kappa_alpha - [alpha notin S] >= 1/2,
// and p_max >= 100.
EulerProduct regularized_product(const RootDatum& datum, const PoleData& pole,
                                 const SVector& s, long long p_max);

// prod_{p <= p_max} J_p(s) alone (no stripping); used for abscissa probes.
long double partial_local_product(const RootDatum& datum,
                                  const std::vector<long double>& s, long long p_max,
                                  int a_max);

struct PredictOptions {
  long long p_max = 20000;
  McBudget mc;
  int quad_level = 5;
};

struct PredictionReport {
  std::string label;        // e.g. "PGL2"
  std::string L_string;     // class in root coordinates
  std::string metric;       // arch metric name
  // pole data
  std::string sigma;        // exact rational as string
  std::vector<int> argmax;  // 1-based indices
  int multiplicity = 0;
  long long a_exponent_num = 0, a_exponent_den = 1;  // a = sigma
  int b_exponent = 0;                                // b = multiplicity
  // refusal
  bool refused = false;
  std::string refusal_reason;
  int character_count = 1;
  // factors
  int tamagawa = 0;                  // tau(G) = n
  std::string residue_product;       // prod_{alpha in S} 1/s_alpha, exact rational
  std::vector<double> zeta_values;   // zeta(s_alpha - kappa_alpha), alpha notin S
  double euler_value = 0.0;
  double euler_tail_rel_bound = 0.0;
  long long euler_p_max = 0;
  bool euler_exact_path = false;
  double arch_value = 0.0;
  double arch_stderr = 0.0;
  std::int64_t arch_samples = 0;
  std::string arch_method;  // "mc" or "quadrature"
  bool arch_heavy_tail = false;
  double quad_value = 0.0;   // independent quadrature when supported, else 0
  double quad_abs_err = 0.0;
  std::string tauberian_divisor;  // sigma * (m-1)! as exact rational
  // result
  double theta = 0.0;
  double theta_rel_err = 0.0;  // propagated (euler tail + arch stderr)
  // provenance
  std::string config_hash;
  std::string git_revision;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_markdown() const;
};

PredictionReport leading_constant(const RootDatum& datum, const SVector& L,
                                  ArchMetric metric, const PredictOptions& opts);

struct TauberianFit {
  double theta = 0.0;       // fitted leading constant
  double c1 = 0.0;          // first-order correction coefficient
  double max_abs_residual = 0.0;
  double last_ratio = 0.0;  // N(B)/(theta_model(B)) at the largest checkpoint
  int n_points = 0;
};

// Weighted least squares of N(B) / (B^a (log B)^{b-1}) against 1 + c1/log B,
// weights proportional to B.  Requires >= 8 checkpoints spanning >= 2 decades.
TauberianFit tauberian_fit(const std::vector<std::pair<double, double>>& checkpoints,
                           double a, int b);

}  // namespace manin
