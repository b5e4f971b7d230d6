#pragma once
// Archimedean local heights on PGL_n(R) and the archimedean local integral.
//
// Heights are functions of the matrix modulo scaling:
//   SingularValue: prod_i (sigma_i/sigma_{i+1})^{s_i} with sigma_1 >= ... >= sigma_n
//                  the singular values (defined for all n <= 3 here);
//   SupNorm (n=2): (max_ij |g_ij|)^{2 s_1} / |det g|^{s_1};
//   L2Norm (n=2):  (sum_ij g_ij^2)^{s_1} / |det g|^{s_1}  (Frobenius norm).
//
// The local integral I(s) = integral over PGL_n(R) of H_s(g)^{-1} dg is
// computed by a gauge-fixing trick: for any t > 0,
//   I(s) = c(t)^{-1} * integral over GL_n(R) of H_s(gbar)^{-1} psi(||g||) ||g||^t dg
// where ||.|| is any norm, psi is a radial profile with
// c(t) = 2*integral_0^inf psi(r) r^{t-1} dr... concretely we take
// psi(r) = exp(-pi r^2), c(t) = pi^{-t/2} Gamma(t/2), and a proposal density
// matched to the norm so the Monte Carlo weight is exactly
// H_s(gbar)^{-1} * Z(t) with Z the proposal's normalizing constant.  The
// estimate is independent of the gauge exponent t, which tests exploit.
//
// A deterministic Gauss-Legendre quadrature over the KAK (singular value)
// coordinates provides an independent evaluation for n = 2 (all metrics) and
// n = 3 (singular-value metric), with a refinement-based error estimate.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manin/picard.hpp"
#include "manin/rootsys.hpp"

namespace manin {

enum class ArchMetric { SingularValue, SupNorm, L2Norm };

std::string arch_metric_name(ArchMetric m);
ArchMetric arch_metric_from_string(const std::string& name);

// H_s(g) for g in GL_n(R); scale-invariant in g.  s has n-1 entries.
long double arch_height(ArchMetric metric, const std::vector<long double>& s,
                        const Eigen::MatrixXd& g);

// Singular values of an n x n matrix, descending, via the characteristic
// polynomial of g^T g (closed forms; n <= 3).
std::vector<long double> singular_values_smalln(const Eigen::MatrixXd& g);

struct McBudget {
  std::int64_t samples = 400000;
  int shards = 8;
  std::uint64_t seed = 12345;
  double max_rel_err = 0.0;  // 0 = no adaptive growth
};

struct ArchValue {
  long double value = 0.0L;
  long double stderr_ = 0.0L;
  std::int64_t n_samples = 0;
  bool unconverged = false;  // stderr estimate unreliable or rel err too big
  bool heavy_tail = false;   // variance known to be infinite for these (metric, s)
};

// True iff the matched-proposal Monte Carlo estimator has finite variance.
bool mc_variance_finite(const RootDatum& datum, ArchMetric metric,
                        const std::vector<long double>& s);

// Gauge-fixed Monte Carlo evaluation of I(s) with gauge exponent t_gauge.
ArchValue arch_integral_mc(const RootDatum& datum, ArchMetric metric,
                           const std::vector<long double>& s, double t_gauge,
                           const McBudget& budget);

struct QuadValue {
  long double value = 0.0L;
  long double abs_err = 0.0L;  // difference between refinement levels
  bool supported = false;
};

// Deterministic quadrature in KAK coordinates; level controls panel count.
QuadValue arch_integral_quadrature(const RootDatum& datum, ArchMetric metric,
                                   const std::vector<long double>& s, int level = 5);

// Preferred evaluation: Monte Carlo when the estimator has finite variance,
// otherwise the deterministic quadrature (value reported in ArchValue form
// with stderr_ = abs_err and heavy_tail = true).
ArchValue arch_integral(const RootDatum& datum, ArchMetric metric,
                        const std::vector<long double>& s, const McBudget& budget);

}  // namespace manin
