#pragma once
// Exact enumeration of rational points of bounded height on PGL_n.
//
// Points are primitive integral matrices (content 1, det != 0) with the sign
// normalized so the first nonzero entry is positive; entries bounded by T in
// absolute value.  point_stream yields them in a fixed deterministic order.
//
// count_run counts points with H(g) <= B for a list of checkpoint bounds B,
// where H = (arch part) * prod_{p | det} (local part).  For n = 2 and an
// integer class L = (s) the local parts telescope against the |det|^{-s} in
// the archimedean factor, leaving H(g) = norm(g)^{2s} on the primitive
// representative, with norm = sup entry / Frobenius / largest singular value
// according to the metric.  Every comparison H(g) <= B is decided exactly in
// integer/rational arithmetic.  Since each of these norms dominates the sup
// norm, all points with H <= B lie in the box max |g_ij| <= T where T is the
// largest integer with T^{2s} <= B; box_bound_holds spot-checks that bound.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "manin/locarch.hpp"
#include "manin/picard.hpp"

namespace manin {

// Calls f for every primitive sign-canonical matrix with entries in [-T, T]
// and det != 0, in deterministic row-major lexicographic order.
// Supported: n = 2 and n = 3.  Throws std::domain_error if the box volume
// exceeds an internal budget (message includes the estimated size).
void point_stream(int n, long long T,
                  const std::function<void(const std::vector<long long>&)>& f);

// Number of matrices point_stream(n, T, ...) yields.
long long point_stream_count(int n, long long T);

// H(g) for a single point, as a long double (arch factor numeric, p-adic
// factors exact).  L has integer coordinates.
long double height_of_point(const SVector& L, ArchMetric metric,
                            const std::vector<long long>& g, int n);

struct CountRun {
  int n = 0;
  std::string L_string;
  std::string metric;
  double B_max = 0.0;
  long long T = 0;  // search box actually used
  std::vector<double> checkpoints;
  std::vector<long long> counts;
  int shards = 1;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;

  // CSV with header B,N (plus elapsed_s column when timing is true).
  std::string to_csv(bool timing) const;
};

// Geometric checkpoint grid of exact fourth powers m^4 <= B_max (>= 8 points
// spanning >= 2 decades when B_max >= 1e6).
std::vector<double> default_checkpoints(double B_max);

// Exact count of points with H <= B at each checkpoint.  n = 2 only.
// L must have a single positive integer coordinate s_1.  The shard count only
// partitions the outer loop; results are independent of it.
CountRun count_run(int n, const SVector& L, ArchMetric metric, double B_max,
                   const std::vector<double>& checkpoints, int shards);

// Property check used by tests and by count_run's box justification: for
// sampled points just outside the box (some |entry| = T+1), H > B.
bool box_bound_holds(const SVector& L, ArchMetric metric, double B, long long T,
                     std::uint64_t seed, int trials);

// Trial-division factorization (|v| < 2^62); returns prime -> exponent pairs.
std::vector<std::pair<long long, int>> factorize(long long v);

}  // namespace manin
