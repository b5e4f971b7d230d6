#pragma once
// Picard-lattice bookkeeping in root coordinates: line-bundle classes are
// tuples s = (s_alpha) of coefficients in the simple-root basis, the boundary
// divisor classes are the simple roots themselves, and the effective cone is
// the nonnegative orthant in these coordinates.

#include <string>
#include <vector>

#include <gmpxx.h>

#include "manin/qcounts.hpp"
#include "manin/rootsys.hpp"

namespace manin {

// Exponent tuple in root coordinates; exact rational entries.
using SVector = std::vector<mpq_class>;

SVector svector_from_string(const std::string& csv);  // "3/2,2" -> {3/2, 2}
std::string svector_to_string(const SVector& s);
std::vector<double> svector_to_doubles(const SVector& s);
std::vector<long double> svector_to_ld(const SVector& s);
SVector svector_scale(const SVector& s, const mpq_class& c);

struct PoleData {
  mpq_class sigma;     // max over alpha of (kappa_alpha+1)/s_alpha
  Subset argmax = 0;   // the alphas attaining the max
  int multiplicity = 0;
};

// kappa + 1 componentwise (root coordinates of the anticanonical class).
SVector anticanonical(const RootDatum& datum);

// True iff every coordinate is strictly positive.
bool is_effective_interior(const RootDatum& datum, const SVector& L);

// sigma, argmax set and multiplicity for an interior class; exact rationals.
PoleData manin_invariants(const RootDatum& datum, const SVector& L);

// d = gcd(n, gcd over 1-based indices i in the argmax set of i); the characters
// contributing to the leading pole are exactly those of order dividing d.
// Requires positive integer coordinates (scale-invariant, so callers may clear
// denominators first).
int character_count_pgl(int n, const SVector& L);

}  // namespace manin
