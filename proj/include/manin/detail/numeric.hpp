#pragma once
// Internal numeric helpers shared across modules.

#include <cmath>

#include <gmpxx.h>

namespace manin::detail {

// mpz -> long double conversion that survives magnitudes beyond double range
// (splits into a 53-bit mantissa and a binary exponent).
inline long double mpz_to_ld(const mpz_class& z) {
  signed long int e2 = 0;
  double mant = mpz_get_d_2exp(&e2, z.get_mpz_t());
  return ldexpl(static_cast<long double>(mant), static_cast<int>(e2));
}

inline long double mpq_to_ld(const mpq_class& q) {
  long double den = mpz_to_ld(q.get_den());
  return mpz_to_ld(q.get_num()) / den;
}

}  // namespace manin::detail
