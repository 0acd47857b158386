#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "selquat/errors.hpp"

namespace selquat {

/* All arithmetic in this library is exact.  Int is an arbitrary-precision
 * integer, Rat a rational kept in lowest terms with positive denominator
 * (GMP canonicalizes eagerly, so equality is structural). */
using Int = mpz_class;
using Rat = mpq_class;

inline Int num(Rat const& x) { return Int(x.get_num()); }
inline Int den(Rat const& x) { return Int(x.get_den()); }

inline bool is_integer(Rat const& x) { return den(x) == 1; }

/* Kronecker symbol (a|n).  Total for n != 0; multiplicative in both
 * arguments; 0 exactly when gcd(a, n) > 1. */
int kronecker_symbol(Int const& a, Int const& n);

/* Exponent of the prime p in x != 0. */
long valuation(Int const& x, Int const& p);
long valuation(Rat const& x, Int const& p);

/* Whether a is a square modulo p^k, for gcd(a, p) = 1 and k >= 1.
 * Stabilizes at k = 1 for odd p and k = 3 for p = 2. */
bool is_square_mod_power(Int const& a, Int const& p, long k);

bool is_prime(Int const& n);
Int isqrt(Int const& n);
bool is_square(Int const& n);
bool is_square(Rat const& x);
/* Largest f with f^2 | n, for n != 0. */
Int square_content(Int const& n);

std::vector<long> primes_up_to(long n);

/* Trial division up to `bound`, then a primality check on the remainder.
 * Refuses (resource_error) if a composite remainder survives. */
std::vector<std::pair<Int, int>> factor(Int const& n, long bound = 1000000);

/* Square root of a modulo an odd prime p, if one exists. */
std::optional<Int> sqrt_mod(Int const& a, Int const& p);

inline Int mod_floor(Int const& a, Int const& m)
{
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Int div_floor(Int const& a, Int const& m)
{
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return q;
}

inline Int div_exact(Int const& a, Int const& b)
{
    Int q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

} // namespace selquat
