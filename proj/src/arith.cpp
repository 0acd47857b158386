#include "selquat/arith.hpp"

namespace selquat {

int kronecker_symbol(Int const& a, Int const& n)
{
    if (n == 0)
        throw input_error("kronecker_symbol: lower argument must be nonzero");
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

long valuation(Int const& x, Int const& p)
{
    if (x == 0)
        throw input_error("valuation: undefined at 0");
    if (p < 2)
        throw input_error("valuation: p must be a prime");
    Int r = x;
    long v = 0;
    while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
        r = div_exact(r, p);
        v++;
    }
    return v;
}

long valuation(Rat const& x, Int const& p)
{
    if (x == 0)
        throw input_error("valuation: undefined at 0");
    return valuation(num(x), p) - valuation(den(x), p);
}

bool is_square_mod_power(Int const& a, Int const& p, long k)
{
    if (k < 1)
        throw input_error("is_square_mod_power: k must be >= 1");
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    if (g != 1)
        throw input_error("is_square_mod_power: arguments must be coprime");
    if (p == 2) {
        /* odd squares are 1 mod 8; the criterion stabilizes at k = 3 */
        if (k == 1)
            return true;
        if (k == 2)
            return mod_floor(a, 4) == 1;
        return mod_floor(a, 8) == 1;
    }
    return kronecker_symbol(a, p) == 1;
}

bool is_prime(Int const& n)
{
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

Int isqrt(Int const& n)
{
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(Int const& n)
{
    return n >= 0 && mpz_perfect_square_p(n.get_mpz_t());
}

bool is_square(Rat const& x)
{
    return x >= 0 && is_square(num(x)) && is_square(den(x));
}

Int square_content(Int const& n)
{
    Int m = abs(n);
    if (m == 0)
        throw input_error("square_content: undefined at 0");
    Int f = 1;
    for (auto const& [p, e] : factor(m)) {
        for (int i = 0; i + 1 < e; i += 2)
            f *= p;
    }
    return f;
}

std::vector<long> primes_up_to(long n)
{
    std::vector<bool> sieve(n + 1, true);
    std::vector<long> out;
    for (long i = 2; i <= n; i++) {
        if (!sieve[i])
            continue;
        out.push_back(i);
        for (long j = 2 * i; j <= n; j += i)
            sieve[j] = false;
    }
    return out;
}

std::vector<std::pair<Int, int>> factor(Int const& n, long bound)
{
    if (n == 0)
        throw input_error("factor: undefined at 0");
    std::vector<std::pair<Int, int>> out;
    Int r = abs(n);
    for (Int p = 2; p * p <= r && p <= bound; p += (p == 2 ? 1 : 2)) {
        if (!mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t()))
            continue;
        int e = 0;
        while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
            r = div_exact(r, p);
            e++;
        }
        out.emplace_back(p, e);
    }
    if (r > 1) {
        if (!is_prime(r))
            throw resource_error("factor: composite remainder beyond trial bound");
        out.emplace_back(r, 1);
    }
    return out;
}

std::optional<Int> sqrt_mod(Int const& a, Int const& p)
{
    Int r = mod_floor(a, p);
    if (r == 0)
        return Int(0);
    if (kronecker_symbol(r, p) != 1)
        return std::nullopt;
    if (mod_floor(p, 4) == 3) {
        Int e = (p + 1) / 4, x;
        mpz_powm(x.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return x;
    }
    /* Tonelli-Shanks */
    Int q = p - 1;
    long s = 0;
    while (mod_floor(q, 2) == 0) {
        q /= 2;
        s++;
    }
    Int z = 2;
    while (kronecker_symbol(z, p) != -1)
        z++;
    Int c, x, t, e = (q + 1) / 2;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(x.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    long m = s;
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = mod_floor(tt * tt, p);
            i++;
        }
        Int b = c;
        for (long j = 0; j < m - i - 1; j++)
            b = mod_floor(b * b, p);
        x = mod_floor(x * b, p);
        c = mod_floor(b * b, p);
        t = mod_floor(t * c, p);
        m = i;
    }
    return x;
}

} // namespace selquat
