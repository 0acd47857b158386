#include "selquat/quaternion.hpp"

#include <algorithm>

namespace selquat {

/* ---------------- dyadic enumeration ---------------- */

namespace {

/* Small model of O/v^N at a dyadic place: coordinates (i, j) for i + j*w with
 * the lattice of v^N having rows (m1, 0), (m2b, m2).  All arithmetic in
 * longs; the ring has at most 2^12 elements. */
struct Ring2 {
    long m1 = 1, m2 = 1, m2b = 0;
    long wt = 0, wn = 0;
    long nu_a = 1, nu_b = 0; /* primitive part of v for unit detection */
    bool inert = false;
    bool rational = false;

    long idx(long i, long j) const { return i * m2 + j; }
    std::pair<long, long> reduce(long u, long v) const
    {
        long j = ((v % m2) + m2) % m2;
        long q = (v - j) / m2;
        long i = (((u - q * m2b) % m1) + m1) % m1;
        return {i, j};
    }
    std::pair<long, long> reduce_int(Int const& u, Int const& v) const
    {
        Int j = mod_floor(v, Int(m2));
        Int q = div_exact(v - j, Int(m2));
        Int i = mod_floor(u - q * Int(m2b), Int(m1));
        return {(long)i.get_si(), (long)j.get_si()};
    }
    std::pair<long, long> mul(std::pair<long, long> x, std::pair<long, long> y) const
    {
        long u = x.first * y.first - x.second * y.second * wn;
        long v = x.first * y.second + x.second * y.first + x.second * y.second * wt;
        return reduce(u, v);
    }
    std::pair<long, long> add(std::pair<long, long> x, std::pair<long, long> y) const
    {
        return reduce(x.first + y.first, x.second + y.second);
    }
    bool is_unit(long i, long j) const
    {
        if (rational)
            return i % 2 != 0;
        if (inert)
            return (i % 2 != 0) || (j % 2 != 0);
        return ((i - j * nu_b) % 2 + 2) % 2 != 0;
    }
};

} // namespace

static int hilbert_dyadic(FieldPtr const& K, PrimeIdeal const& v, FieldElem a, FieldElem b)
{
    /* strip even valuations: the symbol only depends on square classes */
    FieldElem pi = K->uniformizer(v);
    auto strip = [&](FieldElem z) {
        long t = K->elem_valuation(z, v);
        long m = (t >= 0) ? t / 2 : -((-t + 1) / 2);
        if (m != 0)
            z = K->div(z, K->pow(pi, 2 * m));
        return z;
    };
    a = strip(a);
    b = strip(b);

    int N = 2 * v.e + 3;
    Ideal P = K->pow(v.ideal, N);
    Ring2 R;
    Int sm1 = num(P.scale) * P.a;
    R.m1 = (long)sm1.get_si();
    R.m2 = K->is_Q() ? 1 : (long)num(P.scale).get_si();
    Int sm2b = num(P.scale) * P.b;
    R.m2b = K->is_Q() ? 0 : (long)sm2b.get_si();
    R.wt = K->is_Q() ? 0 : (long)K->w_tr.get_si();
    R.wn = K->is_Q() ? 0 : (long)K->w_nm.get_si();
    R.rational = K->is_Q();
    R.inert = (v.f == 2);
    R.nu_a = (long)v.ideal.a.get_si();
    R.nu_b = (long)v.ideal.b.get_si();

    /* reduce a and b into the ring, clearing denominators prime to v */
    auto to_ring = [&](FieldElem const& z) -> std::pair<long, long> {
        auto [c0, c1] = K->wcoords(z);
        Int D;
        mpz_lcm(D.get_mpz_t(), den(c0).get_mpz_t(), den(c1).get_mpz_t());
        FieldElem Z = K->from_wcoords(c0 * Rat(D), c1 * Rat(D));
        long k = valuation(D, Int(2));
        Int D0 = D;
        std::pair<long, long> fix{1 % R.m1, 0};
        if (k > 0) {
            for (long i = 0; i < k; i++)
                D0 = div_exact(D0, Int(2));
            if (!K->is_Q() && v.f == 1 && v.e == 1) {
                auto primes = K->factor_prime(Int(2));
                PrimeIdeal const& vbar = (primes[0] == v) ? primes[1] : primes[0];
                FieldElem u = K->uniformizer(vbar);
                Z = K->mul(Z, K->pow(u, k));
                auto [u0, u1] = K->wcoords(u);
                auto ur = R.reduce_int(num(u0), num(u1));
                /* brute inverse in the small ring */
                std::pair<long, long> uinv{0, 0};
                bool found_inv = false;
                for (long i2 = 0; i2 < R.m1 && !found_inv; i2++)
                    for (long j2 = 0; j2 < R.m2; j2++)
                        if (R.mul(ur, {i2, j2}) == std::pair<long, long>{1 % R.m1, 0}) {
                            uinv = {i2, j2};
                            found_inv = true;
                            break;
                        }
                if (!found_inv)
                    throw internal_error("hilbert_dyadic: uniformizer unit not invertible");
                for (long i2 = 0; i2 < k; i2++)
                    fix = R.mul(fix, uinv);
            }
            Int pk = 1;
            for (long i2 = 0; i2 < k; i2++)
                pk *= 2;
            auto [z0, z1] = K->wcoords(Z);
            Rat q0 = z0 / Rat(pk), q1 = z1 / Rat(pk);
            if (!is_integer(q0) || !is_integer(q1))
                throw internal_error("hilbert_dyadic: power-of-two division failed");
            Z = K->from_wcoords(q0, q1);
        }
        auto [z0, z1] = K->wcoords(Z);
        auto r = R.reduce_int(num(z0), num(z1));
        r = R.mul(r, fix);
        if (D0 != 1) {
            long dmod = (long)mod_floor(D0, Int(R.m1)).get_si();
            std::pair<long, long> dr{dmod % R.m1, 0};
            std::pair<long, long> dinv{0, 0};
            bool found = false;
            for (long i2 = 0; i2 < R.m1 && !found; i2++)
                for (long j2 = 0; j2 < R.m2 && !found; j2++)
                    if (R.mul(dr, {i2, j2}) == std::pair<long, long>{1 % R.m1, 0}) {
                        dinv = {i2, j2};
                        found = true;
                    }
            if (!found)
                throw internal_error("hilbert_dyadic: denominator not invertible");
            r = R.mul(r, dinv);
        }
        return r;
    };
    auto ar = to_ring(a), br = to_ring(b);

    /* squares of all elements and of the units */
    long size = R.m1 * R.m2;
    std::vector<char> sq_all(size, 0), sq_unit(size, 0);
    std::vector<std::pair<long, long>> elems;
    elems.reserve(size);
    for (long i = 0; i < R.m1; i++)
        for (long j = 0; j < R.m2; j++) {
            elems.push_back({i, j});
            auto s2 = R.mul({i, j}, {i, j});
            sq_all[R.idx(s2.first, s2.second)] = 1;
            if (R.is_unit(i, j))
                sq_unit[R.idx(s2.first, s2.second)] = 1;
        }
    /* a x^2 + b y^2 = z^2 with (x, y, z) primitive; a solution mod v^(2e+3)
     * lifts by the quadratic Hensel bound */
    std::vector<std::pair<long, long>> ax2(size), by2(size);
    std::vector<char> unit_flag(size, 0);
    for (long i = 0; i < size; i++) {
        auto const& e = elems[i];
        auto s2 = R.mul(e, e);
        ax2[i] = R.mul(ar, s2);
        by2[i] = R.mul(br, s2);
        unit_flag[i] = R.is_unit(e.first, e.second) ? 1 : 0;
    }
    for (long i = 0; i < size; i++) {
        for (long j = 0; j < size; j++) {
            auto c = R.add(ax2[i], by2[j]);
            long ci = R.idx(c.first, c.second);
            if (unit_flag[i] || unit_flag[j]) {
                if (sq_all[ci])
                    return 1;
            } else {
                if (sq_unit[ci])
                    return 1;
            }
        }
    }
    return -1;
}

static int hilbert_odd(FieldPtr const& K, PrimeIdeal const& v, FieldElem const& a,
                       FieldElem const& b)
{
    long al = K->elem_valuation(a, v);
    long be = K->elem_valuation(b, v);
    int chi_a = K->unit_residue_chi(a, v);
    int chi_b = K->unit_residue_chi(b, v);
    /* (a, b)_v = chi((-1)^(al*be)) * chi(u_a)^be * chi(u_b)^al */
    Int q = v.norm();
    int chim1 = (mod_floor((q - 1) / 2, 2) == 0) ? 1 : -1;
    int out = 1;
    if ((al % 2) && (be % 2))
        out *= chim1;
    if (be % 2)
        out *= chi_a;
    if (al % 2)
        out *= chi_b;
    return out;
}

int hilbert_symbol(FieldPtr const& K, Place const& v, FieldElem const& a, FieldElem const& b)
{
    if (a.is_zero() || b.is_zero())
        throw input_error("hilbert_symbol: arguments must be nonzero");
    if (auto* rp = std::get_if<RealPlace>(&v)) {
        return (K->sign_at(a, *rp) < 0 && K->sign_at(b, *rp) < 0) ? -1 : 1;
    }
    auto const& fp = std::get<PrimeIdeal>(v);
    if (fp.p == 2)
        return hilbert_dyadic(K, fp, a, b);
    return hilbert_odd(K, fp, a, b);
}

/* ---------------- algebras ---------------- */

QuatAlg QuatAlg::make(FieldPtr K, FieldElem a, FieldElem b)
{
    if (a.is_zero() || b.is_zero())
        throw input_error("quaternion algebra needs nonzero structure constants");
    QuatAlg A;
    A.K = K;
    A.a = a;
    A.b = b;
    /* candidate finite places divide 2 a b */
    std::vector<Int> ps = {Int(2)};
    for (FieldElem const& z : {a, b}) {
        Rat n = K->norm(z);
        for (auto const& [p, e] : factor(num(n)))
            ps.push_back(p);
        for (auto const& [p, e] : factor(den(n)))
            ps.push_back(p);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    Ideal dsc = K->unit_ideal();
    for (auto const& p : ps) {
        for (auto const& v : K->factor_prime(p)) {
            if (hilbert_symbol(K, v, a, b) == -1) {
                A.ramified.push_back(v);
                dsc = K->mul(dsc, v.ideal);
            }
        }
    }
    for (int i = 0; i < K->real_places; i++) {
        RealPlace r{i};
        if (hilbert_symbol(K, r, a, b) == -1)
            A.ramified.push_back(r);
    }
    A.disc_ideal = dsc;
    if (A.ramified.size() % 2 != 0)
        throw internal_error("ramification set has odd cardinality");
    return A;
}

QuatAlg QuatAlg::matrix_ring(FieldPtr K)
{
    return make(std::move(K), FieldElem::rational(1), FieldElem::rational(1));
}

bool QuatAlg::is_ramified(Place const& v) const
{
    for (auto const& w : ramified)
        if (place_equal(v, w))
            return true;
    return false;
}

bool QuatAlg::ramified_at_finite() const
{
    for (auto const& w : ramified)
        if (std::holds_alternative<PrimeIdeal>(w))
            return true;
    return false;
}

std::vector<PrimeIdeal> QuatAlg::finite_ramified() const
{
    std::vector<PrimeIdeal> out;
    for (auto const& w : ramified)
        if (auto* fp = std::get_if<PrimeIdeal>(&w))
            out.push_back(*fp);
    return out;
}

std::vector<RealPlace> QuatAlg::real_ramified() const
{
    std::vector<RealPlace> out;
    for (auto const& w : ramified)
        if (auto* rp = std::get_if<RealPlace>(&w))
            out.push_back(*rp);
    return out;
}

bool satisfies_eichler(QuatAlg const& A)
{
    if (A.K->complex_places > 0)
        return true;
    return (int)A.real_ramified().size() < A.K->real_places;
}

bool field_embeds(QuatAlg const& A, QuadExt const& E)
{
    if (A.K.get() != E.K.get())
        throw input_error("field mismatch between algebra and extension");
    for (auto const& v : A.ramified)
        if (E.split_type(v) == SplitType::Split)
            return false;
    return true;
}

} // namespace selquat
