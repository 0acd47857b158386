#include "selquat/base_field.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <sstream>

namespace selquat {

/* ---------------- printing ---------------- */

std::string FieldElem::str() const
{
    if (y == 0)
        return x.get_str();
    return x.get_str() + "," + y.get_str();
}

std::string Ideal::str() const
{
    return "(" + scale.get_str() + "; " + a.get_str() + "," + b.get_str() + ")";
}

std::string PrimeIdeal::str() const
{
    if (ideal.K && ideal.K->is_Q())
        return p.get_str();
    return p.get_str() + "." + std::to_string(index);
}

std::string place_str(Place const& v)
{
    if (auto* fp = std::get_if<PrimeIdeal>(&v))
        return fp->str();
    return std::get<RealPlace>(v).str();
}

bool place_equal(Place const& u, Place const& v)
{
    if (u.index() != v.index())
        return false;
    if (auto* fp = std::get_if<PrimeIdeal>(&u))
        return *fp == std::get<PrimeIdeal>(v);
    return std::get<RealPlace>(u) == std::get<RealPlace>(v);
}

/* ---------------- residue fields ---------------- */

static uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m)
{
    return (uint64_t)(((unsigned __int128)a * b) % m);
}

ResidueField::El ResidueField::mul(El u, El v) const
{
    if (f == 1)
        return {mulmod_u64(u.first, v.first, p), 0};
    /* wbar^2 = wt*wbar - wn */
    uint64_t ac = mulmod_u64(u.first, v.first, p);
    uint64_t bd = mulmod_u64(u.second, v.second, p);
    uint64_t ad_bc = (mulmod_u64(u.first, v.second, p) + mulmod_u64(u.second, v.first, p)) % p;
    uint64_t c0 = (ac + p - mulmod_u64(bd, wn % p, p)) % p;
    uint64_t c1 = (ad_bc + mulmod_u64(bd, wt % p, p)) % p;
    return {c0, c1};
}

ResidueField::El ResidueField::pow(El u, Int e) const
{
    El r{1, 0}, base = u;
    Int k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t()))
            r = mul(r, base);
        base = mul(base, base);
        k >>= 1;
    }
    return r;
}

ResidueField::El ResidueField::inv(El u) const
{
    Int q = Int(p);
    if (f == 2)
        q *= p;
    return pow(u, q - 2);
}

int ResidueField::chi(El u) const
{
    if (is_zero(u))
        return 0;
    Int q = Int(p);
    if (f == 2)
        q *= p;
    El r = pow(u, (q - 1) / 2);
    if (r.first == 1 && r.second == 0)
        return 1;
    return -1;
}

/* ---------------- HNF on two-column integer rows ---------------- */

/* Returns (A, B, C) with the row span of the input equal to
 * Z*(A, 0) + Z*(B, C), A > 0, C >= 0, 0 <= B < A scaled appropriately. */
static void hnf2(std::vector<std::array<Int, 2>> const& rows, Int& A, Int& B, Int& C)
{
    A = 0;
    B = 0;
    C = 0;
    for (auto const& r : rows) {
        Int u = r[0], v = r[1];
        if (v != 0) {
            if (C == 0) {
                if (v < 0) {
                    C = -v;
                    B = -u;
                } else {
                    C = v;
                    B = u;
                }
            } else {
                Int g, s, t;
                mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), C.get_mpz_t(),
                           v.get_mpz_t());
                Int newB = s * B + t * u;
                Int comp = div_exact(C, g) * u - div_exact(v, g) * B;
                B = newB;
                C = g;
                if (comp != 0) {
                    Int gg;
                    mpz_gcd(gg.get_mpz_t(), A.get_mpz_t(), comp.get_mpz_t());
                    A = gg;
                }
            }
        } else if (u != 0) {
            Int gg;
            mpz_gcd(gg.get_mpz_t(), A.get_mpz_t(), u.get_mpz_t());
            A = gg;
        }
    }
    if (A < 0)
        A = -A;
    if (A != 0 && C != 0)
        B = mod_floor(B, A);
}

/* ---------------- field construction ---------------- */

FieldPtr BaseField::make(Int d, FieldOptions opts)
{
    static std::mutex cache_mutex;
    static std::map<std::pair<std::string, std::string>, FieldPtr> cache;
    std::pair<std::string, std::string> key{d.get_str(), opts.disc_bound.get_str()};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }

    if (d == 0)
        throw input_error("make_field: d must be nonzero");
    Int disc;
    if (d == 1) {
        disc = 1;
    } else {
        if (abs(d) > opts.disc_bound)
            throw resource_error("make_field: discriminant bound exceeded");
        for (auto const& [p, e] : factor(abs(d)))
            if (e > 1)
                throw input_error("make_field: d must be squarefree");
        disc = (mod_floor(d, 4) == 1) ? d : 4 * d;
        if (abs(disc) > opts.disc_bound)
            throw resource_error("make_field: discriminant bound exceeded");
    }

    auto F = std::shared_ptr<BaseField>(new BaseField());
    F->d = d;
    F->disc = disc;
    if (d == 1) {
        F->real_places = 1;
        F->w_tr = 0;
        F->w_nm = 0;
    } else if (mod_floor(d, 4) == 1) {
        F->w_tr = 1;
        F->w_nm = (1 - d) / 4;
    } else {
        F->w_tr = 0;
        F->w_nm = -d;
    }
    if (d > 1)
        F->real_places = 2;
    else if (d < 0) {
        F->real_places = 0;
        F->complex_places = 1;
    }

    if (d > 1)
        F->compute_fundamental_unit();
    F->class_group.push_back(IdealClass{F->unit_ideal(), 1});
    if (d != 1)
        F->build_class_group(opts.class_group_cap);

    FieldPtr out = F;
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, out);
    return out;
}

FieldElem BaseField::w_elem() const
{
    if (is_Q())
        return FieldElem::rational(0);
    if (w_tr == 1)
        return FieldElem(Rat(1, 2), Rat(1, 2));
    return FieldElem(Rat(0), Rat(1));
}

/* ---------------- element arithmetic ---------------- */

static void require_rational(BaseField const* K, FieldElem const& u)
{
    if (K->is_Q() && u.y != 0)
        throw input_error("element of Q has a sqrt coordinate");
}

FieldElem BaseField::add(FieldElem const& u, FieldElem const& v) const
{
    return FieldElem(u.x + v.x, u.y + v.y);
}

FieldElem BaseField::sub(FieldElem const& u, FieldElem const& v) const
{
    return FieldElem(u.x - v.x, u.y - v.y);
}

FieldElem BaseField::neg(FieldElem const& u) const { return FieldElem(-u.x, -u.y); }

FieldElem BaseField::mul(FieldElem const& u, FieldElem const& v) const
{
    require_rational(this, u);
    require_rational(this, v);
    Rat dd(d);
    return FieldElem(u.x * v.x + dd * u.y * v.y, u.x * v.y + u.y * v.x);
}

FieldElem BaseField::conj(FieldElem const& u) const { return FieldElem(u.x, -u.y); }

Rat BaseField::trace(FieldElem const& u) const
{
    if (is_Q())
        return u.x;
    return 2 * u.x;
}

Rat BaseField::norm(FieldElem const& u) const
{
    if (is_Q())
        return u.x;
    return u.x * u.x - Rat(d) * u.y * u.y;
}

FieldElem BaseField::inv(FieldElem const& u) const
{
    if (u.is_zero())
        throw input_error("division by zero");
    if (is_Q())
        return FieldElem::rational(Rat(1) / u.x);
    Rat n = u.x * u.x - Rat(d) * u.y * u.y;
    return FieldElem(u.x / n, -u.y / n);
}

FieldElem BaseField::div(FieldElem const& u, FieldElem const& v) const
{
    return mul(u, inv(v));
}

FieldElem BaseField::pow(FieldElem const& u, long e) const
{
    FieldElem base = e < 0 ? inv(u) : u;
    unsigned long k = e < 0 ? -(unsigned long)e : (unsigned long)e;
    FieldElem r = FieldElem::rational(1);
    while (k) {
        if (k & 1)
            r = mul(r, base);
        base = mul(base, base);
        k >>= 1;
    }
    return r;
}

std::pair<Rat, Rat> BaseField::wcoords(FieldElem const& u) const
{
    if (is_Q())
        return {u.x, Rat(0)};
    if (w_tr == 1)
        return {u.x - u.y, 2 * u.y};
    return {u.x, u.y};
}

FieldElem BaseField::from_wcoords(Rat const& c0, Rat const& c1) const
{
    if (is_Q()) {
        if (c1 != 0)
            throw input_error("element of Q has a sqrt coordinate");
        return FieldElem::rational(c0);
    }
    if (w_tr == 1)
        return FieldElem(c0 + c1 / 2, c1 / 2);
    return FieldElem(c0, c1);
}

bool BaseField::is_integral(FieldElem const& u) const
{
    auto [c0, c1] = wcoords(u);
    return is_integer(c0) && is_integer(c1);
}

bool BaseField::is_square_elem(FieldElem const& u) const
{
    return sqrt_elem(u).has_value();
}

std::optional<FieldElem> BaseField::sqrt_elem(FieldElem const& u) const
{
    if (u.is_zero())
        return FieldElem();
    if (u.y == 0) {
        if (is_square(u.x)) {
            Rat r(isqrt(num(u.x)), isqrt(den(u.x)));
            return FieldElem::rational(r);
        }
        if (is_Q())
            return std::nullopt;
        Rat q = u.x / Rat(d);
        if (is_square(q)) {
            Rat r(isqrt(num(q)), isqrt(den(q)));
            return FieldElem(Rat(0), r);
        }
        return std::nullopt;
    }
    /* (a + b*sqrt(d))^2 = u needs norm(u) = t^2 and a^2 = (u.x +- t)/2 */
    Rat n = norm(u);
    if (!is_square(n))
        return std::nullopt;
    Rat t(isqrt(num(n)), isqrt(den(n)));
    for (int s = 0; s < 2; s++) {
        Rat asq = (u.x + (s ? -t : t)) / 2;
        if (asq > 0 && is_square(asq)) {
            Rat av(isqrt(num(asq)), isqrt(den(asq)));
            if (av != 0) {
                Rat bv = u.y / (2 * av);
                FieldElem cand(av, bv);
                if (mul(cand, cand) == u)
                    return cand;
            }
        }
    }
    return std::nullopt;
}

int BaseField::sign_at(FieldElem const& u, RealPlace v) const
{
    if (real_places == 0)
        throw input_error("sign_at: no real places");
    if (v.index < 0 || v.index >= real_places)
        throw input_error("sign_at: bad place index");
    FieldElem z = (v.index == 1) ? conj(u) : u;
    if (z.y == 0)
        return sgn(z.x);
    if (z.x == 0)
        return sgn(z.y);
    if (sgn(z.x) == sgn(z.y))
        return sgn(z.x);
    /* x and y*sqrt(d) have opposite signs: compare squares */
    Rat n = z.x * z.x - Rat(d) * z.y * z.y;
    return sgn(z.x) * sgn(n);
}

/* ---------------- ideals ---------------- */

Ideal BaseField::unit_ideal() const { return Ideal{this, Rat(1), Int(1), Int(0)}; }

Ideal BaseField::ideal(Rat const& r) const
{
    if (r == 0)
        throw input_error("zero ideal");
    Rat s = r < 0 ? Rat(-r) : r;
    return Ideal{this, s, Int(1), Int(0)};
}

static Ideal ideal_from_rows(BaseField const* K, Rat const& scale,
                             std::vector<std::array<Int, 2>> const& rows)
{
    Int A, B, C;
    hnf2(rows, A, B, C);
    if (K->is_Q()) {
        if (A == 0)
            throw input_error("zero ideal");
        return Ideal{K, scale * A, Int(1), Int(0)};
    }
    if (A == 0 || C == 0)
        throw input_error("zero ideal");
    /* content of an ideal lattice is the second pivot */
    if (!mpz_divisible_p(A.get_mpz_t(), C.get_mpz_t()) ||
        !mpz_divisible_p(B.get_mpz_t(), C.get_mpz_t()))
        throw internal_error("lattice is not an ideal");
    Int a = div_exact(A, C), b = mod_floor(div_exact(B, C), div_exact(A, C));
    return Ideal{K, scale * C, a, b};
}

Ideal BaseField::ideal_from_gens(std::vector<FieldElem> const& gens) const
{
    std::vector<std::pair<Rat, Rat>> cgens;
    Int D = 1;
    for (auto const& g : gens) {
        if (g.is_zero())
            continue;
        auto [c0, c1] = wcoords(g);
        cgens.push_back({c0, c1});
        if (!is_Q()) {
            /* also g*w, to span the O_K-module generated by g */
            Rat d0 = -c1 * Rat(w_nm), d1 = c0 + c1 * Rat(w_tr);
            cgens.push_back({d0, d1});
        }
        for (auto const& c : {c0, c1}) {
            Int l;
            mpz_lcm(l.get_mpz_t(), D.get_mpz_t(), den(c).get_mpz_t());
            D = l;
        }
    }
    if (cgens.empty())
        throw input_error("zero ideal");
    Int D2 = 1;
    for (auto const& [c0, c1] : cgens) {
        for (auto const& c : {c0, c1}) {
            Int l;
            mpz_lcm(l.get_mpz_t(), D2.get_mpz_t(), den(c).get_mpz_t());
            D2 = l;
        }
    }
    D = D2;
    std::vector<std::array<Int, 2>> rows;
    for (auto const& [c0, c1] : cgens)
        rows.push_back({num(c0) * div_exact(D, den(c0)), num(c1) * div_exact(D, den(c1))});
    return ideal_from_rows(this, Rat(1, 1) / Rat(D), rows);
}

Ideal BaseField::principal_ideal(FieldElem const& g) const
{
    return ideal_from_gens({g});
}

Ideal BaseField::mul(Ideal const& I, Ideal const& J) const
{
    if (I.K != J.K || I.K != this)
        throw input_error("ideal field mismatch");
    if (is_Q())
        return Ideal{this, I.scale * J.scale, Int(1), Int(0)};
    std::vector<std::array<Int, 2>> rows;
    rows.push_back({I.a * J.a, Int(0)});
    rows.push_back({I.a * J.b, I.a});
    rows.push_back({J.a * I.b, J.a});
    rows.push_back({I.b * J.b - w_nm, I.b + J.b + w_tr});
    return ideal_from_rows(this, I.scale * J.scale, rows);
}

Ideal BaseField::pow(Ideal const& I, long e) const
{
    if (e < 0)
        return pow(inverse(I), -e);
    Ideal r = unit_ideal();
    for (long i = 0; i < e; i++)
        r = mul(r, I);
    return r;
}

Ideal BaseField::sum(Ideal const& I, Ideal const& J) const
{
    if (I.K != J.K || I.K != this)
        throw input_error("ideal field mismatch");
    if (is_Q()) {
        Int n = num(I.scale) * den(J.scale), m = num(J.scale) * den(I.scale);
        Int g;
        mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), m.get_mpz_t());
        return Ideal{this, Rat(g) / Rat(den(I.scale) * den(J.scale)), Int(1), Int(0)};
    }
    Int D;
    mpz_lcm(D.get_mpz_t(), den(I.scale).get_mpz_t(), den(J.scale).get_mpz_t());
    Int si = num(I.scale) * div_exact(D, den(I.scale));
    Int sj = num(J.scale) * div_exact(D, den(J.scale));
    std::vector<std::array<Int, 2>> rows = {
        {si * I.a, Int(0)}, {si * I.b, si}, {sj * J.a, Int(0)}, {sj * J.b, sj}};
    return ideal_from_rows(this, Rat(1) / Rat(D), rows);
}

Rat BaseField::ideal_norm(Ideal const& I) const
{
    if (is_Q())
        return I.scale;
    return I.scale * I.scale * Rat(I.a);
}

Ideal BaseField::conj_ideal(Ideal const& I) const
{
    if (is_Q())
        return I;
    std::vector<std::array<Int, 2>> rows = {{I.a, Int(0)}, {I.b + w_tr, Int(-1)}};
    return ideal_from_rows(this, I.scale, rows);
}

Ideal BaseField::inverse(Ideal const& I) const
{
    if (is_Q())
        return Ideal{this, Rat(1) / I.scale, Int(1), Int(0)};
    /* I * conj(I) = (N(I)) */
    Ideal c = conj_ideal(I);
    Rat n = ideal_norm(I);
    c.scale /= n;
    return c;
}

Ideal BaseField::intersect(Ideal const& I, Ideal const& J) const
{
    return mul(mul(I, J), inverse(sum(I, J)));
}

bool BaseField::contains(Ideal const& I, FieldElem const& z) const
{
    if (z.is_zero())
        return true;
    auto [c0, c1] = wcoords(z);
    Rat t0 = c0 / I.scale, t1 = c1 / I.scale;
    if (is_Q())
        return c1 == 0 && is_integer(t0);
    if (!is_integer(t1))
        return false;
    Rat r = (t0 - t1 * Rat(I.b)) / Rat(I.a);
    return is_integer(r);
}

bool BaseField::ideal_divides(Ideal const& I, Ideal const& J) const
{
    /* J subset of I */
    FieldElem g1 = from_wcoords(J.scale * Rat(J.a), Rat(0));
    FieldElem g2 = from_wcoords(J.scale * Rat(J.b), J.scale);
    if (is_Q())
        return contains(I, FieldElem::rational(J.scale));
    return contains(I, g1) && contains(I, g2);
}

bool BaseField::is_integral_ideal(Ideal const& I) const { return is_integer(I.scale); }

bool BaseField::coprime(Ideal const& I, Ideal const& J) const
{
    return sum(I, J).is_unit_ideal();
}

/* ---------------- prime factorization ---------------- */

std::vector<PrimeIdeal> BaseField::factor_prime(Int const& p) const
{
    if (!is_prime(p))
        throw input_error("factor_prime: p must be prime");
    std::vector<PrimeIdeal> out;
    if (is_Q()) {
        out.push_back(PrimeIdeal{ideal(Rat(p)), p, 1, 1, 0});
        return out;
    }
    int k = kronecker_symbol(disc, p);
    if (k == -1) {
        Ideal I{this, Rat(p), Int(1), Int(0)};
        out.push_back(PrimeIdeal{I, p, 1, 2, 0});
        return out;
    }
    if (k == 1) {
        std::vector<Int> bs;
        if (p == 2) {
            /* d = 1 mod 8; both roots of x^2 - x - (d-1)/4 work mod 2 */
            bs = {Int(0), Int(1)};
        } else {
            Int t = *sqrt_mod(d, p);
            if (w_tr == 1) {
                /* roots of x^2 - x - (d-1)/4: x = (1 +- t)/2 */
                Int inv2;
                Int two = 2;
                mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());
                Int x1 = mod_floor((1 + t) * inv2, p), x2 = mod_floor((1 - t) * inv2, p);
                bs = {mod_floor(-x1, p), mod_floor(-x2, p)};
            } else {
                bs = {mod_floor(-t, p), mod_floor(t, p)};
            }
        }
        std::sort(bs.begin(), bs.end());
        int idx = 0;
        for (auto const& b : bs) {
            Ideal I{this, Rat(1), p, b};
            out.push_back(PrimeIdeal{I, p, 1, 1, idx++});
        }
        return out;
    }
    /* ramified */
    Int b;
    if (p == 2) {
        Int m4 = mod_floor(d, 4);
        b = (m4 == 2) ? Int(0) : Int(1);
    } else if (w_tr == 1) {
        b = div_exact(p - 1, Int(2));
    } else {
        b = 0;
    }
    Ideal I{this, Rat(1), p, b};
    out.push_back(PrimeIdeal{I, p, 2, 1, 0});
    return out;
}

std::vector<PrimeIdeal> BaseField::primes_by_norm(Int const& max_norm) const
{
    std::vector<PrimeIdeal> out;
    long lim = (long)max_norm.get_si();
    for (long p : primes_up_to(lim)) {
        for (auto const& v : factor_prime(Int(p)))
            if (v.norm() <= max_norm)
                out.push_back(v);
    }
    std::sort(out.begin(), out.end(), [](PrimeIdeal const& u, PrimeIdeal const& v) {
        if (u.norm() != v.norm())
            return u.norm() < v.norm();
        if (u.p != v.p)
            return u.p < v.p;
        return u.index < v.index;
    });
    return out;
}

long BaseField::ideal_valuation(Ideal const& I, PrimeIdeal const& v) const
{
    long sv = 0;
    if (I.scale != 1) {
        long np = valuation(I.scale, v.p);
        sv = (long)v.e * np;
    }
    if (is_Q() || I.a == 1)
        return sv;
    Ideal X{this, Rat(1), I.a, I.b};
    Ideal vin = inverse(v.ideal);
    long k = 0;
    while (true) {
        Ideal Y = mul(X, vin);
        if (!is_integral_ideal(Y))
            break;
        X = Y;
        k++;
    }
    return sv + k;
}

long BaseField::elem_valuation(FieldElem const& z, PrimeIdeal const& v) const
{
    if (z.is_zero())
        throw input_error("valuation of zero");
    auto [c0, c1] = wcoords(z);
    Int D;
    mpz_lcm(D.get_mpz_t(), den(c0).get_mpz_t(), den(c1).get_mpz_t());
    FieldElem Z = from_wcoords(c0 * Rat(D), c1 * Rat(D));
    long shift = (D == 1) ? 0 : (long)v.e * valuation(Int(D), v.p);
    /* valuation of the integral element Z */
    long k = 0;
    Ideal P = v.ideal;
    while (contains(P, Z)) {
        k++;
        P = mul(P, v.ideal);
    }
    return k - shift;
}

std::vector<std::pair<PrimeIdeal, int>> BaseField::factor_ideal(Ideal const& I) const
{
    Rat n = ideal_norm(I);
    std::vector<Int> ps;
    for (auto const& [p, e] : factor(num(n)))
        ps.push_back(p);
    for (auto const& [p, e] : factor(den(n)))
        ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    std::vector<std::pair<PrimeIdeal, int>> out;
    for (auto const& p : ps) {
        for (auto const& v : factor_prime(p)) {
            long k = ideal_valuation(I, v);
            if (k != 0)
                out.push_back({v, (int)k});
        }
    }
    return out;
}

/* ---------------- uniformizers ---------------- */

FieldElem BaseField::uniformizer(PrimeIdeal const& v) const
{
    if (is_Q())
        return FieldElem::rational(Rat(v.p));
    if (v.f == 2)
        return FieldElem::rational(Rat(v.p));
    if (v.e == 1) {
        FieldElem beta = from_wcoords(Rat(v.ideal.b), Rat(1));
        if (elem_valuation(beta, v) == 1)
            return beta;
        FieldElem beta2 = add(beta, FieldElem::rational(Rat(v.p)));
        if (elem_valuation(beta2, v) != 1)
            throw internal_error("uniformizer search failed");
        return beta2;
    }
    /* ramified */
    FieldElem pi;
    if (w_tr == 0) {
        pi = FieldElem(Rat(0), Rat(1)); /* sqrt(d) */
        if (v.p == 2 && mod_floor(d, 4) == 3)
            pi = FieldElem(Rat(1), Rat(1)); /* 1 + sqrt(d) */
    } else {
        /* odd p | d: (p + sqrt(d))/2 */
        pi = FieldElem(Rat(v.p, 2), Rat(1, 2));
    }
    if (elem_valuation(pi, v) != 1)
        throw internal_error("ramified uniformizer failed");
    return pi;
}

/* ---------------- residues ---------------- */

ResidueField BaseField::residue_field(PrimeIdeal const& v) const
{
    ResidueField F;
    F.p = (uint64_t)v.p.get_ui();
    if (v.p.fits_ulong_p() == 0)
        throw resource_error("residue field characteristic too large");
    F.f = v.f;
    if (v.f == 2) {
        F.wt = (uint64_t)mod_floor(w_tr, v.p).get_ui();
        F.wn = (uint64_t)mod_floor(w_nm, v.p).get_ui();
    }
    return F;
}

ResidueField::El BaseField::residue(FieldElem const& z, PrimeIdeal const& v) const
{
    if (z.is_zero())
        return {0, 0};
    if (elem_valuation(z, v) < 0)
        throw input_error("residue of a non-integral element");
    ResidueField F = residue_field(v);
    auto [c0, c1] = wcoords(z);
    Int D;
    mpz_lcm(D.get_mpz_t(), den(c0).get_mpz_t(), den(c1).get_mpz_t());
    FieldElem Z = from_wcoords(c0 * Rat(D), c1 * Rat(D));
    long k = valuation(D, v.p);
    Int D0 = D;
    for (long i = 0; i < k; i++)
        D0 = div_exact(D0, v.p);
    /* clear the p-power in the denominator: multiply by a unit at v with
     * matching valuation at the conjugate place, then divide exactly */
    if (k > 0) {
        if (is_Q() || v.f == 2 || v.e == 2) {
            /* single prime above p: p^k | Z exactly */
            auto [z0, z1] = wcoords(Z);
            Int pk = 1;
            for (long i = 0; i < k; i++)
                pk *= v.p;
            Rat q0 = z0 / Rat(pk), q1 = z1 / Rat(pk);
            if (!is_integer(q0) || !is_integer(q1))
                throw internal_error("residue: p-power division failed");
            Z = from_wcoords(q0, q1);
        } else {
            /* split: multiply by the conjugate uniformizer's power */
            auto primes = factor_prime(v.p);
            PrimeIdeal const& vbar = (primes[0] == v) ? primes[1] : primes[0];
            FieldElem u = uniformizer(vbar);
            FieldElem Z2 = mul(Z, pow(u, k));
            Int pk = 1;
            for (long i = 0; i < k; i++)
                pk *= v.p;
            auto [z0, z1] = wcoords(Z2);
            Rat q0 = z0 / Rat(pk), q1 = z1 / Rat(pk);
            /* the multiplier may itself carry denominators prime to p */
            Int D2;
            mpz_lcm(D2.get_mpz_t(), den(q0).get_mpz_t(), den(q1).get_mpz_t());
            if (mpz_divisible_p(D2.get_mpz_t(), v.p.get_mpz_t()))
                throw internal_error("residue: split division failed");
            D0 *= D2;
            Z = from_wcoords(q0 * Rat(D2), q1 * Rat(D2));
        }
    }
    auto [z0, z1] = wcoords(Z);
    Int m0 = mod_floor(num(z0), v.p), m1 = mod_floor(num(z1), v.p);
    ResidueField::El r;
    if (v.f == 2) {
        r = {(uint64_t)m0.get_ui(), (uint64_t)m1.get_ui()};
    } else {
        Int t = mod_floor(m0 - m1 * v.ideal.b, v.p); /* w = -b mod v */
        r = {(uint64_t)t.get_ui(), 0};
    }
    /* divide by the prime-to-p denominator */
    Int dm = mod_floor(D0, v.p);
    if (dm == 0)
        throw internal_error("residue: denominator not prime to p");
    ResidueField::El dr{(uint64_t)dm.get_ui(), 0};
    return F.mul(r, F.inv(dr));
}

int BaseField::unit_residue_chi(FieldElem const& z, PrimeIdeal const& v) const
{
    long a = elem_valuation(z, v);
    FieldElem u = (a == 0) ? z : div(z, pow(uniformizer(v), a));
    ResidueField F = residue_field(v);
    int c = F.chi(residue(u, v));
    if (c == 0)
        throw internal_error("unit_residue_chi: unit part reduced to zero");
    return c;
}

FieldElem BaseField::unit_part(FieldElem const& z, PrimeIdeal const& v, long* val_out) const
{
    long a = elem_valuation(z, v);
    if (val_out)
        *val_out = a;
    if (a == 0)
        return z;
    return div(z, pow(uniformizer(v), a));
}

/* ---------------- local squares at dyadic places ---------------- */

namespace {

/* The finite ring O/v^k at a dyadic place, small enough to enumerate.
 * Elements are coordinate pairs (i, j) for i + j*w with 0 <= i < m1,
 * 0 <= j < m2, where the lattice of v^k has rows (m1, 0), (m2b, m2). */
struct DyadicRing {
    long m1, m2, m2b;
    long wt, wn;

    using El = std::pair<long, long>;

    El reduce(Int const& u, Int const& v) const
    {
        Int j = mod_floor(v, Int(m2));
        Int q = div_exact(v - j, Int(m2));
        Int i = mod_floor(u - q * Int(m2b), Int(m1));
        return {(long)i.get_si(), (long)j.get_si()};
    }
    El mul(El a, El b) const
    {
        Int u = Int(a.first) * b.first - Int(a.second) * b.second * wn;
        Int v = Int(a.first) * b.second + Int(a.second) * b.first +
                Int(a.second) * b.second * wt;
        return reduce(u, v);
    }
    std::vector<El> all() const
    {
        std::vector<El> out;
        out.reserve((size_t)(m1 * m2));
        for (long i = 0; i < m1; i++)
            for (long j = 0; j < m2; j++)
                out.push_back({i, j});
        return out;
    }
    El inv_brute(El a) const
    {
        for (auto const& x : all())
            if (mul(a, x) == El{1 % m1, 0})
                return x;
        throw internal_error("non-invertible element in dyadic ring");
    }
};

} // namespace

static DyadicRing make_dyadic_ring(BaseField const& K, PrimeIdeal const& v, int k)
{
    Ideal P = K.pow(v.ideal, k);
    /* P = scale * (aZ + (b+w)Z), scale a positive integer here */
    Int s = num(P.scale);
    Int sm1 = s * P.a, sm2b = s * P.b;
    DyadicRing R;
    R.m1 = (long)sm1.get_si();
    R.m2 = (long)s.get_si();
    R.m2b = (long)sm2b.get_si();
    R.wt = K.is_Q() ? 0 : (long)K.w_tr.get_si();
    R.wn = K.is_Q() ? 0 : (long)K.w_nm.get_si();
    if (K.is_Q())
        R.m2 = 1, R.m2b = 0;
    return R;
}

/* image of z (with ord_v(z) >= 0) in O/v^k */
static DyadicRing::El dyadic_reduce(BaseField const& K, PrimeIdeal const& v, DyadicRing const& R,
                                    FieldElem const& z)
{
    auto [c0, c1] = K.wcoords(z);
    Int D;
    mpz_lcm(D.get_mpz_t(), den(c0).get_mpz_t(), den(c1).get_mpz_t());
    FieldElem Z = K.from_wcoords(c0 * Rat(D), c1 * Rat(D));
    long k2 = valuation(D, v.p);
    Int D0 = D;
    for (long i = 0; i < k2; i++)
        D0 = div_exact(D0, v.p);

    DyadicRing::El mult_fix{1 % R.m1, 0};
    if (k2 > 0) {
        if (!K.is_Q() && v.f == 1 && v.e == 1) {
            /* split: clear via the conjugate uniformizer */
            auto primes = K.factor_prime(v.p);
            PrimeIdeal const& vbar = (primes[0] == v) ? primes[1] : primes[0];
            FieldElem u = K.uniformizer(vbar);
            Z = K.mul(Z, K.pow(u, k2));
            /* account for the extra unit factor: divide by u^k2 in the ring */
            auto [u0, u1] = K.wcoords(u);
            DyadicRing::El ur = R.reduce(num(u0), num(u1));
            DyadicRing::El uinv = R.inv_brute(ur);
            for (long i = 0; i < k2; i++)
                mult_fix = R.mul(mult_fix, uinv);
        }
        auto [z0, z1] = K.wcoords(Z);
        Int pk = 1;
        for (long i = 0; i < k2; i++)
            pk *= v.p;
        Rat q0 = z0 / Rat(pk), q1 = z1 / Rat(pk);
        if (!is_integer(q0) || !is_integer(q1))
            throw internal_error("dyadic_reduce: p-power division failed");
        Z = K.from_wcoords(q0, q1);
    }
    auto [z0, z1] = K.wcoords(Z);
    DyadicRing::El r = R.reduce(num(z0), num(z1));
    r = R.mul(r, mult_fix);
    if (D0 != 1) {
        DyadicRing::El dr = R.reduce(D0, Int(0));
        r = R.mul(r, R.inv_brute(dr));
    }
    return r;
}

bool BaseField::unit_square_mod(FieldElem const& z, PrimeIdeal const& v, int k) const
{
    DyadicRing R = make_dyadic_ring(*this, v, k);
    DyadicRing::El zr = dyadic_reduce(*this, v, R, z);
    for (auto const& s : R.all())
        if (R.mul(s, s) == zr)
            return true;
    return false;
}

bool BaseField::is_local_square(FieldElem const& z, PrimeIdeal const& v) const
{
    if (z.is_zero())
        throw input_error("is_local_square: zero");
    long a = elem_valuation(z, v);
    if (a % 2 != 0)
        return false;
    FieldElem u = (a == 0) ? z : div(z, pow(uniformizer(v), a));
    if (v.p != 2)
        return unit_residue_chi(u, v) == 1;
    return unit_square_mod(u, v, 2 * v.e + 1);
}

int BaseField::local_disc_exponent(FieldElem const& z, PrimeIdeal const& v) const
{
    if (z.is_zero())
        throw input_error("local_disc_exponent: zero");
    long a = elem_valuation(z, v);
    FieldElem u = (a == 0) ? z : div(z, pow(uniformizer(v), a));
    if (v.p != 2) {
        if (a % 2 != 0)
            return 1;
        return 0;
    }
    int e2 = v.e;
    if (a % 2 != 0)
        return 2 * e2 + 1;
    if (unit_square_mod(u, v, 2 * e2 + 1))
        return 0; /* square */
    if (unit_square_mod(u, v, 2 * e2))
        return 0; /* unramified quadratic class */
    for (int j = 2 * e2 - 1; j >= 1; j -= 2)
        if (unit_square_mod(u, v, j))
            return 2 * e2 + 1 - j;
    throw internal_error("local_disc_exponent: no approximation level found");
}

/* ---------------- indefinite form reduction (real quadratic) ---------------- */

namespace {

struct QForm {
    Int a, b, c;
    bool operator==(QForm const& o) const { return a == o.a && b == o.b && c == o.c; }
};

/* basis transform per rho step: (v1, v2) <- (v2, -v1 + m*v2) */
struct Walker {
    Int D, s; /* s = floor(sqrt(D)) */
    QForm f;
    /* v1 = (x1, y1), v2 = (x2, y2) in the original basis */
    Int x1, y1, x2, y2;

    bool reduced() const
    {
        if (f.b <= 0 || f.b > s)
            return false;
        Int t = 2 * abs(f.a);
        bool upper = (t <= f.b) ? true : ((t - f.b) * (t - f.b) < D);
        bool lower = (t + f.b) * (t + f.b) > D;
        return upper && lower;
    }

    void step()
    {
        Int C = f.c;
        if (C == 0)
            throw internal_error("degenerate form");
        Int ac = abs(C), m, bp;
        if (ac > s) {
            Int q = div_floor(f.b + ac, 2 * ac);
            m = (C > 0) ? q : Int(-q);
            bp = 2 * C * m - f.b;
        } else {
            Int t = mod_floor(s + f.b, 2 * ac);
            bp = s - t;
            m = div_exact(f.b + bp, 2 * C);
        }
        Int cp = div_exact(bp * bp - D, 4 * C);
        f = QForm{C, bp, cp};
        Int nx1 = x2, ny1 = y2;
        Int nx2 = -x1 + m * x2, ny2 = -y1 + m * y2;
        x1 = nx1;
        y1 = ny1;
        x2 = nx2;
        y2 = ny2;
    }
};

} // namespace

void BaseField::compute_fundamental_unit()
{
    /* walk one full reduction cycle of the principal form, tracking the basis
     * (1, w); every form with leading coefficient +-1 yields a unit v1, and
     * the fundamental unit is the smallest nontrivial one > 1 */
    Walker W;
    W.D = disc;
    W.s = isqrt(disc);
    W.f = QForm{Int(1), w_tr, w_nm};
    W.x1 = 1;
    W.y1 = 0;
    W.x2 = 0;
    W.y2 = 1;
    long guard = 0;
    std::vector<FieldElem> candidates;
    auto collect = [&]() {
        if (abs(W.f.a) != 1)
            return;
        FieldElem g = from_wcoords(Rat(W.x1), Rat(W.y1));
        if (g.y == 0 && (g.x == 1 || g.x == -1))
            return;
        /* normalize to the representative > 1 at the first embedding */
        FieldElem gi = inv(g);
        for (FieldElem const& c : {g, neg(g), gi, neg(gi)}) {
            if (sign_at(sub(c, FieldElem::rational(1)), RealPlace{0}) > 0) {
                candidates.push_back(c);
                return;
            }
        }
    };
    std::optional<QForm> start;
    while (true) {
        if (++guard > 10000000)
            throw internal_error("fundamental unit search did not terminate");
        if (!start && W.reduced()) {
            start = W.f;
            collect();
        }
        W.step();
        if (start) {
            collect();
            if (W.f == *start)
                break;
        }
    }
    if (candidates.empty())
        throw internal_error("principal cycle produced no unit");
    FieldElem best = candidates[0];
    for (auto const& c : candidates)
        if (sign_at(sub(best, c), RealPlace{0}) > 0)
            best = c;
    fundamental_unit = best;
    unit_norm = (norm(best) > 0) ? 1 : -1;
}

/* ---------------- principality ---------------- */

std::optional<FieldElem> BaseField::principal_generator(Ideal const& I) const
{
    if (is_Q())
        return FieldElem::rational(I.scale);
    /* reduce to the primitive part */
    Ideal J{this, Rat(1), I.a, I.b};
    Rat q = I.scale;
    if (J.is_unit_ideal())
        return FieldElem::rational(q);
    Int A = J.a, B = 2 * J.b + w_tr;
    Int Cnum = J.b * J.b + J.b * w_tr + w_nm;
    if (!mpz_divisible_p(Cnum.get_mpz_t(), A.get_mpz_t()))
        throw internal_error("ideal invariant violated");
    Int C = div_exact(Cnum, A);
    /* generators u1 = A, u2 = J.b + w; N(x*u1 + y*u2) = A * F(x, y) */
    auto elem_of = [&](Int const& xx, Int const& yy) {
        return from_wcoords(Rat(xx * A + yy * J.b), Rat(yy));
    };

    if (d < 0) {
        /* positive definite: solve F(x, y) = 1 directly */
        Int Dabs = 4 * A * C - B * B;
        Int ymax = isqrt(4 * A / Dabs) + 1;
        for (Int y = -ymax; y <= ymax; y++) {
            Int discx = 4 * A - Dabs * y * y;
            if (discx < 0)
                continue;
            if (!is_square(discx))
                continue;
            Int t = isqrt(discx);
            for (int sgn2 = 0; sgn2 < 2; sgn2++) {
                Int numx = -B * y + (sgn2 ? -t : t);
                Int twoA = 2 * A;
                if (!mpz_divisible_p(numx.get_mpz_t(), twoA.get_mpz_t()))
                    continue;
                Int x = div_exact(numx, twoA);
                FieldElem g = elem_of(x, y);
                if (norm(g) == Rat(A))
                    return mul(g, FieldElem::rational(q));
            }
        }
        return std::nullopt;
    }

    /* real quadratic: walk the cycle of the associated indefinite form */
    Walker W;
    W.D = disc;
    W.s = isqrt(disc);
    W.f = QForm{A, B, C};
    W.x1 = 1;
    W.y1 = 0;
    W.x2 = 0;
    W.y2 = 1;
    long guard = 0;
    std::optional<QForm> start;
    while (true) {
        if (++guard > 10000000)
            throw resource_error("principality walk did not terminate");
        if (abs(W.f.a) == 1) {
            FieldElem g = elem_of(W.x1, W.y1);
            Rat n = norm(g);
            if (n != Rat(A) && n != -Rat(A))
                throw internal_error("principal generator mismatch");
            return mul(g, FieldElem::rational(q));
        }
        if (!start && W.reduced())
            start = W.f;
        W.step();
        if (start && W.f == *start)
            return std::nullopt;
    }
}

/* ---------------- class group ---------------- */

int BaseField::class_index(Ideal const& I) const
{
    Ideal P{this, Rat(1), I.a, I.b};
    for (size_t j = 0; j < class_group.size(); j++) {
        Ideal T = mul(P, conj_ideal(class_group[j].rep));
        if (is_principal(T))
            return (int)j;
    }
    return -1;
}

void BaseField::build_class_group(int cap)
{
    Int bound;
    if (d > 1)
        bound = isqrt(disc) / 2 + 1;
    else
        bound = (2 * isqrt(abs(disc))) / 3 + 2;
    std::vector<Ideal> reps = {unit_ideal()};
    auto index_of = [&](Ideal const& P) -> int {
        for (size_t j = 0; j < reps.size(); j++) {
            Ideal T = mul(P, conj_ideal(reps[j]));
            if (is_principal(T))
                return (int)j;
        }
        return -1;
    };
    long lim = (long)bound.get_si();
    for (long p : primes_up_to(std::max(2L, lim))) {
        for (auto const& v : factor_prime(Int(p))) {
            if (v.f == 2)
                continue; /* inert primes are principal */
            if (v.norm() > bound)
                continue;
            Ideal P{this, Rat(1), v.ideal.a, v.ideal.b};
            if (index_of(P) >= 0)
                continue;
            reps.push_back(P);
            /* close under multiplication */
            bool grew = true;
            while (grew) {
                grew = false;
                size_t n = reps.size();
                for (size_t i = 1; i < n && !grew; i++) {
                    for (size_t j = i; j < n && !grew; j++) {
                        Ideal Q = mul(reps[i], reps[j]);
                        Ideal Qp{this, Rat(1), Q.a, Q.b};
                        if (index_of(Qp) < 0) {
                            reps.push_back(Qp);
                            grew = true;
                        }
                    }
                }
                if ((int)reps.size() > cap)
                    throw resource_error("class group enumeration exceeded cap");
            }
        }
    }
    class_group.clear();
    for (auto const& r : reps) {
        int ord = 1;
        Ideal X = r;
        while (!is_principal(X)) {
            X = mul(X, r);
            Ideal Xp{this, Rat(1), X.a, X.b};
            X = Xp;
            ord++;
            if (ord > cap)
                throw resource_error("class order computation exceeded cap");
        }
        class_group.push_back(IdealClass{r, ord});
    }
}

PrimeIdeal BaseField::prime_in_class(int cls, std::vector<PrimeIdeal> const& avoid,
                                     Int const& start_norm) const
{
    if (cls < 0 || cls >= (int)class_group.size())
        throw input_error("prime_in_class: bad class index");
    for (long p : primes_up_to(5000)) {
        for (auto const& v : factor_prime(Int(p))) {
            if (v.norm() < start_norm)
                continue;
            bool bad = false;
            for (auto const& w : avoid)
                if (w == v)
                    bad = true;
            if (bad)
                continue;
            Ideal P{this, Rat(1), v.ideal.a, v.ideal.b};
            Ideal T = mul(P, conj_ideal(class_group[cls].rep));
            if (is_principal(T))
                return v;
        }
    }
    throw resource_error("prime_in_class: search bound exhausted");
}

} // namespace selquat
