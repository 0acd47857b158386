#include "selquat/quadratic_ext.hpp"

#include <algorithm>

namespace selquat {

std::variant<QuadExt, SplitAlgebra> QuadExt::make(FieldPtr K, FieldElem delta)
{
    if (delta.is_zero())
        throw input_error("make_extension: delta must be nonzero");
    if (K->is_square_elem(delta))
        return SplitAlgebra{};

    /* clear denominators and strip the rational square content */
    auto [c0, c1] = K->wcoords(delta);
    Int D;
    mpz_lcm(D.get_mpz_t(), den(c0).get_mpz_t(), den(c1).get_mpz_t());
    delta = K->mul(delta, FieldElem::rational(Rat(D * D)));
    std::tie(c0, c1) = K->wcoords(delta);
    Int g;
    mpz_gcd(g.get_mpz_t(), num(c0).get_mpz_t(), num(c1).get_mpz_t());
    if (g == 0)
        g = (c0 == 0) ? num(c1) : num(c0);
    Int f = square_content(g);
    if (f > 1)
        delta = K->mul(delta, FieldElem::rational(Rat(1, f * f)));

    QuadExt E;
    E.K = K;
    E.delta = delta;

    /* candidate ramified places divide 2*N(delta) */
    Rat nd = K->norm(delta);
    std::vector<Int> ps = {Int(2)};
    for (auto const& [p, e] : factor(num(nd)))
        ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    Ideal rd = K->unit_ideal();
    for (auto const& p : ps) {
        for (auto const& v : K->factor_prime(p)) {
            int k = K->local_disc_exponent(delta, v);
            if (k > 0)
                rd = K->mul(rd, K->pow(v.ideal, k));
        }
    }
    E.rel_disc = rd;
    for (int i = 0; i < K->real_places; i++)
        if (K->sign_at(delta, RealPlace{i}) < 0)
            E.ramified_real.push_back(RealPlace{i});
    return E;
}

QuadExt QuadExt::make_field(FieldPtr K, FieldElem delta)
{
    auto r = make(std::move(K), std::move(delta));
    if (std::holds_alternative<SplitAlgebra>(r))
        throw input_error("delta is a square: not a field extension");
    return std::get<QuadExt>(r);
}

bool QuadExt::same(QuadExt const& o) const
{
    if (K.get() != o.K.get())
        return false;
    return K->is_square_elem(K->mul(delta, o.delta));
}

SplitType QuadExt::split_type(PrimeIdeal const& v) const
{
    if (K->ideal_valuation(rel_disc, v) > 0)
        return SplitType::Ramified;
    return K->is_local_square(delta, v) ? SplitType::Split : SplitType::Inert;
}

SplitType QuadExt::split_type(RealPlace const& v) const
{
    return K->sign_at(delta, v) < 0 ? SplitType::Ramified : SplitType::Split;
}

SplitType QuadExt::split_type(Place const& v) const
{
    if (auto* fp = std::get_if<PrimeIdeal>(&v))
        return split_type(*fp);
    return split_type(std::get<RealPlace>(v));
}

int QuadExt::char_value(Ideal const& a) const
{
    int out = 1;
    for (auto const& [v, k] : K->factor_ideal(a)) {
        SplitType t = split_type(v);
        if (t == SplitType::Ramified)
            throw input_error("character undefined: ideal shares support with rel_disc");
        if (t == SplitType::Inert && (k % 2 != 0))
            out = -out;
    }
    return out;
}

QuadOrder QuadOrder::make(std::variant<QuadExt, SplitAlgebra> const& ext, Ideal const& f)
{
    QuadOrder W;
    W.ext = ext;
    W.conductor = f;
    W.is_domain = std::holds_alternative<QuadExt>(ext);
    if (W.is_domain) {
        auto const& E = std::get<QuadExt>(ext);
        if (!E.K->is_integral_ideal(f) || f.scale == 0)
            throw input_error("conductor must be a nonzero integral ideal");
        W.disc = E.K->mul(E.K->mul(f, f), E.rel_disc);
    } else {
        W.disc = f.K->mul(f, f);
    }
    return W;
}

} // namespace selquat
