#include "selquat/order_genus.hpp"

#include <algorithm>

namespace selquat {

OrderSpec OrderSpec::make(QuatAlg A, std::vector<LocalOrderData> entries)
{
    if (!satisfies_eichler(A))
        throw eichler_error("order spec requires the Eichler condition");
    OrderSpec R;
    R.level_ideal = A.K->unit_ideal();
    for (size_t i = 0; i < entries.size(); i++) {
        auto const& e = entries[i];
        if (e.kind == LocalOrderData::Kind::Maximal)
            continue;
        if (e.exponent < 1)
            throw input_error("non-maximal local data requires exponent >= 1");
        for (size_t j = 0; j < i; j++)
            if (entries[j].place == e.place)
                throw input_error("duplicate local data at one place");
        if (e.kind == LocalOrderData::Kind::Eichler && A.is_ramified(Place{e.place}))
            throw input_error("Eichler local data at a place ramified in the algebra");
        R.level_ideal = A.K->mul(R.level_ideal, A.K->pow(e.place.ideal, e.exponent));
        R.local.push_back(e);
    }
    R.algebra = std::move(A);
    return R;
}

LocalOrderData OrderSpec::local_at(PrimeIdeal const& v) const
{
    for (auto const& e : local)
        if (e.place == v)
            return e;
    LocalOrderData m;
    m.place = v;
    m.kind = LocalOrderData::Kind::Maximal;
    return m;
}

bool OrderSpec::assumption_coprime_disc_level(Ideal const& order_disc) const
{
    return algebra.K->coprime(order_disc, level_ideal);
}

bool OrderSpec::assumption_level_coprime_ramification() const
{
    return algebra.K->coprime(level_ideal, algebra.disc_ideal);
}

/* ---------------- local rules ---------------- */

bool local_char_trivial(OrderSpec const& R, QuadExt const& E, Place const& v)
{
    auto const& K = R.algebra.K;
    if (auto* rp = std::get_if<RealPlace>(&v)) {
        /* ramified in the algebra: norms are the positive reals */
        if (R.algebra.is_ramified(v))
            return true;
        return E.split_type(*rp) == SplitType::Split;
    }
    auto const& fp = std::get<PrimeIdeal>(v);
    LocalOrderData data = R.local_at(fp);
    SplitType t = E.split_type(fp);
    switch (data.kind) {
    case LocalOrderData::Kind::Maximal:
        if (R.algebra.is_ramified(v))
            return t == SplitType::Split; /* norms are everything */
        return t != SplitType::Ramified; /* norms are units times squares */
    case LocalOrderData::Kind::Eichler:
        /* units plus the Atkin-Lehner class of valuation e */
        if (t == SplitType::Ramified)
            return false;
        return (data.exponent % 2 == 0) || t == SplitType::Split;
    case LocalOrderData::Kind::Custom:
    default:
        if (data.units_contained && t == SplitType::Ramified)
            return false;
        if (data.odd_valuations) {
            if (data.units_contained)
                return t == SplitType::Split;
            /* only the class of the stored uniformizer is guaranteed */
            return hilbert_symbol(K, v, E.delta, K->uniformizer(fp)) == 1;
        }
        return true;
    }
}

ClassFieldTrace in_class_field_trace(OrderSpec const& R, QuadExt const& E)
{
    auto const& K = R.algebra.K;
    if (K.get() != E.K.get())
        throw input_error("field mismatch");
    ClassFieldTrace out;
    std::vector<Place> places;
    for (int i = 0; i < K->real_places; i++)
        places.push_back(RealPlace{i});
    std::vector<PrimeIdeal> fin;
    for (auto const& v : R.algebra.finite_ramified())
        fin.push_back(v);
    for (auto const& e : R.local)
        fin.push_back(e.place);
    for (auto const& [v, k] : K->factor_ideal(E.rel_disc))
        fin.push_back(v);
    std::sort(fin.begin(), fin.end());
    fin.erase(std::unique(fin.begin(), fin.end()), fin.end());
    for (auto const& v : fin)
        places.push_back(v);

    for (auto const& v : places) {
        bool ok = local_char_trivial(R, E, v);
        std::string rule;
        if (std::holds_alternative<RealPlace>(v)) {
            rule = R.algebra.is_ramified(v) ? "real-ramified-in-algebra" : "real-split-in-algebra";
        } else {
            auto const& fp = std::get<PrimeIdeal>(v);
            auto data = R.local_at(fp);
            if (data.kind == LocalOrderData::Kind::Maximal)
                rule = R.algebra.is_ramified(v) ? "maximal-at-ramified" : "maximal-at-split";
            else if (data.kind == LocalOrderData::Kind::Eichler)
                rule = "eichler-level-" + std::to_string(data.exponent);
            else
                rule = "custom";
        }
        out.entries.push_back({v, rule, ok});
        if (!ok)
            out.contains = false;
    }
    return out;
}

bool in_class_field(OrderSpec const& R, QuadExt const& E)
{
    return in_class_field_trace(R, E).contains;
}

/* ---------------- square classes and the dual ---------------- */

namespace {

/* independence of square classes: x is in the span of the basis iff some
 * subset product times x is a square */
bool in_square_span(BaseField const& K, std::vector<FieldElem> const& basis, FieldElem const& x)
{
    size_t n = basis.size();
    for (size_t mask = 0; mask < (size_t(1) << n); mask++) {
        FieldElem prod = x;
        for (size_t i = 0; i < n; i++)
            if (mask & (size_t(1) << i))
                prod = K.mul(prod, basis[i]);
        if (K.is_square_elem(prod))
            return true;
    }
    return false;
}

} // namespace

GenusDual genus_characters(OrderSpec const& R)
{
    auto const& Kp = R.algebra.K;
    BaseField const& K = *Kp;
    auto S = K.factor_ideal(R.level_ideal);
    if (S.size() > 6 || K.class_number() > 16)
        throw resource_error("square-class enumeration bounds exceeded");

    /* generators of the classes with even valuation outside the level
     * support: units modulo squares, plus a generator for every principal
     * combination prod(nu^a) * c^2 over class representatives c */
    std::vector<FieldElem> gens;
    if (K.d == -1)
        gens.push_back(FieldElem(Rat(0), Rat(1))); /* i; -1 is a square here */
    else
        gens.push_back(FieldElem::rational(-1));
    if (K.fundamental_unit)
        gens.push_back(*K.fundamental_unit);

    size_t ns = S.size();
    for (size_t mask = 0; mask < (size_t(1) << ns); mask++) {
        for (auto const& cls : K.class_group) {
            if (mask == 0 && cls.order == 1)
                continue; /* trivial combination */
            Ideal I = K.mul(cls.rep, cls.rep);
            for (size_t i = 0; i < ns; i++)
                if (mask & (size_t(1) << i))
                    I = K.mul(I, S[i].first.ideal);
            auto g = K.principal_generator(I);
            if (g)
                gens.push_back(*g);
        }
    }

    /* independent basis of the generated square-class group */
    std::vector<FieldElem> basis;
    for (auto const& g : gens) {
        if (K.is_square_elem(g))
            continue;
        if (!in_square_span(K, basis, g))
            basis.push_back(g);
    }
    if (basis.size() > 12)
        throw resource_error("square-class group too large");

    /* filter by the class-field test and extract an independent basis */
    std::vector<FieldElem> kept;
    for (size_t mask = 1; mask < (size_t(1) << basis.size()); mask++) {
        FieldElem x = FieldElem::rational(1);
        for (size_t i = 0; i < basis.size(); i++)
            if (mask & (size_t(1) << i))
                x = K.mul(x, basis[i]);
        QuadExt E = QuadExt::make_field(Kp, x);
        if (in_class_field(R, E))
            kept.push_back(E.delta);
    }
    GenusDual dual;
    std::vector<FieldElem> dbasis;
    for (auto const& x : kept) {
        if (!in_square_span(K, dbasis, x)) {
            dbasis.push_back(x);
            dual.basis.push_back(QuadExt::make_field(Kp, x));
        }
    }
    /* the kept set must be the group generated by the basis */
    if (kept.size() + 1 != (size_t(1) << dual.basis.size()))
        throw internal_error("genus dual is not a subgroup");
    return dual;
}

/* ---------------- parameterization ---------------- */

std::vector<GenusClass> parameterize(OrderSpec const& R, GenusDual const& dual,
                                     std::optional<QuadExt> const& ext, Int const& window_start)
{
    auto const& Kp = R.algebra.K;
    BaseField const& K = *Kp;
    int m = dual.rank();
    auto param = std::make_shared<Parameterization>();
    param->dual = dual;

    if (m > 0) {
        /* skip set: ramified places, level divisors, discriminants */
        std::vector<PrimeIdeal> skip = R.algebra.finite_ramified();
        for (auto const& e : R.local)
            skip.push_back(e.place);
        for (auto const& chi : dual.basis)
            for (auto const& [v, k] : K.factor_ideal(chi.rel_disc))
                skip.push_back(v);
        if (ext)
            for (auto const& [v, k] : K.factor_ideal(ext->rel_disc))
                skip.push_back(v);

        bool honor = ext && in_class_field(R, *ext);

        auto vec_of = [&](PrimeIdeal const& v) {
            std::vector<int> vec(m);
            for (int i = 0; i < m; i++)
                vec[i] = dual.basis[i].split_type(v) == SplitType::Inert ? 1 : 0;
            return vec;
        };
        auto in_span = [&](std::vector<std::vector<int>> const& rows, std::vector<int> v) {
            /* F_2 elimination */
            std::vector<std::vector<int>> red = rows;
            for (size_t r = 0; r < red.size(); r++) {
                int p = -1;
                for (int j = 0; j < m; j++)
                    if (red[r][j]) {
                        p = j;
                        break;
                    }
                if (p < 0)
                    continue;
                if (v[p])
                    for (int j = 0; j < m; j++)
                        v[j] ^= red[r][j];
                for (size_t r2 = r + 1; r2 < red.size(); r2++)
                    if (red[r2][p])
                        for (int j = 0; j < m; j++)
                            red[r2][j] ^= red[r][j];
            }
            for (int j = 0; j < m; j++)
                if (v[j])
                    return false;
            return true;
        };

        std::optional<PrimeIdeal> inert_prime;
        std::vector<PrimeIdeal> split_primes;
        std::vector<std::vector<int>> split_vecs;
        std::vector<PrimeIdeal> plain_primes;
        std::vector<std::vector<int>> plain_vecs;

        Int bound = 1000;
        bool done = false;
        while (!done) {
            for (auto const& v : K.primes_by_norm(bound)) {
                if (v.norm() < window_start)
                    continue;
                bool bad = false;
                for (auto const& s : skip)
                    if (s == v)
                        bad = true;
                if (bad)
                    continue;
                auto vec = vec_of(v);
                if (honor) {
                    SplitType t = ext->split_type(v);
                    if (t == SplitType::Inert && !inert_prime)
                        inert_prime = v;
                    if (t == SplitType::Split && (int)split_primes.size() < m - 1 &&
                        !in_span(split_vecs, vec)) {
                        split_primes.push_back(v);
                        split_vecs.push_back(vec);
                    }
                    if (inert_prime && (int)split_primes.size() == m - 1) {
                        done = true;
                        break;
                    }
                } else {
                    if ((int)plain_primes.size() < m && !in_span(plain_vecs, vec)) {
                        plain_primes.push_back(v);
                        plain_vecs.push_back(vec);
                    }
                    if ((int)plain_primes.size() == m) {
                        done = true;
                        break;
                    }
                }
            }
            if (!done) {
                bound *= 8;
                if (bound > 200000)
                    throw resource_error(
                        "generator prime search exhausted; raise the prime bound");
            }
        }
        if (honor) {
            param->generator_primes.push_back(*inert_prime);
            for (auto const& v : split_primes)
                param->generator_primes.push_back(v);
            /* the inert prime completes the basis: its pairing with the
             * character of ext is nontrivial while split vectors pair to 0 */
            if (in_span(split_vecs, vec_of(*inert_prime)))
                throw internal_error("generator basis degenerate");
        } else {
            param->generator_primes = plain_primes;
        }
    }

    std::vector<GenusClass> out;
    std::shared_ptr<const Parameterization> cp = param;
    for (size_t mask = 0; mask < (size_t(1) << m); mask++) {
        GenusClass c;
        c.param = cp;
        c.gamma.resize(m);
        for (int i = 0; i < m; i++)
            c.gamma[i] = (mask >> i) & 1;
        out.push_back(std::move(c));
    }
    return out;
}

DistanceClass distance(GenusClass const& c1, GenusClass const& c2)
{
    if (c1.param != c2.param)
        throw input_error("distance between classes of different parameterizations");
    DistanceClass d;
    d.param = c1.param;
    d.bits.resize(c1.gamma.size());
    for (size_t i = 0; i < c1.gamma.size(); i++)
        d.bits[i] = c1.gamma[i] ^ c2.gamma[i];
    return d;
}

int frobenius(QuadExt const& E, DistanceClass const& d)
{
    int out = 1;
    for (size_t i = 0; i < d.bits.size(); i++) {
        if (!d.bits[i])
            continue;
        SplitType t = E.split_type(d.param->generator_primes[i]);
        if (t == SplitType::Ramified)
            throw input_error("frobenius undefined: generator prime ramifies");
        if (t == SplitType::Inert)
            out = -out;
    }
    return out;
}

} // namespace selquat
