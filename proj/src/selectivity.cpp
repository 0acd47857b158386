#include "selquat/selectivity.hpp"

namespace selquat {

Assumptions check_assumptions(OrderSpec const& R, QuadOrder const& W)
{
    return Assumptions{R.assumption_coprime_disc_level(W.disc),
                       R.assumption_level_coprime_ramification()};
}

std::optional<PrimeIdeal> ramified_outside_level(OrderSpec const& R, QuadExt const& E)
{
    auto const& K = R.algebra.K;
    for (auto const& [v, k] : K->factor_ideal(E.rel_disc)) {
        if (K->ideal_valuation(R.level_ideal, v) == 0)
            return v;
    }
    return std::nullopt;
}

static Verdict all_classes(std::string provenance, std::optional<QuadExt> ext)
{
    Verdict v;
    v.outcome = Outcome::AllClasses;
    v.provenance = std::move(provenance);
    v.ext = std::move(ext);
    return v;
}

/* shared tail of both deciders: everything after the split-algebra check */
static Verdict decide_core(OrderSpec const& R, QuadOrder const& W, Int const& window_start,
                           bool optimal)
{
    auto const& K = R.algebra.K;
    QuadExt const& E = W.field();
    if (E.K.get() != K.get())
        throw input_error("order and algebra live over different fields");

    if (!field_embeds(R.algebra, E)) {
        Verdict v;
        v.outcome = Outcome::NoEmbedding;
        v.provenance = "Theorem 1.1";
        v.ext = E;
        return v;
    }

    /* obstructions valid without the coprimality assumptions */
    if (ramified_outside_level(R, E))
        return all_classes(optimal ? "Proposition 6.2" : "Corollary 5.6", E);
    if (!in_class_field(R, E))
        return all_classes(optimal ? "Proposition 6.2" : "Proposition 5.5", E);

    Assumptions as = check_assumptions(R, W);
    if (!as.both())
        throw assumptions_error(
            std::string("the selectivity criteria require coprimality assumptions: ") +
                (as.coprime_disc_level ? "" : "[order discriminant vs level] ") +
                (as.level_coprime_ramification ? "" : "[level vs algebra ramification]"),
            as.coprime_disc_level, as.level_coprime_ramification);

    /* all divisors of the order discriminant must split in L */
    for (auto const& [v, k] : K->factor_ideal(W.disc)) {
        if (E.split_type(v) != SplitType::Split)
            return all_classes(optimal ? "Theorem 6.4" : "Proposition 5.7", E);
    }

    /* selective: exactly half the classes admit, cut out by Frobenius */
    Verdict v;
    v.outcome = Outcome::Half;
    v.provenance = optimal ? "Theorem 6.4" : "Theorem 5.2";
    v.ext = E;
    GenusDual dual = genus_characters(R);
    if (dual.rank() == 0)
        throw internal_error("selective verdict with a trivial genus");
    v.classes = parameterize(R, dual, E, window_start);
    v.param = v.classes[0].param;
    GenusClass const& base = v.classes[0];
    for (auto const& c : v.classes)
        if (frobenius(E, distance(base, c)) == 1)
            v.admitting.push_back(c);
    if (2 * v.admitting.size() != v.classes.size())
        throw internal_error("Frobenius partition is not exactly half");
    return v;
}

Verdict decide_embedding(OrderSpec const& R, QuadOrder const& W, Int const& window_start)
{
    if (!satisfies_eichler(R.algebra))
        throw eichler_error("decision requires the Eichler condition");
    if (!W.is_domain)
        return all_classes("Proposition 5.4", std::nullopt);
    return decide_core(R, W, window_start, false);
}

Verdict decide_optimal(OrderSpec const& R, QuadOrder const& W, Int const& window_start)
{
    if (!satisfies_eichler(R.algebra))
        throw eichler_error("decision requires the Eichler condition");
    if (!W.is_domain)
        throw input_error("optimal embedding decision requires an integral domain");
    return decide_core(R, W, window_start, true);
}

bool admits(GenusClass const& c, Verdict const& v)
{
    switch (v.outcome) {
    case Outcome::AllClasses:
        return true;
    case Outcome::NoEmbedding:
        return false;
    default:
        break;
    }
    if (!v.param || c.param != v.param)
        throw input_error("class belongs to a different parameterization");
    return frobenius(*v.ext, distance(v.classes[0], c)) == 1;
}

} // namespace selquat
