#pragma once

#include <variant>

#include "selquat/base_field.hpp"

namespace selquat {

enum class SplitType { Split, Inert, Ramified };

inline char const* split_type_str(SplitType t)
{
    switch (t) {
    case SplitType::Split:
        return "split";
    case SplitType::Inert:
        return "inert";
    default:
        return "ramified";
    }
}

/* delta was a square: K(sqrt(delta)) is the split etale algebra, not a field */
struct SplitAlgebra {};

/* The quadratic extension L = K(sqrt(delta)) with its relative discriminant
 * and the splitting data of places, i.e. the quadratic character cut out by
 * L/K evaluated through Frobenius. */
class QuadExt {
  public:
    FieldPtr K;
    FieldElem delta; // integral, rational square content stripped
    Ideal rel_disc;
    std::vector<RealPlace> ramified_real;

    /* normalizes delta modulo squares and computes the relative discriminant
     * place by place (valuation parity at odd places, square-class
     * approximation levels at dyadic ones) */
    static std::variant<QuadExt, SplitAlgebra> make(FieldPtr K, FieldElem delta);
    /* as above but throws on a square input */
    static QuadExt make_field(FieldPtr K, FieldElem delta);

    bool same(QuadExt const& o) const; /* same extension of K */

    SplitType split_type(PrimeIdeal const& v) const;
    SplitType split_type(RealPlace const& v) const;
    SplitType split_type(Place const& v) const;

    /* value of the quadratic character on an ideal prime to rel_disc:
     * multiplicative extension of (split -> +1, inert -> -1) */
    int char_value(Ideal const& a) const;
};

/* The order O_K + f*O_L of conductor f (or its analogue in the split
 * algebra, kept only as a marker plus its discriminant data). */
struct QuadOrder {
    std::variant<QuadExt, SplitAlgebra> ext;
    Ideal conductor;
    Ideal disc; /* conductor^2 * rel_disc */
    bool is_domain;

    static QuadOrder make(std::variant<QuadExt, SplitAlgebra> const& ext, Ideal const& f);
    QuadExt const& field() const
    {
        if (!is_domain)
            throw input_error("split-algebra order has no quotient field");
        return std::get<QuadExt>(ext);
    }
    bool is_maximal() const { return conductor.is_unit_ideal(); }
};

} // namespace selquat
