#pragma once

#include "selquat/quadratic_ext.hpp"

namespace selquat {

/* Local Hilbert symbol (a, b)_v: +1 iff a x^2 + b y^2 = z^2 has a nontrivial
 * solution over K_v.  Odd finite places use the tame closed form via residue
 * characters; dyadic places run a primitive-solution search in O/v^(2e+3)
 * (e = ord_v(2)); real places are a sign check. */
int hilbert_symbol(FieldPtr const& K, Place const& v, FieldElem const& a, FieldElem const& b);

/* The quaternion algebra (a, b | K) with its ramification data. */
class QuatAlg {
  public:
    FieldPtr K;
    FieldElem a, b;
    std::vector<Place> ramified; /* even cardinality */
    Ideal disc_ideal;            /* product of the finite ramified primes */

    static QuatAlg make(FieldPtr K, FieldElem a, FieldElem b);
    static QuatAlg matrix_ring(FieldPtr K);
    bool is_ramified(Place const& v) const;
    bool ramified_at_finite() const;
    std::vector<PrimeIdeal> finite_ramified() const;
    std::vector<RealPlace> real_ramified() const;
};

/* some archimedean place of K is unramified (complex places count) */
bool satisfies_eichler(QuatAlg const& A);

/* the quadratic field embeds in A iff no ramified place of A splits in it */
bool field_embeds(QuatAlg const& A, QuadExt const& E);

} // namespace selquat
