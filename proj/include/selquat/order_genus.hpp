#pragma once

#include <memory>
#include <optional>
#include <string>

#include "selquat/quaternion.hpp"

namespace selquat {

/* Local behavior of the order at one finite place.  Maximal and Eichler
 * carry canonical normalizer norm groups; Custom is a user-declared norm
 * group given by whether it contains the local units and whether it attains
 * odd valuations. */
struct LocalOrderData {
    enum class Kind { Maximal, Eichler, Custom };
    PrimeIdeal place;
    Kind kind = Kind::Maximal;
    int exponent = 0; /* level exponent, >= 1 for Eichler/Custom */
    bool units_contained = true;
    bool odd_valuations = false;
};

/* An order of the algebra described by its local data; places absent from
 * the list are maximal.  The level ideal is the product of the non-maximal
 * places to their exponents. */
class OrderSpec {
  public:
    QuatAlg algebra;
    std::vector<LocalOrderData> local;
    Ideal level_ideal;

    /* validates the Eichler condition on the algebra and rejects Eichler
     * entries at ramified places */
    static OrderSpec make(QuatAlg A, std::vector<LocalOrderData> entries);

    LocalOrderData local_at(PrimeIdeal const& v) const;
    bool is_maximal_spec() const { return local.empty(); }
    /* discriminant of the quadratic order coprime to the level ideal */
    bool assumption_coprime_disc_level(Ideal const& order_disc) const;
    /* level support disjoint from the algebra's finite ramification */
    bool assumption_level_coprime_ramification() const;
};

/* Dual description of the genus group: independent quadratic characters
 * (given by their extensions) trivial on every local normalizer norm group.
 * The number of isomorphism classes in the genus is 2^rank. */
struct GenusDual {
    std::vector<QuadExt> basis;
    int rank() const { return (int)basis.size(); }
    Int class_count() const { return Int(1) << (unsigned long)basis.size(); }
};

/* whether the local component of the character of E is trivial on the norm
 * group of the normalizer of the local order at v */
bool local_char_trivial(OrderSpec const& R, QuadExt const& E, Place const& v);

struct ClassFieldTrace {
    struct Entry {
        Place place;
        std::string rule;
        bool ok;
    };
    bool contains = true;
    std::vector<Entry> entries;
};

/* whether L lies in the class field attached to the genus of R: the
 * conjunction of the local conditions over the finitely many places where
 * they are not automatic */
bool in_class_field(OrderSpec const& R, QuadExt const& E);
ClassFieldTrace in_class_field_trace(OrderSpec const& R, QuadExt const& E);

/* the character dual of the genus group, found by enumerating the square
 * classes with even valuation outside the level support and keeping the
 * extensions that pass the class-field test */
GenusDual genus_characters(OrderSpec const& R);

struct Parameterization {
    GenusDual dual;
    std::vector<PrimeIdeal> generator_primes; /* evaluation vectors form a basis */
};

/* gamma vector over F_2 relative to a parameterization; gamma = 0 labels
 * the base order itself */
struct GenusClass {
    std::vector<int> gamma;
    std::shared_ptr<const Parameterization> param;
    bool operator==(GenusClass const& o) const
    {
        return param == o.param && gamma == o.gamma;
    }
};

struct DistanceClass {
    std::vector<int> bits;
    std::shared_ptr<const Parameterization> param;
    bool trivial() const
    {
        for (int b : bits)
            if (b)
                return false;
        return true;
    }
};

/* generator primes are searched with norms >= window_start, skipping the
 * ramified places, level divisors and discriminants of the characters in
 * play; when ext is given and lies in the class field, the first generator
 * is chosen inert in it and the rest split (so the Frobenius criterion reads
 * off the first coordinate) */
std::vector<GenusClass> parameterize(OrderSpec const& R, GenusDual const& dual,
                                     std::optional<QuadExt> const& ext,
                                     Int const& window_start = Int(2));

DistanceClass distance(GenusClass const& c1, GenusClass const& c2);

/* product over the support of the distance of (-1 for inert, +1 for split) */
int frobenius(QuadExt const& E, DistanceClass const& d);

} // namespace selquat
