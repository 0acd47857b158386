#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selquat/arith.hpp"

namespace selquat {

class BaseField;

/* x + y*sqrt(d) with rational coordinates.  Over the rationals y = 0. */
struct FieldElem {
    Rat x, y;
    FieldElem() : x(0), y(0) {}
    FieldElem(Rat xx, Rat yy) : x(std::move(xx)), y(std::move(yy)) {}
    static FieldElem rational(Rat r) { return FieldElem(std::move(r), Rat(0)); }
    bool is_zero() const { return x == 0 && y == 0; }
    bool is_rational() const { return y == 0; }
    bool operator==(FieldElem const& o) const { return x == o.x && y == o.y; }
    std::string str() const;
};

/* Fractional ideal in canonical form: scale * (aZ + (b+w)Z), where (1, w) is
 * the integral basis, the primitive part has 0 <= b < a and a | N(b+w), and
 * scale > 0 is rational.  The form is unique per ideal, so equality and
 * hashing are structural.  Over the rationals the primitive part is trivial
 * and the ideal is just (scale). */
struct Ideal {
    BaseField const* K = nullptr;
    Rat scale;
    Int a, b;

    bool operator==(Ideal const& o) const
    {
        return scale == o.scale && a == o.a && b == o.b;
    }
    bool operator<(Ideal const& o) const
    {
        if (scale != o.scale)
            return scale < o.scale;
        if (a != o.a)
            return a < o.a;
        return b < o.b;
    }
    bool is_unit_ideal() const { return scale == 1 && a == 1; }
    std::string str() const;
};

/* A finite place: prime ideal with residue characteristic p, ramification
 * index e and residue degree f (e*f <= 2, norm = p^f). */
struct PrimeIdeal {
    Ideal ideal;
    Int p;
    int e = 1, f = 1;
    int index = 0; // position among the primes above p

    Int norm() const
    {
        Int n = p;
        if (f == 2)
            n *= p;
        return n;
    }
    bool operator==(PrimeIdeal const& o) const { return ideal == o.ideal; }
    bool operator<(PrimeIdeal const& o) const { return ideal < o.ideal; }
    std::string str() const;
};

/* Real embedding sqrt(d) -> +sqrt(d) (index 0) or -sqrt(d) (index 1).
 * The rationals have the single place index 0. */
struct RealPlace {
    int index = 0;
    bool operator==(RealPlace const& o) const { return index == o.index; }
    std::string str() const { return "infty_" + std::to_string(index); }
};

using Place = std::variant<PrimeIdeal, RealPlace>;

std::string place_str(Place const& v);
bool place_equal(Place const& u, Place const& v);

/* Quadratic residue field F_q at a finite place, q = p or p^2.  Elements are
 * pairs (c0, c1) meaning c0 + c1*wbar with wbar^2 = wt*wbar - wn (c1 = 0 when
 * f = 1). */
struct ResidueField {
    uint64_t p = 0;
    int f = 1;
    uint64_t wt = 0, wn = 0;
    using El = std::pair<uint64_t, uint64_t>;

    El mul(El u, El v) const;
    El pow(El u, Int e) const;
    El inv(El u) const;
    bool is_zero(El u) const { return u.first == 0 && u.second == 0; }
    /* quadratic character; 0 on zero */
    int chi(El u) const;
};

struct IdealClass {
    Ideal rep;  // integral, primitive
    int order;  // order of the class in the class group
};

struct FieldOptions {
    Int disc_bound = 1000000;
    int class_group_cap = 256;
};

class BaseField {
  public:
    /* d squarefree and nonzero; d = 1 builds the rationals.  Computes the
     * class group (ideal enumeration under the Minkowski bound, relations
     * resolved through principality tests) and, for real quadratic fields,
     * the fundamental unit. */
    static std::shared_ptr<const BaseField> make(Int d, FieldOptions opts = {});

    Int d;
    Int disc;
    int real_places = 0;    // 1 for Q, 2 real quadratic, 0 imaginary
    int complex_places = 0; // 1 for imaginary quadratic
    /* integral basis (1, w) with w^2 = w_tr*w - w_nm */
    Int w_tr, w_nm;
    std::optional<FieldElem> fundamental_unit; // real quadratic only, > 1
    int unit_norm = 1;
    std::vector<IdealClass> class_group; // [0] is the principal class

    bool is_Q() const { return d == 1; }
    int degree() const { return is_Q() ? 1 : 2; }
    int class_number() const { return (int)class_group.size(); }
    FieldElem w_elem() const; // w as an element

    /* ---- element arithmetic ---- */
    FieldElem add(FieldElem const& u, FieldElem const& v) const;
    FieldElem sub(FieldElem const& u, FieldElem const& v) const;
    FieldElem mul(FieldElem const& u, FieldElem const& v) const;
    FieldElem div(FieldElem const& u, FieldElem const& v) const;
    FieldElem neg(FieldElem const& u) const;
    FieldElem conj(FieldElem const& u) const;
    FieldElem inv(FieldElem const& u) const;
    FieldElem pow(FieldElem const& u, long e) const;
    Rat trace(FieldElem const& u) const;
    Rat norm(FieldElem const& u) const;
    bool is_integral(FieldElem const& u) const;
    bool is_square_elem(FieldElem const& u) const;
    std::optional<FieldElem> sqrt_elem(FieldElem const& u) const;
    int sign_at(FieldElem const& u, RealPlace v) const; // -1, 0, +1

    /* coordinates in the integral basis (1, w) */
    std::pair<Rat, Rat> wcoords(FieldElem const& u) const;
    FieldElem from_wcoords(Rat const& c0, Rat const& c1) const;

    /* ---- ideals ---- */
    Ideal unit_ideal() const;
    Ideal ideal(Rat const& r) const; // (r)
    Ideal principal_ideal(FieldElem const& g) const;
    Ideal ideal_from_gens(std::vector<FieldElem> const& gens) const;
    Ideal mul(Ideal const& I, Ideal const& J) const;
    Ideal pow(Ideal const& I, long e) const;
    Ideal sum(Ideal const& I, Ideal const& J) const;
    Ideal intersect(Ideal const& I, Ideal const& J) const;
    Ideal inverse(Ideal const& I) const;
    Ideal conj_ideal(Ideal const& I) const;
    Rat ideal_norm(Ideal const& I) const;
    bool contains(Ideal const& I, FieldElem const& z) const;
    bool ideal_divides(Ideal const& I, Ideal const& J) const; // J subset of I
    bool is_integral_ideal(Ideal const& I) const;
    bool coprime(Ideal const& I, Ideal const& J) const;

    std::vector<PrimeIdeal> factor_prime(Int const& p) const;
    std::vector<std::pair<PrimeIdeal, int>> factor_ideal(Ideal const& I) const;
    /* finite places of norm <= max_norm, ordered by (norm, p, index) */
    std::vector<PrimeIdeal> primes_by_norm(Int const& max_norm) const;

    long ideal_valuation(Ideal const& I, PrimeIdeal const& v) const;
    long elem_valuation(FieldElem const& z, PrimeIdeal const& v) const;

    /* generator of a principal ideal, or nullopt; exact in both directions.
     * Real quadratic principality walks the reduction cycle of the
     * associated indefinite form; imaginary is a definite norm-equation
     * search. */
    std::optional<FieldElem> principal_generator(Ideal const& I) const;
    bool is_principal(Ideal const& I) const { return principal_generator(I).has_value(); }

    int class_index(Ideal const& I) const; // index into class_group
    /* a prime ideal in the given class avoiding the listed places */
    PrimeIdeal prime_in_class(int cls, std::vector<PrimeIdeal> const& avoid,
                              Int const& start_norm = 2) const;

    /* element of valuation exactly 1 at v */
    FieldElem uniformizer(PrimeIdeal const& v) const;

    ResidueField residue_field(PrimeIdeal const& v) const;
    /* residue of z at v; the denominator of z must be prime to p */
    ResidueField::El residue(FieldElem const& z, PrimeIdeal const& v) const;
    /* quadratic-residue character of the unit part of z at an odd place */
    int unit_residue_chi(FieldElem const& z, PrimeIdeal const& v) const;

    /* whether z (of even valuation) is a square in the completion K_v */
    bool is_local_square(FieldElem const& z, PrimeIdeal const& v) const;
    /* exponent of v in the relative discriminant of K_v(sqrt(z))/K_v */
    int local_disc_exponent(FieldElem const& z, PrimeIdeal const& v) const;
    /* z = s^2 * u with u reduced mod v^k: solvability of s^2 = z mod v^k for a
     * v-unit z given with p-free denominator */
    bool unit_square_mod(FieldElem const& z, PrimeIdeal const& v, int k) const;

    /* unit part of z at v as (element with p-free denominator, correction):
     * z = pi^val * (returned element) exactly */
    FieldElem unit_part(FieldElem const& z, PrimeIdeal const& v, long* val_out = nullptr) const;

  private:
    BaseField() = default;
    void build_class_group(int cap);
    void compute_fundamental_unit();
};

using FieldPtr = std::shared_ptr<const BaseField>;

} // namespace selquat
