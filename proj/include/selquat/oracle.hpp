#pragma once

#include "selquat/lattice.hpp"
#include "selquat/selectivity.hpp"

namespace selquat {

/* End(O_K (+) a) = [[O_K, a^-1], [a, O_K]]: one maximal order of M_2(K) per
 * ideal class; these represent every isomorphism class in the genus when the
 * class map is pushed through the genus characters. */
struct LatticeOrder {
    FieldPtr K;
    Ideal rep;                  /* integral primitive class representative */
    std::array<Ideal, 4> slot;  /* row-major: O, a^-1, a, O */
    std::string label;
};

std::vector<LatticeOrder> maximal_order_classes(FieldPtr const& K);

/* element a + b*sqrt(delta) of L with K-coefficients */
struct LElem {
    FieldElem a, b;
};

/* Z-lattice data for L = K(sqrt(delta)) and the order of conductor f:
 * coordinates are taken in the basis (1, w, s, w s) over Q (or (1, s) when
 * the base field is Q), s = sqrt(delta). */
class ExtOrder {
  public:
    FieldPtr K;
    QuadExt E;
    Ideal conductor;
    QLattice maximal;   /* O_L */
    QLattice order;     /* O_K + f * O_L */
    LElem theta;        /* primitive element of the order */
    FieldElem t, n;     /* trace and norm of theta over K */
    /* order basis decomposed as z_i = za_i + zb_i * theta */
    std::vector<FieldElem> za, zb;

    static ExtOrder make(QuadOrder const& W);
    int dim() const { return 2 * K->degree(); }
    std::vector<Rat> coords(LElem const& z) const;
    LElem from_coords(std::vector<Rat> const& c) const;
    LElem mul(LElem const& u, LElem const& v) const;
    bool is_integral(LElem const& z) const;
    /* |disc of the lattice over Z|, for cross-checks against the tower
     * formula N(d_{L/K}) * d_K^2 */
    Int abs_disc_Z() const;
};

struct EmbeddingWitness {
    /* [[e00, e01], [e10, e11]] with trace t and determinant n */
    std::array<FieldElem, 4> x;
    FieldElem t, n;
};

/* Exhaustive search for a matrix root of theta's minimal polynomial whose
 * span carries the whole order: every Z-generator z = a + b*theta of the
 * order must land inside the lattice order (a*I + b*X in O).  Entries run
 * over the slot bases with coordinate height <= bound, ordered by height.
 * Absence within the bound is evidence only, never proof. */
std::optional<EmbeddingWitness> search_embedding(LatticeOrder const& O, QuadOrder const& W,
                                                 long bound, bool require_optimal = false);

/* conductor of the order pulled back through the witness: {z in L :
 * sigma(z) in O} is an order of L containing the searched order, and its
 * conductor is computed exactly from dual lattices */
Ideal embedded_order_conductor(LatticeOrder const& O, EmbeddingWitness const& w,
                               QuadOrder const& W);

/* whether sigma(L_v) meet O_v equals sigma(Omega_v): exact valuation
 * comparison of the pulled-back conductor at v */
bool embedding_optimal_at(LatticeOrder const& O, EmbeddingWitness const& w, QuadOrder const& W,
                          PrimeIdeal const& v);

/* whether the witness matrix lies in the slots and satisfies its polynomial */
bool witness_valid(LatticeOrder const& O, EmbeddingWitness const& w, QuadOrder const& W);

struct OrderReport {
    std::string label;
    bool decider_admits = false;
    bool witness_found = false;
    bool optimal_witness_found = false;
    std::string status; /* agree | agree-reject | bound-exhausted | disagree */
};

struct CrossReport {
    std::string embedding_outcome;
    std::string embedding_provenance;
    std::string optimal_outcome; /* empty when skipped */
    std::vector<OrderReport> orders;
    bool consistent = true;
    std::vector<std::string> notes;
};

/* Runs the decision procedures against the brute-force search over every
 * maximal-order class of M_2(K); only the everywhere-maximal order data of
 * the matrix algebra is accepted. */
CrossReport cross_validate(OrderSpec const& R, QuadOrder const& W, long bound);

} // namespace selquat
