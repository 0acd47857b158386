#pragma once

#include "selquat/order_genus.hpp"

namespace selquat {

enum class Outcome { NoEmbedding, AllClasses, Half };

inline char const* outcome_str(Outcome o)
{
    switch (o) {
    case Outcome::NoEmbedding:
        return "none";
    case Outcome::AllClasses:
        return "all";
    default:
        return "half";
    }
}

/* Decision output.  Half comes with the parameterization, the full class
 * list, and the admitting classes (exactly half of them, the ones whose
 * distance from the base order has trivial Frobenius in Gal(L/K)). */
struct Verdict {
    Outcome outcome;
    std::string provenance; /* which criterion produced the decision */
    std::optional<QuadExt> ext;
    std::shared_ptr<const Parameterization> param;
    std::vector<GenusClass> classes;
    std::vector<GenusClass> admitting;

    Rat admitting_fraction() const
    {
        if (outcome == Outcome::NoEmbedding)
            return Rat(0);
        if (outcome == Outcome::AllClasses)
            return Rat(1);
        return Rat(1, 2);
    }
};

struct Assumptions {
    bool coprime_disc_level;
    bool level_coprime_ramification;
    bool both() const { return coprime_disc_level && level_coprime_ramification; }
};

Assumptions check_assumptions(OrderSpec const& R, QuadOrder const& W);

/* fast obstruction: a finite prime ramified in L but not dividing the level
 * ideal forces every class to admit an embedding, no class-field data needed */
std::optional<PrimeIdeal> ramified_outside_level(OrderSpec const& R, QuadExt const& E);

/* The embedding decision.  Pipeline: split-algebra orders embed everywhere;
 * a global obstruction gives NoEmbedding; the obstruction criteria give
 * AllClasses; otherwise, under the two coprimality assumptions, the verdict
 * is Half with the Frobenius partition.  Throws assumptions_error when the
 * assumptions fail and no assumption-free criterion decides. */
Verdict decide_embedding(OrderSpec const& R, QuadOrder const& W, Int const& window_start = Int(2));

/* Same decision for optimal embeddings (the order must be a domain); under
 * the assumptions the admitting classes coincide with the embedding case. */
Verdict decide_optimal(OrderSpec const& R, QuadOrder const& W, Int const& window_start = Int(2));

bool admits(GenusClass const& c, Verdict const& v);

} // namespace selquat
