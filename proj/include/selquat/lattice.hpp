#pragma once

#include <vector>

#include "selquat/arith.hpp"

namespace selquat {

/* Full-rank lattice in Q^n (n <= 4): integer basis rows in Hermite form over
 * a common denominator.  Used for rank-4 module arithmetic in quadratic
 * extensions of the base field and for matrix-order membership lattices. */
class QLattice {
  public:
    int n = 0;
    Int denom = 1;
    std::vector<std::vector<Int>> rows; // n rows, Hermite form

    static QLattice from_generators(int n, std::vector<std::vector<Rat>> const& gens);
    static QLattice standard(int n); // Z^n

    bool contains(std::vector<Rat> const& v) const;
    QLattice plus(QLattice const& other) const;
    /* dual with respect to the standard pairing: {x : <x, b> in Z for all b} */
    QLattice dual() const;
    /* index [other : this] for this subset of other */
    Rat index_in(QLattice const& other) const;
    Rat det_abs() const;
    std::vector<std::vector<Rat>> basis() const;
    bool operator==(QLattice const& o) const { return n == o.n && denom == o.denom && rows == o.rows; }
};

/* Hermite normal form of integer row vectors; returns a full set of
 * independent rows (pivot columns increasing, positive pivots, entries above
 * a pivot reduced into [0, pivot)). */
std::vector<std::vector<Int>> hnf_int(std::vector<std::vector<Int>> rows, int ncols);

} // namespace selquat
