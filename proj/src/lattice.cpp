#include "selquat/lattice.hpp"

namespace selquat {

std::vector<std::vector<Int>> hnf_int(std::vector<std::vector<Int>> rows, int ncols)
{
    std::vector<std::vector<Int>> out;
    size_t used = 0;
    for (int col = 0; col < ncols; col++) {
        /* gcd-combine all rows with a nonzero entry in this column */
        size_t pivot_row = used;
        bool found = false;
        for (size_t i = used; i < rows.size(); i++) {
            if (rows[i][col] != 0) {
                if (!found) {
                    std::swap(rows[i], rows[pivot_row]);
                    found = true;
                } else {
                    /* eliminate rows[i][col] against the pivot */
                    Int g, s, t;
                    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(),
                               rows[pivot_row][col].get_mpz_t(), rows[i][col].get_mpz_t());
                    Int u = div_exact(rows[pivot_row][col], g);
                    Int v = div_exact(rows[i][col], g);
                    std::vector<Int> comb(ncols), rest(ncols);
                    for (int j = 0; j < ncols; j++) {
                        comb[j] = s * rows[pivot_row][j] + t * rows[i][j];
                        rest[j] = u * rows[i][j] - v * rows[pivot_row][j];
                    }
                    rows[pivot_row] = comb;
                    rows[i] = rest;
                }
            }
        }
        if (!found)
            continue;
        if (rows[pivot_row][col] < 0)
            for (int j = 0; j < ncols; j++)
                rows[pivot_row][j] = -rows[pivot_row][j];
        out.push_back(rows[pivot_row]);
        used = pivot_row + 1;
    }
    /* reduce entries above each pivot */
    for (size_t i = out.size(); i-- > 0;) {
        int pcol = 0;
        while (out[i][pcol] == 0)
            pcol++;
        for (size_t k = 0; k < i; k++) {
            Int q = div_floor(out[k][pcol], out[i][pcol]);
            if (q != 0)
                for (int j = 0; j < ncols; j++)
                    out[k][j] -= q * out[i][j];
        }
    }
    return out;
}

QLattice QLattice::from_generators(int n, std::vector<std::vector<Rat>> const& gens)
{
    Int D = 1;
    for (auto const& g : gens)
        for (auto const& c : g) {
            Int l;
            mpz_lcm(l.get_mpz_t(), D.get_mpz_t(), den(c).get_mpz_t());
            D = l;
        }
    std::vector<std::vector<Int>> rows;
    for (auto const& g : gens) {
        std::vector<Int> r(n);
        for (int j = 0; j < n; j++)
            r[j] = num(g[j]) * div_exact(D, den(g[j]));
        rows.push_back(r);
    }
    auto h = hnf_int(std::move(rows), n);
    if ((int)h.size() != n)
        throw input_error("lattice generators are not full rank");
    QLattice L;
    L.n = n;
    L.denom = D;
    L.rows = h;
    /* normalize the denominator */
    Int g = D;
    for (auto const& r : h)
        for (auto const& c : r) {
            Int gg;
            mpz_gcd(gg.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
            g = gg;
        }
    if (g > 1) {
        L.denom = div_exact(D, g);
        for (auto& r : L.rows)
            for (auto& c : r)
                c = div_exact(c, g);
    }
    return L;
}

QLattice QLattice::standard(int n)
{
    QLattice L;
    L.n = n;
    L.denom = 1;
    for (int i = 0; i < n; i++) {
        std::vector<Int> r(n, Int(0));
        r[i] = 1;
        L.rows.push_back(r);
    }
    return L;
}

bool QLattice::contains(std::vector<Rat> const& v) const
{
    /* solve against the triangular basis in increasing pivot order: rows
     * have entries only to the right of their pivot */
    std::vector<Rat> w(v);
    for (auto& c : w)
        c *= Rat(denom);
    for (int i = 0; i < n; i++) {
        int pcol = 0;
        while (rows[i][pcol] == 0)
            pcol++;
        Rat q = w[pcol] / Rat(rows[i][pcol]);
        if (!is_integer(q))
            return false;
        for (int j = 0; j < n; j++)
            w[j] -= q * Rat(rows[i][j]);
    }
    for (auto const& c : w)
        if (c != 0)
            return false;
    return true;
}

QLattice QLattice::plus(QLattice const& other) const
{
    std::vector<std::vector<Rat>> gens;
    for (auto const& r : basis())
        gens.push_back(r);
    for (auto const& r : other.basis())
        gens.push_back(r);
    return from_generators(n, gens);
}

std::vector<std::vector<Rat>> QLattice::basis() const
{
    std::vector<std::vector<Rat>> out;
    for (auto const& r : rows) {
        std::vector<Rat> v(n);
        for (int j = 0; j < n; j++)
            v[j] = Rat(r[j]) / Rat(denom);
        out.push_back(v);
    }
    return out;
}

Rat QLattice::det_abs() const
{
    Rat p(1);
    for (int i = 0; i < n; i++) {
        int pcol = 0;
        while (rows[i][pcol] == 0)
            pcol++;
        p *= Rat(rows[i][pcol]) / Rat(denom);
    }
    return p < 0 ? Rat(-p) : p;
}

Rat QLattice::index_in(QLattice const& other) const { return det_abs() / other.det_abs(); }

QLattice QLattice::dual() const
{
    /* invert the basis matrix (Gauss-Jordan over Q) and transpose */
    std::vector<std::vector<Rat>> M(n, std::vector<Rat>(2 * n, Rat(0)));
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++)
            M[i][j] = Rat(rows[i][j]) / Rat(denom);
        M[i][n + i] = 1;
    }
    for (int col = 0; col < n; col++) {
        int piv = -1;
        for (int i = col; i < n; i++)
            if (M[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            throw internal_error("singular lattice basis");
        std::swap(M[col], M[piv]);
        Rat pv = M[col][col];
        for (int j = 0; j < 2 * n; j++)
            M[col][j] /= pv;
        for (int i = 0; i < n; i++) {
            if (i == col || M[i][col] == 0)
                continue;
            Rat f = M[i][col];
            for (int j = 0; j < 2 * n; j++)
                M[i][j] -= f * M[col][j];
        }
    }
    std::vector<std::vector<Rat>> gens;
    for (int j = 0; j < n; j++) {
        std::vector<Rat> r(n);
        for (int i = 0; i < n; i++)
            r[i] = M[i][n + j]; /* column of the inverse = row of inverse-transpose */
        gens.push_back(r);
    }
    return from_generators(n, gens);
}

} // namespace selquat
