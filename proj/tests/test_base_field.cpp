#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "selquat/base_field.hpp"

using namespace selquat;

static FieldElem fe(long x, long y) { return FieldElem(Rat(x), Rat(y)); }

TEST_CASE("field construction and basic data")
{
    auto Q = BaseField::make(1);
    CHECK(Q->is_Q());
    CHECK(Q->class_number() == 1);
    CHECK(!Q->fundamental_unit.has_value());
    CHECK(Q->real_places == 1);

    auto K10 = BaseField::make(10);
    CHECK(K10->disc == 40);
    CHECK(K10->real_places == 2);
    CHECK(K10->class_number() == 2);

    auto K5m = BaseField::make(-5);
    CHECK(K5m->disc == -20);
    CHECK(K5m->complex_places == 1);
    CHECK(K5m->class_number() == 2);

    auto K17 = BaseField::make(17);
    CHECK(K17->disc == 17);
    CHECK(K17->class_number() == 1);

    CHECK_THROWS_AS(BaseField::make(12), input_error);   /* not squarefree */
    CHECK_THROWS_AS(BaseField::make(0), input_error);
    CHECK_THROWS_AS(BaseField::make(Int("10000019") * 4 + 1), resource_error);
}

TEST_CASE("fundamental units against the classical table")
{
    struct Row {
        long d;
        long ux_num, ux_den, uy_num, uy_den;
        int nrm;
    };
    /* eps and N(eps) for small real quadratic fields */
    std::vector<Row> table = {
        {2, 1, 1, 1, 1, -1},    /* 1 + sqrt(2) */
        {3, 2, 1, 1, 1, 1},     /* 2 + sqrt(3) */
        {5, 1, 2, 1, 2, -1},    /* (1 + sqrt(5))/2 */
        {6, 5, 1, 2, 1, 1},     /* 5 + 2 sqrt(6) */
        {7, 8, 1, 3, 1, 1},     /* 8 + 3 sqrt(7) */
        {10, 3, 1, 1, 1, -1},   /* 3 + sqrt(10) */
        {13, 3, 2, 1, 2, -1},   /* (3 + sqrt(13))/2 */
        {14, 15, 1, 4, 1, 1},   /* 15 + 4 sqrt(14) */
        {17, 4, 1, 1, 1, -1},   /* 4 + sqrt(17) */
        {19, 170, 1, 39, 1, 1}, /* 170 + 39 sqrt(19) */
        {94, 2143295, 1, 221064, 1, 1},
    };
    for (auto const& row : table) {
        auto K = BaseField::make(row.d);
        REQUIRE(K->fundamental_unit.has_value());
        FieldElem u = *K->fundamental_unit;
        CHECK(u.x == Rat(row.ux_num, row.ux_den));
        CHECK(u.y == Rat(row.uy_num, row.uy_den));
        CHECK(K->unit_norm == row.nrm);
        CHECK(K->norm(u) == Rat(row.nrm));
    }
}

TEST_CASE("class numbers across small fields")
{
    struct Row {
        long d;
        int h;
    };
    std::vector<Row> table = {{2, 1},   {3, 1},  {5, 1},   {10, 2},  {15, 2}, {17, 1},
                              {79, 3},  {82, 4}, {-1, 1},  {-2, 1},  {-3, 1}, {-5, 2},
                              {-14, 4}, {-21, 4}, {-23, 3}, {-47, 5}};
    for (auto const& row : table) {
        auto K = BaseField::make(row.d);
        CHECK(K->class_number() == row.h);
    }
}

TEST_CASE("class group soundness: representative orders are exact")
{
    for (long d : {10L, 79L, 82L, -5L, -14L, -21L, -23L}) {
        auto K = BaseField::make(d);
        for (auto const& cls : K->class_group) {
            Ideal X = K->unit_ideal();
            for (int k = 1; k <= cls.order; k++) {
                X = K->mul(X, cls.rep);
                Ideal Xp{K.get(), Rat(1), X.a, X.b};
                X = Xp;
                if (k < cls.order)
                    CHECK(!K->is_principal(X));
                else
                    CHECK(K->is_principal(X));
            }
        }
    }
}

TEST_CASE("prime factorization in Q(sqrt(10))")
{
    auto K = BaseField::make(10);
    auto f3 = K->factor_prime(3);
    REQUIRE(f3.size() == 2);
    CHECK(f3[0].e == 1);
    CHECK(f3[0].f == 1);
    auto f7 = K->factor_prime(7);
    REQUIRE(f7.size() == 1);
    CHECK(f7[0].f == 2);
    auto f2 = K->factor_prime(2);
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].e == 2);
    /* nu_2^2 = (2) */
    Ideal sq = K->mul(f2[0].ideal, f2[0].ideal);
    CHECK(sq == K->ideal(Rat(2)));
    /* norm multiplicativity on the split pair */
    Ideal prod = K->mul(f3[0].ideal, f3[1].ideal);
    CHECK(K->ideal_norm(prod) == 9);
    CHECK(prod == K->ideal(Rat(3)));
}

TEST_CASE("factorization consistency across fields and primes")
{
    std::vector<long> ds;
    for (long d = -50; d <= 50; d++) {
        if (d == 0 || d == 1)
            continue;
        bool sf = true;
        for (long q = 2; q * q <= std::abs(d); q++)
            if (d % (q * q) == 0)
                sf = false;
        if (sf)
            ds.push_back(d);
    }
    auto ps = primes_up_to(200);
    for (long d : ds) {
        auto K = BaseField::make(d);
        for (long p : ps) {
            auto fs = K->factor_prime(p);
            Ideal prod = K->unit_ideal();
            int efsum = 0;
            for (auto const& v : fs) {
                for (int i = 0; i < v.e; i++)
                    prod = K->mul(prod, v.ideal);
                efsum += v.e * v.f;
                CHECK(K->ideal_norm(v.ideal) == Rat(v.norm()));
            }
            CHECK(efsum == 2);
            CHECK(prod == K->ideal(Rat(p)));
        }
    }
}

TEST_CASE("principality decisions")
{
    auto K = BaseField::make(10);
    auto g6 = K->principal_generator(K->ideal(Rat(6)));
    REQUIRE(g6.has_value());
    CHECK(K->norm(*g6) == Rat(36));

    auto nu2 = K->factor_prime(2)[0];
    CHECK(!K->is_principal(nu2.ideal)); /* x^2 - 10y^2 = +-2 has no solution mod 5 */

    auto Km5 = BaseField::make(-5);
    auto nu3 = Km5->factor_prime(3)[0];
    CHECK(!Km5->is_principal(nu3.ideal));
    auto nu29 = Km5->factor_prime(29)[0];
    /* 29 = 9 + 5*4 -> principal: (3 + 2 sqrt(-5)) */
    CHECK(Km5->is_principal(nu29.ideal));

    /* generator is a real generator: check the ideal it generates */
    auto K79 = BaseField::make(79);
    for (auto const& cls : K79->class_group) {
        Ideal X{K79.get(), Rat(1), cls.rep.a, cls.rep.b};
        Ideal P = K79->pow(X, cls.order);
        auto g = K79->principal_generator(P);
        REQUIRE(g.has_value());
        CHECK(K79->principal_ideal(*g) == P);
    }
}

TEST_CASE("ideal algebra")
{
    auto K = BaseField::make(10);
    auto nu3 = K->factor_prime(3)[0];
    auto nu5 = K->factor_prime(5)[0];
    Ideal I = K->mul(nu3.ideal, nu5.ideal);
    CHECK(K->mul(I, K->unit_ideal()) == I);
    CHECK(K->ideal_norm(I) == 15);
    Ideal Iinv = K->inverse(I);
    CHECK(K->mul(I, Iinv) == K->unit_ideal());
    CHECK(K->sum(nu3.ideal, nu5.ideal) == K->unit_ideal());
    CHECK(K->coprime(nu3.ideal, nu5.ideal));
    CHECK(!K->coprime(I, nu3.ideal));
    Ideal J = K->intersect(nu3.ideal, nu5.ideal);
    CHECK(J == I); /* coprime: intersection = product */
    /* (sqrt(10)) = nu2 * nu5 */
    Ideal s10 = K->principal_ideal(fe(0, 1));
    auto nu2 = K->factor_prime(2)[0];
    CHECK(s10 == K->mul(nu2.ideal, nu5.ideal));
    CHECK(K->ideal_valuation(s10, nu2) == 1);
    CHECK(K->ideal_valuation(s10, nu5) == 1);
    CHECK(K->ideal_valuation(s10, nu3) == 0);
    /* element valuations */
    CHECK(K->elem_valuation(fe(0, 1), nu2) == 1);
    CHECK(K->elem_valuation(FieldElem::rational(Rat(1, 2)), nu2) == -2);
    auto fac = K->factor_ideal(K->mul(s10, s10));
    Ideal re = K->unit_ideal();
    for (auto const& [v, k] : fac)
        re = K->mul(re, K->pow(v.ideal, k));
    CHECK(re == K->mul(s10, s10));
}

TEST_CASE("field mismatch is rejected")
{
    auto K1 = BaseField::make(10);
    auto K2 = BaseField::make(17);
    CHECK_THROWS_AS(K1->mul(K1->unit_ideal(), K2->unit_ideal()), input_error);
}

TEST_CASE("residues and local squares")
{
    auto K = BaseField::make(10);
    auto nu3 = K->factor_prime(3)[0];
    /* residue field F_3; delta = 2 is a non-residue mod 3 */
    CHECK(K->unit_residue_chi(fe(2, 0), nu3) == -1);
    CHECK(!K->is_local_square(fe(2, 0), nu3));
    auto nu7 = K->factor_prime(7)[0];
    /* rational units are squares in F_49 */
    CHECK(K->unit_residue_chi(fe(2, 0), nu7) == 1);
    CHECK(K->is_local_square(fe(2, 0), nu7));
    /* sqrt(10) is a non-square at the inert place (odd valuation... norm 7^2) */
    CHECK(K->elem_valuation(fe(0, 1), nu7) == 0);

    auto nu2 = K->factor_prime(2)[0];
    /* 2 = pi^2/5 with 5 a non-square in Q_2(sqrt(10)) -> inert behavior */
    CHECK(K->elem_valuation(fe(2, 0), nu2) == 2);
    CHECK(!K->is_local_square(fe(2, 0), nu2));
    CHECK(K->local_disc_exponent(fe(2, 0), nu2) == 0); /* even val, unramified class */

    auto Q = BaseField::make(1);
    auto p2 = Q->factor_prime(2)[0];
    CHECK(Q->local_disc_exponent(FieldElem::rational(-1), p2) == 2);
    CHECK(Q->local_disc_exponent(FieldElem::rational(2), p2) == 3);
    CHECK(Q->local_disc_exponent(FieldElem::rational(17), p2) == 0);
    CHECK(Q->is_local_square(FieldElem::rational(17), p2));
    CHECK(!Q->is_local_square(FieldElem::rational(5), p2));
    auto p5 = Q->factor_prime(5)[0];
    CHECK(Q->is_local_square(FieldElem::rational(-1), p5)); /* -1 = 2^2 mod 5 */
}

TEST_CASE("element helpers")
{
    auto K = BaseField::make(10);
    FieldElem u = fe(3, 1); /* 3 + sqrt(10) */
    CHECK(K->norm(u) == Rat(-1));
    CHECK(K->trace(u) == Rat(6));
    CHECK(K->sign_at(u, RealPlace{0}) == 1);
    CHECK(K->sign_at(u, RealPlace{1}) == -1); /* 3 - sqrt(10) < 0 */
    CHECK(K->is_integral(u));
    CHECK(!K->is_integral(FieldElem(Rat(1, 2), Rat(0))));
    auto K5 = BaseField::make(5);
    CHECK(K5->is_integral(FieldElem(Rat(1, 2), Rat(1, 2)))); /* golden ratio */
    CHECK(K->is_square_elem(fe(4, 0)));
    CHECK(K->is_square_elem(fe(40, 0))); /* (2 sqrt(10))^2 */
    CHECK(!K->is_square_elem(fe(2, 0)));
    /* (3 + sqrt(10))^2 = 19 + 6 sqrt(10) */
    CHECK(K->is_square_elem(fe(19, 6)));
    CHECK(!K->is_square_elem(fe(19, 5)));
}

TEST_CASE("prime_in_class")
{
    auto K = BaseField::make(10);
    auto nu2 = K->factor_prime(2)[0];
    int cls = K->class_index(nu2.ideal);
    CHECK(cls > 0);
    auto v = K->prime_in_class(cls, {nu2}, 3);
    CHECK(!(v == nu2));
    /* same class: product with conjugate of rep is principal */
    Ideal T = K->mul(v.ideal, K->conj_ideal(nu2.ideal));
    CHECK(K->is_principal(T));
}
