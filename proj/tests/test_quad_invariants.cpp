#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kohnen/quad_invariants.hpp>

#include <random>

using namespace kohnen;

static LocalInvariant inv_at(const BaseField& F, long p, const FieldElement& xi) {
    auto P = primes_above(F, Int(p))[0];
    return local_invariants(F, local_place(F, P), xi);
}

TEST_CASE("local invariants over Q") {
    BaseField Q = make_field(Int(0));

    auto i12 = inv_at(Q, 2, FieldElement(Rat(12)));
    CHECK(i12.f == 0);
    CHECK(i12.chi == 0);  // Q_2(sqrt 3) ramified

    auto i4 = inv_at(Q, 2, FieldElement(Rat(4)));
    CHECK(i4.f == 1);
    CHECK(i4.chi == 1);

    auto i5 = inv_at(Q, 2, FieldElement(Rat(5)));
    CHECK(i5.f == 0);
    CHECK(i5.chi == -1);  // 5 = 1 mod 4 but not 1 mod 8

    auto i18 = inv_at(Q, 3, FieldElement(Rat(18)));
    CHECK(i18.f == 1);
    CHECK(i18.chi == -1);  // 18 = 3^2 * 2, 2 a non-residue mod 3

    auto i0 = inv_at(Q, 2, FieldElement(Rat(0)));
    CHECK(i0.xi_is_zero);
    CHECK(i0.f == LocalInvariant::f_infinity);
}

TEST_CASE("relative discriminants over Q match fundamental discriminants") {
    BaseField Q = make_field(Int(0));

    auto r12 = relative_discriminant(Q, FieldElement(Rat(12)));
    CHECK(r12.D.norm() == 12);
    CHECK(r12.Fpart.is_unit());

    auto r9 = relative_discriminant(Q, FieldElement(Rat(9)));
    CHECK(r9.D.is_unit());
    CHECK(r9.Fpart.norm() == 3);

    auto r40 = relative_discriminant(Q, FieldElement(Rat(40)));
    CHECK(r40.D.norm() == 40);
    CHECK(r40.Fpart.is_unit());

    // general agreement with the classical invariants: n = D f^2 for n = 0,1 mod 4
    for (long n = 1; n <= 400; ++n) {
        auto r = relative_discriminant(Q, FieldElement(Rat(n)));
        if (n % 4 == 2 || n % 4 == 3) {
            CHECK(r.min_f < 0);  // not congruent to a square mod 4
            continue;
        }
        Int D = fundamental_discriminant(Int(n));
        REQUIRE(r.integral);
        if (D == 1) {
            CHECK(r.D.is_unit());  // perfect squares
            Int f;
            REQUIRE(is_perfect_square(Int(n), &f));
            CHECK(r.Fpart.norm() == f);
        } else {
            CHECK(r.D.norm() == D);
            Int f2 = Int(n) / D;
            Int f;
            REQUIRE(is_perfect_square(f2, &f));
            CHECK(r.Fpart.norm() == f);
        }
    }
}

TEST_CASE("is_square_mod4") {
    BaseField Q = make_field(Int(0));
    CHECK(is_square_mod4(Q, FieldElement(Rat(5))));
    CHECK(!is_square_mod4(Q, FieldElement(Rat(2))));
    CHECK(!is_square_mod4(Q, FieldElement(Rat(3))));
    CHECK(is_square_mod4(Q, FieldElement(Rat(4))));
    CHECK(is_square_mod4(Q, FieldElement(Rat(0))));

    BaseField F = make_field(Int(10));
    CHECK(is_square_mod4(F, FieldElement(Rat(2))));   // 2 - (sqrt10)^2 = -8 in 4o
    CHECK(!is_square_mod4(F, FieldElement(Rat(3))));
}

TEST_CASE("square-class equivalence: is_square_mod4 iff min f >= 0") {
    for (long d : {0, 2, 5, 10, 13}) {
        BaseField F = make_field(Int(d));
        for (auto& xi : enumerate_totally_positive(F, 20)) {
            if (xi.is_zero()) continue;
            auto rd = relative_discriminant(F, xi);
            INFO("d = ", d, ", xi = (", xi.a.get_str(), ",", xi.b.get_str(), ")");
            CHECK(is_square_mod4(F, xi) == (rd.min_f >= 0));
        }
    }
}

TEST_CASE("(xi) = F^2 D exactly, random elements") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> coef(-15, 15);
    for (long d : {0, 2, 10, 13}) {
        BaseField F = make_field(Int(d));
        int done = 0;
        while (done < 50) {
            FieldElement xi{Rat(coef(rng)), F.is_rational() ? Rat(0) : Rat(coef(rng))};
            if (xi.is_zero()) continue;
            ++done;
            auto rd = relative_discriminant(F, xi);
            if (!rd.integral) continue;
            FactoredIdeal sq = ideal_mul(rd.Fpart, rd.Fpart);
            Lattice left = ideal_lattice(F, ideal_mul(sq, rd.D));
            CHECK(left == principal_lattice(F, xi));
        }
    }
}

TEST_CASE("chi on ideals: zeros exactly at primes of D, squares give 1") {
    BaseField Q = make_field(Int(0));
    auto P2 = primes_above(Q, Int(2))[0];
    FactoredIdeal A2;
    A2.factors = {{P2, 1}};

    CHECK(chi_xi_on_ideal(Q, FieldElement(Rat(4)), A2) == 1);
    CHECK(chi_xi_on_ideal(Q, FieldElement(Rat(5)), A2) == -1);
    CHECK(chi_xi_on_ideal(Q, FieldElement(Rat(12)), A2) == 0);

    // chi_xi(p) = 0 iff p | D_xi, over a spread of xi and p
    for (long n = 1; n <= 60; ++n) {
        auto rd = relative_discriminant(Q, FieldElement(Rat(n)));
        for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
            auto P = primes_above(Q, Int(p))[0];
            FactoredIdeal A;
            A.factors = {{P, 1}};
            bool divides = mpz_divisible_p(rd.D.norm().get_mpz_t(), Int(p).get_mpz_t());
            CHECK((chi_xi_on_ideal(Q, FieldElement(Rat(n)), A) == 0) == divides);
        }
    }
}

TEST_CASE("square scaling: f(c^2 xi) = f(xi) + ord(c), chi unchanged") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<long> coef(-8, 8);
    for (long d : {0, 10}) {
        BaseField F = make_field(Int(d));
        int done = 0;
        while (done < 40) {
            FieldElement xi{Rat(coef(rng)), F.is_rational() ? Rat(0) : Rat(coef(rng))};
            FieldElement c{Rat(coef(rng)), F.is_rational() ? Rat(0) : Rat(coef(rng))};
            if (xi.is_zero() || c.is_zero()) continue;
            ++done;
            FieldElement c2xi = F.mul(F.mul(c, c), xi);
            Rat Nxi = F.norm(F.scale(xi, Rat(2)));
            Int N = to_int(Nxi);
            if (N < 0) N = -N;
            Rat Nc = F.norm(c);
            Int NC = to_int(Nc);
            if (NC < 0) NC = -NC;
            for (auto& [p, e] : factor_integer(N * NC)) {
                for (auto& P : primes_above(F, p)) {
                    auto v = local_place(F, P);
                    auto a = local_invariants(F, v, xi);
                    auto b = local_invariants(F, v, c2xi);
                    long oc = F.is_rational() ? ord_p(c.a, p) : ord_at_prime(F, P, c);
                    CHECK(b.f == a.f + oc);
                    CHECK(b.chi == a.chi);
                }
            }
        }
    }
}

TEST_CASE("U_r membership stable under precision bump (even places)") {
    // testing mod P^{2r} agrees with mod P^{2r+1} for 0 <= r < e
    for (long d : {10, 5, 13, 2}) {
        BaseField F = make_field(Int(d));
        for (auto& P : primes_above(F, Int(2))) {
            long e = ord_at_prime(F, P, FieldElement(Rat(2)));
            std::mt19937 rng(5);
            std::uniform_int_distribution<long> coef(-9, 9);
            int done = 0;
            while (done < 25) {
                FieldElement u{Rat(coef(rng)), Rat(coef(rng))};
                if (u.is_zero()) continue;
                long V;
                try {
                    V = ord_at_prime(F, P, u);
                } catch (...) {
                    continue;
                }
                if (V != 0) continue;  // units only
                ++done;
                for (long r = 1; r < e; ++r) {
                    bool a = detail::square_shifted(F, P, u, 0, 2 * r);
                    bool b = detail::square_shifted(F, P, u, 0, 2 * r + 1);
                    CHECK(a == b);
                }
            }
        }
    }
}
