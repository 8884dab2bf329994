#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kohnen/class_group.hpp>

#include <random>

using namespace kohnen;

TEST_CASE("class numbers of small fields") {
    CHECK(compute_class_group(make_field(Int(0))).h == 1);
    CHECK(compute_class_group(make_field(Int(2))).h == 1);
    CHECK(compute_class_group(make_field(Int(5))).h == 1);
    CHECK(compute_class_group(make_field(Int(10))).h == 2);
    CHECK(compute_class_group(make_field(Int(15))).h == 2);
    CHECK(compute_class_group(make_field(Int(30))).h == 2);
    // the formerly-typed example field
    CHECK(compute_class_group(make_field(Int(40))).h == 2);
}

TEST_CASE("p2 is non-principal in Q(sqrt 10)") {
    BaseField F = make_field(Int(10));
    auto P2 = factor_rational_prime(F, Int(2))[0];
    CHECK(!principal_generator(F, P2.lat).has_value());
    // brute-force oracle: x^2 - 10 y^2 = +-2 has no solutions mod 5
    bool solvable = false;
    for (long x = 0; x < 5 && !solvable; ++x)
        if ((x * x) % 5 == 2 || (x * x) % 5 == 3) solvable = true;
    CHECK(!solvable);
}

TEST_CASE("class_of: multiplicativity and principal classes") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    REQUIRE(G.h == 2);

    auto P2 = factor_rational_prime(F, Int(2))[0];
    auto P3 = factor_rational_prime(F, Int(3))[0];
    FactoredIdeal A;
    A.factors = {{P2, 1}};
    FactoredIdeal B;
    B.factors = {{P3, 1}};
    CHECK(class_of(F, G, A) == 1);
    CHECK(class_of(F, G, B) == 1);
    CHECK(class_of(F, G, ideal_mul(A, B)) == 0);  // product of the two nontrivial classes

    // (4 + sqrt10) has norm 6; it is p2 * p3-conjugate and principal
    auto f = factor_principal(F, FieldElement(Rat(4), Rat(1)));
    CHECK(class_of(F, G, f) == 0);

    CHECK(class_of(F, G, FactoredIdeal{}) == 0);
}

TEST_CASE("equivalence oracle: bounded element search, exhaustive over small ideals") {
    for (long d : {2, 5, 10}) {
        BaseField F = make_field(Int(d));
        ClassGroup G = compute_class_group(F);
        auto ideals = enumerate_ideals(F, Int(50));
        for (size_t i = 0; i < ideals.size(); i += 7) {
            for (size_t j = 0; j < ideals.size(); j += 11) {
                auto &A = ideals[i], &B = ideals[j];
                long ca = class_of(F, G, A), cb = class_of(F, G, B);
                // A ~ B iff A * conj(B) is principal
                Lattice LA = ideal_lattice(F, A);
                Lattice LB = ideal_lattice(F, B);
                FieldElement c1 = F.conj(FieldElement(Rat(LB.a), Rat(0)));
                FieldElement c2 = F.conj(FieldElement(Rat(LB.b), Rat(LB.d)));
                FieldElement w(Rat(0), Rat(1));
                Lattice conjB = lattice_from_rows({{to_int(c1.a), to_int(c1.b)},
                                                   {to_int(c2.a), to_int(c2.b)},
                                                   {to_int(F.mul(c1, w).a), to_int(F.mul(c1, w).b)},
                                                   {to_int(F.mul(c2, w).a), to_int(F.mul(c2, w).b)}});
                bool principal = principal_generator(F, lattice_mul(F, LA, conjB)).has_value();
                CHECK(principal == (ca == cb));
            }
        }
    }
}

TEST_CASE("characters: values, multiplicativity, orthogonality") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    ClassCharacter chi1 = class_character(G, 0);
    ClassCharacter chi2 = class_character(G, 1);
    CHECK(chi1.is_trivial());
    CHECK(!chi2.is_trivial());

    auto P2 = factor_rational_prime(F, Int(2))[0];
    FactoredIdeal A;
    A.factors = {{P2, 1}};
    CHECK(character_value(F, G, chi1, A) == CycRat(1));
    CHECK(character_value(F, G, chi2, A) == CycRat(-1));

    // orthogonality: sum over classes chi_i(c) conj(chi_j(c)) = h [i=j]
    for (long i = 0; i < G.h; ++i)
        for (long j = 0; j < G.h; ++j) {
            CycRat s(0);
            for (long c = 0; c < G.h; ++c)
                s += character_value_on_class(class_character(G, i), c) *
                     character_value_on_class(class_character(G, j), c).conj();
            CHECK(s == CycRat(i == j ? G.h : 0));
        }

    // multiplicativity on random pairs
    auto ideals = enumerate_ideals(F, Int(40));
    std::mt19937 rng(4);
    std::uniform_int_distribution<size_t> pick(0, ideals.size() - 1);
    for (int k = 0; k < 100; ++k) {
        auto &A1 = ideals[pick(rng)], &A2 = ideals[pick(rng)];
        CHECK(character_value(F, G, chi2, ideal_mul(A1, A2)) ==
              character_value(F, G, chi2, A1) * character_value(F, G, chi2, A2));
    }
}

TEST_CASE("character table has nonzero determinant (h = 2 case: rank 2)") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    // 2x2 table over Q: [[1,1],[1,-1]]
    Rat a = character_value_on_class(class_character(G, 0), 0).to_rational();
    Rat b = character_value_on_class(class_character(G, 0), 1).to_rational();
    Rat c = character_value_on_class(class_character(G, 1), 0).to_rational();
    Rat d = character_value_on_class(class_character(G, 1), 1).to_rational();
    CHECK(a * d - b * c != 0);
}

TEST_CASE("class of large primes via short-vector reduction") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    // (3 - 2 sqrt10) generates a principal prime of norm 31
    auto f31 = factor_principal(F, FieldElement(Rat(3), Rat(-2)));
    REQUIRE(f31.factors.size() == 1);
    CHECK(class_of(F, G, f31) == 0);
    // consistency of the cached path against the direct path on a spread of primes
    for (long p : primes_up_to(200)) {
        for (auto& P : primes_above(F, Int(p))) {
            FactoredIdeal A;
            A.factors = {{P, 1}};
            long via_cache = class_of(F, G, A);
            long direct = detail::class_index_direct(F, G, P.lat);
            CHECK(via_cache == direct);
        }
    }
}
