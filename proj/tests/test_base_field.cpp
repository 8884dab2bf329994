#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kohnen/base_field.hpp>

#include <random>

using namespace kohnen;

TEST_CASE("make_field basic invariants") {
    BaseField Q = make_field(Int(0));
    CHECK(Q.is_rational());
    CHECK(Q.disc == 1);
    CHECK(Q.degree == 1);

    // non-squarefree radicand is reduced: 40 -> 10
    BaseField F = make_field(Int(40));
    CHECK(F.D == 10);
    CHECK(F.disc == 40);
    CHECK(!F.omega_is_half);

    BaseField F5 = make_field(Int(5));
    CHECK(F5.disc == 5);
    CHECK(F5.omega_is_half);

    CHECK_THROWS(make_field(Int(-3)));
    CHECK_THROWS(make_field(Int(1)));
    CHECK_THROWS(make_field(Int(9)));
}

TEST_CASE("fundamental unit via continued fraction, brute-force oracle") {
    // oracle: smallest b >= 1 with D b^2 +- 1 (or +-4 on the half basis) a perfect square
    auto brute_unit = [](const BaseField& F) {
        for (Int b = 1;; ++b) {
            if (F.omega_is_half) {
                for (int s : {-1, 1}) {
                    Int a2 = F.D * b * b + 4 * s, a;
                    if (a2 > 0 && is_perfect_square(a2, &a) && (a - b) % 2 == 0)
                        return FieldElement(Rat((a - b) / 2), Rat(b));
                }
            } else {
                for (int s : {-1, 1}) {
                    Int a2 = F.D * b * b + s, a;
                    if (a2 > 0 && is_perfect_square(a2, &a)) return FieldElement(Rat(a), Rat(b));
                }
            }
        }
    };
    for (long d : {2, 3, 5, 7, 10, 13, 15, 17, 19, 21, 22, 23, 26, 29, 30}) {
        BaseField F = make_field(Int(d));
        FieldElement u = brute_unit(F);
        INFO("D = ", d);
        CHECK(F.fund_unit == u);
        CHECK((F.norm(F.fund_unit) == 1 || F.norm(F.fund_unit) == -1));
        // tp_unit: totally positive, first embedding > 1, norm 1
        CHECK(F.is_totally_positive(F.tp_unit));
        CHECK(F.norm(F.tp_unit) == 1);
        CHECK(F.embedding_sign(F.sub(F.tp_unit, FieldElement(Rat(1))), 0) > 0);
    }
    // the worked example: Q(sqrt 10)
    BaseField F = make_field(Int(10));
    CHECK(F.fund_unit == FieldElement(Rat(3), Rat(1)));
    CHECK(F.norm(F.fund_unit) == -1);
    CHECK(F.tp_unit == FieldElement(Rat(19), Rat(6)));
}

TEST_CASE("element invariants") {
    BaseField F = make_field(Int(10));
    auto inv = element_invariants(F, FieldElement(Rat(7), Rat(2)));
    CHECK(inv.trace == 14);
    CHECK(inv.norm == 9);
    CHECK(inv.totally_positive);

    auto inv2 = element_invariants(F, FieldElement(Rat(3), Rat(1)));
    CHECK(inv2.norm == -1);
    CHECK(!inv2.totally_positive);

    BaseField Q = make_field(Int(0));
    auto inv3 = element_invariants(Q, FieldElement(Rat(5)));
    CHECK(inv3.trace == 5);
    CHECK(inv3.norm == 5);
    CHECK(inv3.totally_positive);
}

TEST_CASE("trace additive, norm multiplicative on random pairs") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<long> coef(-30, 30);
    for (long d : {0, 10, 13}) {
        BaseField F = make_field(Int(d));
        for (int i = 0; i < 100; ++i) {
            FieldElement x{Rat(coef(rng)), F.is_rational() ? Rat(0) : Rat(coef(rng))};
            FieldElement y{Rat(coef(rng)), F.is_rational() ? Rat(0) : Rat(coef(rng))};
            CHECK(F.trace(F.add(x, y)) == F.trace(x) + F.trace(y));
            CHECK(F.norm(F.mul(x, y)) == F.norm(x) * F.norm(y));
        }
    }
}

TEST_CASE("enumerate_totally_positive") {
    BaseField Q = make_field(Int(0));
    auto l = enumerate_totally_positive(Q, 3);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == FieldElement(Rat(0)));
    CHECK(l[3] == FieldElement(Rat(3)));

    BaseField F = make_field(Int(10));
    auto l4 = enumerate_totally_positive(F, 4);
    REQUIRE(l4.size() == 3);  // 0, 1, 2
    CHECK(l4[1] == FieldElement(Rat(1)));
    CHECK(l4[2] == FieldElement(Rat(2)));

    auto l14 = enumerate_totally_positive(F, 14);
    bool has_p = false, has_m = false;
    for (auto& x : l14) {
        if (x == FieldElement(Rat(7), Rat(2))) has_p = true;
        if (x == FieldElement(Rat(7), Rat(-2))) has_m = true;
    }
    CHECK(has_p);
    CHECK(has_m);

    // monotone in the bound
    auto l8 = enumerate_totally_positive(F, 8);
    for (auto& x : l8) {
        bool found = false;
        for (auto& y : l14)
            if (x == y) found = true;
        CHECK(found);
    }

    // completeness: everything integral with trace <= T not listed has a negative embedding
    for (long a = -7; a <= 7; ++a)
        for (long b = -4; b <= 4; ++b) {
            FieldElement x{Rat(a), Rat(b)};
            if (F.trace(x) < 1 || F.trace(x) > 14) continue;
            bool listed = false;
            for (auto& y : l14)
                if (x == y) listed = true;
            CHECK(listed == F.is_totally_positive(x));
        }
}

TEST_CASE("enumeration on the half-integral basis") {
    BaseField F = make_field(Int(5));
    auto l = enumerate_totally_positive(F, 10);
    // omega = (1+sqrt 5)/2 is totally... omega's second embedding (1-sqrt5)/2 < 0
    CHECK(!F.is_totally_positive(FieldElement(Rat(0), Rat(1))));
    // 2 + omega: embeddings 2 + 1.618, 2 - 0.618 > 0: listed (trace 5)
    bool found = false;
    for (auto& x : l)
        if (x == FieldElement(Rat(2), Rat(1))) found = true;
    CHECK(found);
    for (auto& x : l)
        if (!x.is_zero()) CHECK(F.is_totally_positive(x));
}

TEST_CASE("exact square detection") {
    BaseField F = make_field(Int(10));
    FieldElement s{Rat(19), Rat(6)};  // (3+sqrt10)^2 = 19 + 6 sqrt10
    FieldElement r;
    CHECK(F.is_square(s, &r));
    CHECK(F.mul(r, r) == s);
    CHECK(!F.is_square(FieldElement(Rat(2))));
    CHECK(F.is_square(FieldElement(Rat(10)), &r));  // (sqrt10)^2
    CHECK(F.mul(r, r) == FieldElement(Rat(10)));
}
