#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kohnen/eisenstein.hpp>

#include <random>

using namespace kohnen;

TEST_CASE("basic algebra: add, scale, multiply, dilate") {
    BaseField Q = make_field(Int(0));
    QExpansion t1 = theta_series(Q, 12);
    // theta over Q: 1 + 2q + 2q^4 + 2q^9 + ...
    CHECK(t1.coeff(FieldElement(Rat(0))) == CycRat(1));
    CHECK(t1.coeff(FieldElement(Rat(1))) == CycRat(2));
    CHECK(t1.coeff(FieldElement(Rat(2))) == CycRat(0));
    CHECK(t1.coeff(FieldElement(Rat(4))) == CycRat(2));
    CHECK(t1.coeff(FieldElement(Rat(9))) == CycRat(2));

    QExpansion sq = t1 * t1;
    // r2(1) = 4
    CHECK(sq.coeff(FieldElement(Rat(1))) == CycRat(4));
    // r2(5) = 8
    CHECK(sq.coeff(FieldElement(Rat(5))) == CycRat(8));

    QExpansion d = t1.dilated(4);
    CHECK(d.trace_bound() == 48);
    CHECK(d.coeff(FieldElement(Rat(4))) == CycRat(2));
    CHECK(d.coeff(FieldElement(Rat(1))) == CycRat(0));

    QExpansion s = t1.scaled(CycRat(Rat(3, 2)));
    CHECK(s.coeff(FieldElement(Rat(1))) == CycRat(Rat(3)));

    QExpansion sum = t1 + t1;
    CHECK(sum.coeff(FieldElement(Rat(1))) == CycRat(4));
}

TEST_CASE("multiplication is commutative and associative on random triples") {
    BaseField F = make_field(Int(10));
    std::mt19937 rng(3);
    std::uniform_int_distribution<long> val(-5, 5);
    auto l = enumerate_totally_positive(F, 6);
    auto random_exp = [&]() {
        QExpansion f(F, 6);
        for (auto& xi : l)
            if (val(rng) > 1) f.set(xi, CycRat(Rat(val(rng))));
        return f;
    };
    for (int i = 0; i < 5; ++i) {
        QExpansion a = random_exp(), b = random_exp(), c = random_exp();
        CHECK((a * b) == (b * a));
        CHECK(((a * b) * c) == (a * (b * c)));
    }
}

TEST_CASE("theta over the example field") {
    BaseField F = make_field(Int(10));
    QExpansion t1 = theta_series(F, 40);
    CHECK(t1.coeff(FieldElement(Rat(0))) == CycRat(1));
    CHECK(t1.coeff(FieldElement(Rat(1))) == CycRat(2));
    CHECK(t1.coeff(FieldElement(Rat(4))) == CycRat(2));
    // (3+sqrt10)^2 = 19+6 sqrt10, trace 38: exactly the roots +-(3+sqrt10)
    CHECK(t1.coeff(FieldElement(Rat(19), Rat(6))) == CycRat(2));
    // 10 = (sqrt10)^2 from +-sqrt10
    CHECK(t1.coeff(FieldElement(Rat(10))) == CycRat(2));

    QExpansion t2 = theta2_series(F, 40);
    // lambda = sqrt10 in p5: lambda^2/5 = 2
    CHECK(t2.coeff(FieldElement(Rat(2))) == CycRat(2));
    CHECK(t2.coeff(FieldElement(Rat(0))) == CycRat(1));
    // lambda = 5: 25/5 = 5
    CHECK(t2.coeff(FieldElement(Rat(5))) == CycRat(2));
}

TEST_CASE("sigma_class and the weight-2 series") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    // only o divides (1); it is principal
    CHECK(sigma_class(F, G, 1, 0, FieldElement(Rat(1))) == 1);
    CHECK(sigma_class(F, G, 1, 1, FieldElement(Rat(1))) == 0);
    // (2) = p2^2: divisors o, p2, p2^2 with norms 1, 2, 4; p2 nonprincipal
    CHECK(sigma_class(F, G, 1, 0, FieldElement(Rat(2))) == 5);
    CHECK(sigma_class(F, G, 1, 1, FieldElement(Rat(2))) == 2);

    QExpansion e20 = weight2_series(F, G, 0, 10);
    QExpansion e21 = weight2_series(F, G, 1, 10);
    CHECK(e20.coeff(FieldElement(Rat(0))) == CycRat(Rat(47, 240)));
    CHECK(e21.coeff(FieldElement(Rat(0))) == CycRat(Rat(23, 240)));
    CHECK(e20.coeff(FieldElement(Rat(1))) == CycRat(1));
    CHECK(e21.coeff(FieldElement(Rat(1))) == CycRat(0));

    // product coefficients on demand match the table product
    QExpansion prod = e20.dilated(4) * theta_series(F, 40);
    for (auto& xi : enumerate_totally_positive(F, 14)) {
        CHECK(product_series_coefficient(F, G, 0, 1, xi) == prod.coeff(xi));
    }
}

TEST_CASE("JSON round trip") {
    BaseField F = make_field(Int(10));
    ClassGroup G = compute_class_group(F);
    QExpansion e = weight2_series(F, G, 1, 8);
    nlohmann::json j = e.to_json();
    QExpansion back = QExpansion::from_json(F, j);
    CHECK(back == e);
    CHECK(back.to_json() == j);

    // cyclotomic values survive the round trip
    QExpansion c(F, 4, "cyc");
    c.set(FieldElement(Rat(1)), CycRat::root_of_unity(4, 1) + CycRat(Rat(1, 3)));
    QExpansion cb = QExpansion::from_json(F, c.to_json());
    CHECK(cb == c);
}

TEST_CASE("coefficient range discipline") {
    BaseField Q = make_field(Int(0));
    QExpansion f(Q, 5);
    f.set(FieldElement(Rat(3)), CycRat(7));
    CHECK(f.coeff(FieldElement(Rat(4))) == CycRat(0));
    CHECK_THROWS(f.coeff(FieldElement(Rat(6))));
    CHECK_THROWS(f.set(FieldElement(Rat(9)), CycRat(1)));
}
