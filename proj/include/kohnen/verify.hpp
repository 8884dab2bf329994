#pragma once

#include <chrono>
#include <sstream>

#include "eisenstein.hpp"
#include "padic.hpp"

namespace kohnen {
namespace verify {

// rational literal with explicit canonicalization
inline Rat rat_lit(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw computation_error("bad rational literal " + s);
    r.canonicalize();
    return r;
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
    double seconds = 0;
};

namespace detail {

struct Failure {
    std::string msg;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure{msg};
}

// the table of the worked example: index coordinates (a, b) against sqrt(10), value at scale 60
struct TableEntry {
    long a, b, value;
};

inline const std::vector<TableEntry>& example_table(long chi) {
    static const std::vector<TableEntry> t0 = {{0, 0, 1577}, {1, 0, 70},   {2, 0, 264},
                                               {7, 2, 744},  {7, -2, 744}, {4, 0, 3850},
                                               {5, 0, 3144}, {6, 0, 8640}};
    static const std::vector<TableEntry> t1 = {{0, 0, 1577}, {1, 0, 24},    {2, 0, 490},
                                               {7, 2, 1750}, {7, -2, 1750}, {4, 0, 2184},
                                               {5, 0, 8470}, {6, 0, 8160}};
    return chi == 0 ? t0 : t1;
}

inline void check_example_table(long chi_index) {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    EisensteinSeries E(F, G, 2, chi_index);
    QExpansion g = E.qexpansion(14);
    std::map<std::pair<long, long>, long> expected;
    for (auto& e : example_table(chi_index)) expected[{e.a, e.b}] = e.value;
    for (auto& xi : enumerate_totally_positive(F, 14)) {
        Rat v = g.coeff(xi).to_rational() * 60;
        long a = mpz_get_si(to_int(xi.a).get_mpz_t());
        long b = mpz_get_si(to_int(xi.b).get_mpz_t());
        auto it = expected.find({a, b});
        Rat want = (it == expected.end()) ? Rat(0) : Rat(it->second);
        require(v == want, "coefficient mismatch at (" + std::to_string(a) + "," + std::to_string(b) +
                               "): got " + v.get_str() + ", expected " + want.get_str());
    }
}

inline void check_embedded_lvalues() {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    CharacterSpec triv;
    Rat z3 = hecke_L_exact(F, G, 4, triv).to_rational();
    Rat z1 = hecke_L_exact(F, G, 2, triv).to_rational();
    require(z3 == Rat(1577, 60), "zeta_F(-3) exact value: got " + z3.get_str());
    require(z1 == Rat(7, 6), "zeta_F(-1) exact value: got " + z1.get_str());
    auto n3 = hecke_L_numeric(F, G, 4, triv, 300000);
    auto n1 = hecke_L_numeric(F, G, 2, triv, 1000000);
    require(std::abs(n3.value.real() - z3.get_d()) / std::abs(z3.get_d()) < 1e-4,
            "zeta_F(-3) numeric backend relative error too large");
    require(std::abs(n1.value.real() - z1.get_d()) / std::abs(z1.get_d()) < 1e-4,
            "zeta_F(-1) numeric backend relative error too large");
}

inline void check_cohen_specialization() {
    BaseField Q = make_field(Int(0));
    ClassGroup G = compute_class_group(Q);
    for (long r : {2L, 3L, 4L}) {
        QExpansion a = cohen_series(Q, r, 200);
        EisensteinSeries E(Q, G, r, 0);
        QExpansion b = E.qexpansion(200);
        require(a.agrees_with(b), "integer route and ideal route disagree at r = " + std::to_string(r));
    }
}

inline void check_hecke_eigenforms(long kappa) {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    FieldElement a1{Rat(3), Rat(-2)}, a2{Rat(9), Rat(-1)};
    for (long chi : {0L, 1L}) {
        EisensteinSeries E(F, G, kappa, chi);
        for (auto& [alpha, Np] : {std::pair{a1, 31L}, std::pair{a2, 71L}}) {
            auto P = factor_principal(F, alpha).factors[0].first;
            FieldElement al2 = F.mul(alpha, alpha);
            Rat lam = 1 + rat_pow(Rat(Np), 2 * kappa - 1);
            int eta = (kappa % 2) ? -1 : 1;
            for (auto& xi : enumerate_totally_positive(F, 6)) {
                CycRat lhs = E.coefficient(F.mul(xi, al2));
                if (!xi.is_zero()) {
                    FieldElement etaxi = eta < 0 ? F.neg(xi) : xi;
                    int sym = residue_symbol(F, P, etaxi);
                    if (sym != 0)
                        lhs += E.coefficient(xi).scaled(Rat(sym) * rat_pow(Rat(Np), kappa - 1));
                }
                FieldElement dn = F.div(xi, al2);
                if (F.is_integral(dn)) lhs += E.coefficient(dn).scaled(rat_pow(Rat(Np), 2 * kappa - 1));
                require(lhs == E.coefficient(xi).scaled(lam),
                        "eigenform identity fails at kappa=" + std::to_string(kappa) +
                            " chi=" + std::to_string(chi) + " N(p)=" + std::to_string(Np));
            }
        }
    }
    if (kappa == 2) {
        BaseField Q = make_field(Int(0));
        ClassGroup GQ = compute_class_group(Q);
        QExpansion h = cohen_series(Q, 2, 500);
        for (long p : {3L, 5L, 7L}) {
            auto img = hecke_T_plus(Q, GQ, 2, FieldElement(Rat(p)), h);
            Rat lam = 1 + rat_pow(Rat(p), 3);
            for (long n = 0; n <= img.certified_bound; ++n) {
                FieldElement xi{Rat(n)};
                require(img.image.coeff(xi) == h.coeff(xi).scaled(lam),
                        "rational-field eigenform fails at p = " + std::to_string(p));
            }
        }
    }
}

inline void check_square_class_window() {
    for (long d : {0L, 2L, 5L, 10L, 13L}) {
        BaseField F = make_field(Int(d));
        for (auto& xi : enumerate_totally_positive(F, 20)) {
            if (xi.is_zero()) continue;
            auto rd = relative_discriminant(F, xi);
            bool brute = is_square_mod4(F, xi);
            require(brute == (rd.min_f >= 0),
                    "square-mod-4 equivalence fails in D = " + std::to_string(d) + " at " +
                        F.element_str(xi));
        }
    }
}

inline void check_dual_formula() {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    for (long chi : {0L, 1L}) {
        for (long kappa : {2L, 3L}) {
            EisensteinSeries E(F, G, kappa, chi);
            int eta = (kappa % 2) ? -1 : 1;
            for (auto& xi : enumerate_totally_positive(F, 10)) {
                if (xi.is_zero()) continue;
                FieldElement theta = eta < 0 ? F.neg(xi) : xi;
                if (relative_discriminant(F, theta).min_f < 0) continue;
                std::complex<double> lhs = E.frak_C(theta).to_complex();
                std::complex<double> rhs = E.frak_C_product(theta, 1);
                require(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)),
                        "divisor-sum and local-product forms disagree at " + F.element_str(xi));
            }
        }
    }
}

inline void check_local_suite() {
    using namespace padic;
    std::mt19937 rng(2024);
    std::uniform_int_distribution<long> num(1, 60);
    for (long p : {2L, 3L, 5L}) {
        PadicContext ctx(p);
        auto [i1, i2] = unit_integrals(ctx);
        require(i1 == sqrtp_pow(p, -ctx.e).scaled(Rat(p - 1, p)),
                "unit integral (1) at p = " + std::to_string(p));
        require(i2.is_zero(), "unit integral (2) at p = " + std::to_string(p));
        // Weil constant relations on 50 random samples
        std::vector<Rat> samples;
        while (samples.size() < 50) {
            long n = num(rng), d = num(rng);
            samples.push_back(Rat((num(rng) % 2 ? 1 : -1) * n) / Rat(d));
        }
        for (auto& a : samples) {
            CycRat al = weil_constant(ctx, a);
            CycRat pw(1);
            for (int i = 0; i < 8; ++i) pw *= al;
            require(pw == CycRat(1), "alpha^8 = 1 fails");
            require(weil_constant(ctx, a * Rat(9)) == al, "square-class invariance fails");
        }
        for (size_t i = 0; i + 1 < samples.size(); i += 2) {
            CycRat lhs = weil_constant(ctx, samples[i]) * weil_constant(ctx, samples[i + 1]);
            CycRat rhs = weil_constant(ctx, Rat(1)) * weil_constant(ctx, samples[i] * samples[i + 1]);
            require(lhs == rhs.scaled(Rat(hilbert_symbol(p, samples[i], samples[i + 1]))),
                    "Hilbert-symbol relation fails");
        }
    }
    // Whittaker-vs-polynomial and constant-term identities
    int cases = 0;
    for (long p : {2L, 3L, 5L}) {
        PadicContext ctx(p);
        for (long s : {1L, 2L}) {
            for (long xi : {1L, 2L, 3L, 4L, 9L, 5L, 12L}) {
                auto cmp = whittaker_vs_psi(ctx, Rat(xi), s);
                require(cmp.equal, "Whittaker integral deviates at p=" + std::to_string(p) +
                                       " xi=" + std::to_string(xi));
                ++cases;
            }
            Rat q(p);
            Rat want = (1 - rat_pow(q, -2 * s - 1)) / (1 - rat_pow(q, -2 * s));
            require(constant_integral(ctx, s) == CycRat(want),
                    "constant-term integral deviates at p=" + std::to_string(p));
        }
    }
    require(cases >= 20, "not enough Whittaker cases");
    // idempotence at p = 2, stable across levels 8 and 16
    PadicContext c2(2);
    std::vector<Meta> samp = {Meta{Mat2{1, 0, 0, 1}, 1}, Meta{mat_uflat(Rat(1))},
                              Meta{mat_uflat(Rat(2))},   Meta{mat_uflat(Rat(4))},
                              Meta{Mat2{1, 1, 1, 2}, 1}, Meta{Mat2{3, 1, 2, 1}, 1},
                              Meta{Mat2{1, 2, 2, 5}, 1}, Meta{Mat2{0, -1, 1, 0}, 1}};
    auto rep = convolve_idempotent_check(c2, {3, 4}, samp);
    require(rep.passed, "idempotence: " + rep.detail);
}

inline void check_rank() {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    EisensteinSeries E0(F, G, 2, 0), E1(F, G, 2, 1);
    QExpansion g0 = E0.qexpansion(8), g1 = E1.qexpansion(8);
    // exact rank of the 2 x K coefficient matrix over the cyclotomic field
    std::vector<FieldElement> idx;
    for (auto& xi : enumerate_totally_positive(F, 8)) idx.push_back(xi);
    bool rank2 = false;
    for (size_t i = 0; i < idx.size() && !rank2; ++i)
        for (size_t j = i + 1; j < idx.size() && !rank2; ++j) {
            CycRat det = g0.coeff(idx[i]) * g1.coeff(idx[j]) - g0.coeff(idx[j]) * g1.coeff(idx[i]);
            if (!det.is_zero()) rank2 = true;
        }
    require(rank2, "coefficient matrix has rank < 2");
}

inline void check_kappa_one() {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    for (long chi : {0L, 1L}) {
        EisensteinSeries E(F, G, 1, chi);
        // constant term: L_F(-1, conj(chi')^2)
        CharacterSpec spec = make_character_spec(F, std::nullopt, character_index_pow(G, chi, 2), true);
        require(E.constant_term() == hecke_L_exact(F, G, 2, spec),
                "weight 3/2 constant term mismatch");
        // a nonzero coefficient exists (the series is not degenerate)
        bool nonzero = false;
        for (auto& xi : enumerate_totally_positive(F, 8))
            if (!xi.is_zero() && !E.coefficient(xi).is_zero()) nonzero = true;
        require(nonzero, "weight 3/2 series vanished identically");
    }
    check_hecke_eigenforms(1);
    // kappa = 1 over Q must be rejected
    BaseField Q = make_field(Int(0));
    ClassGroup GQ = compute_class_group(Q);
    bool threw = false;
    try {
        make_eisenstein_spec(Q, GQ, 1, 0);
    } catch (const computation_error&) {
        threw = true;
    }
    require(threw, "kappa = 1 over the rationals was not rejected");
}

// the two linear-combination identities of the example section, checked on all
// coefficients with trace <= 20
inline void check_stretch_identities() {
    BaseField F = make_field(Int(40));
    ClassGroup G = compute_class_group(F);
    FieldElement a1{Rat(3), Rat(-2)}, a2{Rat(9), Rat(-1)};
    FieldElement a1s = F.mul(a1, a1), a2s = F.mul(a2, a2);
    auto P1 = factor_principal(F, a1).factors[0].first;
    auto P2 = factor_principal(F, a2).factors[0].first;

    // memoized coefficient of f_{ci,tj} = E_{2,ci}(4z) theta_j(z)
    std::map<std::pair<std::pair<long, int>, std::pair<Rat, Rat>>, CycRat> fmemo;
    auto fcoef = [&](long ci, int tj, const FieldElement& mu) -> CycRat {
        if (!mu.is_zero() && !F.is_totally_positive(mu)) return CycRat(0);
        auto key = std::make_pair(std::make_pair(ci, tj), std::make_pair(mu.a, mu.b));
        auto it = fmemo.find(key);
        if (it != fmemo.end()) return it->second;
        CycRat v = product_series_coefficient(F, G, ci, tj, mu);
        fmemo.emplace(key, v);
        return v;
    };
    // T+(alpha^2) f at xi (kappa = 2)
    auto Tcoef = [&](const FieldElement& alpha, const FieldElement& alpha_sq, const PrimeIdeal& P,
                     long Np, long ci, int tj, const FieldElement& xi) -> CycRat {
        CycRat c = fcoef(ci, tj, F.mul(xi, alpha_sq));
        if (!xi.is_zero()) {
            int sym = residue_symbol(F, P, xi);
            if (sym != 0) c += fcoef(ci, tj, xi).scaled(Rat(sym * Np));
        }
        FieldElement dn = F.div(xi, alpha_sq);
        if (F.is_integral(dn)) c += fcoef(ci, tj, dn).scaled(rat_pow(Rat(Np), 3));
        return c;
    };

    struct Term {
        Rat coef;
        int op;    // 0: plain, 1: T+(alpha1^2), 2: T+(alpha2^2)
        long ci;   // class index of the weight-2 factor
        int tj;    // theta kind
    };
    auto run_identity = [&](long chi_index, const std::vector<Term>& terms) {
        EisensteinSeries E(F, G, 2, chi_index);
        Rat big = rat_lit("172845227913");
        for (auto& xi : enumerate_totally_positive(F, 20)) {
            CycRat lhs = E.coefficient(xi).scaled(big);
            CycRat rhs(0);
            for (auto& t : terms) {
                CycRat v;
                if (t.op == 0)
                    v = fcoef(t.ci, t.tj, xi);
                else if (t.op == 1)
                    v = Tcoef(a1, a1s, P1, 31, t.ci, t.tj, xi);
                else
                    v = Tcoef(a2, a2s, P2, 71, t.ci, t.tj, xi);
                rhs += v.scaled(t.coef);
            }
            require(lhs == rhs, "combination identity (chi = " + std::to_string(chi_index) +
                                    ") fails at " + F.element_str(xi));
        }
    };

    // identity for the trivial character
    run_identity(0, {{rat_lit("370247733672/13"), 0, 0, 1},
                     {rat_lit("-7861698464301/91"), 0, 1, 1},
                     {rat_lit("16454261996"), 0, 1, 2},
                     {rat_lit("-6750047621/26"), 1, 0, 1},
                     {rat_lit("8395141929/26"), 1, 0, 2},
                     {rat_lit("37223824769/104"), 1, 1, 1},
                     {rat_lit("-3375940624/13"), 1, 1, 2},
                     {rat_lit("-649641221/26"), 2, 0, 1},
                     {rat_lit("1180397267/26"), 2, 0, 2},
                     {rat_lit("4022282847/56"), 2, 1, 1}});
    // identity for the nontrivial character
    run_identity(1, {{rat_lit("-175639298994/13"), 0, 0, 1},
                     {rat_lit("279576612332/91"), 0, 1, 1},
                     {rat_lit("8260703363"), 0, 1, 2},
                     {rat_lit("-17803418247/104"), 1, 0, 1},
                     {rat_lit("24155608897/104"), 1, 0, 2},
                     {rat_lit("22793580805/104"), 1, 1, 1},
                     {rat_lit("-7459199343/52"), 1, 1, 2},
                     {rat_lit("5253019763/104"), 2, 0, 1},
                     {rat_lit("4756228563/104"), 2, 0, 2},
                     {rat_lit("-4528661307/56"), 2, 1, 1}});
}

}  // namespace detail

struct Check {
    std::string name;
    void (*fn)();
};

inline const std::vector<Check>& all_checks() {
    static const std::vector<Check> checks = {
        {"eisenstein-table-chi0", [] { detail::check_example_table(0); }},
        {"eisenstein-table-chi1", [] { detail::check_example_table(1); }},
        {"embedded-lvalues", detail::check_embedded_lvalues},
        {"cohen-specialization", detail::check_cohen_specialization},
        {"hecke-eigenform", [] { detail::check_hecke_eigenforms(2); }},
        {"square-class-window", detail::check_square_class_window},
        {"dual-formula", detail::check_dual_formula},
        {"local-suite", detail::check_local_suite},
        {"rank-two", detail::check_rank},
        {"kappa-one", detail::check_kappa_one},
        {"stretch-identities", detail::check_stretch_identities},
    };
    return checks;
}

inline CheckResult run_check(const Check& c) {
    CheckResult r;
    r.name = c.name;
    auto t0 = std::chrono::steady_clock::now();
    try {
        c.fn();
        r.passed = true;
    } catch (const detail::Failure& f) {
        r.passed = false;
        r.detail = f.msg;
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::vector<CheckResult> run_all(const std::vector<std::string>& which = {}) {
    std::vector<CheckResult> out;
    for (auto& c : all_checks()) {
        if (!which.empty() &&
            std::find(which.begin(), which.end(), c.name) == which.end())
            continue;
        out.push_back(run_check(c));
    }
    return out;
}

}  // namespace verify
}  // namespace kohnen
