#pragma once

#include <complex>
#include <functional>

#include "class_group.hpp"
#include "quad_invariants.hpp"

namespace kohnen {

// ---------------------------------------------------------------------------
// Exact L-values over Q: generalized Bernoulli numbers.
// chi is the Kronecker character of a fundamental discriminant D0 (D0 = 1: trivial).
// L(1-r, chi) = -B_{r,chi}/r,  B_{r,chi} = f^{r-1} sum_{a=1..f} chi(a) B_r(a/f).
// ---------------------------------------------------------------------------

inline Rat bernoulli_L_rational(long r, const Int& D0) {
    if (r < 1) throw computation_error("bernoulli_L_rational: r >= 1 required");
    if (D0 == 1 && r == 1) throw computation_error("L(0, trivial) is a pole of zeta");
    Int f = D0 < 0 ? -D0 : D0;
    Rat B(0);
    for (Int a = 1; a <= f; ++a) {
        int chi = kronecker(D0, a);
        if (chi == 0) continue;
        B += Rat(chi) * bernoulli_poly(r, Rat(a) / Rat(f));
    }
    B *= rat_pow(Rat(f), r - 1);
    return -B / r;
}

// fundamental discriminant attached to the square class of a nonzero rational
inline Int rational_square_class_disc(const Rat& x) {
    if (x == 0) throw computation_error("square class of 0");
    return fundamental_discriminant(x.get_num() * x.get_den());
}

// ---------------------------------------------------------------------------
// Character data for L_F(s, chi_xi * chi_class^{+-1}).
// ---------------------------------------------------------------------------

struct CharacterSpec {
    std::optional<FieldElement> twist_xi;  // quadratic part chi_xi; absent = trivial
    long class_char_index = 0;             // index into the class group characters
    bool conjugate_class_char = false;
    FactoredIdeal modulus;                 // D_xi (unit ideal when untwisted)

    bool quad_trivial(const BaseField& F) const {
        return !twist_xi || F.is_square(*twist_xi);
    }
};

inline CharacterSpec make_character_spec(const BaseField& F, const std::optional<FieldElement>& xi,
                                         long class_idx, bool conj_class) {
    CharacterSpec spec;
    spec.twist_xi = xi;
    spec.class_char_index = class_idx;
    spec.conjugate_class_char = conj_class;
    if (xi && !xi->is_zero()) {
        auto rd = relative_discriminant(F, *xi);
        spec.modulus = rd.D;
    }
    return spec;
}

// chi_spec on a factored ideal (0 when the ideal meets the modulus)
inline CycRat character_spec_value(const BaseField& F, ClassGroup& G, const CharacterSpec& spec,
                                   const FactoredIdeal& A) {
    int quad = 1;
    if (spec.twist_xi && !spec.twist_xi->is_zero()) {
        quad = chi_xi_on_ideal(F, *spec.twist_xi, A);
        if (quad == 0) return CycRat(0);
    }
    CycRat cls = character_value(F, G, class_character(G, spec.class_char_index), A);
    if (spec.conjugate_class_char) cls = cls.conj();
    return cls.scaled(Rat(quad));
}

// ---------------------------------------------------------------------------
// Shintani cone evaluation.
//
// For the half-open simplicial cone {x g1 + y g2 : x in (0,1], y in [0,1)} + lattice
// translates, the weighted sum  sum_{m,n >= 0} prod_i L_i((x+m) g1 + (y+n) g2)^{-s}
// at s = 1-k equals  ((k-1)!^2 / 2) * (iota1(E) + iota2(E))  with E in F given by the
// tau-coefficient extraction below. The linear forms are passed as branch-1 data:
//   L1(g1) = iota1(a1), L2(g1) = iota1(a2), L1(g2) = iota1(b1), L2(g2) = iota1(b2).
// ---------------------------------------------------------------------------

namespace detail {

// [tau^m] of (b1 + b2 tau)^p / (a1 + a2 tau), exact in F
inline FieldElement coeff_linpow_over_lin(const BaseField& F, long p, long m,
                                          const FieldElement& b1, const FieldElement& b2,
                                          const FieldElement& a1, const FieldElement& a2) {
    // 1/(a1 + a2 tau) = sum_i (-1)^i a2^i / a1^{i+1} tau^i
    FieldElement acc(Rat(0));
    for (long j = std::max(0L, m - p); j <= m; ++j) {
        // want [tau^{m-j}] B^p  *  [tau^j] (1/A)
        long i = m - j;  // power index into B^p
        if (i > p) continue;
        FieldElement termB = F.mul(F.scale(F.pow(b1, p - i), to_int(binomial(p, i))), F.pow(b2, i));
        FieldElement termA = F.scale(F.pow(F.div(a2, a1), j), Rat(1));
        termA = F.div(termA, a1);
        if (j % 2) termA = F.neg(termA);
        acc = F.add(acc, F.mul(termB, termA));
    }
    return acc;
}

// [tau^m] of (a1 + a2 tau)^p (b1 + b2 tau)^q, p, q >= 0
inline FieldElement coeff_linpow_pair(const BaseField& F, long p, long q, long m,
                                      const FieldElement& a1, const FieldElement& a2,
                                      const FieldElement& b1, const FieldElement& b2) {
    FieldElement acc(Rat(0));
    for (long i = std::max(0L, m - q); i <= std::min(p, m); ++i) {
        long j = m - i;
        FieldElement ta = F.mul(F.scale(F.pow(a1, p - i), to_int(binomial(p, i))), F.pow(a2, i));
        FieldElement tb = F.mul(F.scale(F.pow(b1, q - j), to_int(binomial(q, j))), F.pow(b2, j));
        acc = F.add(acc, F.mul(ta, tb));
    }
    return acc;
}

inline FieldElement shintani_H_coeff(const BaseField& F, long k, const Rat& x, const Rat& y,
                                     const FieldElement& a1, const FieldElement& a2,
                                     const FieldElement& b1, const FieldElement& b2) {
    long m = k - 1;
    FieldElement total(Rat(0));
    Rat c1 = bernoulli_poly(2 * k, y) / Rat(factorial(2 * k));
    Rat c2 = bernoulli_poly(2 * k, x) / Rat(factorial(2 * k));
    total = F.add(total, F.scale(coeff_linpow_over_lin(F, 2 * k - 1, m, b1, b2, a1, a2), c1));
    total = F.add(total, F.scale(coeff_linpow_over_lin(F, 2 * k - 1, m, a1, a2, b1, b2), c2));
    for (long i = 1; i <= 2 * k - 1; ++i) {
        long j = 2 * k - i;
        Rat cij = bernoulli_poly(i, x) * bernoulli_poly(j, y) / (Rat(factorial(i)) * Rat(factorial(j)));
        if (cij == 0) continue;
        total = F.add(total, F.scale(coeff_linpow_pair(F, i - 1, j - 1, m, a1, a2, b1, b2), cij));
    }
    return total;
}

// the cone zeta value Z(1-k) as a rational number
inline Rat shintani_cone_value(const BaseField& F, long k, const Rat& x, const Rat& y,
                               const FieldElement& a1, const FieldElement& a2,
                               const FieldElement& b1, const FieldElement& b2) {
    FieldElement E1 = shintani_H_coeff(F, k, x, y, a1, a2, b1, b2);
    FieldElement E2 = shintani_H_coeff(F, k, x, y, a2, a1, b2, b1);
    FieldElement S = F.add(E1, E2);
    if (S.b != 0) throw computation_error("cone value not rational (branch mismatch)");
    Rat fac = Rat(factorial(k - 1)) * Rat(factorial(k - 1)) / 2;
    return S.a * fac;
}

// exponent of Z^2 / L from the HNF data
inline Int lattice_exponent(const Lattice& L) {
    Int g = gcd(gcd(L.a, L.b), L.d);
    return L.a * L.d / g;
}

}  // namespace detail

// Weighted partial zeta over one cone piece:
//   sum over v in b_lat, v in cone(gamma1, gamma2) fundamental domain mod translations
// of weight(v) * (product of forms)^(1-k), where weight is periodic mod period_lat.
// gamma pairs carry branch-1 form data as in shintani_cone_value; "gamma" are actual
// field elements spanning the cone so residues can be enumerated in coordinates.
struct ConePiece {
    FieldElement gamma1, gamma2;      // cone directions (elements of o)
    FieldElement a1, a2, b1, b2;      // branch-1 linear form data of gamma1, gamma2
};

inline Rat cone_partial_value(const BaseField& F, long k, const Lattice& b_lat,
                              const Lattice& period_lat, const ConePiece& piece,
                              const std::function<Rat(const FieldElement&)>& weight) {
    Int c = detail::lattice_exponent(period_lat);
    FieldElement g1 = F.scale(piece.gamma1, Rat(c));
    FieldElement g2 = F.scale(piece.gamma2, Rat(c));
    // form data must be scaled consistently with the translation generators
    FieldElement fa1 = F.scale(piece.a1, Rat(c)), fa2 = F.scale(piece.a2, Rat(c));
    FieldElement fb1 = F.scale(piece.b1, Rat(c)), fb2 = F.scale(piece.b2, Rat(c));
    // solve z = x g1 + y g2 for (x, y): M = [[g1.a, g1.b], [g2.a, g2.b]], z M^{-1}
    Rat det = g1.a * g2.b - g1.b * g2.a;
    if (det == 0) throw computation_error("degenerate cone");
    auto coords = [&](const FieldElement& z) {
        Rat xx = (z.a * g2.b - z.b * g2.a) / det;
        Rat yy = (g1.a * z.b - g1.b * z.a) / det;
        return std::make_pair(xx, yy);
    };
    // integer ranges covering the closed parallelogram {x in [0,1], y in [0,1]}
    // in the b_lat basis w1 = (a, 0), w2 = (b, d)
    Rat bmin = 0, bmax = 0, amin = 0, amax = 0;
    for (int cx = 0; cx <= 1; ++cx)
        for (int cy = 0; cy <= 1; ++cy) {
            Rat za = cx * g1.a + cy * g2.a, zb = cx * g1.b + cy * g2.b;
            bmin = std::min(bmin, zb);
            bmax = std::max(bmax, zb);
            amin = std::min(amin, za);
            amax = std::max(amax, za);
        }
    Rat total(0);
    Int jlo, jhi, d(b_lat.d), a(b_lat.a), b(b_lat.b);
    mpz_fdiv_q(jlo.get_mpz_t(), bmin.get_num().get_mpz_t(), Int(bmin.get_den() * d).get_mpz_t());
    mpz_cdiv_q(jhi.get_mpz_t(), bmax.get_num().get_mpz_t(), Int(bmax.get_den() * d).get_mpz_t());
    for (Int j = jlo; j <= jhi; ++j) {
        // z = i w1 + j w2 = (i a + j b, j d)
        Rat lo = (amin - Rat(j * b)) / Rat(a), hi = (amax - Rat(j * b)) / Rat(a);
        Int ilo, ihi;
        mpz_fdiv_q(ilo.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
        mpz_cdiv_q(ihi.get_mpz_t(), hi.get_num().get_mpz_t(), hi.get_den().get_mpz_t());
        for (Int i = ilo; i <= ihi; ++i) {
            FieldElement z{Rat(i * a + j * b), Rat(j * d)};
            auto [xx, yy] = coords(z);
            if (!(xx > 0 && xx <= 1 && yy >= 0 && yy < 1)) continue;
            Rat w = weight(z);
            if (w == 0) continue;
            total += w * detail::shintani_cone_value(F, k, xx, yy, fa1, fa2, fb1, fb2);
        }
    }
    return total;
}

// the cone pieces for enumerating principal ideals (v) inside b_lat by signature
inline std::vector<ConePiece> cone_pieces(const BaseField& F, const Lattice& b_lat) {
    std::vector<ConePiece> out;
    FieldElement one(Rat(1));
    FieldElement eps = F.tp_unit;
    // totally positive piece: forms are the two embeddings
    ConePiece tp;
    tp.gamma1 = one;
    tp.gamma2 = eps;
    tp.a1 = one;
    tp.a2 = one;  // conj(1)
    tp.b1 = eps;
    tp.b2 = F.conj(eps);
    out.push_back(tp);
    if (F.norm(F.fund_unit) == 1) {
        // units cannot fix mixed signatures; add the (+,-) piece spanned by lambda, lambda*eps
        FieldElement lambda = F.scale(F.different_gen, Rat(b_lat.a));  // in b_lat, signs (+,-)
        if (F.embedding_sign(lambda, 0) < 0) lambda = F.neg(lambda);
        ConePiece mx;
        mx.gamma1 = lambda;
        mx.gamma2 = F.mul(lambda, eps);
        mx.a1 = lambda;
        mx.a2 = F.neg(F.conj(lambda));  // -iota2(lambda) > 0
        mx.b1 = mx.gamma2;
        mx.b2 = F.neg(F.conj(mx.gamma2));
        out.push_back(mx);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact Hecke L-values at non-positive integers.
// ---------------------------------------------------------------------------

// partial zeta of the wide class with index class_idx: zeta_{F,i}(1-k)
inline Rat zeta_partial_class(const BaseField& F, ClassGroup& G, long class_idx, long k) {
    if (F.is_rational()) throw computation_error("zeta_partial_class needs a quadratic field");
    if (k < 1 || k > 12) throw computation_error("kappa out of the supported range 1..12");
    // representative b of the inverse class; (v) = a*b with a in the class
    long inv_idx = -1;
    std::vector<long> want(G.cycle_structure.size());
    for (size_t t = 0; t < want.size(); ++t) {
        long m = G.cycle_structure[t];
        want[t] = ((-G.rep_coords[class_idx][t]) % m + m) % m;
    }
    for (long i = 0; i < G.h; ++i)
        if (G.rep_coords[i] == want) inv_idx = i;
    if (inv_idx < 0) throw computation_error("inverse class not found");
    Lattice b_lat = G.rep_lattices[inv_idx];
    Rat total(0);
    for (auto& piece : cone_pieces(F, b_lat))
        total += cone_partial_value(F, k, b_lat, b_lat, piece, [](const FieldElement&) { return Rat(1); });
    return total * rat_pow(Rat(b_lat.index()), 1 - k);
}

// L_F(1-k, chi_spec), exact, via per-class cone sums; delegates to the Bernoulli
// route over Q. Only class characters of order <= 2 produce plain rationals; the
// general return type is a cyclotomic.
inline CycRat hecke_L_exact(const BaseField& F, ClassGroup& G, long k, const CharacterSpec& spec) {
    if (k < 1 || k > 12) throw computation_error("kappa out of the supported range 1..12");
    bool trivial = spec.quad_trivial(F) && spec.class_char_index == 0;
    if (k == 1 && trivial) throw computation_error("L_F(0, trivial) rejected (pole mirror)");
    if (F.is_rational()) {
        Int D0 = 1;
        if (spec.twist_xi && !spec.twist_xi->is_zero()) D0 = rational_square_class_disc(spec.twist_xi->a);
        return CycRat(bernoulli_L_rational(k, D0));
    }
    ClassCharacter cls = class_character(G, spec.class_char_index);
    CycRat total(0);
    for (long ci = 0; ci < G.h; ++ci) {
        // representative b of the inverse class of ci
        std::vector<long> want(G.cycle_structure.size());
        for (size_t t = 0; t < want.size(); ++t) {
            long m = G.cycle_structure[t];
            want[t] = ((-G.rep_coords[ci][t]) % m + m) % m;
        }
        long inv_idx = -1;
        for (long i = 0; i < G.h; ++i)
            if (G.rep_coords[i] == want) inv_idx = i;
        Lattice b_lat = G.rep_lattices[inv_idx];
        const FactoredIdeal& b_fac = G.reps[inv_idx];
        // period lattice: modulus * b
        Lattice period = b_lat;
        if (!spec.modulus.is_unit()) period = lattice_mul(F, ideal_lattice(F, spec.modulus), b_lat);
        auto weight = [&](const FieldElement& z) -> Rat {
            if (!spec.twist_xi || spec.twist_xi->is_zero() || F.is_square(*spec.twist_xi)) return Rat(1);
            FactoredIdeal az = ideal_div(factor_principal(F, z), b_fac);
            return Rat(chi_xi_on_ideal(F, *spec.twist_xi, az));
        };
        Rat sc(0);
        for (auto& piece : cone_pieces(F, b_lat))
            sc += cone_partial_value(F, k, b_lat, period, piece, weight);
        sc *= rat_pow(Rat(b_lat.index()), 1 - k);
        CycRat clsval = character_value_on_class(cls, ci);
        if (spec.conjugate_class_char) clsval = clsval.conj();
        total += clsval.scaled(sc);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Numeric backend: truncated Dirichlet series at s = k plus the functional equation.
// Approximates the same L_F(1-k, chi_spec) as hecke_L_exact, for k >= 2.
// ---------------------------------------------------------------------------

struct NumericLValue {
    std::complex<double> value;
    double error_bound;
};

inline NumericLValue hecke_L_numeric(const BaseField& F, ClassGroup& G, long k, const CharacterSpec& spec,
                                     long B = 200000) {
    if (k < 2) throw computation_error("numeric backend needs kappa >= 2 (absolute convergence)");
    // series of theta = conj(chi_spec): quadratic part as-is, class part conjugated
    CharacterSpec theta = spec;
    theta.conjugate_class_char = !spec.conjugate_class_char;
    std::vector<std::complex<double>> coef(B + 1, 0.0);
    coef[1] = 1.0;
    for (auto& P : prime_ideals_up_to(F, Int(B))) {
        long q = mpz_get_si(P.norm().get_mpz_t());
        FactoredIdeal A;
        A.factors = {{P, 1}};
        std::complex<double> v = character_spec_value(F, G, theta, A).to_complex();
        if (std::abs(v) < 1e-15) continue;
        for (long n = 1; n * q <= B; ++n) coef[n * q] += coef[n] * v;
    }
    std::complex<double> S = 0.0;
    for (long n = 1; n <= B; ++n)
        if (coef[n] != 0.0) S += coef[n] * std::pow((double)n, -(double)k);
    // functional equation prefactor
    long n_deg = F.degree;
    double absD = mpz_get_d(F.disc.get_mpz_t());
    double Ncond = mpz_get_d(spec.modulus.norm().get_mpz_t());
    // theta's class-part value at (relative discriminant) * (different)
    FactoredIdeal cond_diff = spec.modulus;
    if (!F.is_rational()) cond_diff = ideal_mul(cond_diff, factor_principal(F, F.different_gen));
    std::complex<double> chival = 1.0;
    {
        CycRat cv = character_value(F, G, class_character(G, theta.class_char_index), cond_diff);
        if (theta.conjugate_class_char) cv = cv.conj();
        chival = cv.to_complex();
    }
    double pi = 3.14159265358979323846;
    std::complex<double> pref;
    if (k % 2 == 0) {
        double gr = std::tgamma((1.0 - k) / 2.0) / std::tgamma(k / 2.0);
        pref = std::pow(absD * Ncond, 0.5 - k) * chival * std::pow(pi, n_deg * (k - 0.5)) *
               std::pow(gr, n_deg);
    } else {
        // Gamma(1-k)/Gamma((1-k)/2) at the poles: (-1)^{(k-1)/2} ((k-1)/2)! / (2 (k-1)!)
        long hk = (k - 1) / 2;
        double ratio = ((hk % 2) ? -1.0 : 1.0) * mpz_get_d(factorial(hk).get_mpz_t()) /
                       (2.0 * mpz_get_d(factorial(k - 1).get_mpz_t()));
        double gr = ratio * std::tgamma(k / 2.0) / std::tgamma((double)k);
        pref = std::pow(absD * Ncond, 0.5 - k) * chival * std::pow(4.0 * pi, n_deg * (k - 0.5)) *
               std::pow(gr, n_deg);
    }
    NumericLValue out;
    out.value = S / pref;
    out.error_bound = 8.0 * (std::log((double)B) + 3.0) * std::pow((double)B, 1.0 - (double)k) /
                      std::abs(pref);
    return out;
}

}  // namespace kohnen
