#pragma once

#include "lvalues.hpp"
#include "qexpansion.hpp"

namespace kohnen {

// ---------------- character index arithmetic on the class group ----------------

inline std::vector<long> character_exponents(const ClassGroup& G, long index) {
    std::vector<long> e(G.cycle_structure.size());
    long rem = index;
    for (size_t k = 0; k < e.size(); ++k) {
        e[k] = rem % G.cycle_structure[k];
        rem /= G.cycle_structure[k];
    }
    return e;
}

inline long character_index_from_exponents(const ClassGroup& G, std::vector<long> e) {
    long idx = 0, mult = 1;
    for (size_t k = 0; k < e.size(); ++k) {
        long m = G.cycle_structure[k];
        idx += ((e[k] % m + m) % m) * mult;
        mult *= m;
    }
    return idx;
}

inline long character_index_pow(const ClassGroup& G, long index, long n) {
    auto e = character_exponents(G, index);
    for (auto& x : e) x *= n;
    return character_index_from_exponents(G, e);
}

// ---------------- local Whittaker polynomial ----------------

// Psi(xi, y) of the local analysis, in the closed finite-sum form
//   sum_{j=0}^{f} y^{f-2j}  -  chi q^{-1/2} sum_{j=0}^{f-1} y^{f-1-2j},   f >= 0,
// and 0 for f < 0.
inline std::complex<double> psi_value(long f, int chi, double q, std::complex<double> y) {
    if (f < 0) return 0.0;
    std::complex<double> s1 = 0.0, s2 = 0.0;
    for (long j = 0; j <= f; ++j) s1 += std::pow(y, (double)(f - 2 * j));
    for (long j = 0; j < f; ++j) s2 += std::pow(y, (double)(f - 1 - 2 * j));
    return s1 - (double)chi / std::sqrt(q) * s2;
}

// ---------------- twisted divisor sums ----------------

// sigma_{k,chi}(A) = sum_{b | A} N(b)^k chi(b), with chi a class character by index
inline CycRat twisted_sigma(const BaseField& F, ClassGroup& G, long k, long chi_index,
                            const FactoredIdeal& A) {
    CycRat total(1);
    ClassCharacter chi = class_character(G, chi_index);
    for (auto& [P, e] : A.factors) {
        CycRat vP = character_value_on_class(chi, class_of_prime(F, G, P));
        CycRat geom(0);
        CycRat term(1);
        Rat Nk = rat_pow(Rat(P.norm()), k);
        for (long j = 0; j <= e; ++j) {
            geom += term;
            if (j < e) term = (term * vP).scaled(Nk);
        }
        total *= geom;
    }
    return total;
}

// ---------------- the Eisenstein series ----------------

struct EisensteinSpec {
    const BaseField* field;
    ClassGroup* group;
    long kappa;
    long chi_index;  // chi'

    int eta() const { return (kappa % 2) ? -1 : 1; }
};

inline EisensteinSpec make_eisenstein_spec(const BaseField& F, ClassGroup& G, long kappa, long chi_index) {
    if (kappa < 1) throw computation_error("kappa must be positive");
    if (kappa == 1 && F.is_rational())
        throw computation_error(
            "weight 3/2 over the rationals: the series is not a modular form; use a real "
            "quadratic base field");
    if (chi_index < 0 || chi_index >= G.h) throw computation_error("class character index out of range");
    return EisensteinSpec{&F, &G, kappa, chi_index};
}

// cache of L_F(1-kappa, chi_theta conj(chi')) keyed by the square class of theta
class LValueCache {
  public:
    CycRat get(const BaseField& F, ClassGroup& G, long kappa, long chi_index, const FieldElement& theta) {
        for (auto& [rep, val] : entries_)
            if (F.is_square(F.mul(rep, theta))) return val;
        CharacterSpec spec = make_character_spec(F, theta, chi_index, true);
        CycRat val = hecke_L_exact(F, G, kappa, spec);
        entries_.emplace_back(theta, val);
        return val;
    }

  private:
    std::vector<std::pair<FieldElement, CycRat>> entries_;
};

class EisensteinSeries {
  public:
    EisensteinSeries(const BaseField& F, ClassGroup& G, long kappa, long chi_index)
        : spec_(make_eisenstein_spec(F, G, kappa, chi_index)) {}

    const EisensteinSpec& spec() const { return spec_; }

    // the divisor-sum factor of Theorem-9.1 shape:
    //   C_kappa(theta) = sum_{a | F_theta} mu(a) chi_theta(a) chi'(a) N(a)^{kappa-1}
    //                    sigma_{2 kappa - 1, chi'^2}(F_theta a^{-1})
    CycRat frak_C(const FieldElement& theta) const {
        const BaseField& F = *spec_.field;
        ClassGroup& G = *spec_.group;
        auto rd = relative_discriminant(F, theta);
        if (!rd.integral) throw computation_error("not a plus-space index");
        long chi2 = character_index_pow(G, spec_.chi_index, 2);
        ClassCharacter chi = class_character(G, spec_.chi_index);
        CycRat total(0);
        for (auto& a : divisors(rd.Fpart)) {
            long mu = moebius(a);
            if (mu == 0) continue;
            int cxi = chi_xi_on_ideal(F, theta, a);
            if (cxi == 0) continue;
            CycRat t = character_value(F, G, chi, a);
            t = t.scaled(Rat(mu * cxi) * rat_pow(Rat(a.norm()), spec_.kappa - 1));
            t *= twisted_sigma(F, G, 2 * spec_.kappa - 1, chi2, ideal_div(rd.Fpart, a));
            total += t;
        }
        return total;
    }

    // float cross-check: N(F_theta)^{kappa-1/2} chi'(F_theta) prod_v Psi(...);
    // chi'_v(pi_v) enters as chi'(P)^{sign_convention}
    std::complex<double> frak_C_product(const FieldElement& theta, int sign_convention = 1) const {
        const BaseField& F = *spec_.field;
        ClassGroup& G = *spec_.group;
        auto rd = relative_discriminant(F, theta);
        if (!rd.integral) throw computation_error("not a plus-space index");
        ClassCharacter chi = class_character(G, spec_.chi_index);
        double NF = mpz_get_d(rd.Fpart.norm().get_mpz_t());
        std::complex<double> out =
            std::pow(NF, (double)spec_.kappa - 0.5) * character_value(F, G, chi, rd.Fpart).to_complex();
        for (auto& [v, inv] : all_local_invariants(F, theta)) {
            double q = mpz_get_d(v.q.get_mpz_t());
            FactoredIdeal Pv;
            Pv.factors = {{v.prime, 1}};
            std::complex<double> chiP = character_value(F, G, chi, Pv).to_complex();
            if (sign_convention < 0) chiP = 1.0 / chiP;
            std::complex<double> y = std::pow(q, 0.5 - (double)spec_.kappa) * chiP;
            out *= psi_value(inv.f, inv.chi, q, y);
        }
        return out;
    }

    // xi-th Fourier coefficient (on demand, any totally positive xi or 0)
    CycRat coefficient(const FieldElement& xi) const {
        const BaseField& F = *spec_.field;
        ClassGroup& G = *spec_.group;
        if (xi.is_zero()) return constant_term();
        if (!F.is_totally_positive(xi)) throw computation_error("index must be totally positive or 0");
        FieldElement theta = spec_.eta() < 0 ? F.neg(xi) : xi;
        auto rd = relative_discriminant(F, theta);
        if (rd.min_f < 0) return CycRat(0);  // outside the plus space
        ClassCharacter chi = class_character(G, spec_.chi_index);
        CycRat lval = cache_.get(F, G, spec_.kappa, spec_.chi_index, theta);
        return character_value(F, G, chi, rd.D) * lval * frak_C(theta);
    }

    CycRat constant_term() const {
        const BaseField& F = *spec_.field;
        ClassGroup& G = *spec_.group;
        // L_F(1 - 2 kappa, conj(chi')^2)
        CharacterSpec spec = make_character_spec(F, std::nullopt,
                                                 character_index_pow(G, spec_.chi_index, 2), true);
        return hecke_L_exact(F, G, 2 * spec_.kappa, spec);
    }

    QExpansion qexpansion(long trace_bound) const {
        if (trace_bound < 1) throw computation_error("trace bound must be >= 1");
        const BaseField& F = *spec_.field;
        QExpansion f(F, trace_bound,
                     "eisenstein kappa=" + std::to_string(spec_.kappa) +
                         " chi=" + std::to_string(spec_.chi_index));
        for (auto& xi : enumerate_totally_positive(F, trace_bound)) f.set(xi, coefficient(xi));
        return f;
    }

  private:
    EisensteinSpec spec_;
    mutable LValueCache cache_;
};

// ---------------- Cohen's series over Q (independent integer-side route) ----------------

// H(r, n): constant zeta(1-2r); for n >= 1 with (-1)^r n = 0,1 mod 4, writing
// (-1)^r n = D f^2 with D the fundamental discriminant:
//   H(r, n) = L(1-r, chi_D) sum_{d | f} mu(d) chi_D(d) d^{r-1} sigma_{2r-1}(f/d).
inline QExpansion cohen_series(const BaseField& Q, long r, long n_max) {
    if (!Q.is_rational()) throw computation_error("cohen_series is the rational-field specialization");
    if (r < 2) throw computation_error("cohen_series needs r >= 2");
    QExpansion f(Q, n_max, "cohen r=" + std::to_string(r));
    f.set(FieldElement(Rat(0)), CycRat(bernoulli_L_rational(2 * r, Int(1))));
    long sign = (r % 2) ? -1 : 1;
    for (long n = 1; n <= n_max; ++n) {
        long sn = sign * n;
        long mod4 = ((sn % 4) + 4) % 4;
        if (mod4 == 2 || mod4 == 3) continue;
        Int D = fundamental_discriminant(Int(sn));
        Int f2 = Int(sn) / D, fpart;
        if (!is_perfect_square(f2, &fpart)) throw computation_error("square part extraction failed");
        Rat L = bernoulli_L_rational(r, D);
        Rat divsum = 0;
        for (Int d = 1; d <= fpart; ++d) {
            if (fpart % d != 0) continue;
            // mu(d)
            long mu = 1;
            for (auto& [p, e] : factor_integer(d)) {
                if (e >= 2) {
                    mu = 0;
                    break;
                }
                mu = -mu;
            }
            if (mu == 0) continue;
            int chid = kronecker(D, d);
            if (chid == 0) continue;
            Rat sig = 0;
            Int fd = fpart / d;
            for (Int t = 1; t <= fd; ++t)
                if (fd % t == 0) sig += rat_pow(Rat(t), 2 * r - 1);
            divsum += Rat(mu * chid) * rat_pow(Rat(d), r - 1) * sig;
        }
        f.set(FieldElement(Rat(n)), CycRat(L * divsum));
    }
    return f;
}

// ---------------- classical series of the worked example ----------------

// theta_1(z) = sum_{xi in o} q^{xi^2}: representation counts of squares
inline QExpansion theta_series(const BaseField& F, long trace_bound) {
    QExpansion f(F, trace_bound, "theta1");
    // T2(lambda) = trace(lambda^2) <= trace_bound bounds the scan box
    Int tb = isqrt(Int(2 * trace_bound)) + 2;
    long lim = mpz_get_si(tb.get_mpz_t());
    if (F.is_rational()) {
        for (long a = -lim; a <= lim; ++a) {
            FieldElement sq{Rat(a * a)};
            if (F.trace(sq) <= trace_bound) f.add_to(sq, CycRat(1));
        }
        return f;
    }
    long lima = 3 * lim + 4;
    for (long a = -lima; a <= lima; ++a)
        for (long b = -lim; b <= lim; ++b) {
            FieldElement lam{Rat(a), Rat(b)};
            FieldElement sq = F.mul(lam, lam);
            if (F.trace(sq) <= trace_bound) f.add_to(sq, CycRat(1));
        }
    return f;
}

// theta_2(z) = sum_{xi in p5} q^{xi^2/5} with p5^2 = (5)
inline QExpansion theta2_series(const BaseField& F, long trace_bound) {
    auto p5s = primes_above(F, Int(5));
    if (p5s.size() != 1 || p5s[0].ram_index != 2)
        throw computation_error("theta2 needs 5 ramified in the base field");
    const Lattice& L5 = p5s[0].lat;
    QExpansion f(F, trace_bound, "theta2");
    Int tb = isqrt(Int(10 * trace_bound)) + 4;
    long lim = mpz_get_si(tb.get_mpz_t());
    long lima = 3 * lim + 4;
    for (long a = -lima; a <= lima; ++a)
        for (long b = -lim; b <= lim; ++b) {
            FieldElement lam{Rat(a), Rat(b)};
            if (!lattice_contains(F, L5, lam)) continue;
            FieldElement e = F.scale(F.mul(lam, lam), Rat(1, 5));
            if (!F.is_integral(e)) throw computation_error("theta2 exponent not integral");
            if (F.trace(e) <= trace_bound) f.add_to(e, CycRat(1));
        }
    return f;
}

// sigma_{k,i}(xi): sum of N(c)^k over integral c | (xi) lying in class i
inline Rat sigma_class(const BaseField& F, ClassGroup& G, long k, long class_idx, const FieldElement& xi) {
    Rat s = 0;
    for (auto& c : divisors(factor_principal(F, xi)))
        if (class_of(F, G, c) == class_idx) s += rat_pow(Rat(c.norm()), k);
    return s;
}

// E_{2,i}(z) = zeta_{F,i}(-1)/4 + sum_{xi > 0} sigma_{1,i}(xi) q^xi
inline QExpansion weight2_series(const BaseField& F, ClassGroup& G, long class_idx, long trace_bound) {
    QExpansion f(F, trace_bound, "E2," + std::to_string(class_idx));
    f.set(FieldElement(Rat(0)), CycRat(zeta_partial_class(F, G, class_idx, 2) / 4));
    for (auto& xi : enumerate_totally_positive(F, trace_bound)) {
        if (xi.is_zero()) continue;
        f.set(xi, CycRat(sigma_class(F, G, 1, class_idx, xi)));
    }
    return f;
}

// on-demand coefficient of E_{2,i}(4z) * theta_j(z) at an arbitrary index
inline CycRat product_series_coefficient(const BaseField& F, ClassGroup& G, long class_idx, int theta_kind,
                                         const FieldElement& mu) {
    // sum over lambda with theta-exponent rho = lambda^2 (or lambda^2/5), 4 | (mu - rho) part
    CycRat acc(0);
    Rat tmu = F.trace(mu);
    Int tb = isqrt(to_int(2 * 5 * tmu)) + 4;
    long lim = mpz_get_si(tb.get_mpz_t());
    long lima = 3 * lim + 4;
    const Lattice* L5 = nullptr;
    if (theta_kind == 2) L5 = &primes_above(F, Int(5))[0].lat;
    Rat e2_const = zeta_partial_class(F, G, class_idx, 2) / 4;
    for (long a = -lima; a <= lima; ++a)
        for (long b = -lim; b <= lim; ++b) {
            FieldElement lam{Rat(a), Rat(b)};
            FieldElement rho;
            if (theta_kind == 1) {
                rho = F.mul(lam, lam);
            } else {
                if (!lattice_contains(F, *L5, lam)) continue;
                rho = F.scale(F.mul(lam, lam), Rat(1, 5));
            }
            if (F.trace(rho) > tmu) continue;
            FieldElement rem = F.sub(mu, rho);  // must be 4 * (totally positive or 0)
            FieldElement nu = F.scale(rem, Rat(1, 4));
            if (!F.is_integral(nu)) continue;
            if (!nu.is_zero() && !F.is_totally_positive(nu)) continue;
            acc += CycRat(nu.is_zero() ? e2_const : sigma_class(F, G, 1, class_idx, nu));
        }
    return acc;
}

// ---------------- Hecke operator on the plus space ----------------

// quadratic residue symbol of x in the residue field of the odd prime P (0 if P | (x))
inline int residue_symbol(const BaseField& F, const PrimeIdeal& P, const FieldElement& x) {
    if (x.is_zero()) return 0;
    long v = F.is_rational() ? ord_p(x.a, P.p) : ord_at_prime(F, P, x);
    if (v > 0) return 0;
    return detail::odd_unit_square_class(F, P, x, 0);
}

struct HeckeImage {
    QExpansion image;
    long certified_bound;  // traces <= this are certified in the image
};

// T^+(alpha^2) f: coefficient at xi is
//   c(xi alpha^2) + (eta xi / p_alpha) N(p_alpha)^{kappa-1} c(xi) + N(p_alpha)^{2kappa-1} c(xi/alpha^2)
inline HeckeImage hecke_T_plus(const BaseField& F, ClassGroup& G, long kappa, const FieldElement& alpha,
                               const QExpansion& f) {
    if (alpha.is_zero()) throw computation_error("alpha = 0");
    FactoredIdeal pa = factor_principal(F, alpha);
    if (pa.factors.size() != 1 || pa.factors[0].second != 1)
        throw computation_error("alpha must generate a prime ideal");
    const PrimeIdeal& P = pa.factors[0].first;
    if (P.p == 2) throw computation_error("alpha must generate an odd prime");
    Int Np = P.norm();
    FieldElement a2 = F.mul(alpha, alpha);
    int eta = (kappa % 2) ? -1 : 1;

    // certified output range: xi with trace(xi alpha^2) within f's bound
    long Tin = f.trace_bound();
    QExpansion g(F, Tin, "hecke image");
    long certified = Tin;
    for (auto& xi : enumerate_totally_positive(F, Tin)) {
        FieldElement xi_up = F.mul(xi, a2);
        if (F.trace(xi_up) > Tin) {
            long t = mpz_get_si(to_int(F.trace(xi)).get_mpz_t());
            certified = std::min(certified, t - 1);
            continue;
        }
        CycRat c = f.coeff(xi_up);
        FieldElement etaxi = eta < 0 ? F.neg(xi) : xi;
        if (!xi.is_zero()) {
            int sym = residue_symbol(F, P, etaxi);
            if (sym != 0)
                c += f.coeff(xi).scaled(Rat(sym) * rat_pow(Rat(Np), kappa - 1));
        }
        FieldElement xi_dn = F.div(xi, a2);
        if (F.is_integral(xi_dn)) {
            if (!f.in_range(xi_dn)) {
                long t = mpz_get_si(to_int(F.trace(xi)).get_mpz_t());
                certified = std::min(certified, t - 1);
                continue;
            }
            c += f.coeff(xi_dn).scaled(rat_pow(Rat(Np), 2 * kappa - 1));
        }
        g.set(xi, c);
    }
    g.shrink_bound(std::max(certified, 0L));
    return HeckeImage{std::move(g), std::max(certified, 0L)};
}

}  // namespace kohnen
