#pragma once

#include <limits>

#include "ideal.hpp"

namespace kohnen {

// A finite place of F: carrier for residue computations at the prime P.
struct LocalPlaceData {
    PrimeIdeal prime;
    Int q;      // residue field size
    long e;     // ord_v(2)
    long c;     // ord_v(different)
    Lattice precision_modulus;  // P^N for the working precision
    long precision_N;
};

inline Lattice prime_power_lattice(const BaseField& F, const PrimeIdeal& P, long k) {
    Lattice L = unit_lattice();
    for (long i = 0; i < k; ++i) L = lattice_mul(F, L, P.lat);
    return L;
}

inline LocalPlaceData local_place(const BaseField& F, const PrimeIdeal& P, long N = 0) {
    LocalPlaceData v;
    v.prime = P;
    v.q = P.norm();
    if (F.is_rational()) {
        v.e = (P.p == 2) ? 1 : 0;
        v.c = 0;
    } else {
        v.e = (P.p == 2) ? ord_at_prime(F, P, FieldElement(Rat(2))) : 0;
        v.c = ord_at_prime(F, P, F.different_gen);
    }
    if (N <= 0) N = 2 * v.e + 3;  // default precision for square tests
    v.precision_N = N;
    v.precision_modulus = prime_power_lattice(F, P, N);
    return v;
}

struct LocalInvariant {
    long f;   // f_xi at v; f_infinity encodes xi = 0
    int chi;  // -1, 0, +1
    bool xi_is_zero = false;

    static constexpr long f_infinity = std::numeric_limits<long>::max();
};

namespace detail {

// Shifted square test at P (intended for P over 2):
//   exists y with xi = y^2 mod P^{2m+k}, y scanned over o / P^{m+k}.
// With ord(xi) = 2m this decides "unit part of xi lies in o^x2 U_k".
inline bool square_shifted(const BaseField& F, const PrimeIdeal& P, const FieldElement& xi, long m, long k) {
    if (k <= 0) return true;
    Lattice mod_hi = prime_power_lattice(F, P, 2 * m + k);
    Lattice mod_lo = prime_power_lattice(F, P, m + k);
    for (auto& y : lattice_residues(mod_lo)) {
        FieldElement d = F.sub(xi, F.mul(y, y));
        if (d.is_zero() || lattice_contains(F, mod_hi, d)) return true;
    }
    return false;
}

// ord_p and unit residue of an integer mod p
inline int legendre_unit(const Int& u, const Int& p) {
    int k = kronecker(u, p);
    if (k == 0) throw computation_error("legendre of non-unit");
    return k;
}

// Hensel-lift the root r of x^2 - t x + n from mod p to mod p^M (odd p, simple root)
inline Int hensel_root(const Int& t, const Int& n, const Int& p, const Int& r0, long M) {
    Int mod = p, r = r0;
    Int target = int_pow(p, M);
    while (mod < target) {
        mod = mod * mod;
        if (mod > target) mod = target;
        Int f = r * r - t * r + n;
        Int fp = 2 * r - t;
        Int inv;
        if (mpz_invert(inv.get_mpz_t(), fp.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw computation_error("hensel: derivative not invertible");
        r = ((r - f * inv) % mod + mod) % mod;
    }
    return r % target;
}

// square class (+1 square / -1 not) of the unit part of xi at an odd place
inline int odd_unit_square_class(const BaseField& F, const PrimeIdeal& P, const FieldElement& xi, long m) {
    const Int& p = P.p;
    if (F.is_rational()) {
        Int u = to_int(xi.a) / int_pow(p, 2 * m);
        return legendre_unit(u % p, p);
    }
    if (!P.has_root) {
        // inert: F_P = Q_p(omega), residue field F_{p^2} = F_p[x]/(x^2 - t x + n)
        FieldElement u = F.scale(xi, Rat(1) / Rat(int_pow(p, 2 * m)));
        if (!F.is_integral(u)) throw computation_error("inert unit part not integral");
        // Euler criterion: z^((q-1)/2) in F_{p^2}
        Int A = to_int(u.a) % p, B = to_int(u.b) % p;
        A = (A + p) % p;
        B = (B + p) % p;
        Int t = F.omega_t % p, n = F.omega_n % p;
        t = (t + p) % p;
        n = (n + p) % p;
        auto mulq = [&](std::pair<Int, Int> x, std::pair<Int, Int> y) {
            // (a1 + b1 w)(a2 + b2 w) with w^2 = t w - n
            Int a = (x.first * y.first - x.second * y.second % p * n) % p;
            Int b = (x.first * y.second + x.second * y.first + x.second * y.second % p * t) % p;
            a = (a % p + p) % p;
            b = (b % p + p) % p;
            return std::make_pair(a, b);
        };
        std::pair<Int, Int> base{A, B}, acc{Int(1), Int(0)};
        Int e = (p * p - 1) / 2;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) acc = mulq(acc, base);
            base = mulq(base, base);
            e /= 2;
        }
        if (acc.second != 0 || (acc.first != 1 && acc.first != p - 1))
            throw computation_error("euler criterion in F_{p^2} failed");
        return acc.first == 1 ? 1 : -1;
    }
    if (P.ram_index == 2) {
        // ramified odd: xi / p^m is integral with unit residue u0; the uniformizer
        // correction w = pi^2 / p is a unit whose residue twists the symbol when m is odd
        FieldElement u0 = F.scale(xi, Rat(1) / Rat(int_pow(p, m)));
        if (!F.is_integral(u0)) throw computation_error("ramified unit part not integral");
        Int res0 = (to_int(u0.a) + to_int(u0.b) * P.r) % p;
        res0 = (res0 + p) % p;
        int s0 = legendre_unit(res0, p);
        if (m % 2 == 0) return s0;
        // find pi in P with ord exactly 1 and N(pi) = +- p * s, gcd(s, p) = 1
        FieldElement pi{Rat(-P.r), Rat(1)};  // omega - r
        if (ord_at_prime(F, P, pi) != 1) pi = F.add(pi, FieldElement(Rat(p)));
        if (ord_at_prime(F, P, pi) != 1) throw computation_error("no degree-1 uniformizer");
        FieldElement w = F.scale(F.mul(pi, pi), Rat(1) / Rat(p));
        if (!F.is_integral(w)) throw computation_error("pi^2/p not integral");
        Int resw = (to_int(w.a) + to_int(w.b) * P.r) % p;
        resw = (resw + p) % p;
        return s0 * legendre_unit(resw, p);
    }
    // split: complete at P via the Hensel-lifted root, reducing to Z_p
    long M = 2 * m + 1;
    Int mod = int_pow(p, M);
    Int rM = hensel_root(F.omega_t, F.omega_n, p, P.r, M);
    Int z = (to_int(xi.a) + to_int(xi.b) * rM) % mod;
    z = (z + mod) % mod;
    if (z == 0 || ord_p_int(z, p) != 2 * m) throw computation_error("split completion: wrong valuation");
    Int u = (z / int_pow(p, 2 * m)) % p;
    return legendre_unit(u, p);
}

}  // namespace detail

// The invariants (f, chi) of xi at the place v (Lemma 2.5 shape):
//   ord(xi) = 2m, unit part in U_r \ U_{r+1}  ->  f = m - e + r,
//   ord(xi) = 2m + 1                          ->  f = m - e,
// chi = +-1 exactly in the unramified case r = e, decided by squareness mod P^{2e+1}.
inline LocalInvariant local_invariants(const BaseField& F, const LocalPlaceData& v, const FieldElement& xi) {
    if (xi.is_zero()) return LocalInvariant{LocalInvariant::f_infinity, 1, true};
    const PrimeIdeal& P = v.prime;
    long V = F.is_rational() ? ord_p(xi.a, P.p) : ord_at_prime(F, P, xi);
    long e = v.e;
    if (V % 2 != 0) return LocalInvariant{(V - 1) / 2 - e, 0};
    long m = V / 2;
    if (P.p != 2) {
        int s = detail::odd_unit_square_class(F, P, xi, m);
        return LocalInvariant{m, s};
    }
    long rmax = 0;
    for (long r = e; r >= 1; --r) {
        if (detail::square_shifted(F, P, xi, m, 2 * r)) {
            rmax = r;
            break;
        }
    }
    if (rmax == e) {
        bool sq = detail::square_shifted(F, P, xi, m, 2 * e + 1);
        return LocalInvariant{m, sq ? 1 : -1};
    }
    return LocalInvariant{m - e + rmax, 0};
}

// all local invariants of xi over places dividing (2 xi), as (place, invariant) pairs
inline std::vector<std::pair<LocalPlaceData, LocalInvariant>> all_local_invariants(
    const BaseField& F, const FieldElement& xi) {
    if (xi.is_zero()) throw computation_error("all_local_invariants(0)");
    std::vector<std::pair<LocalPlaceData, LocalInvariant>> out;
    Rat N2 = F.norm(F.scale(xi, Rat(2)));
    Int N = to_int(N2);
    if (N < 0) N = -N;
    for (auto& [p, ex] : factor_integer(N)) {
        for (auto& P : primes_above(F, p)) {
            LocalPlaceData v = local_place(F, P);
            out.emplace_back(v, local_invariants(F, v, xi));
        }
    }
    return out;
}

// the pair (D_xi, F_xi) with (xi) = F_xi^2 * D_xi; D_xi is the relative discriminant
// of F(sqrt xi)/F. When some f < 0, F_xi is not integral: flagged, exponents kept.
struct RelativeDiscriminant {
    FactoredIdeal D;      // relative discriminant
    FactoredIdeal Fpart;  // conductor part (filled when integral)
    std::vector<std::pair<PrimeIdeal, long>> f_exponents;  // nonzero f's, may be negative
    bool integral = true;
    long min_f = 0;
};

inline RelativeDiscriminant relative_discriminant(const BaseField& F, const FieldElement& xi) {
    if (xi.is_zero()) throw computation_error("relative_discriminant(0)");
    RelativeDiscriminant out;
    bool any = false;
    for (auto& [v, inv] : all_local_invariants(F, xi)) {
        long V = F.is_rational() ? ord_p(xi.a, v.prime.p) : ord_at_prime(F, v.prime, xi);
        long dexp = V - 2 * inv.f;
        if (inv.f != 0) out.f_exponents.emplace_back(v.prime, inv.f);
        if (inv.f < 0) out.integral = false;
        if (!any || inv.f < out.min_f) out.min_f = inv.f;
        any = true;
        if (dexp > 0) out.D.factors.emplace_back(v.prime, dexp);
    }
    if (!any) out.min_f = 0;
    out.D.normalize();
    if (out.integral) {
        for (auto& [P, f] : out.f_exponents)
            if (f > 0) out.Fpart.factors.emplace_back(P, f);
        out.Fpart.normalize();
    }
    return out;
}

// xi = y^2 mod 4o for some y in o, by exhaustive scan of o / 2o
inline bool is_square_mod4(const BaseField& F, const FieldElement& xi) {
    if (!F.is_integral(xi)) throw computation_error("is_square_mod4: not integral");
    Lattice four = principal_lattice(F, FieldElement(Rat(4)));
    Lattice two = principal_lattice(F, FieldElement(Rat(2)));
    for (auto& y : lattice_residues(two)) {
        FieldElement d = F.sub(xi, F.mul(y, y));
        if (d.is_zero() || lattice_contains(F, four, d)) return true;
    }
    return false;
}

inline int chi_xi_local(const BaseField& F, const FieldElement& xi, const PrimeIdeal& P) {
    LocalPlaceData v = local_place(F, P);
    return local_invariants(F, v, xi).chi;
}

// chi_xi extended multiplicatively to ideals; 1 identically when xi is a square.
inline int chi_xi_on_ideal(const BaseField& F, const FieldElement& xi, const FactoredIdeal& A) {
    if (xi.is_zero()) throw computation_error("chi_xi_on_ideal: xi = 0");
    if (F.is_square(xi)) return 1;
    int val = 1;
    for (auto& [P, e] : A.factors) {
        int c = chi_xi_local(F, xi, P);
        if (c == 0) {
            if (e > 0) return 0;
        } else if (c == -1 && e % 2) {
            val = -val;
        }
    }
    return val;
}

}  // namespace kohnen
