#pragma once

#include <algorithm>
#include <optional>

#include "base_field.hpp"

namespace kohnen {

// Full-rank sublattice of o = Z<1, omega> in row Hermite normal form:
//   v1 = (a, 0), v2 = (b, d)   with a, d > 0 and 0 <= b < a.
// Over Q the lattice is (a) with d ignored (kept as 1, b = 0).
struct Lattice {
    Int a = 1, b = 0, d = 1;

    Int index() const { return a * d; }  // = [o : L] = norm when L is an ideal

    bool operator==(const Lattice& o) const { return a == o.a && b == o.b && d == o.d; }
    bool operator!=(const Lattice& o) const { return !(*this == o); }
    bool operator<(const Lattice& o) const {
        if (a != o.a) return a < o.a;
        if (d != o.d) return d < o.d;
        return b < o.b;
    }
};

// HNF of the lattice spanned by integer rows (x_i, y_i)
inline Lattice lattice_from_rows(std::vector<std::pair<Int, Int>> rows) {
    // eliminate the second coordinate down to one row
    Int g = 0;
    for (auto& r : rows) g = gcd(g, r.second);
    Lattice L;
    if (g == 0) {
        // rank-1 situation only arises over Q
        Int ga = 0;
        for (auto& r : rows) ga = gcd(ga, r.first);
        if (ga == 0) throw computation_error("zero lattice");
        L.a = ga;
        L.b = 0;
        L.d = 1;
        return L;
    }
    // find combination with y = g via iterated gcd
    Int cx = 0, cy = 0;  // the row (cx, g)
    Int cur_g = 0;
    for (auto& r : rows) {
        if (r.second == 0) continue;
        if (cur_g == 0) {
            cur_g = r.second;
            cx = r.first;
        } else {
            Int s, t, gg;
            mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), cur_g.get_mpz_t(), r.second.get_mpz_t());
            cx = s * cx + t * r.first;
            cur_g = gg;
        }
    }
    if (cur_g < 0) {
        cur_g = -cur_g;
        cx = -cx;
    }
    // x-lattice: all x with (x, 0) in L: gcd of first coords of rows reduced by (cx, g)
    Int ga = 0;
    for (auto& r : rows) {
        // r - (r.second/g) * (cx, g) has zero second coordinate
        Int k = r.second / cur_g;
        ga = gcd(ga, r.first - k * cx);
    }
    if (ga < 0) ga = -ga;
    if (ga == 0) throw computation_error("degenerate lattice (rank 1)");
    L.a = ga;
    L.d = cur_g;
    L.b = ((cx % ga) + ga) % ga;
    return L;
}

inline bool lattice_contains(const Lattice& L, const Int& x, const Int& y) {
    if (y % L.d != 0) return false;
    Int k = y / L.d;
    return (x - k * L.b) % L.a == 0;
}

inline bool lattice_contains(const BaseField& F, const Lattice& L, const FieldElement& e) {
    if (!F.is_integral(e)) return false;
    return lattice_contains(L, to_int(e.a), to_int(e.b));
}

// B subset of A (i.e. A | B as ideals)
inline bool lattice_subset(const Lattice& B, const Lattice& A) {
    return lattice_contains(A, B.a, Int(0)) && lattice_contains(A, B.b, B.d);
}

// product of two lattices that are ideals (span of pairwise element products)
inline Lattice lattice_mul(const BaseField& F, const Lattice& L, const Lattice& M) {
    if (F.is_rational()) return Lattice{L.a * M.a, 0, 1};
    auto basis = [&F](const Lattice& X) {
        return std::vector<FieldElement>{FieldElement(Rat(X.a), Rat(0)), FieldElement(Rat(X.b), Rat(X.d))};
    };
    std::vector<std::pair<Int, Int>> rows;
    for (auto& x : basis(L))
        for (auto& y : basis(M)) {
            FieldElement p = F.mul(x, y);
            rows.emplace_back(to_int(p.a), to_int(p.b));
        }
    return lattice_from_rows(rows);
}

// principal ideal (e) for integral e != 0
inline Lattice principal_lattice(const BaseField& F, const FieldElement& e) {
    if (e.is_zero()) throw computation_error("principal_lattice(0)");
    if (F.is_rational()) {
        Int n = to_int(e.a);
        return Lattice{n < 0 ? -n : n, 0, 1};
    }
    FieldElement w = F.mul(e, FieldElement(Rat(0), Rat(1)));
    return lattice_from_rows({{to_int(e.a), to_int(e.b)}, {to_int(w.a), to_int(w.b)}});
}

inline Lattice unit_lattice() { return Lattice{1, 0, 1}; }

// is the lattice closed under multiplication by omega (i.e. an o-ideal)?
inline bool lattice_is_ideal(const BaseField& F, const Lattice& L) {
    if (F.is_rational()) return true;
    FieldElement w(Rat(0), Rat(1));
    FieldElement v1(Rat(L.a), Rat(0)), v2(Rat(L.b), Rat(L.d));
    return lattice_contains(F, L, F.mul(v1, w)) && lattice_contains(F, L, F.mul(v2, w));
}

// residue representatives of o / L
inline std::vector<FieldElement> lattice_residues(const Lattice& L) {
    std::vector<FieldElement> out;
    out.reserve(mpz_get_ui(Int(L.a * L.d).get_mpz_t()));
    for (Int j = 0; j < L.d; ++j)
        for (Int i = 0; i < L.a; ++i) out.push_back(FieldElement(Rat(i), Rat(j)));
    return out;
}

// ---------------- prime ideals & factored ideals ----------------

struct PrimeIdeal {
    Int p;              // rational prime below
    int residue_deg;    // 1 or 2
    int ram_index;      // 1 or 2
    bool has_root;      // two-generator form (p, omega - r); false <=> inert (p)
    Int r = 0;          // root of the minimal polynomial of omega mod p
    Lattice lat;        // the ideal as a lattice

    Int norm() const { return residue_deg == 2 ? p * p : p; }

    bool operator==(const PrimeIdeal& o) const { return lat == o.lat; }
    bool operator<(const PrimeIdeal& o) const {
        if (p != o.p) return p < o.p;
        return lat < o.lat;
    }

    std::string str() const {
        if (!has_root) return "(" + p.get_str() + ")";
        return "(" + p.get_str() + ", w-" + r.get_str() + ")";
    }
};

struct FactoredIdeal {
    std::vector<std::pair<PrimeIdeal, long>> factors;  // sorted, exponents >= 1

    bool is_unit() const { return factors.empty(); }

    Int norm() const {
        Int n = 1;
        for (auto& [P, e] : factors) n *= int_pow(P.norm(), e);
        return n;
    }

    long moebius() const {
        for (auto& [P, e] : factors)
            if (e >= 2) return 0;
        return factors.size() % 2 ? -1 : 1;
    }

    void normalize() {
        std::sort(factors.begin(), factors.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<std::pair<PrimeIdeal, long>> merged;
        for (auto& f : factors) {
            if (!merged.empty() && merged.back().first == f.first)
                merged.back().second += f.second;
            else
                merged.push_back(f);
        }
        for (auto& f : merged)
            if (f.second < 0) throw computation_error("negative exponent in integral ideal");
        std::erase_if(merged, [](const auto& f) { return f.second == 0; });
        factors = std::move(merged);
    }

    bool operator==(const FactoredIdeal& o) const {
        if (factors.size() != o.factors.size()) return false;
        for (size_t i = 0; i < factors.size(); ++i)
            if (!(factors[i].first == o.factors[i].first) || factors[i].second != o.factors[i].second)
                return false;
        return true;
    }

    long exponent_of(const PrimeIdeal& P) const {
        for (auto& [Q, e] : factors)
            if (Q == P) return e;
        return 0;
    }
};

inline FactoredIdeal ideal_mul(const FactoredIdeal& A, const FactoredIdeal& B) {
    FactoredIdeal C;
    C.factors = A.factors;
    C.factors.insert(C.factors.end(), B.factors.begin(), B.factors.end());
    C.normalize();
    return C;
}

// A / B, requiring B | A
inline FactoredIdeal ideal_div(const FactoredIdeal& A, const FactoredIdeal& B) {
    FactoredIdeal C = A;
    for (auto& [P, e] : B.factors) {
        bool found = false;
        for (auto& f : C.factors)
            if (f.first == P) {
                f.second -= e;
                found = true;
                break;
            }
        if (!found) throw computation_error("ideal_div: not divisible");
    }
    C.normalize();
    return C;
}

inline Lattice ideal_lattice(const BaseField& F, const FactoredIdeal& A) {
    Lattice L = unit_lattice();
    for (auto& [P, e] : A.factors)
        for (long i = 0; i < e; ++i) L = lattice_mul(F, L, P.lat);
    return L;
}

// splitting of a rational prime in o
inline std::vector<PrimeIdeal> factor_rational_prime(const BaseField& F, const Int& p) {
    if (!is_prime(p)) throw computation_error("factor_rational_prime: not a prime");
    std::vector<PrimeIdeal> out;
    if (F.is_rational()) {
        PrimeIdeal P{p, 1, 1, true, 0, Lattice{p, 0, 1}};
        out.push_back(P);
        return out;
    }
    // minimal polynomial of omega: x^2 - t x + n mod p
    bool ramified = mpz_divisible_p(F.disc.get_mpz_t(), p.get_mpz_t());
    std::vector<Int> roots;
    if (p == 2) {
        for (Int r = 0; r < p; ++r) {
            Int v = r * r - F.omega_t * r + F.omega_n;
            if (mpz_divisible_p(v.get_mpz_t(), p.get_mpz_t())) roots.push_back(r);
        }
    } else {
        Int pd = F.omega_t * F.omega_t - 4 * F.omega_n;  // discriminant of the minimal poly
        int k = kronecker(pd, p);
        if (k >= 0) {
            Int s = (k == 0) ? Int(0) : sqrt_mod_prime(pd, p);
            Int inv2;
            Int two = 2;
            mpz_invert(inv2.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t());
            Int r1 = ((F.omega_t + s) % p) * inv2 % p;
            Int r2 = ((F.omega_t - s) % p) * inv2 % p;
            r1 = (r1 % p + p) % p;
            r2 = (r2 % p + p) % p;
            roots.push_back(r1);
            if (r2 != r1) roots.push_back(r2);
            std::sort(roots.begin(), roots.end());
        }
    }
    auto make = [&](const Int& r, int f, int e) {
        PrimeIdeal P;
        P.p = p;
        P.residue_deg = f;
        P.ram_index = e;
        P.has_root = true;
        P.r = r;
        // lattice of (p, omega - r): spanned by p, p*omega, omega - r, (omega - r)omega
        FieldElement wr{Rat(-r), Rat(1)};
        FieldElement wrw = F.mul(wr, FieldElement(Rat(0), Rat(1)));
        P.lat = lattice_from_rows({{p, 0}, {0, p}, {-r, 1}, {to_int(wrw.a), to_int(wrw.b)}});
        return P;
    };
    if (ramified) {
        if (roots.size() != 1 && !(p == 2 && roots.size() == 2))
            throw computation_error("ramified prime with unexpected root count");
        // for p = 2, D = 3 mod 4 the poly x^2 - D has the single root D mod 2
        Int r = roots[0];
        // pick the root giving a norm-p ideal
        for (auto& rr : roots) {
            PrimeIdeal cand = make(rr, 1, 2);
            if (cand.lat.index() == p) {
                out.push_back(cand);
                return out;
            }
        }
        throw computation_error("ramified prime: no norm-p two-generator form (p=" + p.get_str() + ", r=" + r.get_str() + ")");
    }
    if (roots.empty()) {
        // inert
        PrimeIdeal P{p, 2, 1, false, 0, Lattice{p, 0, p}};
        out.push_back(P);
        return out;
    }
    if (roots.size() != 2) throw computation_error("split prime with unexpected root count");
    for (auto& r : roots) out.push_back(make(r, 1, 1));
    std::sort(out.begin(), out.end());
    return out;
}

// cache of prime splitting per (field, p)
inline const std::vector<PrimeIdeal>& primes_above(const BaseField& F, const Int& p) {
    static std::map<std::pair<Int, Int>, std::vector<PrimeIdeal>> cache;
    auto key = std::make_pair(F.disc, p);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, factor_rational_prime(F, p)).first;
    return it->second;
}

inline long ord_at_prime(const BaseField& F, const PrimeIdeal& P, const FieldElement& xi) {
    if (xi.is_zero()) throw computation_error("ord of 0");
    // valuation by repeated lattice membership in P^k
    long v = 0;
    Lattice Pk = P.lat;
    while (lattice_contains(F, Pk, xi)) {
        ++v;
        Pk = lattice_mul(F, Pk, P.lat);
        if (v > 4096) throw computation_error("runaway valuation");
    }
    return v;
}

// factorization of the principal ideal (xi), xi integral nonzero
inline FactoredIdeal factor_principal(const BaseField& F, const FieldElement& xi) {
    if (xi.is_zero()) throw computation_error("factor_principal(0)");
    if (!F.is_integral(xi)) throw computation_error("factor_principal: not integral");
    FactoredIdeal out;
    Rat Nr = F.norm(xi);
    Int N = to_int(Nr);
    if (N < 0) N = -N;
    for (auto& [p, e] : factor_integer(N)) {
        for (auto& P : primes_above(F, p)) {
            long v = ord_at_prime(F, P, xi);
            if (v > 0) out.factors.emplace_back(P, v);
        }
    }
    out.normalize();
    if (out.norm() != N) throw computation_error("factor_principal: norm mismatch");
    return out;
}

inline std::vector<FactoredIdeal> divisors(const FactoredIdeal& A) {
    std::vector<FactoredIdeal> out;
    out.push_back(FactoredIdeal{});
    for (auto& [P, e] : A.factors) {
        std::vector<FactoredIdeal> next;
        next.reserve(out.size() * (e + 1));
        for (auto& d : out)
            for (long k = 0; k <= e; ++k) {
                FactoredIdeal dd = d;
                if (k) dd.factors.emplace_back(P, k);
                next.push_back(std::move(dd));
            }
        out = std::move(next);
    }
    for (auto& d : out) d.normalize();
    return out;
}

inline long moebius(const FactoredIdeal& A) { return A.moebius(); }

// prime ideals of norm <= B, sorted by (norm, lattice)
inline std::vector<PrimeIdeal> prime_ideals_up_to(const BaseField& F, const Int& B) {
    std::vector<PrimeIdeal> ps;
    for (long p : primes_up_to(std::max(2L, mpz_get_si(B.get_mpz_t()))))
        for (auto& P : primes_above(F, Int(p)))
            if (P.norm() <= B) ps.push_back(P);
    std::sort(ps.begin(), ps.end(), [](const PrimeIdeal& x, const PrimeIdeal& y) {
        Int nx = x.norm(), ny = y.norm();
        if (nx != ny) return nx < ny;
        return x < y;
    });
    return ps;
}

// every integral ideal of norm <= B exactly once, with factorization, sorted by norm
inline std::vector<FactoredIdeal> enumerate_ideals(const BaseField& F, const Int& B) {
    if (B < 1) throw computation_error("enumerate_ideals: B >= 1 required");
    std::vector<FactoredIdeal> out{FactoredIdeal{}};
    std::vector<Int> norms{Int(1)};
    for (auto& P : prime_ideals_up_to(F, B)) {
        Int q = P.norm();
        size_t base = out.size();
        for (size_t i = 0; i < base; ++i) {
            Int n = norms[i] * q;
            long e = 1;
            while (n <= B) {
                FactoredIdeal A = out[i];
                A.factors.emplace_back(P, e);
                A.normalize();
                out.push_back(std::move(A));
                norms.push_back(n);
                n *= q;
                ++e;
            }
        }
    }
    std::vector<size_t> idx(out.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) {
        if (norms[x] != norms[y]) return norms[x] < norms[y];
        return out[x].factors < out[y].factors;
    });
    std::vector<FactoredIdeal> sorted;
    sorted.reserve(out.size());
    for (size_t i : idx) sorted.push_back(std::move(out[i]));
    return sorted;
}

}  // namespace kohnen
