#pragma once

#include "cyclotomic.hpp"
#include "ideal.hpp"

namespace kohnen {

// Search for a generator of the ideal L (as a lattice) with |norm| = N(L).
// Any generator has an associate with both embedding absolute values <= sqrt(N * eps1),
// eps1 = first embedding of the totally positive fundamental unit, so an exhaustive
// scan of that box decides principality.
inline std::optional<FieldElement> principal_generator(const BaseField& F, const Lattice& L) {
    Int N = L.index();
    if (F.is_rational()) return FieldElement(Rat(N));
    // box: |x +- y sqrt(D)| <= sqrt(N eps1): |x| <= sqrt(N eps1), |y| <= sqrt(N eps1 / D)
    // eps1 < trace(tp_unit) + 1, an integer bound
    Int eps_bound = to_int(F.trace(F.tp_unit)) + 1;
    Int xb = isqrt(N * eps_bound) + 1;
    Int yb = isqrt(N * eps_bound / F.D) + 1;
    for (Int y = 0; y <= yb; ++y) {
        for (Int x = -xb; x <= xb; ++x) {
            // element u + v sqrt(D) translated to the integral basis
            FieldElement cand;
            if (!F.omega_is_half) {
                cand = FieldElement(Rat(x), Rat(y));
            } else {
                // x + y sqrt(D) with x, y in (1/2)Z handled via (x' + y' omega), scan both parities
                cand = FieldElement(Rat(x), Rat(y));  // a + b omega directly
            }
            if (cand.is_zero()) continue;
            Rat n = F.norm(cand);
            if (n != N && n != -N) continue;
            if (lattice_contains(F, L, cand) && principal_lattice(F, cand) == L) return cand;
        }
    }
    return std::nullopt;
}

namespace detail {
// shortest-ish vector of the ideal lattice under the T2 form Tr(x^2), Gauss reduction
inline FieldElement short_vector(const BaseField& F, const Lattice& L) {
    FieldElement v1(Rat(L.a), Rat(0)), v2(Rat(L.b), Rat(L.d));
    auto ip = [&F](const FieldElement& x, const FieldElement& y) { return F.trace(F.mul(x, y)); };
    for (int it = 0; it < 64; ++it) {
        Rat n1 = ip(v1, v1), n2 = ip(v2, v2);
        if (n2 < n1) std::swap(v1, v2);
        n1 = ip(v1, v1);
        Rat mu = ip(v1, v2) / n1;
        // round to nearest
        Int k;
        {
            Rat half(1, 2);
            Rat shifted = mu + half;
            mpz_fdiv_q(k.get_mpz_t(), shifted.get_num().get_mpz_t(), shifted.get_den().get_mpz_t());
        }
        if (k == 0) break;
        v2 = F.sub(v2, F.scale(v1, Rat(k)));
    }
    if (ip(v1, v1) <= ip(v2, v2)) {
        FieldElement best = v1;
        // v2 or v1 +- v2 occasionally beat v1 in |norm|; pick the smallest |N|
        for (auto& c : {v2, F.add(v1, v2), F.sub(v1, v2)}) {
            Rat a = F.norm(best);
            if (a < 0) a = -a;
            Rat b = F.norm(c);
            if (b < 0) b = -b;
            if (b != 0 && b < a) best = c;
        }
        return best;
    }
    return v2;
}
}  // namespace detail

struct ClassGroup {
    BaseField field;
    long h = 1;
    std::vector<long> cycle_structure;          // invariant factors, product = h
    std::vector<FactoredIdeal> reps;            // reps[0] = principal class
    std::vector<Lattice> rep_lattices;
    std::vector<std::vector<long>> rep_coords;  // coordinates of reps against cycle_structure
    std::map<Lattice, long> prime_class_cache;  // discrete log of primes, by lattice

    long exponent() const {
        long e = 1;
        for (long m : cycle_structure) e = std::lcm(e, m);
        return e;
    }
};

namespace detail {

// class index of the lattice A among reps, by testing A * conj(rep) principal
inline long class_index_direct(const BaseField& F, const ClassGroup& G, const Lattice& A);

}  // namespace detail

inline ClassGroup compute_class_group(const BaseField& F) {
    ClassGroup G;
    G.field = F;
    if (F.is_rational()) {
        G.h = 1;
        G.cycle_structure = {};
        G.reps = {FactoredIdeal{}};
        G.rep_lattices = {unit_lattice()};
        G.rep_coords = {{}};
        return G;
    }
    // Minkowski bound for a real quadratic field: sqrt(disc)/2
    Int mink = isqrt(F.disc) / 2 + 1;
    std::vector<PrimeIdeal> gens = prime_ideals_up_to(F, mink);
    // BFS closure of products of generator classes, testing equivalence by principality
    std::vector<FactoredIdeal> reps{FactoredIdeal{}};
    std::vector<Lattice> lats{unit_lattice()};
    auto find_class = [&](const Lattice& L, const FactoredIdeal&) -> long {
        for (size_t i = 0; i < lats.size(); ++i) {
            // L ~ lats[i] iff L * conj(lats[i]) principal; conj via the conjugate ideal
            Lattice conj = lats[i];
            // conjugate lattice: apply field conjugation to basis vectors
            FieldElement c1 = F.conj(FieldElement(Rat(conj.a), Rat(0)));
            FieldElement c2 = F.conj(FieldElement(Rat(conj.b), Rat(conj.d)));
            Lattice conjL = lattice_from_rows({{to_int(c1.a), to_int(c1.b)},
                                               {to_int(c2.a), to_int(c2.b)},
                                               {to_int(F.mul(c1, FieldElement(Rat(0), Rat(1))).a),
                                                to_int(F.mul(c1, FieldElement(Rat(0), Rat(1))).b)},
                                               {to_int(F.mul(c2, FieldElement(Rat(0), Rat(1))).a),
                                                to_int(F.mul(c2, FieldElement(Rat(0), Rat(1))).b)}});
            Lattice prod = lattice_mul(F, L, conjL);
            if (principal_generator(F, prod)) return (long)i;
        }
        return -1;
    };
    // grow the class list until closed under multiplication by generators
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t i = 0; i < reps.size(); ++i) {
            for (auto& P : gens) {
                FactoredIdeal prod = reps[i];
                prod.factors.emplace_back(P, 1);
                prod.normalize();
                Lattice L = lattice_mul(F, lats[i], P.lat);
                if (find_class(L, prod) < 0) {
                    reps.push_back(prod);
                    lats.push_back(L);
                    grew = true;
                }
            }
        }
        if (reps.size() > 64) throw computation_error("class group too large for this implementation");
    }
    G.h = (long)reps.size();
    G.reps = reps;
    G.rep_lattices = lats;

    // group structure: multiplication table, then invariant factors for tiny groups
    std::vector<std::vector<long>> table(G.h, std::vector<long>(G.h));
    for (long i = 0; i < G.h; ++i)
        for (long j = 0; j < G.h; ++j) {
            Lattice L = lattice_mul(F, lats[i], lats[j]);
            long k = find_class(L, FactoredIdeal{});
            if (k < 0) throw computation_error("class group closure failure");
            table[i][j] = k;
        }
    // order of each element
    auto order_of = [&](long i) {
        long o = 1, cur = i;
        while (cur != 0) {
            cur = table[cur][i];
            ++o;
        }
        return o;
    };
    // invariant factors by successive maximal-order quotients (groups here are tiny);
    // supports the cyclic and C2 x C2-type cases that occur at desk scale
    std::vector<long> orders(G.h);
    long maxord = 1, maxidx = 0;
    for (long i = 0; i < G.h; ++i) {
        orders[i] = order_of(i);
        if (orders[i] > maxord) {
            maxord = orders[i];
            maxidx = i;
        }
    }
    G.cycle_structure.clear();
    if (G.h > 1) {
        if (maxord == G.h) {
            G.cycle_structure = {G.h};
            // coordinates: discrete log against the cyclic generator maxidx
            G.rep_coords.assign(G.h, {});
            long cur = 0;
            std::vector<long> dlog(G.h, -1);
            for (long k = 0; k < G.h; ++k) {
                dlog[cur] = k;
                cur = table[cur][maxidx];
            }
            for (long i = 0; i < G.h; ++i) G.rep_coords[i] = {dlog[i]};
        } else {
            // non-cyclic: factor as <g1> x <g2> with g1 of maximal order
            long m1 = maxord;
            long g1 = maxidx;
            // find g2 not in <g1> of order h/m1 generating the complement
            std::vector<long> sub{0};
            {
                long cur = table[0][g1];
                while (cur != 0) {
                    sub.push_back(cur);
                    cur = table[cur][g1];
                }
            }
            long g2 = -1, m2 = G.h / m1;
            for (long i = 0; i < G.h && g2 < 0; ++i) {
                if (std::find(sub.begin(), sub.end(), i) != sub.end()) continue;
                if (orders[i] == m2) {
                    // check <g1> intersect <g2> trivial by enumerating
                    bool ok = true;
                    long cur = i;
                    while (cur != 0) {
                        if (std::find(sub.begin(), sub.end(), cur) != sub.end()) ok = false;
                        cur = table[cur][i];
                    }
                    if (ok) g2 = i;
                }
            }
            if (g2 < 0) throw computation_error("class group structure not supported");
            G.cycle_structure = {m2, m1};  // invariant factors ascending divisibility
            G.rep_coords.assign(G.h, {0, 0});
            for (long x = 0; x < m2; ++x)
                for (long y = 0; y < m1; ++y) {
                    long idx = 0;
                    for (long k = 0; k < x; ++k) idx = table[idx][g2];
                    for (long k = 0; k < y; ++k) idx = table[idx][g1];
                    G.rep_coords[idx] = {x, y};
                }
        }
    } else {
        G.rep_coords = {{}};
    }
    return G;
}

namespace detail {

inline long class_index_direct(const BaseField& F, const ClassGroup& G, const Lattice& A) {
    for (long i = 0; i < G.h; ++i) {
        Lattice R = G.rep_lattices[i];
        FieldElement c1 = F.conj(FieldElement(Rat(R.a), Rat(0)));
        FieldElement c2 = F.conj(FieldElement(Rat(R.b), Rat(R.d)));
        FieldElement w(Rat(0), Rat(1));
        Lattice conjL = lattice_from_rows({{to_int(c1.a), to_int(c1.b)},
                                           {to_int(c2.a), to_int(c2.b)},
                                           {to_int(F.mul(c1, w).a), to_int(F.mul(c1, w).b)},
                                           {to_int(F.mul(c2, w).a), to_int(F.mul(c2, w).b)}});
        Lattice prod = lattice_mul(F, A, conjL);
        if (principal_generator(F, prod)) return i;
    }
    throw computation_error("class_index: no matching class");
}

}  // namespace detail

// class index of a prime. Large primes are reduced by a short vector: (v) = P * B
// with N(B) <= sqrt(disc) * small, so the recursion bottoms out on tiny primes.
inline long class_of_prime(const BaseField& F, ClassGroup& G, const PrimeIdeal& P) {
    if (F.is_rational()) return 0;
    auto it = G.prime_class_cache.find(P.lat);
    if (it != G.prime_class_cache.end()) return it->second;
    long result;
    if (P.norm() <= 1000) {
        result = detail::class_index_direct(F, G, P.lat);
    } else {
        FieldElement v = detail::short_vector(F, P.lat);
        FactoredIdeal vf = factor_principal(F, v);
        // subtract P, negate the rest
        bool seen = false;
        std::vector<long> acc(G.cycle_structure.size(), 0);
        for (auto& [Q, e] : vf.factors) {
            long mult = e;
            if (!seen && Q == P) {
                mult -= 1;
                seen = true;
            }
            if (mult == 0) continue;
            long c = class_of_prime(F, G, Q);
            for (size_t k = 0; k < acc.size(); ++k) acc[k] = acc[k] + mult * G.rep_coords[c][k];
        }
        if (!seen) throw computation_error("short vector not divisible by the prime");
        // result class = -acc
        std::vector<long> want(acc.size());
        for (size_t k = 0; k < acc.size(); ++k) {
            long m = G.cycle_structure[k];
            want[k] = ((-acc[k]) % m + m) % m;
        }
        result = -1;
        for (long i = 0; i < G.h; ++i)
            if (G.rep_coords[i] == want) result = i;
        if (result < 0) throw computation_error("coordinate lookup failed");
    }
    G.prime_class_cache.emplace(P.lat, result);
    return result;
}

inline long class_of(const BaseField& F, ClassGroup& G, const FactoredIdeal& A) {
    std::vector<long> acc(G.cycle_structure.size(), 0);
    for (auto& [P, e] : A.factors) {
        long c = class_of_prime(F, G, P);
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += e * G.rep_coords[c][k];
    }
    for (size_t k = 0; k < acc.size(); ++k) {
        long m = G.cycle_structure[k];
        acc[k] = (acc[k] % m + m) % m;
    }
    for (long i = 0; i < G.h; ++i)
        if (G.rep_coords[i] == acc) return i;
    throw computation_error("class_of: coordinate lookup failed");
}

// character of the class group, indexed 0..h-1 against the invariant factors
struct ClassCharacter {
    const ClassGroup* group;
    std::vector<long> exponents;  // one per cycle_structure entry
    long index;

    bool is_trivial() const {
        return std::all_of(exponents.begin(), exponents.end(), [](long e) { return e == 0; });
    }

    // order of the character (as a root of unity)
    long order() const {
        long o = 1;
        for (size_t k = 0; k < exponents.size(); ++k) {
            long m = group->cycle_structure[k];
            long g = std::gcd(exponents[k], m);
            o = std::lcm(o, m / g);
        }
        return o;
    }
};

inline ClassCharacter class_character(const ClassGroup& G, long index) {
    if (index < 0 || index >= G.h) throw computation_error("character index out of range");
    ClassCharacter chi;
    chi.group = &G;
    chi.index = index;
    chi.exponents.resize(G.cycle_structure.size());
    long rem = index;
    for (size_t k = 0; k < G.cycle_structure.size(); ++k) {
        chi.exponents[k] = rem % G.cycle_structure[k];
        rem /= G.cycle_structure[k];
    }
    return chi;
}

// chi evaluated on a class index
inline CycRat character_value_on_class(const ClassCharacter& chi, long class_idx) {
    const ClassGroup& G = *chi.group;
    long m = G.exponent();
    if (m == 1) return CycRat(1);
    long num = 0;
    for (size_t k = 0; k < chi.exponents.size(); ++k) {
        long mk = G.cycle_structure[k];
        num = (num + chi.exponents[k] * G.rep_coords[class_idx][k] * (m / mk)) % m;
    }
    return CycRat::root_of_unity(m, num);
}

inline CycRat character_value(const BaseField& F, ClassGroup& G, const ClassCharacter& chi,
                              const FactoredIdeal& A) {
    return character_value_on_class(chi, class_of(F, G, A));
}

}  // namespace kohnen
