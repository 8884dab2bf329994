#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kohnen {

using Int = mpz_class;
using Rat = mpq_class;

struct computation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int int_from(long v) { return Int(v); }

inline bool is_integer(const Rat& x) { return x.get_den() == 1; }

inline Int to_int(const Rat& x) {
    if (!is_integer(x)) throw computation_error("expected an integer, got " + x.get_str());
    return x.get_num();
}

inline Rat rat_pow(const Rat& x, long n) {
    if (n < 0) {
        if (x == 0) throw computation_error("0^negative");
        return Rat(1) / rat_pow(x, -n);
    }
    Rat r(1), b = x;
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

inline Int int_pow(const Int& x, unsigned long n) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), n);
    return r;
}

// floor(sqrt(n)) for n >= 0
inline Int isqrt(const Int& n) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

// exact square root of a rational if it is one
inline bool rat_sqrt(const Rat& x, Rat* root) {
    if (x < 0) return false;
    Int rn, rd;
    if (!is_perfect_square(x.get_num(), &rn)) return false;
    if (!is_perfect_square(x.get_den(), &rd)) return false;
    if (root) *root = Rat(rn) / Rat(rd);
    return true;
}

inline long ord_p_int(Int n, const Int& p) {
    if (n == 0) throw computation_error("ord_p(0)");
    long v = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
        n /= p;
        ++v;
    }
    return v;
}

inline long ord_p(const Rat& x, const Int& p) {
    if (x == 0) throw computation_error("ord_p(0)");
    return ord_p_int(x.get_num(), p) - ord_p_int(x.get_den(), p);
}

inline bool is_prime(const Int& n) {
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;  // deterministic for our sizes
}

// Kronecker symbol (a|n), full generality
inline int kronecker(const Int& a, const Int& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

namespace detail {
inline const std::vector<long>& sieved_primes(long bound) {
    static std::vector<long> primes;
    static long sieved = 1;
    if (bound > sieved) {
        long n = std::max(bound, 2 * sieved);
        std::vector<bool> comp(n + 1, false);
        primes.clear();
        for (long i = 2; i <= n; ++i) {
            if (!comp[i]) {
                primes.push_back(i);
                for (long j = 2 * i; j <= n; j += i) comp[j] = true;
            }
        }
        sieved = n;
    }
    return primes;
}
}  // namespace detail

// rational primes p <= bound
inline std::vector<long> primes_up_to(long bound) {
    const auto& all = detail::sieved_primes(bound);
    auto it = std::upper_bound(all.begin(), all.end(), bound);
    return std::vector<long>(all.begin(), it);
}

// square root mod an odd prime (Tonelli-Shanks); p odd, a a quadratic residue
inline Int sqrt_mod_prime(const Int& a0, const Int& p) {
    Int a = ((a0 % p) + p) % p;
    if (a == 0) return 0;
    if (kronecker(a, p) != 1) throw computation_error("sqrt_mod_prime: non-residue");
    if (p % 4 == 3) {
        Int r;
        Int e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    // write p - 1 = q 2^s with q odd
    Int q = p - 1;
    long s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    Int z = 2;
    while (kronecker(z, p) != -1) ++z;
    Int c, t, r, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    long m = s;
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
            if (i == m) throw computation_error("sqrt_mod_prime failed");
        }
        Int b = c;
        for (long j = 0; j < m - i - 1; ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

// factorization of |n| as sorted (prime, exponent) pairs
inline std::vector<std::pair<Int, long>> factor_integer(Int n) {
    if (n == 0) throw computation_error("factor(0)");
    if (n < 0) n = -n;
    std::vector<std::pair<Int, long>> out;
    if (n == 1) return out;
    for (long p : primes_up_to(65536)) {
        if (Int(p) * p > n) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            long e = 0;
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
                n /= p;
                ++e;
            }
            out.emplace_back(Int(p), e);
        }
        if (n == 1) return out;
    }
    if (n > 1) {
        if (!is_prime(n)) throw computation_error("factor_integer: cofactor " + n.get_str() + " too hard");
        out.emplace_back(n, 1);
    }
    return out;
}

inline Rat binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Rat(r);
}

inline Int factorial(long n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

// Bernoulli numbers B_0=1, B_1=-1/2, ... via the defining recurrence
inline const Rat& bernoulli_number(long n) {
    static std::vector<Rat> cache{Rat(1), Rat(-1, 2)};
    while ((long)cache.size() <= n) {
        long m = (long)cache.size();
        // sum_{k=0}^{m} C(m+1,k) B_k = 0
        Rat s = 0;
        for (long k = 0; k < m; ++k) s += binomial(m + 1, k) * cache[k];
        cache.push_back(-s / binomial(m + 1, m));
    }
    return cache[n];
}

// B_n(x) = sum_k C(n,k) B_k x^{n-k}
inline Rat bernoulli_poly(long n, const Rat& x) {
    Rat s = 0, xp = 1;
    for (long k = n; k >= 0; --k) {  // xp = x^{n-k}
        s += binomial(n, k) * bernoulli_number(k) * xp;
        xp *= x;
    }
    return s;
}

// fundamental discriminant of Q(sqrt(n)) for nonzero n; 1 when n is a square
inline Int fundamental_discriminant(const Int& n) {
    if (n == 0) throw computation_error("fundamental_discriminant(0)");
    Int d = n < 0 ? Int(-1) : Int(1);
    for (auto& [p, e] : factor_integer(n))
        if (e % 2) d *= p;
    // d is now the squarefree part of n
    if ((d - 1) % 4 == 0) return d;
    return 4 * d;
}

}  // namespace kohnen
