#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <numeric>

#include "rational.hpp"

namespace kohnen {

// Phi_m as integer coefficient vector (degree phi(m)), cached.
// Computed by dividing x^m - 1 by the cyclotomic polynomials of proper divisors.
inline const std::vector<Int>& cyclotomic_poly(long m) {
    static std::map<long, std::vector<Int>> cache;
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<Int> num(m + 1, 0);
    num[0] = -1;
    num[m] = 1;  // x^m - 1
    for (long d = 1; d < m; ++d) {
        if (m % d) continue;
        const auto& phi_d = cyclotomic_poly(d);
        // exact polynomial division num /= phi_d
        std::vector<Int> q(num.size() - phi_d.size() + 1, 0);
        std::vector<Int> r = num;
        for (long i = (long)q.size() - 1; i >= 0; --i) {
            q[i] = r[i + phi_d.size() - 1];  // phi_d is monic
            if (q[i] == 0) continue;
            for (size_t j = 0; j < phi_d.size(); ++j) r[i + j] -= q[i] * phi_d[j];
        }
        num = q;
    }
    return cache.emplace(m, std::move(num)).first->second;
}

inline long euler_phi(long m) { return (long)cyclotomic_poly(m).size() - 1; }

// Exact element of Q(zeta_m). Stored as a sparse combination of powers of zeta_m
// (exponents mod m, coefficients rational); reduction mod Phi_m happens on the
// canonicalizing operations (equality, rationality, coordinate extraction).
class CycRat {
  public:
    CycRat() : m_(1) {}
    CycRat(const Rat& r) : m_(1) { set(0, r); }
    CycRat(long v) : m_(1) { set(0, Rat(v)); }
    CycRat(const Int& v) : m_(1) { set(0, Rat(v)); }

    static CycRat root_of_unity(long m, long power) {
        CycRat z;
        z.m_ = m;
        power %= m;
        if (power < 0) power += m;
        z.set(power, Rat(1));
        return z;
    }

    long order() const { return m_; }
    size_t term_count() const { return c_.size(); }

    CycRat promoted(long M) const {
        if (M == m_) return *this;
        if (M % m_) throw computation_error("cyclotomic promote: order mismatch");
        CycRat z;
        z.m_ = M;
        long k = M / m_;
        for (auto& [e, r] : c_) z.c_.emplace(e * k, r);
        return z;
    }

    friend CycRat operator+(const CycRat& a, const CycRat& b) {
        long M = std::lcm(a.m_, b.m_);
        CycRat z = a.promoted(M);
        long k = M / b.m_;
        for (auto& [e, r] : b.c_) z.add(e * k, r);
        return z;
    }
    friend CycRat operator-(const CycRat& a, const CycRat& b) {
        long M = std::lcm(a.m_, b.m_);
        CycRat z = a.promoted(M);
        long k = M / b.m_;
        for (auto& [e, r] : b.c_) z.add(e * k, -r);
        return z;
    }
    CycRat operator-() const {
        CycRat z = *this;
        for (auto& [e, r] : z.c_) z.c_[e] = -r;
        return z;
    }
    friend CycRat operator*(const CycRat& a, const CycRat& b) {
        long M = std::lcm(a.m_, b.m_);
        CycRat x = a.promoted(M), y = b.promoted(M);
        CycRat z;
        z.m_ = M;
        for (auto& [e1, r1] : x.c_)
            for (auto& [e2, r2] : y.c_) {
                long e = e1 + e2;
                if (e >= M) e -= M;
                z.add(e, r1 * r2);
            }
        return z;
    }
    CycRat& operator+=(const CycRat& o) {
        if (o.m_ == m_) {
            for (auto& [e, r] : o.c_) add(e, r);
            return *this;
        }
        return *this = *this + o;
    }
    CycRat& operator-=(const CycRat& o) { return *this = *this - o; }
    CycRat& operator*=(const CycRat& o) { return *this = *this * o; }

    // multiply by zeta_{m}^power of the own order (index shift)
    CycRat shifted(long power) const {
        power %= m_;
        if (power < 0) power += m_;
        CycRat z;
        z.m_ = m_;
        for (auto& [e, r] : c_) {
            long k = e + power;
            if (k >= m_) k -= m_;
            z.c_.emplace(k, r);
        }
        return z;
    }

    CycRat scaled(const Rat& r) const {
        if (r == 0) return CycRat(Rat(0));
        CycRat z = *this;
        for (auto& [e, v] : z.c_) z.c_[e] *= r;
        return z;
    }

    // Galois action zeta -> zeta^k, gcd(k, m) = 1; k = -1 is complex conjugation
    CycRat galois(long k) const {
        k %= m_;
        if (k < 0) k += m_;
        if (std::gcd(k, m_) != 1) throw computation_error("galois exponent not coprime to order");
        CycRat z;
        z.m_ = m_;
        for (auto& [e, r] : c_) z.add((e * k) % m_, r);
        return z;
    }
    CycRat conj() const { return m_ == 1 ? *this : galois(m_ - 1); }

    // cheap structural check (no reduction): no stored terms at all
    bool definitely_zero() const { return c_.empty(); }

    bool is_zero() const {
        if (c_.empty()) return true;
        auto r = reduced();
        return std::all_of(r.begin(), r.end(), [](const Rat& v) { return v == 0; });
    }
    friend bool operator==(const CycRat& a, const CycRat& b) { return (a - b).is_zero(); }
    friend bool operator!=(const CycRat& a, const CycRat& b) { return !(a == b); }

    bool is_rational() const {
        auto r = reduced();
        for (size_t i = 1; i < r.size(); ++i)
            if (r[i] != 0) return false;
        return true;
    }
    Rat to_rational() const {
        auto r = reduced();
        for (size_t i = 1; i < r.size(); ++i)
            if (r[i] != 0) throw computation_error("cyclotomic value is not rational");
        return r.empty() ? Rat(0) : r[0];
    }

    // canonical coordinates on the power basis 1, zeta, ..., zeta^{phi(m)-1}
    std::vector<Rat> reduced() const {
        const auto& phi = cyclotomic_poly(m_);
        long deg = (long)phi.size() - 1;
        std::vector<Rat> r(m_, Rat(0));
        for (auto& [e, v] : c_) r[e] += v;
        for (long i = m_ - 1; i >= deg; --i) {
            if (r[i] == 0) continue;
            Rat lead = r[i];
            r[i] = 0;
            for (long j = 0; j < deg; ++j) r[i - deg + j] -= lead * Rat(phi[j]);
        }
        r.resize(deg);
        return r;
    }

    // renormalize to the canonical reduced form (compact storage)
    CycRat canonical() const {
        CycRat z;
        z.m_ = m_;
        auto r = reduced();
        for (long i = 0; i < (long)r.size(); ++i)
            if (r[i] != 0) z.c_.emplace(i, r[i]);
        return z;
    }

    // multiplicative inverse via linear algebra over Q on the reduced basis
    CycRat inverse() const {
        long deg = euler_phi(m_);
        std::vector<std::vector<Rat>> M(deg, std::vector<Rat>(deg));
        for (long j = 0; j < deg; ++j) {
            auto col = (*this * root_of_unity(m_, j)).reduced();
            for (long i = 0; i < deg; ++i) M[i][j] = col[i];
        }
        std::vector<Rat> rhs(deg, Rat(0));
        rhs[0] = 1;
        for (long col = 0, row = 0; col < deg && row < deg; ++col) {
            long piv = -1;
            for (long i = row; i < deg; ++i)
                if (M[i][col] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) throw computation_error("cyclotomic inverse of zero divisor");
            std::swap(M[piv], M[row]);
            std::swap(rhs[piv], rhs[row]);
            Rat d = M[row][col];
            for (long j = col; j < deg; ++j) M[row][j] /= d;
            rhs[row] /= d;
            for (long i = 0; i < deg; ++i) {
                if (i == row || M[i][col] == 0) continue;
                Rat f = M[i][col];
                for (long j = col; j < deg; ++j) M[i][j] -= f * M[row][j];
                rhs[i] -= f * rhs[row];
            }
            ++row;
        }
        CycRat z;
        z.m_ = m_;
        for (long i = 0; i < deg; ++i)
            if (rhs[i] != 0) z.c_.emplace(i, rhs[i]);
        return z;
    }

    std::complex<double> to_complex() const {
        std::complex<double> s(0.0, 0.0);
        for (auto& [e, r] : c_) {
            double ang = 2.0 * 3.14159265358979323846 * (double)e / (double)m_;
            s += r.get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        return s;
    }

    std::string str() const {
        auto r = reduced();
        std::string s = "[";
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) s += ",";
            s += r[i].get_str();
        }
        return s + "]@" + std::to_string(m_);
    }

  private:
    void set(long e, const Rat& r) {
        if (r != 0) c_[e] = r;
    }
    void add(long e, const Rat& r) {
        if (r == 0) return;
        auto it = c_.find(e);
        if (it == c_.end()) {
            c_.emplace(e, r);
        } else {
            it->second += r;
            if (it->second == 0) c_.erase(it);
        }
    }

    long m_;
    std::map<long, Rat> c_;  // exponent (mod m) -> coefficient
};

// sqrt(p) as an exact cyclotomic (p prime or 1). Lives in Q(zeta_{4p}).
inline CycRat cyc_sqrt_prime(long p) {
    if (p == 1) return CycRat(1);
    if (p == 2) {
        // zeta_8 + zeta_8^{-1}
        return CycRat::root_of_unity(8, 1) + CycRat::root_of_unity(8, 7);
    }
    // Gauss sum: sum_a (a|p) zeta_p^a equals sqrt(p) (p=1 mod 4) or i sqrt(p) (p=3 mod 4)
    CycRat g(0);
    for (long a = 1; a < p; ++a)
        if (kronecker(a, p) == 1)
            g += CycRat::root_of_unity(p, a);
        else
            g -= CycRat::root_of_unity(p, a);
    if (p % 4 == 1) return g;
    return g * CycRat::root_of_unity(4, 3);  // divide by i
}

}  // namespace kohnen
