#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "rational.hpp"

namespace kohnen {

// Element a + b*omega of F in the integral basis (1, omega); b = 0 over Q.
struct FieldElement {
    Rat a, b;

    FieldElement() : a(0), b(0) {}
    FieldElement(const Rat& a_, const Rat& b_ = Rat(0)) : a(a_), b(b_) {}
    FieldElement(long v) : a(v), b(0) {}

    bool operator==(const FieldElement& o) const { return a == o.a && b == o.b; }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }
    bool is_zero() const { return a == 0 && b == 0; }
};

// F = Q or a real quadratic field Q(sqrt(D)), D squarefree > 1.
// omega = sqrt(D) if D = 2,3 mod 4, omega = (1+sqrt(D))/2 if D = 1 mod 4,
// so that o = Z[omega]. omega satisfies omega^2 = t*omega - n.
class BaseField {
  public:
    enum class Kind { rational, real_quadratic };

    Kind kind = Kind::rational;
    Int D = 0;        // squarefree radicand, absent (0) over Q
    Int disc = 1;     // field discriminant
    long degree = 1;
    Int omega_t = 0;  // trace of omega
    Int omega_n = 0;  // norm of omega (omega^2 = omega_t*omega - omega_n)
    bool omega_is_half = false;  // omega = (1+sqrt(D))/2
    FieldElement different_gen;  // generator of the different
    FieldElement fund_unit;      // fundamental unit epsilon
    FieldElement tp_unit;        // generator of totally positive units mod torsion

    bool is_rational() const { return kind == Kind::rational; }

    std::string omega_desc() const {
        if (is_rational()) return "1";
        if (omega_is_half) return "(1+sqrt(" + D.get_str() + "))/2";
        return "sqrt(" + D.get_str() + ")";
    }

    // --- element arithmetic ---
    FieldElement add(const FieldElement& x, const FieldElement& y) const { return {x.a + y.a, x.b + y.b}; }
    FieldElement sub(const FieldElement& x, const FieldElement& y) const { return {x.a - y.a, x.b - y.b}; }
    FieldElement neg(const FieldElement& x) const { return {-x.a, -x.b}; }
    FieldElement mul(const FieldElement& x, const FieldElement& y) const {
        // (a1+b1 w)(a2+b2 w), w^2 = t w - n
        Rat t(omega_t), n(omega_n);
        return {x.a * y.a - x.b * y.b * n, x.a * y.b + x.b * y.a + x.b * y.b * t};
    }
    FieldElement conj(const FieldElement& x) const {
        // conjugate of w is t - w
        return {x.a + x.b * Rat(omega_t), -x.b};
    }
    Rat trace(const FieldElement& x) const {
        if (is_rational()) return x.a;
        return 2 * x.a + x.b * Rat(omega_t);
    }
    Rat norm(const FieldElement& x) const {
        if (is_rational()) return x.a;
        Rat t(omega_t), n(omega_n);
        return x.a * x.a + x.a * x.b * t + x.b * x.b * n;
    }
    FieldElement inv(const FieldElement& x) const {
        Rat N = norm(x);
        if (N == 0) throw computation_error("inverse of zero");
        if (is_rational()) return {Rat(1) / x.a, Rat(0)};
        FieldElement c = conj(x);
        return {c.a / N, c.b / N};
    }
    FieldElement div(const FieldElement& x, const FieldElement& y) const { return mul(x, inv(y)); }
    FieldElement scale(const FieldElement& x, const Rat& r) const { return {x.a * r, x.b * r}; }
    FieldElement pow(FieldElement x, long e) const {
        if (e < 0) return inv(pow(x, -e));
        FieldElement r(Rat(1));
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    bool is_integral(const FieldElement& x) const { return is_integer(x.a) && is_integer(x.b); }

    // exact sign of the embedding iota_i(x), i in {0, 1}; iota_0(sqrt D) > 0.
    // Decided by integer comparison of squares, never by floats.
    int embedding_sign(const FieldElement& x, int i) const {
        if (is_rational() || x.b == 0) return sgn(x.a);
        // write the value as u + v sqrt(D); iota_0(sqrt D) > 0
        Rat u, v;
        if (!omega_is_half) {
            u = x.a;
            v = (i == 0) ? x.b : -x.b;
        } else {
            u = x.a + x.b / 2;
            v = ((i == 0) ? x.b : -x.b) / 2;
        }
        if (v == 0) return sgn(u);
        if (u == 0) return sgn(v);
        // sign of u + v sqrt(D): compare u^2 vs D v^2
        int su = sgn(u), sv = sgn(v);
        if (su == sv) return su;
        // opposite signs: |u| vs |v| sqrt(D)
        Rat u2 = u * u, Dv2 = Rat(D) * v * v;
        if (u2 == Dv2) throw computation_error("element is zero along an embedding");
        return (u2 > Dv2) ? su : sv;
    }

    bool is_totally_positive(const FieldElement& x) const {
        if (x.is_zero()) return false;
        if (is_rational()) return x.a > 0;
        return embedding_sign(x, 0) > 0 && embedding_sign(x, 1) > 0;
    }

    std::pair<double, double> embeddings(const FieldElement& x) const {
        if (is_rational()) return {x.a.get_d(), x.a.get_d()};
        double sq = std::sqrt(D.get_d());
        double w0 = omega_is_half ? (1 + sq) / 2 : sq;
        double w1 = omega_is_half ? (1 - sq) / 2 : -sq;
        return {x.a.get_d() + x.b.get_d() * w0, x.a.get_d() + x.b.get_d() * w1};
    }

    // exact test: is x a square in F? If so optionally produce a root.
    bool is_square(const FieldElement& x, FieldElement* root = nullptr) const {
        if (x.is_zero()) {
            if (root) *root = FieldElement(Rat(0));
            return true;
        }
        if (is_rational()) {
            Rat r;
            if (!rat_sqrt(x.a, &r)) return false;
            if (root) *root = FieldElement(r);
            return true;
        }
        // (u + v w)^2 = x: N(x) must be a rational square, say s^2 with s = +-N(y).
        Rat N = norm(x), T = trace(x), s;
        if (!rat_sqrt(N, &s)) return false;
        // trace(y^2) = y^2 + conj(y)^2 = T(y)^2 - 2 N(y), with N(y) = +-s
        for (int sign : {1, -1}) {
            Rat t2 = T + 2 * Rat(sign) * s;  // = trace(y)^2
            Rat t;
            if (!rat_sqrt(t2, &t)) continue;
            for (int tsign : {1, -1}) {
                // y has trace tsign*t and norm sign*s: y = (tr + dif)/2 where y satisfies
                // y^2 - tr y + n = 0; recover y as element: y = (tr/2) + delta, delta^2 = tr^2/4 - n
                // solve directly: y = u + v w with 2u + v t_w = tsign*t and norm = sign*s
                // Substitute and test y^2 == x.
                Rat tr = Rat(tsign) * t;
                // y^2 = tr*y - n => x = tr*y - n => y = (x + n) / tr  (tr != 0 case)
                if (tr != 0) {
                    FieldElement y = scale(add(x, FieldElement(Rat(sign) * s)), Rat(1) / tr);
                    if (mul(y, y) == x) {
                        if (root) *root = y;
                        return true;
                    }
                } else {
                    // trace-zero square root: y = v*w - (v t_w /2) pattern; brute algebra:
                    // y = c*w0 with w0 = sqrt(D): y^2 = c^2 D rational: x must be rational
                    if (x.b == 0) {
                        Rat c2 = x.a / Rat(D);
                        Rat c;
                        if (rat_sqrt(c2, &c)) {
                            FieldElement y = omega_is_half ? FieldElement(-c, 2 * c) : FieldElement(Rat(0), c);
                            if (mul(y, y) == x) {
                                if (root) *root = y;
                                return true;
                            }
                        }
                    }
                }
            }
        }
        return false;
    }

    std::string element_str(const FieldElement& x) const {
        if (is_rational() || x.b == 0) return x.a.get_str();
        // render as u + v sqrt(D)
        Rat u = omega_is_half ? x.a + x.b / 2 : x.a;
        Rat v = omega_is_half ? x.b / 2 : x.b;
        std::string s;
        if (u != 0) s += u.get_str();
        if (v > 0 && !s.empty()) s += "+";
        if (v == -1)
            s += "-";
        else if (v != 1)
            s += v.get_str();
        s += "sqrt(" + D.get_str() + ")";
        return s;
    }

  private:
    static int sgn(const Rat& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }
};

struct ElementInvariants {
    Rat trace, norm;
    bool totally_positive;
    std::pair<double, double> embeddings;
};

inline ElementInvariants element_invariants(const BaseField& F, const FieldElement& x) {
    return {F.trace(x), F.norm(x), F.is_totally_positive(x), F.embeddings(x)};
}

namespace detail {

// fundamental solution of x^2 - D y^2 = +-1 from the continued fraction of sqrt(D)
inline std::pair<Int, Int> pell_unit_cf(const Int& D) {
    Int P = 0, Q = 1, sq = isqrt(D);
    Int p_prev = 0, p_cur = 1, q_prev = 1, q_cur = 0;  // p_{-2}=0, p_{-1}=1
    for (int iter = 0; iter < 100000; ++iter) {
        Int ak;
        {
            Int num = P + sq;
            mpz_fdiv_q(ak.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        }
        Int p_next = ak * p_cur + p_prev;
        Int q_next = ak * q_cur + q_prev;
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;
        if (p_cur * p_cur - D * q_cur * q_cur == 1 || p_cur * p_cur - D * q_cur * q_cur == -1)
            return {p_cur, q_cur};
        P = ak * Q - P;
        Q = (D - P * P) / Q;
        if (Q == 0) throw computation_error("degenerate continued fraction");
    }
    throw computation_error("fundamental unit not found (period too long)");
}

// fundamental unit of o. The continued fraction of sqrt(D) yields the fundamental
// unit eps0 of Z[sqrt(D)]; for D = 1 mod 4 the unit group of o can be 3 times larger,
// with the smaller unit (a + b sqrt(D))/2 satisfying b <= ~cbrt(y0). Scan that window.
inline FieldElement fundamental_unit_cf(const BaseField& F) {
    auto [x0, y0] = pell_unit_cf(F.D);
    FieldElement eps0 = F.omega_is_half ? FieldElement(Rat(x0) - Rat(y0), Rat(2 * y0))
                                        : FieldElement(Rat(x0), Rat(y0));
    if (!F.omega_is_half) return eps0;
    Int bcap;
    mpz_root(bcap.get_mpz_t(), y0.get_mpz_t(), 3);
    bcap = 2 * bcap + 2;
    for (Int b = 1; b <= bcap; ++b) {
        for (int s : {-1, 1}) {  // smaller a first: norm -1 candidate precedes +1
            Int a2 = F.D * b * b + 4 * s;
            Int a;
            if (a2 >= 0 && is_perfect_square(a2, &a) && (a - b) % 2 == 0) {
                // (a + b sqrt(D))/2 = (a-b)/2 + b*omega
                return FieldElement(Rat((a - b) / 2), Rat(b));
            }
        }
    }
    return eps0;
}

}  // namespace detail

// d = 0 means Q; otherwise d >= 2, reduced to its squarefree core.
inline BaseField make_field(const Int& d) {
    if (d < 0) throw computation_error("make_field: negative d gives a non-totally-real field");
    if (d == 1) throw computation_error("make_field: d = 1 is not a quadratic field");
    BaseField F;
    if (d == 0) {
        F.kind = BaseField::Kind::rational;
        F.disc = 1;
        F.degree = 1;
        F.different_gen = FieldElement(Rat(1));
        F.fund_unit = FieldElement(Rat(1));
        F.tp_unit = FieldElement(Rat(1));
        return F;
    }
    // squarefree core
    Int core = 1;
    for (auto& [p, e] : factor_integer(d))
        if (e % 2) core *= p;
    if (core == 1) throw computation_error("make_field: d is a perfect square");
    F.kind = BaseField::Kind::real_quadratic;
    F.degree = 2;
    F.D = core;
    if ((core - 1) % 4 == 0) {
        F.disc = core;
        F.omega_is_half = true;
        F.omega_t = 1;
        F.omega_n = -(core - 1) / 4;
    } else {
        F.disc = 4 * core;
        F.omega_is_half = false;
        F.omega_t = 0;
        F.omega_n = -core;
    }
    // different = (sqrt(disc)); as an element: sqrt(D) or 2 sqrt(D) resp.
    if (F.omega_is_half)
        F.different_gen = FieldElement(Rat(-1), Rat(2));  // 2w - 1 = sqrt(D)
    else
        F.different_gen = FieldElement(Rat(0), Rat(2));  // 2 sqrt(D) = sqrt(4D)
    F.fund_unit = detail::fundamental_unit_cf(F);
    // totally positive generator: epsilon if totally positive, else epsilon^2;
    // canonicalized so the first embedding exceeds 1
    FieldElement eps = F.fund_unit;
    FieldElement tp = F.is_totally_positive(eps) ? eps : F.mul(eps, eps);
    if (F.embedding_sign(F.sub(tp, FieldElement(Rat(1))), 0) < 0) tp = F.inv(tp);
    F.tp_unit = tp;
    return F;
}

// All totally positive xi in o with trace <= T, plus xi = 0,
// sorted by (trace, norm, a, b); no duplicates.
inline std::vector<FieldElement> enumerate_totally_positive(const BaseField& F, long T) {
    if (T < 1) throw computation_error("enumerate_totally_positive: T >= 1 required");
    std::vector<FieldElement> out;
    out.push_back(FieldElement(Rat(0)));
    if (F.is_rational()) {
        for (long a = 1; a <= T; ++a) out.push_back(FieldElement(Rat(a)));
        return out;
    }
    // xi = a + b*omega integral; trace = 2a + b t; positivity forces |coeff of sqrt D| bounded:
    // writing xi = u + v sqrt(D) (2u = trace), positivity means u > |v| sqrt(D) > 0,
    // and trace <= T gives u <= T/2, hence |v| < (T/2)/sqrt(D).
    Int sq = isqrt(F.D);
    Int vbound_num = Int(T);  // |v| <= T / (2 sqrt(D)) < T/(2 sq)
    long bmax = mpz_get_si(Int(vbound_num / (2 * sq) + 2).get_mpz_t());
    if (!F.omega_is_half) {
        for (long b = -bmax; b <= bmax; ++b)
            for (long a = 1; 2 * a <= T; ++a) {
                FieldElement x{Rat(a), Rat(b)};
                if (F.is_totally_positive(x)) out.push_back(x);
            }
    } else {
        // b may be any integer with |b| <= 2*bmax-ish; trace = 2a + b
        for (long b = -2 * bmax - 2; b <= 2 * bmax + 2; ++b)
            for (long a = -std::abs(b) - (long)(T / 2) - 2; 2 * a + b <= T; ++a) {
                if (2 * a + b < 1) continue;
                FieldElement x{Rat(a), Rat(b)};
                if (F.is_totally_positive(x)) out.push_back(x);
            }
    }
    std::sort(out.begin(), out.end(), [&F](const FieldElement& x, const FieldElement& y) {
        Rat tx = F.trace(x), ty = F.trace(y);
        if (tx != ty) return tx < ty;
        Rat nx = F.norm(x), ny = F.norm(y);
        if (nx != ny) return nx < ny;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

// canonical key order used everywhere a deterministic element order is needed
inline bool element_key_less(const BaseField& F, const FieldElement& x, const FieldElement& y) {
    Rat tx = F.trace(x), ty = F.trace(y);
    if (tx != ty) return tx < ty;
    Rat nx = F.norm(x), ny = F.norm(y);
    if (nx != ny) return nx < ny;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
}

}  // namespace kohnen
