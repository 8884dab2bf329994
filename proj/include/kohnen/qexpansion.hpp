#pragma once

#include <json.hpp>

#include "cyclotomic.hpp"
#include "base_field.hpp"

namespace kohnen {

// Sparse exact Fourier expansion: coefficients indexed by totally positive (or zero)
// elements of o with trace <= trace_bound. Absent key = coefficient 0 inside the
// bound; nothing is asserted beyond it.
class QExpansion {
  public:
    struct KeyLess {
        const BaseField* F;
        bool operator()(const FieldElement& x, const FieldElement& y) const {
            return element_key_less(*F, x, y);
        }
    };
    using CoeffMap = std::map<FieldElement, CycRat, KeyLess>;

    QExpansion(const BaseField& F, long trace_bound, std::string label = "", long exp_den = 1)
        : field_(&F), trace_bound_(trace_bound), exponent_denominator_(exp_den), label_(std::move(label)),
          coeffs_(KeyLess{&F}) {}

    const BaseField& field() const { return *field_; }
    long trace_bound() const { return trace_bound_; }
    void shrink_bound(long t) { trace_bound_ = std::min(trace_bound_, t); }
    long exponent_denominator() const { return exponent_denominator_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }
    const CoeffMap& coefficients() const { return coeffs_; }

    void set(const FieldElement& xi, const CycRat& v) {
        if (!field_->is_integral(xi)) throw computation_error("coefficient index not integral");
        if (!xi.is_zero() && !field_->is_totally_positive(xi))
            throw computation_error("coefficient index not totally positive");
        if (field_->trace(xi) > trace_bound_) throw computation_error("index beyond the trace bound");
        if (v.is_zero())
            coeffs_.erase(xi);
        else
            coeffs_[xi] = v;
    }

    void add_to(const FieldElement& xi, const CycRat& v) {
        auto it = coeffs_.find(xi);
        if (it == coeffs_.end()) {
            set(xi, v);
        } else {
            it->second += v;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    // coefficient lookup: exact inside the bound, error beyond it
    CycRat coeff(const FieldElement& xi) const {
        if (field_->trace(xi) > trace_bound_)
            throw computation_error("coefficient beyond the certified trace bound");
        auto it = coeffs_.find(xi);
        return it == coeffs_.end() ? CycRat(0) : it->second;
    }

    bool in_range(const FieldElement& xi) const { return field_->trace(xi) <= trace_bound_; }

    friend QExpansion operator+(const QExpansion& f, const QExpansion& g) {
        f.check_compatible(g);
        QExpansion h(*f.field_, std::min(f.trace_bound_, g.trace_bound_), "", f.exponent_denominator_);
        for (auto& [k, v] : f.coeffs_)
            if (h.in_range(k)) h.add_to(k, v);
        for (auto& [k, v] : g.coeffs_)
            if (h.in_range(k)) h.add_to(k, v);
        return h;
    }

    QExpansion scaled(const CycRat& c) const {
        QExpansion h(*field_, trace_bound_, label_, exponent_denominator_);
        if (c.is_zero()) return h;
        for (auto& [k, v] : coeffs_) h.set(k, v * c);
        return h;
    }

    friend QExpansion operator*(const QExpansion& f, const QExpansion& g) {
        f.check_compatible(g);
        QExpansion h(*f.field_, std::min(f.trace_bound_, g.trace_bound_), "", f.exponent_denominator_);
        for (auto& [k1, v1] : f.coeffs_) {
            for (auto& [k2, v2] : g.coeffs_) {
                FieldElement k = f.field_->add(k1, k2);
                if (f.field_->trace(k) > h.trace_bound_) continue;
                h.add_to(k, v1 * v2);
            }
        }
        return h;
    }

    // f(kz): exponent dilation by a positive integer
    QExpansion dilated(long m) const {
        if (m < 1) throw computation_error("dilation factor must be positive");
        QExpansion h(*field_, trace_bound_ * m, label_, exponent_denominator_);
        for (auto& [k, v] : coeffs_) h.set(field_->scale(k, Rat(m)), v);
        return h;
    }

    bool operator==(const QExpansion& o) const {
        if (field_->disc != o.field_->disc || trace_bound_ != o.trace_bound_) return false;
        if (coeffs_.size() != o.coeffs_.size()) return false;
        for (auto it = coeffs_.begin(), jt = o.coeffs_.begin(); it != coeffs_.end(); ++it, ++jt)
            if (it->first != jt->first || it->second != jt->second) return false;
        return true;
    }

    // equality of coefficients on the overlap of the certified ranges
    bool agrees_with(const QExpansion& o) const {
        long T = std::min(trace_bound_, o.trace_bound_);
        for (auto& [k, v] : coeffs_)
            if (field_->trace(k) <= T && !(o.coeff(k) == v)) return false;
        for (auto& [k, v] : o.coeffs_)
            if (field_->trace(k) <= T && !(coeff(k) == v)) return false;
        return true;
    }

    nlohmann::json to_json() const;
    static QExpansion from_json(const BaseField& F, const nlohmann::json& j);

  private:
    void check_compatible(const QExpansion& o) const {
        if (field_->disc != o.field_->disc) throw computation_error("field mismatch");
        if (exponent_denominator_ != o.exponent_denominator_)
            throw computation_error("exponent denominator mismatch");
    }

    const BaseField* field_;
    long trace_bound_;
    long exponent_denominator_;
    std::string label_;
    CoeffMap coeffs_;
};

inline nlohmann::json rat_to_json(const Rat& r) { return r.get_str(); }

inline Rat rat_from_json(const nlohmann::json& j) {
    Rat r;
    if (r.set_str(j.get<std::string>(), 10) != 0) throw computation_error("bad rational literal");
    r.canonicalize();
    return r;
}

inline nlohmann::json cyc_to_json(const CycRat& v) {
    if (v.is_rational()) return rat_to_json(v.to_rational());
    nlohmann::json j;
    j["order"] = v.order();
    nlohmann::json coords = nlohmann::json::array();
    for (auto& c : v.reduced()) coords.push_back(c.get_str());
    j["coords"] = coords;
    return j;
}

inline CycRat cyc_from_json(const nlohmann::json& j) {
    if (j.is_string()) return CycRat(rat_from_json(j));
    long m = j.at("order").get<long>();
    CycRat v(0);
    long i = 0;
    for (auto& c : j.at("coords")) {
        Rat r;
        r.set_str(c.get<std::string>(), 10);
        r.canonicalize();
        v += CycRat::root_of_unity(m, i).scaled(r);
        ++i;
    }
    return v;
}

inline nlohmann::json QExpansion::to_json() const {
    nlohmann::json j;
    j["field"]["kind"] = field_->is_rational() ? "rational" : "real_quadratic";
    if (!field_->is_rational()) j["field"]["D"] = mpz_get_si(field_->D.get_mpz_t());
    j["label"] = label_;
    j["trace_bound"] = trace_bound_;
    j["exponent_denominator"] = exponent_denominator_;
    nlohmann::json arr = nlohmann::json::array();
    for (auto& [k, v] : coeffs_) {
        nlohmann::json e;
        e["xi"] = {rat_to_json(k.a), rat_to_json(k.b)};
        e["trace"] = rat_to_json(field_->trace(k));
        e["norm"] = rat_to_json(field_->norm(k));
        e["value"] = cyc_to_json(v);
        arr.push_back(e);
    }
    j["coefficients"] = arr;
    return j;
}

inline QExpansion QExpansion::from_json(const BaseField& F, const nlohmann::json& j) {
    QExpansion f(F, j.at("trace_bound").get<long>(), j.value("label", ""),
                 j.value("exponent_denominator", 1L));
    for (auto& e : j.at("coefficients")) {
        FieldElement xi{rat_from_json(e.at("xi")[0]), rat_from_json(e.at("xi")[1])};
        f.set(xi, cyc_from_json(e.at("value")));
    }
    return f;
}

}  // namespace kohnen
