#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nonarch/coefficient.hpp"
#include "nonarch/errors.hpp"

namespace nonarch {

inline constexpr int default_truncation = 16;

/// Leading orders whose magnitude exceeds this bound abort the computation
/// instead of silently wrapping the window. Generous on purpose: legitimate
/// derivations stay within a handful of orders.
inline std::int64_t& max_order_bound() {
    static std::int64_t bound = 1024;
    return bound;
}

/// Valuation of a series: the leading (lowest) order, or +infinity for zero.
struct Valuation {
    bool finite = false;
    std::int64_t value = 0;

    static Valuation infinite() { return Valuation{}; }
    static Valuation at(std::int64_t v) { return Valuation{true, v}; }

    friend Valuation operator+(const Valuation& a, const Valuation& b) {
        if (!a.finite || !b.finite) return infinite();
        return at(a.value + b.value);
    }

    friend bool operator==(const Valuation& a, const Valuation& b) {
        if (a.finite != b.finite) return false;
        return !a.finite || a.value == b.value;
    }

    // +infinity compares greater than every finite valuation.
    friend bool operator<(const Valuation& a, const Valuation& b) {
        if (!a.finite) return false;
        if (!b.finite) return true;
        return a.value < b.value;
    }
    friend bool operator>(const Valuation& a, const Valuation& b) { return b < a; }
    friend bool operator<=(const Valuation& a, const Valuation& b) { return !(b < a); }
    friend bool operator>=(const Valuation& a, const Valuation& b) { return !(a < b); }

    std::string str() const { return finite ? std::to_string(value) : "+inf"; }
};

enum class Modality { arithmetic, geometric, exact };

struct ArchResult {
    bool archimedean = false;
    std::optional<cpp_int> witness;  // least n with n*x > y, when it exists
};

/// Truncated formal Laurent series in one infinitesimal generator eps.
/// Invariants: terms sorted by ascending order, no zero coefficients, all
/// coefficients of one kind, and the span of stored orders never exceeds the
/// relative window [val, val + truncation].
class LaurentNumber {
public:
    struct Term {
        std::int64_t order;
        Coefficient coeff;
    };

    explicit LaurentNumber(int trunc = default_truncation) : trunc_(check_trunc(trunc)) {}

    LaurentNumber(std::vector<Term> terms, int trunc, bool approx_kind = false)
        : terms_(std::move(terms)), trunc_(check_trunc(trunc)), approx_(approx_kind) {
        normalize();
    }

    static LaurentNumber zero(int trunc = default_truncation) { return LaurentNumber(trunc); }

    static LaurentNumber constant(Coefficient c, int trunc = default_truncation) {
        return LaurentNumber({{0, std::move(c)}}, trunc);
    }

    static LaurentNumber from_int(long long v, int trunc = default_truncation) {
        return constant(Coefficient::make_exact(v), trunc);
    }

    static LaurentNumber from_rational(cpp_rational q, int trunc = default_truncation) {
        return constant(Coefficient::make_exact(std::move(q)), trunc);
    }

    static LaurentNumber from_double(double v, int trunc = default_truncation) {
        return constant(Coefficient::make_approx(v), trunc);
    }

    static LaurentNumber one(int trunc = default_truncation) { return from_int(1, trunc); }

    static LaurentNumber monomial(Coefficient c, std::int64_t order, int trunc = default_truncation) {
        return LaurentNumber({{order, std::move(c)}}, trunc);
    }

    static LaurentNumber eps(int trunc = default_truncation) {
        return monomial(Coefficient::make_exact(1), 1, trunc);
    }

    /// omega = eps^-1, the canonical unlimited number.
    static LaurentNumber omega(int trunc = default_truncation) {
        return monomial(Coefficient::make_exact(1), -1, trunc);
    }

    const std::vector<Term>& terms() const { return terms_; }
    int truncation() const { return trunc_; }
    bool approx_kind() const { return approx_; }
    bool is_zero() const { return terms_.empty(); }

    Valuation val() const {
        return terms_.empty() ? Valuation::infinite() : Valuation::at(terms_.front().order);
    }

    bool is_limited() const { return terms_.empty() || terms_.front().order >= 0; }
    bool is_unlimited() const { return !is_limited(); }
    bool is_infinitesimal() const { return terms_.empty() || terms_.front().order >= 1; }
    bool is_appreciable() const { return is_limited() && !is_infinitesimal(); }

    LaurentNumber with_truncation(int trunc) const {
        return LaurentNumber(terms_, trunc, approx_);
    }

    Coefficient coeff_at(std::int64_t order) const {
        for (const Term& t : terms_)
            if (t.order == order) return t.coeff;
        return coeff_zero(!approx_);
    }

    LaurentNumber operator-() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const Term& t : terms_) out.push_back({t.order, -t.coeff});
        return LaurentNumber(std::move(out), trunc_, approx_);
    }

    friend LaurentNumber operator+(const LaurentNumber& a, const LaurentNumber& b) {
        std::vector<Term> out;
        out.reserve(a.terms_.size() + b.terms_.size());
        out.insert(out.end(), a.terms_.begin(), a.terms_.end());
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return LaurentNumber(std::move(out), std::min(a.trunc_, b.trunc_), a.approx_ || b.approx_);
    }

    friend LaurentNumber operator-(const LaurentNumber& a, const LaurentNumber& b) {
        return a + (-b);
    }

    friend LaurentNumber operator*(const LaurentNumber& a, const LaurentNumber& b) {
        std::vector<Term> out;
        out.reserve(a.terms_.size() * b.terms_.size());
        for (const Term& ta : a.terms_)
            for (const Term& tb : b.terms_)
                out.push_back({ta.order + tb.order, ta.coeff * tb.coeff});
        return LaurentNumber(std::move(out), std::min(a.trunc_, b.trunc_), a.approx_ || b.approx_);
    }

    /// Multiply every coefficient by a scalar without changing orders.
    LaurentNumber scaled(const Coefficient& c) const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const Term& t : terms_) out.push_back({t.order, t.coeff * c});
        return LaurentNumber(std::move(out), trunc_, approx_ || !c.exact());
    }

    /// Shift all orders by k (multiplication by eps^k).
    LaurentNumber shifted(std::int64_t k) const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const Term& t : terms_) out.push_back({t.order + k, t.coeff});
        return LaurentNumber(std::move(out), trunc_, approx_);
    }

    /// Inversion via the leading term: write x = lead*eps^v*(1+u) with u
    /// infinitesimal-order, then 1/(1+u) is the geometric series to the
    /// truncation depth.
    LaurentNumber reciprocal() const {
        if (terms_.empty()) raise(errc::division_by_zero, "reciprocal of zero");
        const std::int64_t v = terms_.front().order;
        const Coefficient lead = terms_.front().coeff;
        const Coefficient inv_lead = coeff_one() / lead;
        LaurentNumber u = shifted(-v).scaled(inv_lead) - one(trunc_);
        LaurentNumber minus_u = -u;
        LaurentNumber acc = one(trunc_);
        LaurentNumber pw = one(trunc_);
        for (int m = 1; m <= trunc_; ++m) {
            pw = pw * minus_u;
            if (pw.is_zero()) break;
            acc = acc + pw;
        }
        return acc.scaled(inv_lead).shifted(-v);
    }

    friend LaurentNumber operator/(const LaurentNumber& a, const LaurentNumber& b) {
        if (b.is_zero()) raise(errc::division_by_zero, "division by zero");
        if (a.is_zero()) return LaurentNumber(std::min(a.trunc_, b.trunc_));
        return a * b.reciprocal();
    }

    /// Integer power by repeated squaring; x^0 = 1, negative exponents invert.
    LaurentNumber pow(long long e) const {
        if (e == 0) return one(trunc_);
        if (e < 0) return reciprocal().pow(-e);
        LaurentNumber base = *this;
        LaurentNumber acc = one(trunc_);
        unsigned long long n = static_cast<unsigned long long>(e);
        while (n > 0) {
            if (n & 1ull) acc = acc * base;
            n >>= 1;
            if (n > 0) base = base * base;
        }
        return acc;
    }

    /// Sign in the non-Archimedean order: the sign of the leading coefficient
    /// (eps is positive, so the lowest order dominates).
    int sign() const { return terms_.empty() ? 0 : terms_.front().coeff.sign(); }

    /// Identical representation: same kind, same orders, bit-equal
    /// coefficients. This is the "exact" equality modality.
    bool identical(const LaurentNumber& o) const {
        if (approx_ != o.approx_ || terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (terms_[i].order != o.terms_[i].order) return false;
            if (!terms_[i].coeff.identical(o.terms_[i].coeff)) return false;
        }
        return true;
    }

private:
    Coefficient coeff_one() const {
        return approx_ ? Coefficient::make_approx(1.0) : Coefficient::make_exact(1);
    }

    static int check_trunc(int trunc) {
        if (trunc < 1) raise(errc::invalid_argument, "truncation depth must be at least 1");
        return trunc;
    }

    void normalize() {
        bool any_approx = approx_;
        for (const Term& t : terms_)
            if (!t.coeff.exact()) any_approx = true;
        if (any_approx) {
            approx_ = true;
            for (Term& t : terms_) t.coeff = t.coeff.demoted();
        }
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.order < b.order; });
        std::vector<Term> merged;
        merged.reserve(terms_.size());
        for (Term& t : terms_) {
            if (!merged.empty() && merged.back().order == t.order)
                merged.back().coeff = merged.back().coeff + t.coeff;
            else
                merged.push_back(std::move(t));
        }
        terms_.clear();
        for (Term& t : merged)
            if (!t.coeff.is_zero()) terms_.push_back(std::move(t));
        if (terms_.empty()) return;
        const std::int64_t vmin = terms_.front().order;
        const std::int64_t bound = max_order_bound();
        if (vmin < -bound || vmin > bound)
            raise(errc::truncation_underflow,
                  "leading order " + std::to_string(vmin) + " exceeds the order bound " +
                      std::to_string(bound));
        const std::int64_t vmax = vmin + trunc_;
        while (!terms_.empty() && terms_.back().order > vmax) terms_.pop_back();
    }

    std::vector<Term> terms_;
    int trunc_ = default_truncation;
    bool approx_ = false;
};

/// Order comparison in the non-Archimedean field: decided by the sign of the
/// leading coefficient of the difference.
inline std::strong_ordering compare(const LaurentNumber& a, const LaurentNumber& b) {
    const int s = (a - b).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

inline bool operator==(const LaurentNumber& a, const LaurentNumber& b) {
    return compare(a, b) == std::strong_ordering::equal;
}
inline bool operator!=(const LaurentNumber& a, const LaurentNumber& b) { return !(a == b); }
inline bool operator<(const LaurentNumber& a, const LaurentNumber& b) {
    return compare(a, b) == std::strong_ordering::less;
}
inline bool operator>(const LaurentNumber& a, const LaurentNumber& b) { return b < a; }
inline bool operator<=(const LaurentNumber& a, const LaurentNumber& b) { return !(b < a); }
inline bool operator>=(const LaurentNumber& a, const LaurentNumber& b) { return !(a < b); }

/// Standard part: the order-zero coefficient of a limited number.
inline Coefficient shadow(const LaurentNumber& x) {
    if (x.is_unlimited())
        raise(errc::unlimited_input, "shadow of an unlimited number (valuation " + x.val().str() + ")");
    return x.coeff_at(0);
}

/// Transcendental law of homogeneity: discard every term that is
/// infinitesimal relative to the leading one.
inline LaurentNumber tlh_truncate(const LaurentNumber& x) {
    if (x.is_zero()) raise(errc::zero_input, "tlh of zero has no leading term");
    const auto& lead = x.terms().front();
    return LaurentNumber::monomial(lead.coeff, lead.order, x.truncation());
}

/// Equality in one of the three historical modalities.
///  - arithmetic: difference is infinitesimal or zero
///  - geometric:  ratio has shadow one (and is limited)
///  - exact:      identical representation
inline bool eq_modal(const LaurentNumber& a, const LaurentNumber& b, Modality m) {
    switch (m) {
        case Modality::arithmetic: {
            const LaurentNumber d = a - b;
            return d.is_zero() || d.val() > Valuation::at(0);
        }
        case Modality::geometric: {
            if (b.is_zero())
                raise(errc::geometric_zero_denominator, "geometric equality against zero");
            const LaurentNumber q = a / b;
            if (q.is_unlimited()) return false;
            const Coefficient one_c =
                q.approx_kind() ? Coefficient::make_approx(1.0) : Coefficient::make_exact(1);
            return shadow(q).cmp(one_c) == std::strong_ordering::equal;
        }
        case Modality::exact:
            return a.identical(b);
    }
    return false;
}

/// Archimedean comparability test against Elements V Def. 4: does some
/// integer multiple of x exceed y? When it does, report the least witness.
inline ArchResult is_archimedean_pair(const LaurentNumber& x, const LaurentNumber& y) {
    if (x.sign() <= 0 || y.sign() <= 0)
        raise(errc::nonpositive_input, "archimedean test requires positive inputs");
    const std::int64_t vx = x.val().value, vy = y.val().value;
    if (vx > vy) return {false, std::nullopt};
    if (vx < vy) return {true, cpp_int(1)};
    const Coefficient a = x.terms().front().coeff;
    const Coefficient b = y.terms().front().coeff;
    cpp_int n0;
    if (a.exact() && b.exact()) {
        const cpp_rational r = b.rational() / a.rational();
        n0 = (numerator(r) + denominator(r) - 1) / denominator(r);
    } else {
        n0 = cpp_int(static_cast<long long>(std::ceil(b.to_double() / a.to_double())));
    }
    if (n0 < 1) n0 = 1;
    const Coefficient n0c = Coefficient::make_exact(cpp_rational(n0));
    if (compare(x.scaled(n0c), y) == std::strong_ordering::greater) return {true, n0};
    return {true, n0 + 1};
}

}  // namespace nonarch
