#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

#include "nonarch/errors.hpp"

namespace nonarch {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

/// Slack used when deciding whether an approximate coefficient is zero.
/// Absolute, not relative; exact coefficients use true equality.
inline constexpr double approx_zero_slack = 1e-12;

inline void check_finite(double v, const char* ctx) {
    if (!std::isfinite(v)) raise(errc::non_finite_result, std::string(ctx) + " produced a non-finite value");
}

/// Convert a (possibly huge) integer ratio to double without overflowing the
/// intermediate conversions: take the top 62 bits of each side and re-apply
/// the discarded power of two.
inline double ratio_to_double(const cpp_int& num, const cpp_int& den) {
    if (den.is_zero()) raise(errc::division_by_zero, "ratio_to_double with zero denominator");
    if (num.is_zero()) return 0.0;
    const bool neg = (num < 0) != (den < 0);
    cpp_int n = abs(num), d = abs(den);
    const long bn = static_cast<long>(boost::multiprecision::msb(n));
    const long bd = static_cast<long>(boost::multiprecision::msb(d));
    long sn = bn - 62, sd = bd - 62;
    if (sn < 0) sn = 0;
    if (sd < 0) sd = 0;
    const double hn = cpp_int(n >> sn).convert_to<double>();
    const double hd = cpp_int(d >> sd).convert_to<double>();
    double v = hn / hd * std::pow(2.0, static_cast<double>(sn - sd));
    if (std::isnan(v)) raise(errc::non_finite_result, "ratio_to_double");
    return neg ? -v : v;
}

inline double rational_to_double(const cpp_rational& q) {
    return ratio_to_double(numerator(q), denominator(q));
}

inline std::string rational_to_string(const cpp_rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

/// Shortest decimal that round-trips to the same double.
inline std::string double_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Scalar coefficient of one series term. Either exact (arbitrary-precision
/// rational) or approximate (double). Exact values never degrade silently:
/// the only way to obtain an approximate result from exact inputs is to mix
/// in an approximate operand or to apply a transcendental lift.
class Coefficient {
public:
    Coefficient() : exact_(true), rat_(0), dbl_(0.0) {}

    static Coefficient make_exact(cpp_rational q) {
        Coefficient c;
        c.exact_ = true;
        c.rat_ = std::move(q);
        return c;
    }

    static Coefficient make_exact(long long n) { return make_exact(cpp_rational(n)); }

    static Coefficient make_approx(double v) {
        check_finite(v, "coefficient");
        Coefficient c;
        c.exact_ = false;
        c.dbl_ = v;
        return c;
    }

    bool exact() const { return exact_; }

    const cpp_rational& rational() const {
        if (!exact_) raise(errc::invalid_argument, "approximate coefficient has no rational value");
        return rat_;
    }

    double to_double() const { return exact_ ? rational_to_double(rat_) : dbl_; }

    bool is_zero() const {
        return exact_ ? rat_.is_zero() : std::fabs(dbl_) < approx_zero_slack;
    }

    /// -1, 0 or +1; zero respects the approximate slack.
    int sign() const {
        if (is_zero()) return 0;
        if (exact_) return rat_ < 0 ? -1 : 1;
        return dbl_ < 0 ? -1 : 1;
    }

    Coefficient operator-() const {
        return exact_ ? make_exact(cpp_rational(-rat_)) : make_approx(-dbl_);
    }

    friend Coefficient operator+(const Coefficient& a, const Coefficient& b) {
        if (a.exact_ && b.exact_) return make_exact(cpp_rational(a.rat_ + b.rat_));
        return make_approx(a.to_double() + b.to_double());
    }

    friend Coefficient operator-(const Coefficient& a, const Coefficient& b) {
        if (a.exact_ && b.exact_) return make_exact(cpp_rational(a.rat_ - b.rat_));
        return make_approx(a.to_double() - b.to_double());
    }

    friend Coefficient operator*(const Coefficient& a, const Coefficient& b) {
        if (a.exact_ && b.exact_) return make_exact(cpp_rational(a.rat_ * b.rat_));
        return make_approx(a.to_double() * b.to_double());
    }

    friend Coefficient operator/(const Coefficient& a, const Coefficient& b) {
        if (b.is_zero()) raise(errc::division_by_zero, "coefficient division by zero");
        if (a.exact_ && b.exact_) return make_exact(cpp_rational(a.rat_ / b.rat_));
        return make_approx(a.to_double() / b.to_double());
    }

    /// Identical representation: same kind and bit-for-bit equal value.
    /// This is the "exact" modality; ordinary comparisons go through cmp().
    bool identical(const Coefficient& o) const {
        if (exact_ != o.exact_) return false;
        return exact_ ? rat_ == o.rat_ : dbl_ == o.dbl_;
    }

    /// Three-way comparison with slack-aware zero handling: the difference is
    /// formed first, so two approximate values within the slack compare equal.
    std::strong_ordering cmp(const Coefficient& o) const {
        const int s = (*this - o).sign();
        if (s < 0) return std::strong_ordering::less;
        if (s > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// Demote to approximate kind (used when a sibling term is approximate).
    Coefficient demoted() const { return exact_ ? make_approx(to_double()) : *this; }

    std::string str() const { return exact_ ? rational_to_string(rat_) : double_to_string(dbl_); }

private:
    bool exact_;
    cpp_rational rat_;
    double dbl_ = 0.0;
};

inline Coefficient coeff_zero(bool exact) {
    return exact ? Coefficient::make_exact(0) : Coefficient::make_approx(0.0);
}

}  // namespace nonarch
