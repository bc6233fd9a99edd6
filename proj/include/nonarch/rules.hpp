#pragma once

#include <cmath>
#include <regex>
#include <string>

#include "nonarch/sequence.hpp"

namespace nonarch {

inline TermRule make_harmonic() {
    return {"harmonic", [](std::int64_t k, std::int64_t) { return 1.0 / static_cast<double>(k); },
            [](std::int64_t k, std::int64_t) { return cpp_rational(1, k); }, 0};
}

inline TermRule make_inverse_square() {
    return {"inverse-square",
            [](std::int64_t k, std::int64_t) {
                const double kd = static_cast<double>(k);
                return 1.0 / (kd * kd);
            },
            [](std::int64_t k, std::int64_t) { return cpp_rational(1, cpp_int(k) * k); }, 0};
}

inline TermRule make_geometric() {
    return {"geometric", [](std::int64_t k, std::int64_t) { return std::ldexp(1.0, static_cast<int>(-k)); },
            [](std::int64_t k, std::int64_t) {
                return cpp_rational(1, cpp_int(1) << static_cast<unsigned>(k));
            },
            // 2^-k is below double precision long before this.
            1100};
}

/// Wallis factor (2k/(2k-1)) * (2k/(2k+1)) = 4k^2/(4k^2-1).
inline TermRule make_wallis_pair() {
    return {"wallis-pair",
            [](std::int64_t k, std::int64_t) {
                const double q = 4.0 * static_cast<double>(k) * static_cast<double>(k);
                return q / (q - 1.0);
            },
            [](std::int64_t k, std::int64_t) {
                const cpp_int q = cpp_int(4) * k * k;
                return cpp_rational(q, q - 1);
            },
            0};
}

/// Factor of the sine product: 1 - x^2/(k^2 pi^2).
inline TermRule make_sine_factor(double x) {
    const double x2 = x * x;
    return {"sine-factor",
            [x2](std::int64_t k, std::int64_t) {
                const double kp = static_cast<double>(k) * std::acos(-1.0);
                return 1.0 - x2 / (kp * kp);
            },
            nullptr, 0};
}

/// Constant rule x/N: every partial sum over the full range equals x exactly.
inline TermRule make_uniform(const cpp_rational& x) {
    const double xd = rational_to_double(x);
    return {"uniform", [xd](std::int64_t, std::int64_t n) { return xd / static_cast<double>(n); },
            [x](std::int64_t, std::int64_t n) { return x / n; }, 0};
}

inline TermRule make_inverse_square_perturbed() {
    return {"inverse-square-perturbed",
            [](std::int64_t k, std::int64_t n) {
                const double kd = static_cast<double>(k);
                return 1.0 / (kd * kd) + 1.0 / (kd * kd * static_cast<double>(n));
            },
            [](std::int64_t k, std::int64_t n) {
                const cpp_int k2 = cpp_int(k) * k;
                return cpp_rational(1, k2) + cpp_rational(1, k2 * n);
            },
            0};
}

/// Binomial expansion term C(N,k)/N^k * z^k, evaluated through the stable
/// prefix product z^k/k! * prod_{j<k} (1 - j/N). Terms die factorially, so
/// the cap keeps hyperfinite sums linear in the cap rather than in N.
inline TermRule make_binomial_exp(double z) {
    return {"binomial-exp",
            [z](std::int64_t k, std::int64_t n) {
                double acc = 1.0;
                const double nd = static_cast<double>(n);
                for (std::int64_t j = 1; j <= k; ++j)
                    acc *= z * (1.0 - static_cast<double>(j - 1) / nd) / static_cast<double>(j);
                return acc;
            },
            nullptr, 600};
}

/// Exponential series term z^k/k!.
inline TermRule make_exp_terms(double z) {
    return {"exp-terms",
            [z](std::int64_t k, std::int64_t) {
                double acc = 1.0;
                for (std::int64_t j = 1; j <= k; ++j) acc *= z / static_cast<double>(j);
                return acc;
            },
            nullptr, 600};
}

namespace detail {

// Numeric literal in rule syntax: decimal or p/q.
inline bool parse_rule_number(const std::string& s, cpp_rational& out) {
    static const std::regex frac(R"(^([+-]?[0-9]+)/([0-9]+)$)");
    static const std::regex dec(R"(^([+-]?)([0-9]+)(?:\.([0-9]+))?$)");
    std::smatch m;
    if (std::regex_match(s, m, frac)) {
        const cpp_int den(m[2].str());
        if (den.is_zero()) return false;
        out = cpp_rational(cpp_int(m[1].str()), den);
        return true;
    }
    if (std::regex_match(s, m, dec)) {
        cpp_int num(m[2].str());
        cpp_int den = 1;
        if (m[3].matched) {
            for (char c : m[3].str()) {
                num = num * 10 + (c - '0');
                den *= 10;
            }
        }
        out = cpp_rational(num, den);
        if (m[1].str() == "-") out = -out;
        return true;
    }
    return false;
}

}  // namespace detail

/// Inline rate rule "c1*k^a/(c2*N^b)" with rational or decimal constants and
/// real exponents. Integer exponents with rational constants keep an exact
/// form.
inline TermRule parse_inline_rule(const std::string& text) {
    static const std::regex shape(
        R"(^\s*([^*\s]+)\s*\*\s*k\^([-+]?[0-9]+(?:\.[0-9]+)?)\s*/\s*\(\s*([^*\s]+)\s*\*\s*N\^([-+]?[0-9]+(?:\.[0-9]+)?)\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, shape))
        raise(errc::invalid_argument,
              "inline rule must have the shape c1*k^a/(c2*N^b), got '" + text + "'");
    cpp_rational c1, c2;
    if (!detail::parse_rule_number(m[1].str(), c1) || !detail::parse_rule_number(m[3].str(), c2))
        raise(errc::invalid_argument, "bad constant in inline rule '" + text + "'");
    if (c2.is_zero() || c1.is_zero())
        raise(errc::invalid_argument, "inline rule constants must be nonzero");
    const std::string astr = m[2].str(), bstr = m[4].str();
    const double a = std::stod(astr), b = std::stod(bstr);
    const double c1d = rational_to_double(c1), c2d = rational_to_double(c2);
    TermRule rule;
    rule.name = text;
    rule.approx = [c1d, c2d, a, b](std::int64_t k, std::int64_t n) {
        return c1d * std::pow(static_cast<double>(k), a) /
               (c2d * std::pow(static_cast<double>(n), b));
    };
    const bool int_exps = astr.find('.') == std::string::npos && bstr.find('.') == std::string::npos;
    if (int_exps) {
        const long long ai = std::stoll(astr), bi = std::stoll(bstr);
        if (std::llabs(ai) <= 32 && std::llabs(bi) <= 32) {
            rule.exact = [c1, c2, ai, bi](std::int64_t k, std::int64_t n) {
                auto ipow = [](std::int64_t v, long long e) {
                    cpp_rational r = 1;
                    for (long long i = 0; i < std::llabs(e); ++i) r *= v;
                    return e >= 0 ? r : 1 / r;
                };
                return c1 * ipow(k, ai) / (c2 * ipow(n, bi));
            };
        }
    }
    return rule;
}

/// Named catalog lookup used by the command line. `x` feeds the rules with a
/// free parameter (the sine-factor point, or z for the exponential pair).
inline TermRule lookup_rule(const std::string& name, double x = 0.0) {
    if (name == "harmonic") return make_harmonic();
    if (name == "inverse-square") return make_inverse_square();
    if (name == "inverse-square-perturbed") return make_inverse_square_perturbed();
    if (name == "geometric") return make_geometric();
    if (name == "wallis-pair") return make_wallis_pair();
    if (name == "sine-factor") return make_sine_factor(x);
    if (name == "binomial-exp") return make_binomial_exp(x);
    if (name == "exp-terms") return make_exp_terms(x);
    if (name.find('k') != std::string::npos) return parse_inline_rule(name);
    raise(errc::invalid_argument, "unknown rule '" + name + "'");
}

}  // namespace nonarch
