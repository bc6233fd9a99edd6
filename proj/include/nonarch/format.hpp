#pragma once

#include <string>

#include "nonarch/laurent.hpp"

namespace nonarch {

namespace detail {

inline std::string power_symbol(std::int64_t order) {
    if (order == 0) return "";
    if (order == 1) return "eps";
    if (order == -1) return "omega";
    if (order > 1) return "eps^" + std::to_string(order);
    return "omega^" + std::to_string(-order);
}

inline bool coeff_is_one_magnitude(const Coefficient& c) {
    if (c.exact()) {
        const cpp_rational& q = c.rational();
        return q == 1 || q == -1;
    }
    const double v = c.to_double();
    return v == 1.0 || v == -1.0;
}

inline std::string magnitude_str(const Coefficient& c) {
    return (c.sign() < 0 ? -c : c).str();
}

}  // namespace detail

/// Canonical rendering: terms in ascending order, explicit signs between
/// terms, unit coefficients elided next to a symbol. The output parses back
/// to the same value.
inline std::string format_laurent(const LaurentNumber& x) {
    if (x.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : x.terms()) {
        const bool neg = t.coeff.sign() < 0;
        const bool first_is_unary = first && neg;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        const std::string sym = detail::power_symbol(t.order);
        // A leading "-eps^2" would parse as (-eps)^2, since unary minus binds
        // tighter than '^'. Keep the explicit coefficient in that one case so
        // the sign attaches to the number instead of the powered symbol.
        const bool sign_meets_power =
            neg && first_is_unary && sym.find('^') != std::string::npos;
        if (sym.empty()) {
            out += detail::magnitude_str(t.coeff);
        } else if (detail::coeff_is_one_magnitude(t.coeff) && !sign_meets_power) {
            out += sym;
        } else {
            out += detail::magnitude_str(t.coeff) + "*" + sym;
        }
    }
    return out;
}

}  // namespace nonarch
