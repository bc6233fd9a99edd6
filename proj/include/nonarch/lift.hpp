#pragma once

#include <cmath>
#include <vector>

#include "nonarch/laurent.hpp"

namespace nonarch {

enum class SmoothFn { exp_fn, log_fn, sin_fn, cos_fn, pow_fn };

inline const char* smooth_fn_name(SmoothFn f) {
    switch (f) {
        case SmoothFn::exp_fn: return "exp";
        case SmoothFn::log_fn: return "log";
        case SmoothFn::sin_fn: return "sin";
        case SmoothFn::cos_fn: return "cos";
        case SmoothFn::pow_fn: return "pow";
    }
    return "?";
}

namespace detail {

// Horner evaluation of sum c_n * delta^n in the truncated field.
inline LaurentNumber taylor_eval(const std::vector<Coefficient>& c, const LaurentNumber& delta) {
    const int T = delta.truncation();
    LaurentNumber acc = LaurentNumber::constant(c.back(), T);
    for (int n = static_cast<int>(c.size()) - 2; n >= 0; --n)
        acc = acc * delta + LaurentNumber::constant(c[n], T);
    return acc;
}

struct LiftParts {
    Coefficient x0;
    LaurentNumber delta;
    bool exact;  // true when the whole computation can stay rational
};

inline LiftParts split_at_shadow(const LaurentNumber& x, SmoothFn f) {
    if (x.is_unlimited())
        raise(errc::unlimited_input, std::string(smooth_fn_name(f)) + " of an unlimited number");
    LiftParts p;
    p.x0 = shadow(x);
    p.delta = x - LaurentNumber::constant(p.x0, x.truncation());
    p.exact = !x.approx_kind();
    return p;
}

}  // namespace detail

/// exp lifted through its Taylor expansion at the shadow. Exact when the
/// shadow is zero and the input is exact; approximate otherwise.
inline LaurentNumber lift_exp(const LaurentNumber& x) {
    auto p = detail::split_at_shadow(x, SmoothFn::exp_fn);
    const int T = x.truncation();
    std::vector<Coefficient> c;
    c.reserve(T + 1);
    if (p.exact && p.x0.is_zero()) {
        cpp_rational term = 1;
        for (int n = 0; n <= T; ++n) {
            c.push_back(Coefficient::make_exact(term));
            term /= (n + 1);
        }
    } else {
        double term = std::exp(p.x0.to_double());
        check_finite(term, "exp");
        for (int n = 0; n <= T; ++n) {
            c.push_back(Coefficient::make_approx(term));
            term /= (n + 1);
        }
    }
    return detail::taylor_eval(c, p.delta);
}

/// log lifted at the shadow; requires shadow > 0. Exact when the shadow is
/// exactly one (Mercator series).
inline LaurentNumber lift_log(const LaurentNumber& x) {
    auto p = detail::split_at_shadow(x, SmoothFn::log_fn);
    if (p.x0.sign() <= 0)
        raise(errc::domain_error, "log requires a positive standard part");
    const int T = x.truncation();
    std::vector<Coefficient> c;
    c.reserve(T + 1);
    if (p.exact && p.x0.rational() == 1) {
        c.push_back(Coefficient::make_exact(0));
        for (int n = 1; n <= T; ++n) {
            cpp_rational term(n % 2 == 1 ? 1 : -1, n);
            c.push_back(Coefficient::make_exact(term));
        }
    } else {
        const double x0 = p.x0.to_double();
        c.push_back(Coefficient::make_approx(std::log(x0)));
        double pw = 1.0;
        for (int n = 1; n <= T; ++n) {
            pw /= x0;
            c.push_back(Coefficient::make_approx((n % 2 == 1 ? 1.0 : -1.0) * pw / n));
        }
    }
    return detail::taylor_eval(c, p.delta);
}

namespace detail {

inline LaurentNumber lift_circular(const LaurentNumber& x, bool is_sin) {
    auto p = split_at_shadow(x, is_sin ? SmoothFn::sin_fn : SmoothFn::cos_fn);
    const int T = x.truncation();
    std::vector<Coefficient> c;
    c.reserve(T + 1);
    if (p.exact && p.x0.is_zero()) {
        // Maclaurin coefficients: sin keeps odd orders, cos keeps even ones.
        cpp_rational fact = 1;
        for (int n = 0; n <= T; ++n) {
            if (n > 0) fact *= n;
            const bool keep = is_sin ? (n % 2 == 1) : (n % 2 == 0);
            if (!keep) {
                c.push_back(Coefficient::make_exact(0));
                continue;
            }
            const int sgn = (n / 2) % 2 == 0 ? 1 : -1;
            c.push_back(Coefficient::make_exact(cpp_rational(sgn) / fact));
        }
    } else {
        const double x0 = p.x0.to_double();
        double s = std::sin(x0), co = std::cos(x0);
        double inv_fact = 1.0;
        for (int n = 0; n <= T; ++n) {
            if (n > 0) inv_fact /= n;
            // n-th derivative of sin at x0 cycles through (s, co, -s, -co).
            double deriv;
            switch (n % 4) {
                case 0: deriv = s; break;
                case 1: deriv = co; break;
                case 2: deriv = -s; break;
                default: deriv = -co; break;
            }
            if (!is_sin) {
                // cos is the derivative of sin, so shift the cycle by one.
                switch (n % 4) {
                    case 0: deriv = co; break;
                    case 1: deriv = -s; break;
                    case 2: deriv = -co; break;
                    default: deriv = s; break;
                }
            }
            c.push_back(Coefficient::make_approx(deriv * inv_fact));
        }
    }
    return taylor_eval(c, p.delta);
}

}  // namespace detail

inline LaurentNumber lift_sin(const LaurentNumber& x) { return detail::lift_circular(x, true); }
inline LaurentNumber lift_cos(const LaurentNumber& x) { return detail::lift_circular(x, false); }

/// Real-exponent power via the binomial series at the shadow; requires
/// shadow > 0. Exact when the shadow is exactly one and the exponent is
/// rational.
inline LaurentNumber lift_pow(const LaurentNumber& x, const cpp_rational& r) {
    auto p = detail::split_at_shadow(x, SmoothFn::pow_fn);
    if (p.x0.sign() <= 0)
        raise(errc::domain_error, "pow requires a positive standard part");
    const int T = x.truncation();
    std::vector<Coefficient> c;
    c.reserve(T + 1);
    if (p.exact && p.x0.rational() == 1) {
        cpp_rational binom = 1;
        for (int n = 0; n <= T; ++n) {
            c.push_back(Coefficient::make_exact(binom));
            binom *= (r - n);
            binom /= (n + 1);
        }
    } else {
        const double x0 = p.x0.to_double();
        const double rd = rational_to_double(r);
        double binom = 1.0;
        for (int n = 0; n <= T; ++n) {
            const double scale = std::pow(x0, rd - n);
            check_finite(scale, "pow");
            c.push_back(Coefficient::make_approx(binom * scale));
            binom *= (rd - n) / (n + 1);
        }
    }
    return detail::taylor_eval(c, p.delta);
}

inline LaurentNumber lift_smooth(SmoothFn f, const LaurentNumber& x) {
    switch (f) {
        case SmoothFn::exp_fn: return lift_exp(x);
        case SmoothFn::log_fn: return lift_log(x);
        case SmoothFn::sin_fn: return lift_sin(x);
        case SmoothFn::cos_fn: return lift_cos(x);
        case SmoothFn::pow_fn:
            raise(errc::invalid_argument, "pow lift needs an exponent argument");
    }
    raise(errc::invalid_argument, "unknown smooth function");
}

inline LaurentNumber lift_smooth(SmoothFn f, const LaurentNumber& x, const cpp_rational& exponent) {
    if (f != SmoothFn::pow_fn)
        raise(errc::invalid_argument, "exponent argument is only valid for pow");
    return lift_pow(x, exponent);
}

}  // namespace nonarch
