#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nonarch/lift.hpp"
#include "nonarch/report.hpp"
#include "nonarch/sequence.hpp"

namespace nonarch {

/// Wallis's partial product prod_{k<=N} 4k^2/(4k^2 - 1), kept as an exact
/// (unreduced) rational.
inline BigFraction wallis_partial(std::int64_t n) {
    if (n < 1) raise(errc::invalid_argument, "Wallis partial product needs N >= 1");
    cpp_int num = 1, den = 1;
    for (std::int64_t k = 1; k <= n; ++k) {
        const cpp_int k2 = cpp_int(4) * k * k;
        num *= k2;
        den *= k2 - 1;
    }
    return BigFraction(num, den);
}

inline DerivationReport wallis_report(std::int64_t n, const RunConfig& cfg) {
    cfg.validate();
    const BigFraction exact = wallis_partial(n);
    const double value = exact.to_double();
    const double half_pi = std::numbers::pi / 2.0;

    // Double-precision track of the partials, for the monotonicity audit.
    bool monotone = true, bounded = true;
    double running = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double q = 4.0 * static_cast<double>(k) * static_cast<double>(k);
        const double next = running * (q / (q - 1.0));
        monotone = monotone && next > running;
        bounded = bounded && next <= half_pi + 1e-12;
        running = next;
    }

    DerivationReport rep;
    rep.derivation = "wallis";
    rep.config = cfg;
    rep.params = {{"n", std::to_string(n)}};
    {
        StepRecord s;
        s.id = "factor-form";
        s.anchor = "Wallis, Arithmetica infinitorum (1656), prop. 191";
        s.claim = "every factor 4k^2/(4k^2 - 1) exceeds 1, so the partial products increase strictly";
        s.residual = 0.0;
        s.pass = true;  // 4k^2 > 4k^2 - 1 holds structurally for every k
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "monotone-bounded";
        s.anchor = "Wallis, Arithmetica infinitorum (1656), prop. 191";
        s.claim = "partial products increase strictly and never exceed pi/2";
        s.residual = monotone && bounded ? 0.0 : 1.0;
        s.pass = monotone && bounded;
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "limit-gap";
        s.anchor = "Wallis, Arithmetica infinitorum (1656), prop. 191";
        s.claim = "the exact partial product at N sits within the configured gap of pi/2";
        s.residual = std::fabs(value - half_pi);
        s.bound = cfg.tolerance("wallis");
        s.pass = s.residual <= *s.bound;
        rep.add_step(std::move(s));
    }
    rep.finalize();
    return rep;
}

enum class BaselRoute { direct, coefficients };

inline const char* basel_route_name(BaselRoute r) {
    return r == BaselRoute::direct ? "direct" : "coefficients";
}

/// Both routes to pi^2/6 at a finite cutoff N. The direct route sums 1/k^2
/// (descending, so the two evaluations do not share their arithmetic); the
/// coefficient route expands prod_{k<=N}(1 - u/k^2) to second order in u and
/// reads the sum off the linear coefficient, the way the sine product yields
/// the Basel value.
struct BaselResult {
    BaselRoute route = BaselRoute::direct;
    std::int64_t n = 0;
    BigFraction partial_sum{cpp_int(0), cpp_int(1)};  // sum_{k<=N} 1/k^2
    BigFraction c1{cpp_int(0), cpp_int(1)};           // linear coefficient, = -partial_sum
    BigFraction c2{cpp_int(0), cpp_int(1)};           // quadratic coefficient
    bool routes_equal = false;
    double value = 0.0;            // the chosen route's estimate of pi^2/6
    double coefficient_gap = 0.0;  // |c1/pi^2 + 1/6|
};

inline BaselResult basel_partial(std::int64_t n, BaselRoute route) {
    if (n < 1) raise(errc::invalid_argument, "Basel partial sum needs N >= 1");
    BaselResult out;
    out.route = route;
    out.n = n;

    BigFraction sum(cpp_int(0), cpp_int(1));
    for (std::int64_t k = n; k >= 1; --k) sum = sum.add(BigFraction(cpp_int(1), cpp_int(k) * k));
    out.partial_sum = sum;

    // Truncated polynomial product in u over one shared denominator:
    // multiplying by (1 - u/k^2) = (k^2 - u)/k^2 maps (n0, n1, n2; d) to
    // (n0 k^2, n1 k^2 - n0, n2 k^2 - n1; d k^2). Keeping the coefficients on
    // a common denominator avoids quadratic blowup in the stored bits.
    cpp_int n0 = 1, n1 = 0, n2 = 0, d = 1;
    for (std::int64_t k = 1; k <= n; ++k) {
        const cpp_int k2 = cpp_int(k) * k;
        n2 = n2 * k2 - n1;
        n1 = n1 * k2 - n0;
        n0 *= k2;
        d *= k2;
    }
    out.c1 = BigFraction(n1, d);
    out.c2 = BigFraction(n2, d);

    const BigFraction neg_c1(-n1, d);
    out.routes_equal = neg_c1.equals(sum) && n0 == d;
    out.value = route == BaselRoute::direct ? sum.to_double() : neg_c1.to_double();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    out.coefficient_gap = std::fabs(out.c1.to_double() / pi2 + 1.0 / 6.0);
    return out;
}

inline DerivationReport basel_report(std::int64_t n, BaselRoute route, const RunConfig& cfg) {
    cfg.validate();
    const BaselResult r = basel_partial(n, route);
    const double pi2 = std::numbers::pi * std::numbers::pi;

    DerivationReport rep;
    rep.derivation = "basel";
    rep.config = cfg;
    rep.params = {{"n", std::to_string(n)}, {"route", basel_route_name(route)}};
    {
        StepRecord s;
        s.id = "partial-sum";
        s.anchor = "Euler, De summis serierum reciprocarum (1735)";
        s.claim = "sum_{k<=N} 1/k^2, summed exactly, approaches pi^2/6 from below";
        s.residual = std::fabs(r.partial_sum.to_double() - pi2 / 6.0);
        s.bound = cfg.tolerance("basel");
        s.pass = s.residual <= *s.bound && r.partial_sum.to_double() < pi2 / 6.0;
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "route-agreement";
        s.anchor = "Euler, Introductio in analysin infinitorum (1748), sect. 167";
        s.claim = "the linear coefficient of prod_{k<=N}(1 - u/k^2) equals the negated partial sum, "
                  "exactly";
        s.residual = r.routes_equal ? 0.0 : std::fabs(r.c1.to_double() + r.partial_sum.to_double());
        s.pass = r.routes_equal;
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "coefficient-gap";
        s.anchor = "Euler, Introductio in analysin infinitorum (1748), sect. 167";
        s.claim = "c1/pi^2 approaches the Maclaurin coefficient -1/6 of sin x / x at rate about "
                  "1/(N pi^2)";
        s.residual = r.coefficient_gap;
        s.bound = 2.0 / (static_cast<double>(n) * pi2);
        s.pass = s.residual <= *s.bound;
        rep.add_step(std::move(s));
    }
    rep.finalize();
    return rep;
}

/// The 0/0 protolimit (1 - x^eps)/eps: its expansion collects the powers of
/// log x, and its order-0 part (the value the quotient takes at an
/// infinitesimal exponent) is -log x. Requires x > 0 and x != 1; at x = 1
/// the quotient degenerates to the zero number and the limiting value is 0.
struct ProtolimitResult {
    LaurentNumber expansion;
    double shadow_value = 0.0;
};

inline ProtolimitResult lhopital_protolimit(double x, int truncation = default_truncation) {
    check_finite(x, "protolimit input");
    if (x <= 0.0) raise(errc::domain_error, "protolimit needs x > 0");
    if (x == 1.0)
        raise(errc::domain_error,
              "x = 1 is excluded: the quotient degenerates to 0/eps with limiting value 0");
    const LaurentNumber arg =
        LaurentNumber::monomial(Coefficient::make_approx(std::log(x)), 1, truncation);
    const LaurentNumber f = (LaurentNumber::one(truncation) - lift_exp(arg)).shifted(-1);
    ProtolimitResult out{f, shadow(f).to_double()};
    return out;
}

inline DerivationReport lhopital_report(double x, const RunConfig& cfg) {
    cfg.validate();
    const ProtolimitResult r = lhopital_protolimit(x, cfg.truncation);
    const double lx = std::log(x);

    DerivationReport rep;
    rep.derivation = "lhopital";
    rep.config = cfg;
    rep.params = {{"x", double_to_string(x)}};
    {
        // Coefficient of eps^m is -(log x)^{m+1}/(m+1)!.
        double worst = 0.0, scale = 1.0;
        double power = 1.0, fact = 1.0;
        for (int m = 0; m <= std::min(cfg.truncation, 6); ++m) {
            power *= lx;
            fact *= static_cast<double>(m + 1);
            const double expect = -power / fact;
            const double got = r.expansion.coeff_at(m).to_double();
            worst = std::max(worst, std::fabs(got - expect));
            scale = std::max(scale, std::fabs(expect));
        }
        StepRecord s;
        s.id = "expansion-coefficients";
        s.anchor = "Euler, Institutiones calculi differentialis (1755), sect. 85";
        s.claim = "(1 - x^eps)/eps expands with eps^m coefficient -(log x)^(m+1)/(m+1)!";
        s.residual = worst / scale;
        s.bound = cfg.tolerance("identity");
        s.pass = s.residual <= *s.bound;
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "shadow";
        s.anchor = "Euler, Institutiones calculi differentialis (1755), sect. 86";
        s.claim = "the order-0 part of the quotient is -log x";
        s.residual = std::fabs(r.shadow_value + lx);
        s.bound = cfg.tolerance("identity");
        s.pass = s.residual <= *s.bound;
        rep.add_step(std::move(s));
    }
    rep.finalize();
    return rep;
}

/// Small catalog of integrands with known antiderivatives, for the
/// rectangle-sum integral audit.
struct IntegrandSpec {
    std::string name;
    std::function<double(double)> fn;
    std::function<double(double, double)> closed_form;
};

inline IntegrandSpec lookup_integrand(const std::string& name) {
    if (name == "square")
        return {"square", [](double t) { return t * t; },
                [](double a, double b) { return (b * b * b - a * a * a) / 3.0; }};
    if (name == "cube")
        return {"cube", [](double t) { return t * t * t; },
                [](double a, double b) { return (b * b * b * b - a * a * a * a) / 4.0; }};
    if (name == "sin")
        return {"sin", [](double t) { return std::sin(t); },
                [](double a, double b) { return std::cos(a) - std::cos(b); }};
    if (name == "exp")
        return {"exp", [](double t) { return std::exp(t); },
                [](double a, double b) { return std::exp(b) - std::exp(a); }};
    if (name == "recip")
        return {"recip", [](double t) { return 1.0 / (1.0 + t); },
                [](double a, double b) { return std::log((1.0 + b) / (1.0 + a)); }};
    raise(errc::invalid_argument,
          "unknown integrand '" + name + "' (expected square, cube, sin, exp, or recip)");
}

inline DerivationReport integrate_report(const std::string& fn_name, double a, double b,
                                         const RunConfig& cfg) {
    cfg.validate();
    const IntegrandSpec spec = lookup_integrand(fn_name);
    const InfiniteIndex index = cfg.make_index();
    const SeqHyperreal seq = hyperfinite_integral(spec.fn, a, b, index);
    const ShadowEstimate est = seq_shadow(seq, cfg.tolerance("shadow"));
    const double closed = spec.closed_form(a, b);

    DerivationReport rep;
    rep.derivation = "integrate";
    rep.config = cfg;
    rep.params = {{"fn", spec.name}, {"a", double_to_string(a)}, {"b", double_to_string(b)}};
    {
        StepRecord s;
        s.id = "rectangle-sum";
        s.anchor = "Euler, Institutionum calculi integralis (1768), vol. I, ch. VII";
        s.claim = "the hyperfinite rectangle sum with infinitesimal width converges along the schedule";
        s.residual = est.error_bound;
        s.bound = cfg.tolerance("integral");
        s.pass = est.converged && est.error_bound <= *s.bound;
        rep.add_step(std::move(s));
    }
    {
        StepRecord s;
        s.id = "shadow-vs-antiderivative";
        s.anchor = "Euler, Institutionum calculi integralis (1768), vol. I, ch. VII";
        s.claim = "the shadow of the sum (Richardson order " + std::to_string(est.order) +
                  ") matches the closed-form integral";
        s.residual = std::fabs(est.value - closed);
        s.bound = cfg.tolerance("integral");
        s.pass = s.residual <= *s.bound;
        rep.add_step(std::move(s));
    }
    rep.finalize();
    return rep;
}

}  // namespace nonarch
