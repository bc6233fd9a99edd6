#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nonarch/coefficient.hpp"
#include "nonarch/errors.hpp"
#include "nonarch/schedule.hpp"

namespace nonarch {

/// Unreduced big rational. Accumulating 10^4-factor products with a gcd per
/// operation is quadratic in practice, so numerator and denominator are kept
/// as raw integers; equality goes through cross-multiplication and doubles
/// come from top-bits scaling.
struct BigFraction {
    cpp_int num = 0;
    cpp_int den = 1;

    BigFraction() = default;
    BigFraction(cpp_int n, cpp_int d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero()) raise(errc::division_by_zero, "fraction with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
    }

    static BigFraction from_rational(const cpp_rational& q) {
        return BigFraction(numerator(q), denominator(q));
    }

    static BigFraction integer(long long v) { return BigFraction(cpp_int(v), cpp_int(1)); }

    BigFraction add(const BigFraction& o) const {
        if (den == o.den) return BigFraction(num + o.num, den);
        return BigFraction(num * o.den + o.num * den, den * o.den);
    }
    BigFraction sub(const BigFraction& o) const {
        if (den == o.den) return BigFraction(num - o.num, den);
        return BigFraction(num * o.den - o.num * den, den * o.den);
    }
    BigFraction mul(const BigFraction& o) const { return BigFraction(num * o.num, den * o.den); }
    BigFraction div(const BigFraction& o) const {
        if (o.num.is_zero()) raise(errc::division_by_zero, "fraction division by zero");
        return BigFraction(num * o.den, den * o.num);
    }

    bool is_zero() const { return num.is_zero(); }

    bool equals(const BigFraction& o) const { return num * o.den == o.num * den; }
    bool equals(const cpp_rational& q) const {
        return num * denominator(q) == numerator(q) * den;
    }

    double to_double() const { return ratio_to_double(num, den); }

    /// Reduced form; costs a gcd, so reserve it for small values.
    cpp_rational to_rational() const { return cpp_rational(num, den); }

    std::size_t bit_size() const {
        std::size_t b = 0;
        if (!num.is_zero()) b += boost::multiprecision::msb(abs(num)) + 1;
        b += boost::multiprecision::msb(den) + 1;
        return b;
    }
};

/// Term rule a(k, N): the elementary expression generating a hyperfinite sum
/// or product. The exact hook is optional; transcendental rules only carry
/// the double form. term_cap > 0 marks rules whose tail vanishes below
/// double precision by that index (factorial decay), letting the double
/// accumulation stop early without changing any digit of the result.
struct TermRule {
    std::string name;
    std::function<double(std::int64_t k, std::int64_t n)> approx;
    std::function<cpp_rational(std::int64_t k, std::int64_t n)> exact;
    std::int64_t term_cap = 0;
};

using RangeFn = std::function<std::int64_t(std::int64_t)>;

inline RangeFn full_range() {
    return [](std::int64_t n) { return n; };
}
inline RangeFn half_range() {
    return [](std::int64_t n) { return n / 2; };
}

/// One hyperfinite value: the aggregate evaluated at every schedule point,
/// as a double and (while affordable) as an exact fraction.
class SeqHyperreal {
public:
    struct Entry {
        double approx = 0.0;
        std::optional<BigFraction> exact;
    };

    SeqHyperreal(InfiniteIndex index, std::vector<Entry> entries, std::string label)
        : index_(std::move(index)), entries_(std::move(entries)), label_(std::move(label)) {}

    const InfiniteIndex& index() const { return index_; }
    const std::string& label() const { return label_; }
    const std::vector<Entry>& entries() const { return entries_; }

    std::vector<double> approx_values() const {
        std::vector<double> v;
        v.reserve(entries_.size());
        for (const auto& e : entries_) v.push_back(e.approx);
        return v;
    }

    const Entry& at(int j) const { return entries_.at(static_cast<std::size_t>(j)); }
    const Entry& last() const { return entries_.back(); }

private:
    InfiniteIndex index_;
    std::vector<Entry> entries_;
    std::string label_;
};

namespace detail {

/// Exact tracking stops once the running fraction outgrows this many bits;
/// later (larger) schedule points then carry doubles only.
inline constexpr std::size_t default_exact_bit_budget = std::size_t(1) << 21;

inline void check_range(std::int64_t r, std::int64_t n) {
    if (r < 0) raise(errc::invalid_argument, "range bound must be nonnegative");
    if (r > 8 * n)
        raise(errc::invalid_argument, "range bound exceeds 8N at N=" + std::to_string(n));
}

inline double checked_term(const TermRule& rule, std::int64_t k, std::int64_t n) {
    double t;
    try {
        t = rule.approx(k, n);
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        raise(errc::evaluation_error, "term rule '" + rule.name + "' failed at k=" +
                                          std::to_string(k) + ", N=" + std::to_string(n) + ": " + e.what());
    }
    if (!std::isfinite(t))
        raise(errc::evaluation_error, "term rule '" + rule.name + "' is not finite at k=" +
                                          std::to_string(k) + ", N=" + std::to_string(n));
    return t;
}

}  // namespace detail

/// Sum of a(k, N) over k = 1..range(N) at every schedule point. The double
/// track uses compensated summation; the exact track runs while the rule has
/// an exact form and the fraction stays within the bit budget.
inline SeqHyperreal hyperfinite_sum(const TermRule& rule, const InfiniteIndex& index,
                                    const RangeFn& range = full_range(), bool want_exact = false,
                                    std::size_t exact_bit_budget = detail::default_exact_bit_budget) {
    std::vector<SeqHyperreal::Entry> entries;
    bool exact_alive = want_exact && static_cast<bool>(rule.exact);
    for (std::int64_t n : index.points()) {
        const std::int64_t r = range(n);
        detail::check_range(r, n);
        std::int64_t stop = r;
        if (rule.term_cap > 0 && rule.term_cap < stop) stop = rule.term_cap;
        double acc = 0.0, comp = 0.0;
        for (std::int64_t k = 1; k <= stop; ++k) {
            const double t = detail::checked_term(rule, k, n) - comp;
            const double s = acc + t;
            comp = (s - acc) - t;
            acc = s;
        }
        SeqHyperreal::Entry e;
        e.approx = acc;
        if (exact_alive) {
            BigFraction f = BigFraction::integer(0);
            for (std::int64_t k = 1; k <= r; ++k) {
                f = f.add(BigFraction::from_rational(rule.exact(k, n)));
                if (f.bit_size() > exact_bit_budget) {
                    exact_alive = false;
                    break;
                }
            }
            if (exact_alive) e.exact = std::move(f);
        }
        entries.push_back(std::move(e));
    }
    return SeqHyperreal(index, std::move(entries), "sum[" + rule.name + "]");
}

/// Product of a(k, N) over k = 1..range(N) at every schedule point.
inline SeqHyperreal hyperfinite_product(const TermRule& rule, const InfiniteIndex& index,
                                        const RangeFn& range = full_range(), bool want_exact = false,
                                        std::size_t exact_bit_budget = detail::default_exact_bit_budget) {
    std::vector<SeqHyperreal::Entry> entries;
    bool exact_alive = want_exact && static_cast<bool>(rule.exact);
    for (std::int64_t n : index.points()) {
        const std::int64_t r = range(n);
        detail::check_range(r, n);
        std::int64_t stop = r;
        if (rule.term_cap > 0 && rule.term_cap < stop) stop = rule.term_cap;
        double acc = 1.0;
        for (std::int64_t k = 1; k <= stop; ++k) {
            acc *= detail::checked_term(rule, k, n);
            if (!std::isfinite(acc))
                raise(errc::evaluation_error,
                      "product overflowed at k=" + std::to_string(k) + ", N=" + std::to_string(n));
        }
        SeqHyperreal::Entry e;
        e.approx = acc;
        if (exact_alive) {
            BigFraction f = BigFraction::integer(1);
            for (std::int64_t k = 1; k <= r; ++k) {
                f = f.mul(BigFraction::from_rational(rule.exact(k, n)));
                if (f.bit_size() > exact_bit_budget) {
                    exact_alive = false;
                    break;
                }
            }
            if (exact_alive) e.exact = std::move(f);
        }
        entries.push_back(std::move(e));
    }
    return SeqHyperreal(index, std::move(entries), "product[" + rule.name + "]");
}

/// Euler's rectangle rule with an infinitesimal step: alpha * (A + A' + ...)
/// over left endpoints, alpha = (b-a)/N.
inline SeqHyperreal hyperfinite_integral(const std::function<double(double)>& f, double a, double b,
                                         const InfiniteIndex& index) {
    if (!(b > a)) raise(errc::invalid_argument, "integral needs b > a");
    std::vector<SeqHyperreal::Entry> entries;
    for (std::int64_t n : index.points()) {
        const double alpha = (b - a) / static_cast<double>(n);
        double acc = 0.0, comp = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            double v = f(a + alpha * static_cast<double>(i));
            if (!std::isfinite(v))
                raise(errc::evaluation_error,
                      "integrand not finite at x=" + std::to_string(a + alpha * i));
            const double t = v - comp;
            const double s = acc + t;
            comp = (s - acc) - t;
            acc = s;
        }
        entries.push_back({alpha * acc, std::nullopt});
    }
    return SeqHyperreal(index, std::move(entries), "integral");
}

/// Result of taking the standard part of a hyperfinite value.
struct ShadowEstimate {
    double value = 0.0;
    double error_bound = 0.0;
    int order = 0;  // extrapolation level actually used
    bool used_richardson = false;
    bool converged = false;
    std::string note;
};

/// Standard part along the schedule. With a uniform geometric schedule the
/// values are Richardson-extrapolated, eliminating 1/N^m error terms level
/// by level; the reported bound is the gap between the last two extrapolants
/// at the accepted level. Sequences whose increments do not decay raise
/// DivergenceDetected instead of pretending to converge.
inline ShadowEstimate seq_shadow(const SeqHyperreal& seq, double tolerance = 1e-8) {
    const std::vector<double> v = seq.approx_values();
    const int m = static_cast<int>(v.size());
    if (m < 5) raise(errc::invalid_argument, "need at least 5 schedule points");
    for (double x : v)
        if (!std::isfinite(x))
            raise(errc::divergence_detected, seq.label() + " leaves the finite range");

    std::vector<double> incr(v.size() - 1);
    bool all_zero = true;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        incr[j] = v[j + 1] - v[j];
        if (incr[j] != 0.0) all_zero = false;
    }
    if (all_zero) {
        return {v.back(), 0.0, 0, false, true, "sequence is constant along the schedule"};
    }

    bool monotone = true;
    int sgn = 0;
    for (double d : incr) {
        if (d == 0.0) continue;
        const int s = d > 0 ? 1 : -1;
        if (sgn == 0) sgn = s;
        else if (s != sgn) monotone = false;
    }
    if (monotone) {
        // Mean decay ratio of the last increments; near 1 means each doubling
        // of N contributes as much as the previous one did.
        double rsum = 0.0;
        int rcount = 0;
        for (std::size_t j = incr.size() >= 4 ? incr.size() - 4 : 0; j + 1 < incr.size(); ++j) {
            if (std::abs(incr[j]) > 0.0) {
                rsum += std::abs(incr[j + 1]) / std::abs(incr[j]);
                ++rcount;
            }
        }
        const double mean_ratio = rcount > 0 ? rsum / rcount : 0.0;
        if (rcount > 0 && mean_ratio >= 0.95 && std::abs(incr.back()) > tolerance) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "%s: increments do not decay (mean ratio %.3f per schedule step)",
                          seq.label().c_str(), mean_ratio);
            raise(errc::divergence_detected, buf);
        }
    }

    if (!seq.index().uniform_ratio()) {
        const double bound = std::abs(incr.back());
        return {v.back(), bound, 0, false, bound <= tolerance,
                "schedule ratio is not uniform; raw limit without extrapolation"};
    }

    const double r = static_cast<double>(seq.index().points()[1]) /
                     static_cast<double>(seq.index().points()[0]);
    const int max_level = std::min(m - 2, 10);
    // tableau[j] holds the current column; overwrite in place level by level.
    std::vector<std::vector<double>> col(static_cast<std::size_t>(max_level) + 1);
    col[0] = v;
    std::vector<double> gap(static_cast<std::size_t>(max_level) + 1);
    gap[0] = std::abs(v[m - 1] - v[m - 2]);
    double rm = 1.0;
    for (int lev = 1; lev <= max_level; ++lev) {
        rm *= r;
        const auto& prev = col[lev - 1];
        std::vector<double> cur(prev.size() - 1);
        for (std::size_t j = 0; j + 1 < prev.size(); ++j)
            cur[j] = prev[j + 1] + (prev[j + 1] - prev[j]) / (rm - 1.0);
        gap[lev] = cur.size() >= 2 ? std::abs(cur[cur.size() - 1] - cur[cur.size() - 2])
                                   : std::numeric_limits<double>::infinity();
        col[lev] = std::move(cur);
    }

    int best = 0;
    for (int lev = 1; lev <= max_level; ++lev)
        if (col[lev].size() >= 2 && gap[lev] < gap[best]) best = lev;

    ShadowEstimate out;
    out.value = col[best].back();
    out.error_bound = gap[best];
    out.order = best;
    out.used_richardson = best >= 1;
    out.converged = out.error_bound <= tolerance;
    if (best == 0)
        out.note = "extrapolation did not improve on the raw limit; error is not a power law in 1/N";
    return out;
}

}  // namespace nonarch
