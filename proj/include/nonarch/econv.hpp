#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nonarch/sequence.hpp"

namespace nonarch {

enum class CheckStatus { pass, fail, inconclusive };

inline const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct ConditionEvidence {
    CheckStatus status = CheckStatus::inconclusive;
    std::string note;
    std::vector<double> data;
};

enum class AggregateKind { sum, product };

inline const char* aggregate_name(AggregateKind k) {
    return k == AggregateKind::sum ? "sum" : "product";
}

/// Three-condition convergence audit in Euler's sense:
///   (i)  the terms come from one elementary rule in (k, N),
///   (ii) the partial aggregates stay bounded along the schedule,
///   (iii) the between-point tail aggregates shrink below tolerance.
struct EConvergenceVerdict {
    AggregateKind kind = AggregateKind::sum;
    std::string rule_name;
    ConditionEvidence expressible;  // (i)
    ConditionEvidence bounded;      // (ii)
    ConditionEvidence tails;        // (iii)
    CheckStatus overall = CheckStatus::inconclusive;
};

namespace detail {

inline double segment_aggregate(AggregateKind kind, const TermRule& rule, std::int64_t lo,
                                std::int64_t hi, std::int64_t n) {
    // Aggregate over k in (lo, hi]; for products, distance from one.
    std::int64_t stop = hi;
    if (rule.term_cap > 0 && rule.term_cap < stop) stop = rule.term_cap;
    if (kind == AggregateKind::sum) {
        double acc = 0.0;
        for (std::int64_t k = lo + 1; k <= stop; ++k) acc += checked_term(rule, k, n);
        return acc;
    }
    double acc = 1.0;
    for (std::int64_t k = lo + 1; k <= stop; ++k) acc *= checked_term(rule, k, n);
    return acc - 1.0;
}

}  // namespace detail

inline EConvergenceVerdict econvergence_check(AggregateKind kind, const TermRule& rule,
                                              const InfiniteIndex& index, double tail_tolerance) {
    EConvergenceVerdict v;
    v.kind = kind;
    v.rule_name = rule.name;

    v.expressible.status = CheckStatus::pass;
    v.expressible.note =
        "term rule '" + rule.name + "' is an elementary expression in (k, N) by construction";

    // (ii) partial aggregates at each schedule point.
    SeqHyperreal partials = kind == AggregateKind::sum ? hyperfinite_sum(rule, index)
                                                       : hyperfinite_product(rule, index);
    const std::vector<double> a = partials.approx_values();
    v.bounded.data = a;
    bool finite = true;
    for (double x : a)
        if (!std::isfinite(x)) finite = false;
    if (!finite) {
        v.bounded.status = CheckStatus::fail;
        v.bounded.note = "partial " + std::string(aggregate_name(kind)) + "s leave the finite range";
    } else {
        std::vector<double> incr;
        for (std::size_t j = 0; j + 1 < a.size(); ++j) incr.push_back(a[j + 1] - a[j]);
        bool monotone = true;
        int sgn = 0;
        double rsum = 0.0;
        int rcount = 0;
        for (std::size_t j = 0; j < incr.size(); ++j) {
            if (incr[j] != 0.0) {
                const int s = incr[j] > 0 ? 1 : -1;
                if (sgn == 0) sgn = s;
                else if (s != sgn) monotone = false;
            }
            if (j > 0 && std::abs(incr[j - 1]) > 0.0) {
                rsum += std::abs(incr[j]) / std::abs(incr[j - 1]);
                ++rcount;
            }
        }
        const double mean_ratio = rcount > 0 ? rsum / rcount : 0.0;
        const double last_incr = incr.empty() ? 0.0 : std::abs(incr.back());
        if (monotone && rcount > 0 && mean_ratio >= 0.95 && last_incr > tail_tolerance) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "partial %ss grow by about %.4g per doubling of N without decay",
                          aggregate_name(kind), last_incr);
            v.bounded.status = CheckStatus::fail;
            v.bounded.note = buf;
        } else if (mean_ratio < 0.95 || last_incr <= tail_tolerance) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "partial %ss settle near %.10g",
                          aggregate_name(kind), a.back());
            v.bounded.status = CheckStatus::pass;
            v.bounded.note = buf;
        } else {
            v.bounded.status = CheckStatus::inconclusive;
            v.bounded.note = "increment pattern is irregular along the schedule";
        }
    }

    // (iii) tail aggregates between consecutive schedule points.
    const auto& pts = index.points();
    std::vector<double> tails;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j)
        tails.push_back(std::abs(
            detail::segment_aggregate(kind, rule, pts[j], pts[j + 1], pts[j + 1])));
    v.tails.data = tails;
    const double t_first = tails.front(), t_last = tails.back();
    const bool decayed = t_first == 0.0 ? true : t_last <= 0.5 * t_first;
    if (t_last <= tail_tolerance && (decayed || t_first <= tail_tolerance)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "tail %ss shrink to %.3g at N=%lld",
                      aggregate_name(kind), t_last, static_cast<long long>(pts.back()));
        v.tails.status = CheckStatus::pass;
        v.tails.note = buf;
    } else if (!decayed) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "tail %ss do not shrink (%.4g then %.4g)",
                      aggregate_name(kind), t_first, t_last);
        v.tails.status = CheckStatus::fail;
        v.tails.note = buf;
    } else {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "tails shrink but the last one (%.3g) is still above tolerance %.3g", t_last,
                      tail_tolerance);
        v.tails.status = CheckStatus::inconclusive;
        v.tails.note = buf;
    }

    if (v.expressible.status == CheckStatus::pass && v.bounded.status == CheckStatus::pass &&
        v.tails.status == CheckStatus::pass)
        v.overall = CheckStatus::pass;
    else if (v.bounded.status == CheckStatus::fail || v.tails.status == CheckStatus::fail)
        v.overall = CheckStatus::fail;
    else
        v.overall = CheckStatus::inconclusive;
    return v;
}

/// Transfer audit between two term rules whose per-term gap closes as N
/// grows: checks that the aggregate gap closes too, and records per-term
/// evidence for small k.
struct TransferReport {
    AggregateKind kind = AggregateKind::sum;
    std::string rule_a, rule_b;
    std::vector<double> gaps;  // aggregate gap at each schedule point
    double final_gap = 0.0;
    double max_gap = 0.0;
    double decay_order = 0.0;  // gap ~ N^-decay_order along the schedule
    struct TermGap {
        std::int64_t k;
        std::vector<double> values;
        bool shrinking = false;
    };
    std::vector<TermGap> per_term;
    bool pass = false;
    std::string note;
};

inline TransferReport termwise_transfer_check(AggregateKind kind, const TermRule& rule_a,
                                              const TermRule& rule_b, const InfiniteIndex& index,
                                              double gap_tolerance, double tail_tolerance) {
    const EConvergenceVerdict va = econvergence_check(kind, rule_a, index, tail_tolerance);
    const EConvergenceVerdict vb = econvergence_check(kind, rule_b, index, tail_tolerance);
    if (va.overall == CheckStatus::fail || vb.overall == CheckStatus::fail)
        raise(errc::prerequisite_failed,
              "transfer needs both sides to converge in Euler's sense; '" +
                  (va.overall == CheckStatus::fail ? rule_a.name : rule_b.name) + "' fails");

    TransferReport r;
    r.kind = kind;
    r.rule_a = rule_a.name;
    r.rule_b = rule_b.name;

    SeqHyperreal sa = kind == AggregateKind::sum ? hyperfinite_sum(rule_a, index)
                                                 : hyperfinite_product(rule_a, index);
    SeqHyperreal sb = kind == AggregateKind::sum ? hyperfinite_sum(rule_b, index)
                                                 : hyperfinite_product(rule_b, index);
    for (int j = 0; j < index.count(); ++j) {
        const double A = sa.at(j).approx, B = sb.at(j).approx;
        double g;
        if (kind == AggregateKind::sum) g = std::abs(A - B);
        else g = std::abs(B) > 1e-300 ? std::abs(A / B - 1.0) : std::abs(A - B);
        r.gaps.push_back(g);
        r.max_gap = std::max(r.max_gap, g);
    }
    r.final_gap = r.gaps.back();

    // Fitted decay order: gap ~ C / N^p along the schedule.
    const double ratio = static_cast<double>(index.points()[1]) / static_cast<double>(index.points()[0]);
    double psum = 0.0;
    int pcount = 0;
    for (std::size_t j = r.gaps.size() >= 5 ? r.gaps.size() - 5 : 0; j + 1 < r.gaps.size(); ++j) {
        if (r.gaps[j] > 0.0 && r.gaps[j + 1] > 0.0) {
            psum += std::log(r.gaps[j] / r.gaps[j + 1]) / std::log(ratio);
            ++pcount;
        }
    }
    r.decay_order = pcount > 0 ? psum / pcount : 0.0;

    for (std::int64_t k : {std::int64_t(1), std::int64_t(2), std::int64_t(3), std::int64_t(5),
                           std::int64_t(8), std::int64_t(13)}) {
        TransferReport::TermGap tg;
        tg.k = k;
        for (std::int64_t n : index.points())
            tg.values.push_back(std::abs(detail::checked_term(rule_a, k, n) -
                                         detail::checked_term(rule_b, k, n)));
        tg.shrinking = tg.values.back() <= 0.5 * tg.values.front() || tg.values.back() == 0.0;
        r.per_term.push_back(std::move(tg));
    }

    const bool gaps_decay = r.gaps.front() == 0.0 || r.final_gap <= 0.5 * r.gaps.front() ||
                            r.max_gap <= gap_tolerance;
    r.pass = r.final_gap <= gap_tolerance && gaps_decay;
    if (r.max_gap == 0.0) {
        r.note = "term rules agree exactly at every probed index";
    } else {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "aggregate gap closes from %.4g to %.4g (order %.2f in 1/N)", r.gaps.front(),
                      r.final_gap, r.decay_order);
        r.note = buf;
    }
    if (va.overall == CheckStatus::inconclusive || vb.overall == CheckStatus::inconclusive)
        r.note += "; convergence audit was inconclusive on one side";
    return r;
}

}  // namespace nonarch
