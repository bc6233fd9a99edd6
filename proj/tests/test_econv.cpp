#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nonarch/econv.hpp"
#include "nonarch/rules.hpp"
#include "test_support.hpp"

using namespace nonarch;
using testsupport::code_of;

namespace {
constexpr double TAIL_TOL = 1e-5;
}

TEST_CASE("harmonic fails the boundedness condition with a growth diagnostic") {
    auto v = econvergence_check(AggregateKind::sum, make_harmonic(), InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::fail);
    CHECK(v.expressible.status == CheckStatus::pass);
    CHECK(v.bounded.status == CheckStatus::fail);
    // Each doubling of N adds about log 2 to the partial sums.
    CHECK(v.bounded.note.find("0.693") != std::string::npos);
    CHECK(v.tails.status == CheckStatus::fail);
}

TEST_CASE("inverse-square passes all three conditions") {
    auto v = econvergence_check(AggregateKind::sum, make_inverse_square(), InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::pass);
    // Oracle: last tail is about 1/81920 - 1/163840 = 6.1e-6.
    CHECK(v.tails.data.back() == doctest::Approx(6.1035e-6).epsilon(0.01));
}

TEST_CASE("geometric passes with vanishing tails") {
    auto v = econvergence_check(AggregateKind::sum, make_geometric(), InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::pass);
    CHECK(v.tails.data.back() <= 1e-300);
}

TEST_CASE("wallis product factors pass") {
    auto v = econvergence_check(AggregateKind::product, make_wallis_pair(), InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::pass);
    // Oracle: tail product between 81920 and 163840 sits 1/(8*81920) above 1.
    CHECK(v.tails.data.back() == doctest::Approx(1.5259e-6).epsilon(0.01));
}

TEST_CASE("sine factors pass as a product") {
    auto v = econvergence_check(AggregateKind::product, make_sine_factor(std::acos(-1.0) / 2),
                                InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::pass);
}

TEST_CASE("slowly converging inline rule is inconclusive at default tolerance") {
    auto rule = parse_inline_rule("1*k^-1.5/(1*N^0)");
    auto v = econvergence_check(AggregateKind::sum, rule, InfiniteIndex(), TAIL_TOL);
    CHECK(v.overall == CheckStatus::inconclusive);
    CHECK(v.bounded.status == CheckStatus::pass);
    CHECK(v.tails.status == CheckStatus::inconclusive);
}

TEST_CASE("transfer between inverse-square and its 1/N perturbation") {
    auto r = termwise_transfer_check(AggregateKind::sum, make_inverse_square_perturbed(),
                                     make_inverse_square(), InfiniteIndex(), 1e-4, TAIL_TOL);
    CHECK(r.pass);
    // The gap at N is exactly (sum of 1/k^2 up to N)/N.
    SeqHyperreal s = hyperfinite_sum(make_inverse_square(), InfiniteIndex());
    for (int j = 0; j < 15; ++j) {
        const double expected = s.at(j).approx / static_cast<double>(s.index().points()[j]);
        CHECK(r.gaps[static_cast<std::size_t>(j)] == doctest::Approx(expected).epsilon(1e-10));
    }
    CHECK(r.decay_order == doctest::Approx(1.0).epsilon(0.05));
    for (const auto& tg : r.per_term) CHECK(tg.shrinking);
}

TEST_CASE("binomial terms transfer to exponential terms") {
    auto r = termwise_transfer_check(AggregateKind::sum, make_binomial_exp(1.0),
                                     make_exp_terms(1.0), InfiniteIndex(), 1e-4, TAIL_TOL);
    CHECK(r.pass);
    // Closed form: the aggregate gap at N is e - (1+1/N)^N.
    const InfiniteIndex idx;
    const auto& pts = idx.points();
    for (std::size_t j = 0; j < r.gaps.size(); ++j) {
        const double n = static_cast<double>(pts[j]);
        const double oracle = std::exp(1.0) - std::pow(1.0 + 1.0 / n, n);
        CHECK(r.gaps[j] == doctest::Approx(oracle).epsilon(1e-6));
    }
    // Which is about e/(2N) at the far end of the schedule.
    CHECK(r.final_gap == doctest::Approx(std::exp(1.0) / (2.0 * 163840.0)).epsilon(0.01));
    CHECK(r.decay_order == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("transfer of a rule against itself reports zero gap") {
    auto r = termwise_transfer_check(AggregateKind::sum, make_inverse_square(),
                                     make_inverse_square(), InfiniteIndex(), 1e-4, TAIL_TOL);
    CHECK(r.pass);
    CHECK(r.max_gap == 0.0);
    CHECK(r.note.find("agree exactly") != std::string::npos);
}

TEST_CASE("transfer refuses divergent prerequisites") {
    CHECK(code_of([] {
              termwise_transfer_check(AggregateKind::sum, make_harmonic(), make_inverse_square(),
                                      InfiniteIndex(), 1e-4, TAIL_TOL);
          }) == errc::prerequisite_failed);
}

TEST_CASE("inline rule parsing") {
    auto rule = parse_inline_rule("3/2*k^2/(1*N^3)");
    CHECK(rule.approx(2, 10) == doctest::Approx(0.006).epsilon(1e-12));
    REQUIRE(static_cast<bool>(rule.exact));
    CHECK(rule.exact(2, 10) == cpp_rational(3, 500));

    auto dec = parse_inline_rule("0.5*k^1/(2*N^2)");
    CHECK(dec.approx(3, 10) == doctest::Approx(1.5 / 200.0).epsilon(1e-12));
    CHECK(dec.exact(3, 10) == cpp_rational(3, 400));

    CHECK(code_of([] { parse_inline_rule("k^2"); }) == errc::invalid_argument);
    CHECK(code_of([] { parse_inline_rule("2*k^2/(N^3)"); }) == errc::invalid_argument);
    CHECK(code_of([] { parse_inline_rule("0*k^2/(1*N^3)"); }) == errc::invalid_argument);
}

TEST_CASE("catalog lookup") {
    CHECK(lookup_rule("harmonic").name == "harmonic");
    CHECK(lookup_rule("wallis-pair").name == "wallis-pair");
    CHECK(lookup_rule("1*k^1/(1*N^2)").approx(3, 2) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(code_of([] { lookup_rule("no-such"); }) == errc::invalid_argument);
}
