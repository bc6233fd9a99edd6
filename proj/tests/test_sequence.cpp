#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nonarch/rules.hpp"
#include "nonarch/sequence.hpp"
#include "test_support.hpp"

using namespace nonarch;
using testsupport::code_of;

namespace {
const double PI = std::acos(-1.0);
}

TEST_CASE("default schedule doubles from 10 to 163840") {
    InfiniteIndex idx;
    CHECK(idx.count() == 15);
    CHECK(idx.points().front() == 10);
    CHECK(idx.points()[1] == 20);
    CHECK(idx.max_point() == 163840);
    CHECK(idx.uniform_ratio());
}

TEST_CASE("parity adjustment") {
    InfiniteIndex even({10, 2, 6}, Parity::even);
    for (auto p : even.points()) CHECK(p % 2 == 0);
    InfiniteIndex odd({10, 2, 6}, Parity::odd);
    for (auto p : odd.points()) CHECK(p % 2 == 1);
    CHECK(odd.points().front() == 11);
    CHECK(!odd.uniform_ratio());
}

TEST_CASE("schedule validation") {
    CHECK(code_of([] { InfiniteIndex i({10, 2, 4}); }) == errc::invalid_argument);
    CHECK(code_of([] { InfiniteIndex i({1, 2, 6}); }) == errc::invalid_argument);
    CHECK(code_of([] { InfiniteIndex i({10, 1, 6}); }) == errc::invalid_argument);
}

TEST_CASE("uniform rule sums to its constant exactly at every point") {
    const cpp_rational x(2, 3);
    SeqHyperreal s = hyperfinite_sum(make_uniform(x), InfiniteIndex(), full_range(), true);
    for (const auto& e : s.entries()) {
        REQUIRE(e.exact.has_value());
        CHECK(e.exact->equals(x));
        CHECK(e.approx == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("hyperfinite integral of x^2 matches the closed form per point") {
    InfiniteIndex idx;
    SeqHyperreal s = hyperfinite_integral([](double x) { return x * x; }, 0.0, 1.0, idx);
    for (int j = 0; j < idx.count(); ++j) {
        const double n = static_cast<double>(idx.points()[j]);
        // Left-endpoint rectangles: sum i^2 for i < n gives (n-1)n(2n-1)/6.
        const double closed = (n - 1.0) * n * (2.0 * n - 1.0) / (6.0 * n * n * n);
        CHECK(s.at(j).approx == doctest::Approx(closed).epsilon(1e-12));
    }
    ShadowEstimate est = seq_shadow(s, 1e-6);
    CHECK(est.converged);
    CHECK(est.used_richardson);
    CHECK(est.order >= 2);
    CHECK(std::abs(est.value - 1.0 / 3.0) <= 1e-9);
}

TEST_CASE("inverse-square sum extrapolates to pi^2/6") {
    SeqHyperreal s = hyperfinite_sum(make_inverse_square(), InfiniteIndex());
    ShadowEstimate est = seq_shadow(s, 1e-8);
    CHECK(est.converged);
    CHECK(est.error_bound <= 1e-8);
    CHECK(est.order >= 2);
    CHECK(est.value == doctest::Approx(PI * PI / 6.0).epsilon(1e-10));
}

TEST_CASE("harmonic sum is flagged divergent") {
    SeqHyperreal s = hyperfinite_sum(make_harmonic(), InfiniteIndex());
    CHECK(code_of([&] { seq_shadow(s); }) == errc::divergence_detected);
}

TEST_CASE("product of 1 + 1/k^2 extrapolates to sinh(pi)/pi") {
    TermRule rule{"one-plus-inverse-square",
                  [](std::int64_t k, std::int64_t) {
                      const double kd = static_cast<double>(k);
                      return 1.0 + 1.0 / (kd * kd);
                  },
                  nullptr, 0};
    SeqHyperreal p = hyperfinite_product(rule, InfiniteIndex());
    ShadowEstimate est = seq_shadow(p, 1e-8);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(std::sinh(PI) / PI).epsilon(1e-10));
}

TEST_CASE("geometric partial sums are exact dyadic fractions") {
    SeqHyperreal s = hyperfinite_sum(make_geometric(), InfiniteIndex(), full_range(), true);
    // First point n=10: sum = 1 - 2^-10 = 1023/1024.
    REQUIRE(s.at(0).exact.has_value());
    CHECK(s.at(0).exact->equals(cpp_rational(1023, 1024)));
    ShadowEstimate est = seq_shadow(s, 1e-12);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constant sequences converge with a zero bound") {
    SeqHyperreal s = hyperfinite_sum(make_uniform(cpp_rational(5)), InfiniteIndex());
    ShadowEstimate est = seq_shadow(s, 1e-12);
    CHECK(est.converged);
    CHECK(est.error_bound <= 1e-12);
    CHECK(est.value == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("shadow estimation commutes with translation") {
    SeqHyperreal s = hyperfinite_sum(make_inverse_square(), InfiniteIndex());
    std::vector<SeqHyperreal::Entry> shifted;
    for (const auto& e : s.entries()) shifted.push_back({e.approx + 5.0, std::nullopt});
    SeqHyperreal t(s.index(), std::move(shifted), "shifted");
    ShadowEstimate es = seq_shadow(s, 1e-8), et = seq_shadow(t, 1e-8);
    CHECK(et.value - es.value == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(et.order == es.order);
}

TEST_CASE("exact tracking stops at the bit budget") {
    SeqHyperreal s =
        hyperfinite_sum(make_inverse_square(), InfiniteIndex(), full_range(), true, 1000);
    CHECK(s.at(0).exact.has_value());   // n=10 stays tiny
    CHECK(!s.last().exact.has_value()); // n=163840 blows past 1000 bits
}

TEST_CASE("range and term guards") {
    CHECK(code_of([] {
              hyperfinite_sum(make_harmonic(), InfiniteIndex(),
                              [](std::int64_t n) { return 9 * n; });
          }) == errc::invalid_argument);
    TermRule bad{"bad", [](std::int64_t k, std::int64_t) {
                     return k == 3 ? std::sqrt(-1.0) : 1.0;
                 },
                 nullptr, 0};
    CHECK(code_of([&] { hyperfinite_sum(bad, InfiniteIndex()); }) == errc::evaluation_error);
}

TEST_CASE("non-uniform schedules fall back to the raw limit") {
    SeqHyperreal s = hyperfinite_sum(make_inverse_square(), InfiniteIndex({10, 2, 8}, Parity::odd));
    ShadowEstimate est = seq_shadow(s, 1e-2);
    CHECK(!est.used_richardson);
    CHECK(est.note.find("raw limit") != std::string::npos);
}

TEST_CASE("half range sums half as many terms") {
    SeqHyperreal s = hyperfinite_sum(make_harmonic(), InfiniteIndex({10, 2, 5}), half_range());
    // n=10, half range 5: 1 + 1/2 + ... + 1/5 = 137/60.
    CHECK(s.at(0).approx == doctest::Approx(137.0 / 60.0).epsilon(1e-12));
}

TEST_CASE("big fraction basics") {
    BigFraction a(cpp_int(1), cpp_int(3));
    BigFraction b(cpp_int(1), cpp_int(6));
    CHECK(a.add(b).equals(cpp_rational(1, 2)));
    CHECK(a.sub(b).equals(cpp_rational(1, 6)));
    CHECK(a.mul(b).equals(cpp_rational(1, 18)));
    CHECK(a.div(b).equals(cpp_rational(2)));
    CHECK(BigFraction(cpp_int(2), cpp_int(-4)).equals(cpp_rational(-1, 2)));
    CHECK(a.to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(code_of([] { BigFraction f(cpp_int(1), cpp_int(0)); }) == errc::division_by_zero);
}
