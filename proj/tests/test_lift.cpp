#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nonarch/format.hpp"
#include "nonarch/lift.hpp"
#include "test_support.hpp"

using namespace nonarch;
using testsupport::code_of;
using testsupport::make_exact;

TEST_CASE("exp of eps is the exact exponential series") {
    const LaurentNumber r = lift_exp(LaurentNumber::eps(3));
    CHECK(r.identical(make_exact({{0, 1}, {1, 1}, {2, cpp_rational(1, 2)}, {3, cpp_rational(1, 6)}}, 3)));
    CHECK(!r.approx_kind());
    CHECK(format_laurent(r) == "1 + eps + 1/2*eps^2 + 1/6*eps^3");
}

TEST_CASE("exp is a homomorphism on infinitesimals") {
    const LaurentNumber x = LaurentNumber::eps(8);
    const LaurentNumber y = LaurentNumber::eps(8).pow(2);
    CHECK(lift_exp(x + y).identical(lift_exp(x) * lift_exp(y)));
}

TEST_CASE("log at shadow one is the Mercator series") {
    const LaurentNumber r = lift_log(LaurentNumber::one(4) + LaurentNumber::eps(4));
    CHECK(r.identical(make_exact(
        {{1, 1}, {2, cpp_rational(-1, 2)}, {3, cpp_rational(1, 3)}, {4, cpp_rational(-1, 4)}}, 4)));
}

TEST_CASE("log undoes exp") {
    const LaurentNumber x = LaurentNumber::eps(10);
    // The round trip is exact through the window depth; the slot at the far
    // edge of the shifted window is not determined by the truncated input.
    CHECK(testsupport::agree_through(lift_log(lift_exp(x)), x, 10));
    CHECK(lift_exp(lift_log(LaurentNumber::one(10) + x)).identical(LaurentNumber::one(10) + x));
}

TEST_CASE("sin and cos at an exact infinitesimal stay rational") {
    const LaurentNumber s = lift_sin(LaurentNumber::eps(5));
    CHECK(s.identical(make_exact({{1, 1}, {3, cpp_rational(-1, 6)}, {5, cpp_rational(1, 120)}}, 5)));
    const LaurentNumber c = lift_cos(LaurentNumber::eps(5));
    CHECK(c.identical(make_exact({{0, 1}, {2, cpp_rational(-1, 2)}, {4, cpp_rational(1, 24)}}, 5)));
}

TEST_CASE("pythagorean identity in the truncated field") {
    const LaurentNumber x = LaurentNumber::eps(10) +
                            LaurentNumber::eps(10).pow(2).scaled(Coefficient::make_exact(2));
    const LaurentNumber s = lift_sin(x), c = lift_cos(x);
    CHECK((s * s + c * c).identical(LaurentNumber::one(10)));
}

TEST_CASE("cos of a scaled infinitesimal matches the rescaled series") {
    // Oracle: cos(a*eps) = 1 - (a^2/2) eps^2 + (a^4/24) eps^4 with a = 2*pi.
    const double a = 2.0 * std::acos(-1.0);
    const LaurentNumber x = LaurentNumber::eps(4).scaled(Coefficient::make_approx(a));
    const LaurentNumber r = lift_cos(x);
    CHECK(r.approx_kind());
    CHECK(r.coeff_at(0).to_double() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.coeff_at(2).to_double() == doctest::Approx(-a * a / 2.0).epsilon(1e-13));
    CHECK(r.coeff_at(4).to_double() == doctest::Approx(a * a * a * a / 24.0).epsilon(1e-13));
}

TEST_CASE("exp at a nonzero shadow is approximate") {
    const LaurentNumber r = lift_exp(LaurentNumber::one(4) + LaurentNumber::eps(4));
    CHECK(r.approx_kind());
    const double e = std::exp(1.0);
    CHECK(r.coeff_at(0).to_double() == doctest::Approx(e).epsilon(1e-14));
    CHECK(r.coeff_at(1).to_double() == doctest::Approx(e).epsilon(1e-14));
    CHECK(r.coeff_at(2).to_double() == doctest::Approx(e / 2).epsilon(1e-14));
}

TEST_CASE("domain and limitedness guards") {
    CHECK(code_of([] { lift_exp(LaurentNumber::omega()); }) == errc::unlimited_input);
    CHECK(code_of([] { lift_log(LaurentNumber::eps()); }) == errc::domain_error);
    CHECK(code_of([] { lift_log(LaurentNumber::from_int(-1) + LaurentNumber::eps()); }) ==
          errc::domain_error);
    CHECK(code_of([] { lift_log(LaurentNumber::omega()); }) == errc::unlimited_input);
    CHECK(code_of([] { lift_pow(LaurentNumber::eps(), cpp_rational(1, 2)); }) == errc::domain_error);
}

TEST_CASE("binomial series for rational exponents at shadow one") {
    // Oracle: C(1/2,0..3) = 1, 1/2, -1/8, 1/16.
    const LaurentNumber r = lift_pow(LaurentNumber::one(3) + LaurentNumber::eps(3), cpp_rational(1, 2));
    CHECK(r.identical(make_exact(
        {{0, 1}, {1, cpp_rational(1, 2)}, {2, cpp_rational(-1, 8)}, {3, cpp_rational(1, 16)}}, 3)));
    // Squaring the square root recovers the radicand.
    const LaurentNumber half = lift_pow(LaurentNumber::one(10) + LaurentNumber::eps(10), cpp_rational(1, 2));
    CHECK((half * half).identical(LaurentNumber::one(10) + LaurentNumber::eps(10)));
}

TEST_CASE("power at a general positive shadow") {
    const LaurentNumber r = lift_pow(LaurentNumber::from_int(4) + LaurentNumber::eps(), cpp_rational(1, 2));
    CHECK(r.approx_kind());
    CHECK(r.coeff_at(0).to_double() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.coeff_at(1).to_double() == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("dispatcher mirrors the direct entry points") {
    const LaurentNumber x = LaurentNumber::eps(6);
    CHECK(lift_smooth(SmoothFn::exp_fn, x).identical(lift_exp(x)));
    CHECK(lift_smooth(SmoothFn::sin_fn, x).identical(lift_sin(x)));
    CHECK(lift_smooth(SmoothFn::pow_fn, LaurentNumber::one(6) + x, cpp_rational(2, 3))
              .identical(lift_pow(LaurentNumber::one(6) + x, cpp_rational(2, 3))));
    CHECK(code_of([&] { lift_smooth(SmoothFn::pow_fn, x); }) == errc::invalid_argument);
}
