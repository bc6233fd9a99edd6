#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "nonarch/parse.hpp"
#include "test_support.hpp"

using namespace nonarch;

namespace {

template <typename Fn>
positioned_error capture(Fn&& fn) {
    try {
        fn();
    } catch (const positioned_error& e) {
        return e;
    }
    REQUIRE(false);
    throw std::logic_error("unreachable");
}

void check_spans(const Expr& e, std::size_t len) {
    CHECK(e.span.begin <= e.span.end);
    CHECK(e.span.end <= len);
    for (const auto& a : e.args) {
        CHECK(e.span.begin <= a->span.begin);
        CHECK(a->span.end <= e.span.end);
        check_spans(*a, len);
    }
}

}  // namespace

TEST_CASE("grammar examples produce the stated trees") {
    CHECK(ast_to_string(parse_expression("st((dx + dx^2)/dx)")) ==
          "(call st (div (add dx (pow dx 2)) dx))");
    CHECK(ast_to_string(parse_expression("1 - 2*eps^2")) == "(sub 1 (mul 2 (pow eps 2)))");
    auto err = capture([] { parse_expression("tlh(5 + eps"); });
    CHECK(err.code() == errc::syntax_error);
    CHECK(err.span().begin == std::string("tlh(5 + eps").size());
    bool has_rparen = false;
    for (const auto& s : err.expected()) has_rparen = has_rparen || s == ")";
    CHECK(has_rparen);
}

TEST_CASE("operator precedence and associativity") {
    CHECK(ast_to_string(parse_expression("1 + 2*3")) == "(add 1 (mul 2 3))");
    CHECK(ast_to_string(parse_expression("1 - 2 - 3")) == "(sub (sub 1 2) 3)");
    CHECK(ast_to_string(parse_expression("8/4/2")) == "(div (div 8 4) 2)");
    // '^' chains right-associatively and folds to a literal exponent.
    CHECK(ast_to_string(parse_expression("2^3^2")) == "(pow 2 9)");
    CHECK(format_laurent(evaluate_text("2^3^2").num) == "512");
    // Unary minus binds tighter than '^'.
    CHECK(ast_to_string(parse_expression("-2^2")) == "(pow (neg 2) 2)");
    CHECK(format_laurent(evaluate_text("-2^2").num) == "4");
    CHECK(format_laurent(evaluate_text("eps^-2").num) == "omega^2");
}

TEST_CASE("evaluation examples") {
    CHECK(evaluate_text("st((dx+dx^2)/dx)").str() == "1");
    auto b = evaluate_text("geq(3 + 7*dx, 3)");
    CHECK(b.kind == EvalValue::Kind::boolean);
    CHECK(b.truth);
    CHECK(evaluate_text("aeq(1 + dx, 1)").str() == "true");
    CHECK(evaluate_text("aeq(1, 2)").str() == "false");
    CHECK(evaluate_text("geq(eps, 2*eps)").str() == "false");
    CHECK(evaluate_text("tlh(5 + eps)").str() == "5");
    CHECK(evaluate_text("st(exp(eps))").str() == "1");
    CHECK(evaluate_text("val(3*eps^2)").str() == "2");
    CHECK(evaluate_text("val(omega)").str() == "-1");
    CHECK(evaluate_text("val(1 - 1)").str() == "+inf");
    CHECK(evaluate_text("1/3").num.coeff_at(0).rational() == cpp_rational(1, 3));
}

TEST_CASE("decimal and scientific literals are exact rationals") {
    CHECK(evaluate_text("0.25").num.coeff_at(0).rational() == cpp_rational(1, 4));
    CHECK(evaluate_text("2.5e3").num.coeff_at(0).rational() == cpp_rational(2500));
    CHECK(evaluate_text("1e-2").num.coeff_at(0).rational() == cpp_rational(1, 100));
    CHECK(evaluate_text("10.125").num.coeff_at(0).rational() == cpp_rational(81, 8));
    // 'e' not followed by digits is the constant, not an exponent marker.
    CHECK(evaluate_text("2*e").num.coeff_at(0).to_double() == doctest::Approx(2 * std::numbers::e));
    auto err = capture([] { parse_expression("2e"); });
    CHECK(err.code() == errc::syntax_error);
}

TEST_CASE("st(omega) reports UnlimitedInput at the omega node") {
    const std::string text = "st(omega)";
    auto err = capture([&] { evaluate_text(text); });
    CHECK(err.code() == errc::unlimited_input);
    CHECK(err.span().begin == 3);
    CHECK(err.span().end == 8);
}

TEST_CASE("parser error taxonomy") {
    CHECK(capture([] { parse_expression("foo(1)"); }).code() == errc::unknown_function);
    CHECK(capture([] { parse_expression("st(1, 2)"); }).code() == errc::arity_mismatch);
    CHECK(capture([] { parse_expression("aeq(1)"); }).code() == errc::arity_mismatch);
    CHECK(capture([] { parse_expression("2^0.5"); }).code() == errc::non_integer_exponent);
    CHECK(capture([] { parse_expression("2^3^-1"); }).code() == errc::non_integer_exponent);
    CHECK(capture([] { parse_expression("x + 1"); }).code() == errc::syntax_error);
    CHECK(capture([] { parse_expression(""); }).code() == errc::syntax_error);
    CHECK(capture([] { parse_expression("1 +"); }).code() == errc::syntax_error);
    CHECK(capture([] { parse_expression("(1 + 2"); }).code() == errc::syntax_error);
    CHECK(capture([] { parse_expression("1 2"); }).code() == errc::syntax_error);
    CHECK(capture([] { parse_expression("2^(1+1)"); }).code() == errc::syntax_error);
}

TEST_CASE("evaluation error taxonomy keeps engine codes") {
    CHECK(capture([] { evaluate_text("1/(1 - 1)"); }).code() == errc::division_by_zero);
    CHECK(capture([] { evaluate_text("geq(1, 0)"); }).code() == errc::geometric_zero_denominator);
    CHECK(capture([] { evaluate_text("log(0 - 1)"); }).code() == errc::domain_error);
    CHECK(capture([] { evaluate_text("tlh(0)"); }).code() == errc::zero_input);
    // A boolean fed into arithmetic is an evaluation error at the misused node.
    CHECK(capture([] { evaluate_text("aeq(1, 1) + 2"); }).code() == errc::evaluation_error);
}

TEST_CASE("spans nest within the input for sample expressions") {
    for (const std::string text :
         {std::string("st((dx + dx^2)/dx)"), std::string("1 - 2*eps^2 + 3/4*omega"),
          std::string("aeq(exp(eps)*exp(-1*eps), 1)"), std::string("-(1 + eps)^3")}) {
        auto ast = parse_expression(text);
        check_spans(*ast, text.size());
    }
    auto ast = parse_expression("st((dx + dx^2)/dx)");
    CHECK(ast->span.begin == 0);
    CHECK(ast->span.end == std::string("st((dx + dx^2)/dx)").size());
}

TEST_CASE("formatted exact numbers round-trip through the parser") {
    testsupport::Rng rng(520025);
    for (int iter = 0; iter < 2000; ++iter) {
        const LaurentNumber x = rng.small_laurent();
        const std::string text = format_laurent(x);
        const EvalValue back = evaluate_text(text);
        REQUIRE(back.kind == EvalValue::Kind::number);
        CHECK(back.num.identical(x));
    }
}

TEST_CASE("whitespace is insignificant") {
    CHECK(evaluate_text("  1 +  2 ").str() == "3");
    CHECK(ast_to_string(parse_expression(" st( (dx) / dx ) ")) == "(call st (div dx dx))");
}
