#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nonarch/errors.hpp"
#include "nonarch/format.hpp"
#include "nonarch/laurent.hpp"
#include "nonarch/lift.hpp"

namespace nonarch {

/// Half-open byte range [begin, end) into the source text.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Parse and evaluation failures that point back into the input.
class positioned_error : public error {
public:
    positioned_error(errc code, const std::string& what, SourceSpan span,
                     std::vector<std::string> expected = {})
        : error(code, what), span_(span), expected_(std::move(expected)) {}

    SourceSpan span() const noexcept { return span_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

enum class ExprKind { number, symbol, negate, binary, power, call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::number;
    SourceSpan span;
    cpp_rational number;      // ExprKind::number
    std::string name;         // symbol and call nodes
    char op = 0;              // binary nodes: + - * /
    long long exponent = 0;   // power nodes
    std::vector<ExprPtr> args;
};

namespace detail {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    Tok kind = Tok::end;
    SourceSpan span;
    cpp_rational value;
    std::string text;
};

inline cpp_int pow10_int(std::size_t e) {
    cpp_int r = 1;
    for (std::size_t j = 0; j < e; ++j) r *= 10;
    return r;
}

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;

    explicit Lexer(const std::string& s) : src(s) {}

    Token next() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
        const std::size_t start = pos;
        if (pos >= src.size()) return {Tok::end, {start, start}, 0, ""};
        const char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            return {Tok::ident, {start, pos}, 0, src.substr(start, pos - start)};
        }
        ++pos;
        switch (c) {
            case '+': return {Tok::plus, {start, pos}, 0, "+"};
            case '-': return {Tok::minus, {start, pos}, 0, "-"};
            case '*': return {Tok::star, {start, pos}, 0, "*"};
            case '/': return {Tok::slash, {start, pos}, 0, "/"};
            case '^': return {Tok::caret, {start, pos}, 0, "^"};
            case '(': return {Tok::lparen, {start, pos}, 0, "("};
            case ')': return {Tok::rparen, {start, pos}, 0, ")"};
            case ',': return {Tok::comma, {start, pos}, 0, ","};
            default:
                throw positioned_error(errc::syntax_error,
                                       std::string("unexpected character '") + c + "'", {start, pos});
        }
    }

private:
    // digits ('.' digits)? ([eE] sign? digits)?, always an exact rational.
    // The exponent branch is only taken when digits actually follow, so
    // "2e" lexes as the number 2 followed by the symbol e.
    Token lex_number() {
        const std::size_t start = pos;
        cpp_int mantissa = 0;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            mantissa = mantissa * 10 + (src[pos] - '0');
            ++pos;
        }
        std::size_t frac_digits = 0;
        if (pos + 1 < src.size() && src[pos] == '.' &&
            std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
            ++pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                mantissa = mantissa * 10 + (src[pos] - '0');
                ++frac_digits;
                ++pos;
            }
        }
        long long exp10 = 0;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t probe = pos + 1;
            bool neg = false;
            if (probe < src.size() && (src[probe] == '+' || src[probe] == '-')) {
                neg = src[probe] == '-';
                ++probe;
            }
            if (probe < src.size() && std::isdigit(static_cast<unsigned char>(src[probe]))) {
                long long e = 0;
                while (probe < src.size() && std::isdigit(static_cast<unsigned char>(src[probe]))) {
                    e = e * 10 + (src[probe] - '0');
                    if (e > 100000)
                        throw positioned_error(errc::syntax_error, "numeric exponent out of range",
                                               {start, probe});
                    ++probe;
                }
                exp10 = neg ? -e : e;
                pos = probe;
            }
        }
        cpp_rational v(mantissa, pow10_int(frac_digits));
        if (exp10 > 0)
            v *= cpp_rational(pow10_int(static_cast<std::size_t>(exp10)));
        else if (exp10 < 0)
            v /= cpp_rational(pow10_int(static_cast<std::size_t>(-exp10)));
        Token t{Tok::number, {start, pos}, v, src.substr(start, pos - start)};
        return t;
    }
};

struct FunctionSig {
    const char* name;
    int arity;
};

inline const std::vector<FunctionSig>& function_table() {
    static const std::vector<FunctionSig> table = {
        {"st", 1},  {"tlh", 1}, {"exp", 1}, {"log", 1}, {"sin", 1},
        {"cos", 1}, {"val", 1}, {"aeq", 2}, {"geq", 2},
    };
    return table;
}

struct Parser {
    Lexer lexer;
    Token cur;
    std::size_t last_end = 0;  // end offset of the most recently consumed token

    explicit Parser(const std::string& text) : lexer(text) { cur = lexer.next(); }

    void advance() {
        last_end = cur.span.end;
        cur = lexer.next();
    }

    [[noreturn]] void fail_expect(const std::string& what, std::vector<std::string> expected) {
        const std::string got = cur.kind == Tok::end ? "end of input" : "'" + cur.text + "'";
        throw positioned_error(errc::syntax_error, "expected " + what + ", found " + got, cur.span,
                               std::move(expected));
    }

    void expect(Tok kind, const std::string& what) {
        if (cur.kind != kind) fail_expect(what, {what});
        advance();
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (cur.kind == Tok::plus || cur.kind == Tok::minus) {
            const char op = cur.kind == Tok::plus ? '+' : '-';
            advance();
            ExprPtr rhs = parse_term();
            auto node = std::make_shared<Expr>();
            node->kind = ExprKind::binary;
            node->op = op;
            node->span = {lhs->span.begin, rhs->span.end};
            node->args = {lhs, rhs};
            lhs = node;
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (cur.kind == Tok::star || cur.kind == Tok::slash) {
            const char op = cur.kind == Tok::star ? '*' : '/';
            advance();
            ExprPtr rhs = parse_factor();
            auto node = std::make_shared<Expr>();
            node->kind = ExprKind::binary;
            node->op = op;
            node->span = {lhs->span.begin, rhs->span.end};
            node->args = {lhs, rhs};
            lhs = node;
        }
        return lhs;
    }

    // factor := unary ('^' exponent)?; the exponent chain is itself
    // right-associative, so 2^3^2 = 2^(3^2) = 512, and unary minus binds
    // tighter than '^': -2^2 = (-2)^2.
    ExprPtr parse_factor() {
        ExprPtr base = parse_unary();
        if (cur.kind != Tok::caret) return base;
        advance();
        const long long e = parse_exponent_chain();
        auto node = std::make_shared<Expr>();
        node->kind = ExprKind::power;
        node->exponent = e;
        node->span = {base->span.begin, last_end};
        node->args = {base};
        return node;
    }

    long long parse_exponent_chain() {
        bool neg = false;
        if (cur.kind == Tok::minus) {
            neg = true;
            advance();
        }
        if (cur.kind != Tok::number)
            fail_expect("an integer exponent", {"integer"});
        if (denominator(cur.value) != 1)
            throw positioned_error(errc::non_integer_exponent,
                                   "exponent must be an integer, found '" + cur.text + "'", cur.span);
        const cpp_int n = numerator(cur.value);
        if (n > 1000000000)
            throw positioned_error(errc::syntax_error, "exponent out of range", cur.span);
        long long base = n.convert_to<long long>();
        const SourceSpan base_span = cur.span;
        advance();
        if (cur.kind == Tok::caret) {
            advance();
            const long long rest = parse_exponent_chain();
            if (rest < 0)
                throw positioned_error(errc::non_integer_exponent,
                                       "negative exponent inside a power tower is not an integer",
                                       base_span);
            long long acc = 1;
            for (long long j = 0; j < rest; ++j) {
                acc *= base;
                if (acc > 1000000000 || acc < -1000000000)
                    throw positioned_error(errc::syntax_error, "exponent out of range", base_span);
            }
            base = acc;
        }
        return neg ? -base : base;
    }

    ExprPtr parse_unary() {
        if (cur.kind == Tok::minus) {
            const std::size_t begin = cur.span.begin;
            advance();
            ExprPtr inner = parse_atom();
            auto node = std::make_shared<Expr>();
            node->kind = ExprKind::negate;
            node->span = {begin, inner->span.end};
            node->args = {inner};
            return node;
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        if (cur.kind == Tok::number) {
            auto node = std::make_shared<Expr>();
            node->kind = ExprKind::number;
            node->number = cur.value;
            node->span = cur.span;
            advance();
            return node;
        }
        if (cur.kind == Tok::ident) {
            const Token name = cur;
            advance();
            if (cur.kind == Tok::lparen) return parse_call(name);
            if (name.text == "eps" || name.text == "omega" || name.text == "dx" ||
                name.text == "pi" || name.text == "e") {
                auto node = std::make_shared<Expr>();
                node->kind = ExprKind::symbol;
                node->name = name.text;
                node->span = name.span;
                return node;
            }
            throw positioned_error(errc::syntax_error, "unknown symbol '" + name.text + "'",
                                   name.span, {"eps", "omega", "dx", "pi", "e"});
        }
        if (cur.kind == Tok::lparen) {
            const std::size_t begin = cur.span.begin;
            advance();
            ExprPtr inner = parse_expr();
            if (cur.kind != Tok::rparen) fail_expect("')'", {")"});
            auto node = std::make_shared<Expr>(*inner);
            node->span = {begin, cur.span.end};
            advance();
            return node;
        }
        fail_expect("a number, symbol, function call, or '('", {"number", "symbol", "function", "("});
    }

    ExprPtr parse_call(const Token& name) {
        int arity = -1;
        for (const auto& f : function_table())
            if (name.text == f.name) arity = f.arity;
        if (arity < 0)
            throw positioned_error(errc::unknown_function, "unknown function '" + name.text + "'",
                                   name.span);
        advance();  // consume '('
        std::vector<ExprPtr> args;
        if (cur.kind != Tok::rparen) {
            args.push_back(parse_expr());
            while (cur.kind == Tok::comma) {
                advance();
                args.push_back(parse_expr());
            }
        }
        if (cur.kind != Tok::rparen) fail_expect("')'", {")", ","});
        const std::size_t end = cur.span.end;
        advance();
        if (static_cast<int>(args.size()) != arity)
            throw positioned_error(errc::arity_mismatch,
                                   "function '" + name.text + "' takes " + std::to_string(arity) +
                                       (arity == 1 ? " argument" : " arguments") + ", got " +
                                       std::to_string(args.size()),
                                   {name.span.begin, end});
        auto node = std::make_shared<Expr>();
        node->kind = ExprKind::call;
        node->name = name.text;
        node->span = {name.span.begin, end};
        node->args = std::move(args);
        return node;
    }
};

}  // namespace detail

/// Parses the expression grammar
///   expr := term (('+'|'-') term)*
///   term := factor (('*'|'/') factor)*
///   factor := unary ('^' int)?
///   unary := '-'? atom
///   atom := rational | symbol | fn '(' args ')' | '(' expr ')'
/// and throws positioned_error (SyntaxError, UnknownFunction, ArityMismatch,
/// NonIntegerExponent) with a source span on malformed input.
inline ExprPtr parse_expression(const std::string& text) {
    detail::Parser p(text);
    ExprPtr ast = p.parse_expr();
    if (p.cur.kind != detail::Tok::end)
        p.fail_expect("an operator or end of input", {"+", "-", "*", "/", "^", "end of input"});
    return ast;
}

/// Canonical s-expression rendering of the tree, for structural assertions.
inline std::string ast_to_string(const Expr& e) {
    switch (e.kind) {
        case ExprKind::number: return rational_to_string(e.number);
        case ExprKind::symbol: return e.name;
        case ExprKind::negate: return "(neg " + ast_to_string(*e.args[0]) + ")";
        case ExprKind::binary: {
            const char* op = e.op == '+' ? "add" : e.op == '-' ? "sub" : e.op == '*' ? "mul" : "div";
            return std::string("(") + op + " " + ast_to_string(*e.args[0]) + " " +
                   ast_to_string(*e.args[1]) + ")";
        }
        case ExprKind::power:
            return "(pow " + ast_to_string(*e.args[0]) + " " + std::to_string(e.exponent) + ")";
        case ExprKind::call: {
            std::string out = "(call " + e.name;
            for (const auto& a : e.args) out += " " + ast_to_string(*a);
            return out + ")";
        }
    }
    return "?";
}

inline std::string ast_to_string(const ExprPtr& e) { return ast_to_string(*e); }

/// Evaluation result: a number, a truth value (modal comparisons), or a
/// valuation.
struct EvalValue {
    enum class Kind { number, boolean, valuation };
    Kind kind = Kind::number;
    LaurentNumber num{default_truncation};
    bool truth = false;
    Valuation valuation = Valuation::at(0);

    std::string str() const {
        switch (kind) {
            case Kind::number: return format_laurent(num);
            case Kind::boolean: return truth ? "true" : "false";
            case Kind::valuation: return valuation.str();
        }
        return "?";
    }
};

namespace detail {

inline std::string strip_code_prefix(const error& err) {
    const std::string what = err.what();
    const std::string prefix = std::string(errc_name(err.code())) + ": ";
    if (what.rfind(prefix, 0) == 0) return what.substr(prefix.size());
    return what;
}

inline LaurentNumber require_number(const EvalValue& v, SourceSpan span) {
    if (v.kind != EvalValue::Kind::number)
        throw positioned_error(errc::evaluation_error, "expected a number here", span);
    return v.num;
}

}  // namespace detail

/// Evaluates an expression tree over the number engine. Engine failures are
/// rethrown as positioned_error; for single-argument functions the span
/// points at the offending argument, so st(omega) reports the omega node.
inline EvalValue evaluate(const Expr& e, int truncation = default_truncation) {
    auto number = [](LaurentNumber x) {
        EvalValue v;
        v.kind = EvalValue::Kind::number;
        v.num = std::move(x);
        return v;
    };
    switch (e.kind) {
        case ExprKind::number: return number(LaurentNumber::from_rational(e.number, truncation));
        case ExprKind::symbol: {
            if (e.name == "eps" || e.name == "dx") return number(LaurentNumber::eps(truncation));
            if (e.name == "omega") return number(LaurentNumber::omega(truncation));
            if (e.name == "pi") return number(LaurentNumber::from_double(std::numbers::pi, truncation));
            return number(LaurentNumber::from_double(std::numbers::e, truncation));
        }
        case ExprKind::negate:
            return number(-detail::require_number(evaluate(*e.args[0], truncation), e.args[0]->span));
        case ExprKind::binary: {
            const LaurentNumber lhs =
                detail::require_number(evaluate(*e.args[0], truncation), e.args[0]->span);
            const LaurentNumber rhs =
                detail::require_number(evaluate(*e.args[1], truncation), e.args[1]->span);
            try {
                switch (e.op) {
                    case '+': return number(lhs + rhs);
                    case '-': return number(lhs - rhs);
                    case '*': return number(lhs * rhs);
                    default: return number(lhs / rhs);
                }
            } catch (const positioned_error&) {
                throw;
            } catch (const error& err) {
                throw positioned_error(err.code(), detail::strip_code_prefix(err), e.span);
            }
        }
        case ExprKind::power: {
            const LaurentNumber base =
                detail::require_number(evaluate(*e.args[0], truncation), e.args[0]->span);
            try {
                return number(base.pow(e.exponent));
            } catch (const error& err) {
                throw positioned_error(err.code(), detail::strip_code_prefix(err), e.span);
            }
        }
        case ExprKind::call: {
            std::vector<EvalValue> args;
            for (const auto& a : e.args) args.push_back(evaluate(*a, truncation));
            const SourceSpan blame = e.args.size() == 1 ? e.args[0]->span : e.span;
            try {
                if (e.name == "st") {
                    const Coefficient c = shadow(detail::require_number(args[0], e.args[0]->span));
                    return number(LaurentNumber::constant(c, truncation));
                }
                if (e.name == "tlh")
                    return number(tlh_truncate(detail::require_number(args[0], e.args[0]->span)));
                if (e.name == "exp")
                    return number(lift_exp(detail::require_number(args[0], e.args[0]->span)));
                if (e.name == "log")
                    return number(lift_log(detail::require_number(args[0], e.args[0]->span)));
                if (e.name == "sin")
                    return number(lift_sin(detail::require_number(args[0], e.args[0]->span)));
                if (e.name == "cos")
                    return number(lift_cos(detail::require_number(args[0], e.args[0]->span)));
                if (e.name == "val") {
                    EvalValue v;
                    v.kind = EvalValue::Kind::valuation;
                    v.valuation = detail::require_number(args[0], e.args[0]->span).val();
                    return v;
                }
                const LaurentNumber lhs = detail::require_number(args[0], e.args[0]->span);
                const LaurentNumber rhs = detail::require_number(args[1], e.args[1]->span);
                EvalValue v;
                v.kind = EvalValue::Kind::boolean;
                v.truth = eq_modal(lhs, rhs,
                                   e.name == "aeq" ? Modality::arithmetic : Modality::geometric);
                return v;
            } catch (const positioned_error&) {
                throw;
            } catch (const error& err) {
                throw positioned_error(err.code(), detail::strip_code_prefix(err), blame);
            }
        }
    }
    throw positioned_error(errc::evaluation_error, "unreachable expression kind", e.span);
}

inline EvalValue evaluate(const ExprPtr& e, int truncation = default_truncation) {
    return evaluate(*e, truncation);
}

/// Parse-and-evaluate convenience used by the CLI and the interactive mode.
inline EvalValue evaluate_text(const std::string& text, int truncation = default_truncation) {
    return evaluate(parse_expression(text), truncation);
}

}  // namespace nonarch
