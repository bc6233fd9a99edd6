// nonarch: command-line front end for the hyperfinite calculus workbench.
//
// Subcommands
//   eval [EXPR]            evaluate an expression over the eps-field
//   derive exp             exponential series via (1 + kz/n)^n, audited
//   derive sine-product    factorization route to the sine/sinh product
//   wallis                 Wallis product partial audit
//   basel                  Basel sum, direct or coefficient-comparison route
//   lhopital               (1 - x^z)/z at infinitesimal z
//   integrate              hyperfinite rectangle sums with shadow extraction
//   check econv            three-condition convergence audit for a term rule
//   check transfer         aggregate gap between two termwise-close rules
//   check factorization    cyclotomic identity a^i - b^i = prod(...)
//   check step4            cosine-replacement bound |p_k| <= gamma/k^2
//   check archimedean      Elements V Def. 4 comparability of two values
//
// Exit codes: 0 the reported check passed, 1 it failed, 2 usage or parse
// error. Reports go to stdout, diagnostics to stderr.

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nonarch/classics.hpp"
#include "nonarch/econv.hpp"
#include "nonarch/exp_series.hpp"
#include "nonarch/parse.hpp"
#include "nonarch/report.hpp"
#include "nonarch/rules.hpp"
#include "nonarch/sine_product.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nonarch;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- config ---

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long long parse_int_value(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + " expects an integer, got '" + text + "'");
    }
}

double parse_double_value(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + " expects a number, got '" + text + "'");
    }
}

ScheduleSpec parse_schedule_value(const std::string& text) {
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw UsageError("schedule expects base:ratio:count, got '" + text + "'");
    ScheduleSpec s;
    s.base = parse_int_value(text.substr(0, c1), "schedule base");
    s.ratio = parse_int_value(text.substr(c1 + 1, c2 - c1 - 1), "schedule ratio");
    s.count = static_cast<int>(parse_int_value(text.substr(c2 + 1), "schedule count"));
    return s;
}

void apply_tolerance_value(RunConfig& cfg, const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw UsageError("tolerance expects name=value, got '" + text + "'");
    cfg.set_tolerance(text.substr(0, eq), parse_double_value(text.substr(eq + 1), "tolerance value"));
}

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "truncation") {
        cfg.truncation = static_cast<int>(parse_int_value(value, "truncation"));
    } else if (key == "schedule") {
        cfg.schedule = parse_schedule_value(value);
    } else if (key == "parity") {
        if (value == "none") cfg.parity = Parity::none;
        else if (value == "even") cfg.parity = Parity::even;
        else if (value == "odd") cfg.parity = Parity::odd;
        else throw UsageError("parity must be none, even, or odd, got '" + value + "'");
    } else if (key == "format") {
        if (value == "text") cfg.format = OutputFormat::text;
        else if (value == "json") cfg.format = OutputFormat::json;
        else throw UsageError("format must be text or json, got '" + value + "'");
    } else if (key == "mode") {
        if (value == "exact") cfg.exact_mode = true;
        else if (value == "approx") cfg.exact_mode = false;
        else throw UsageError("mode must be exact or approx, got '" + value + "'");
    } else if (key.rfind("tol.", 0) == 0) {
        cfg.set_tolerance(key.substr(4), parse_double_value(value, "tolerance " + key));
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        try {
            apply_config_key(cfg, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
        } catch (const UsageError& e) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const error& e) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

/// The six global flags; file values load first, then flags that were
/// actually given override them.
struct GlobalFlags {
    int truncation = 16;
    std::string schedule;
    std::vector<std::string> tols;
    std::string format;
    std::string mode;
    std::string config_path;
    CLI::Option* opt_truncation = nullptr;
    CLI::Option* opt_schedule = nullptr;

    void wire(CLI::App& app) {
        opt_truncation =
            app.add_option("--truncation", truncation, "series window length T (default 16)");
        opt_schedule = app.add_option("--schedule", schedule,
                                      "probe schedule base:ratio:count (default 10:2:15)");
        app.add_option("--tol", tols, "tolerance override name=value (repeatable)")
            ->take_all();
        app.add_option("--format", format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
        app.add_option("--mode", mode, "coefficient arithmetic")
            ->check(CLI::IsMember({"exact", "approx"}));
        app.add_option("--config", config_path, "key=value config file; flags override it");
    }

    RunConfig assemble() const {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (opt_truncation->count() > 0) cfg.truncation = truncation;
        if (opt_schedule->count() > 0) cfg.schedule = parse_schedule_value(schedule);
        if (format == "text") cfg.format = OutputFormat::text;
        if (format == "json") cfg.format = OutputFormat::json;
        if (mode == "exact") cfg.exact_mode = true;
        if (mode == "approx") cfg.exact_mode = false;
        for (const std::string& t : tols) apply_tolerance_value(cfg, t);
        cfg.validate();
        (void)cfg.make_index();  // surface bad schedules as usage errors up front
        return cfg;
    }
};

cpp_rational parse_rational_flag(const std::string& text, const std::string& flag) {
    cpp_rational q;
    if (!detail::parse_rule_number(text, q))
        throw UsageError(flag + " expects p/q or a decimal, got '" + text + "'");
    return q;
}

// ---------------------------------------------------------------- output ---

void emit_json(const ordered_json& j) { std::fputs((j.dump(2) + "\n").c_str(), stdout); }

int emit_report(const DerivationReport& rep) {
    std::fputs(render_report(rep).c_str(), stdout);
    return rep.overall ? exit_pass : exit_fail;
}

const char* verdict_text(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "FAIL";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

ordered_json json_array(const std::vector<double>& v, bool exact_mode) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(detail::json_number(x, exact_mode));
    return a;
}

// ------------------------------------------------------------------ eval ---

const char* eval_kind_name(EvalValue::Kind k) {
    switch (k) {
        case EvalValue::Kind::number: return "number";
        case EvalValue::Kind::boolean: return "boolean";
        case EvalValue::Kind::valuation: return "valuation";
    }
    return "?";
}

bool parse_category(errc c) {
    return c == errc::syntax_error || c == errc::unknown_function || c == errc::arity_mismatch ||
           c == errc::non_integer_exponent;
}

void print_caret(const std::string& input, const positioned_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "  %s\n", input.c_str());
    const std::size_t begin = std::min(e.span().begin, input.size());
    const std::size_t len = e.span().end > e.span().begin ? e.span().end - e.span().begin : 1;
    std::fprintf(stderr, "  %s%s\n", std::string(begin, ' ').c_str(), std::string(len, '^').c_str());
    if (!e.expected().empty()) {
        std::string exp;
        for (const std::string& t : e.expected()) exp += (exp.empty() ? "" : ", ") + t;
        std::fprintf(stderr, "  expected: %s\n", exp.c_str());
    }
}

ordered_json eval_error_json(const std::string& input, const positioned_error& e) {
    ordered_json d;
    d["code"] = errc_name(e.code());
    d["message"] = detail::strip_code_prefix(e);
    d["span"] = {{"begin", e.span().begin}, {"end", e.span().end}};
    if (!e.expected().empty()) d["expected"] = e.expected();
    ordered_json j;
    j["input"] = input;
    j["value"] = nullptr;
    j["kind"] = "error";
    j["diagnostics"] = ordered_json::array({d});
    return j;
}

int eval_one(const RunConfig& cfg, const std::string& input, bool single_shot) {
    const bool json = cfg.format == OutputFormat::json;
    try {
        const EvalValue v = evaluate_text(input, cfg.truncation);
        if (json) {
            ordered_json j;
            j["input"] = input;
            j["value"] = v.str();
            j["kind"] = eval_kind_name(v.kind);
            j["diagnostics"] = ordered_json::array();
            if (single_shot) emit_json(j);
            else std::fputs((j.dump() + "\n").c_str(), stdout);
        } else {
            std::fputs((v.str() + "\n").c_str(), stdout);
        }
        return exit_pass;
    } catch (const positioned_error& e) {
        if (json) {
            const ordered_json j = eval_error_json(input, e);
            if (single_shot) emit_json(j);
            else std::fputs((j.dump() + "\n").c_str(), stdout);
        } else {
            print_caret(input, e);
        }
        if (!single_shot) return exit_fail;
        return parse_category(e.code()) ? exit_usage : exit_fail;
    }
}

int cmd_eval(const RunConfig& cfg, const std::optional<std::string>& expr) {
    if (expr) return eval_one(cfg, *expr, true);
    const bool tty = isatty(STDIN_FILENO) != 0;
    std::string line;
    int rc = exit_pass;
    if (tty) std::fputs("> ", stderr);
    while (std::getline(std::cin, line)) {
        if (!trimmed(line).empty() && eval_one(cfg, line, false) != exit_pass) rc = exit_fail;
        if (tty) std::fputs("> ", stderr);
    }
    if (tty) std::fputs("\n", stderr);
    return rc;
}

// ---------------------------------------------------------------- checks ---

int cmd_check_econv(const RunConfig& cfg, AggregateKind kind, const std::string& rule_name,
                    double x) {
    const TermRule rule = lookup_rule(rule_name, x);
    const EConvergenceVerdict v = econvergence_check(kind, rule, cfg.make_index(), cfg.tolerance("tail"));
    if (cfg.format == OutputFormat::json) {
        ordered_json j;
        j["check"] = "econv";
        j["config"] = config_to_json(cfg);
        j["kind"] = aggregate_name(kind);
        j["rule"] = v.rule_name;
        auto cond = [&](const ConditionEvidence& c) {
            ordered_json e;
            e["status"] = status_name(c.status);
            e["note"] = c.note;
            if (!c.data.empty()) e["data"] = json_array(c.data, cfg.exact_mode);
            return e;
        };
        j["conditions"] = {{"expressible", cond(v.expressible)},
                           {"bounded", cond(v.bounded)},
                           {"tails", cond(v.tails)}};
        j["overall"] = status_name(v.overall);
        emit_json(j);
    } else {
        std::printf("check: econv %s over rule '%s'\n", aggregate_name(kind), v.rule_name.c_str());
        std::printf("  (i)   expressible  %-12s %s\n", verdict_text(v.expressible.status),
                    v.expressible.note.c_str());
        std::printf("  (ii)  bounded      %-12s %s\n", verdict_text(v.bounded.status),
                    v.bounded.note.c_str());
        std::printf("  (iii) tails        %-12s %s\n", verdict_text(v.tails.status),
                    v.tails.note.c_str());
        std::printf("overall: %s\n", verdict_text(v.overall));
    }
    return v.overall == CheckStatus::pass ? exit_pass : exit_fail;
}

int cmd_check_transfer(const RunConfig& cfg, AggregateKind kind, const std::string& rule_a,
                       const std::string& rule_b, double x) {
    const TransferReport r =
        termwise_transfer_check(kind, lookup_rule(rule_a, x), lookup_rule(rule_b, x),
                                cfg.make_index(), cfg.tolerance("transfer"), cfg.tolerance("tail"));
    if (cfg.format == OutputFormat::json) {
        ordered_json j;
        j["check"] = "transfer";
        j["config"] = config_to_json(cfg);
        j["kind"] = aggregate_name(kind);
        j["rule_a"] = r.rule_a;
        j["rule_b"] = r.rule_b;
        j["gaps"] = json_array(r.gaps, cfg.exact_mode);
        j["final_gap"] = detail::json_number(r.final_gap, cfg.exact_mode);
        j["max_gap"] = detail::json_number(r.max_gap, cfg.exact_mode);
        j["decay_order"] = detail::json_number(r.decay_order, cfg.exact_mode);
        ordered_json terms = ordered_json::array();
        for (const auto& tg : r.per_term) {
            ordered_json t;
            t["k"] = tg.k;
            t["gaps"] = json_array(tg.values, cfg.exact_mode);
            t["shrinking"] = tg.shrinking;
            terms.push_back(t);
        }
        j["per_term"] = terms;
        j["note"] = r.note;
        j["pass"] = r.pass;
        emit_json(j);
    } else {
        std::printf("check: transfer %s, '%s' vs '%s'\n", aggregate_name(kind), r.rule_a.c_str(),
                    r.rule_b.c_str());
        std::printf("  %s\n", r.note.c_str());
        std::printf("  final gap %.6g (max %.6g, tolerance %.3g)\n", r.final_gap, r.max_gap,
                    cfg.tolerance("transfer"));
        for (const auto& tg : r.per_term)
            std::printf("  term k=%-3lld gap %.4g -> %.4g %s\n", static_cast<long long>(tg.k),
                        tg.values.front(), tg.values.back(),
                        tg.shrinking ? "(shrinking)" : "(NOT shrinking)");
        std::printf("overall: %s\n", r.pass ? "pass" : "FAIL");
    }
    return r.pass ? exit_pass : exit_fail;
}

int cmd_check_factorization(const RunConfig& cfg, int i, const std::optional<double>& a,
                            const std::optional<double>& b, int trials, unsigned long long seed) {
    const double tol = cfg.tolerance("factorization");
    double worst_rel = 0.0;
    bool all_pass = true;
    std::optional<bool> exact_zero;

    if (a || b) {
        if (!(a && b)) throw UsageError("--a and --b must be given together");
        const Step2Result r = check_step2_factorization(i, *a, *b, tol);
        worst_rel = r.relative;
        all_pass = r.pass;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> box(-2.0, 2.0);
        for (int t = 0; t < trials; ++t) {
            const Step2Result r = check_step2_factorization(i, box(rng), box(rng), tol);
            worst_rel = std::max(worst_rel, r.relative);
            all_pass = all_pass && r.pass;
        }
    }
    if (i == 2 || i == 3 || i == 4 || i == 6) {
        // The interior cosines are rational here, so the identity can be
        // checked in exact arithmetic; the residual must vanish identically.
        std::mt19937_64 rng(seed + 1);
        std::uniform_int_distribution<int> num(-8, 8), den(1, 8);
        bool zero = true;
        for (int t = 0; t < 25; ++t) {
            const cpp_rational qa(num(rng), den(rng)), qb(num(rng), den(rng));
            zero = zero && check_step2_factorization_exact(i, qa, qb).is_zero();
        }
        exact_zero = zero;
        all_pass = all_pass && zero;
    }

    if (cfg.format == OutputFormat::json) {
        ordered_json j;
        j["check"] = "factorization";
        j["config"] = config_to_json(cfg);
        j["i"] = i;
        if (a) {
            j["a"] = detail::json_number(*a, cfg.exact_mode);
            j["b"] = detail::json_number(*b, cfg.exact_mode);
        } else {
            j["trials"] = trials;
            j["seed"] = seed;
        }
        j["worst_relative"] = detail::json_number(worst_rel, cfg.exact_mode);
        j["tolerance"] = detail::json_number(tol, cfg.exact_mode);
        if (exact_zero) j["exact_zero"] = *exact_zero;
        j["pass"] = all_pass;
        emit_json(j);
    } else {
        std::printf("check: factorization a^%d - b^%d = (a - b)%s prod(a^2 + b^2 - 2ab cos(2 pi k/%d))\n",
                    i, i, i % 2 == 0 ? "(a + b)" : "", i);
        if (a)
            std::printf("  point a = %.17g, b = %.17g\n", *a, *b);
        else
            std::printf("  %d random points in [-2,2]^2 (seed %llu)\n", trials, seed);
        std::printf("  worst relative residual %.6g (tolerance %.3g)\n", worst_rel, tol);
        if (exact_zero)
            std::printf("  exact rational residual %s\n",
                        *exact_zero ? "identically 0 over 25 samples" : "NONZERO");
        std::printf("overall: %s\n", all_pass ? "pass" : "FAIL");
    }
    return all_pass ? exit_pass : exit_fail;
}

int cmd_check_step4(const RunConfig& cfg, double x, std::int64_t K) {
    const HiddenLemmaBound r = check_step4_replacement(x, K, cfg.make_index());
    if (cfg.format == OutputFormat::json) {
        ordered_json j;
        j["check"] = "step4";
        j["config"] = config_to_json(cfg);
        j["x"] = detail::json_number(x, cfg.exact_mode);
        j["factors"] = K;
        j["gamma"] = detail::json_number(r.gamma, cfg.exact_mode);
        j["gamma_fit_half"] = detail::json_number(r.gamma_fit_half, cfg.exact_mode);
        j["gamma_holdout_half"] = detail::json_number(r.gamma_holdout_half, cfg.exact_mode);
        j["fit_residual"] = detail::json_number(r.fit_residual, cfg.exact_mode);
        j["p1_by_point"] = json_array(r.p1_by_point, cfg.exact_mode);
        j["p1_decay_ratio"] = detail::json_number(r.p1_decay_ratio, cfg.exact_mode);
        j["aggregate"] = json_array(r.aggregate, cfg.exact_mode);
        j["aggregate_bound"] = json_array(r.aggregate_bound, cfg.exact_mode);
        j["pass"] = r.pass;
        emit_json(j);
    } else {
        std::printf("check: step4 cosine replacement, x = %g, factors k = %lld..%lld\n", x,
                    static_cast<long long>(r.k_min), static_cast<long long>(r.k_max));
        std::printf("  |p_k| <= gamma/k^2 with gamma %.6g (lower-half fit %.6g, holdout %.6g, "
                    "holdout excess %.3g)\n",
                    r.gamma, r.gamma_fit_half, r.gamma_holdout_half, r.fit_residual);
        std::printf("  p_1 shrinks %.4gx per schedule step (4x per doubling expected)\n",
                    r.p1_decay_ratio);
        std::printf("  aggregate |prod T_k/(C_k U_k) - 1| = %.4g at top n (bound %.4g)\n",
                    r.aggregate.back(), r.aggregate_bound.back());
        std::printf("overall: %s\n", r.pass ? "pass" : "FAIL");
    }
    return r.pass ? exit_pass : exit_fail;
}

int cmd_check_archimedean(const RunConfig& cfg, const std::string& xs, const std::string& ys) {
    LaurentNumber x(cfg.truncation), y(cfg.truncation);
    try {
        const EvalValue vx = evaluate_text(xs, cfg.truncation);
        const EvalValue vy = evaluate_text(ys, cfg.truncation);
        if (vx.kind != EvalValue::Kind::number || vy.kind != EvalValue::Kind::number)
            throw UsageError("archimedean check needs two numeric expressions");
        x = vx.num;
        y = vy.num;
    } catch (const positioned_error& e) {
        print_caret(e.span().begin < xs.size() ? xs : ys, e);
        return exit_usage;
    }
    const ArchResult r = is_archimedean_pair(x, y);
    if (cfg.format == OutputFormat::json) {
        ordered_json j;
        j["check"] = "archimedean";
        j["config"] = config_to_json(cfg);
        j["x"] = format_laurent(x);
        j["y"] = format_laurent(y);
        j["comparable"] = r.archimedean;
        j["witness"] = r.witness ? ordered_json(r.witness->str()) : ordered_json(nullptr);
        emit_json(j);
    } else {
        std::printf("check: archimedean comparability (Elements V Def. 4)\n");
        std::printf("  x = %s   (val %s)\n", format_laurent(x).c_str(), x.val().str().c_str());
        std::printf("  y = %s   (val %s)\n", format_laurent(y).c_str(), y.val().str().c_str());
        if (r.archimedean)
            std::printf("  some multiple of x exceeds y; least witness n = %s\n",
                        r.witness->str().c_str());
        else
            std::printf("  no integer multiple of x exceeds y\n");
        std::printf("overall: %s\n", r.archimedean ? "pass" : "FAIL");
    }
    return r.archimedean ? exit_pass : exit_fail;
}

int classify_engine_error(const error& e) {
    switch (e.code()) {
        case errc::invalid_argument:
        case errc::domain_error:
        case errc::nonpositive_input:
            return exit_usage;
        default:
            return exit_fail;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperfinite calculus workbench: truncated Laurent series, hyperfinite\n"
                 "sums and products, and audited reenactments of Euler's derivations"};
    app.require_subcommand(1);
    GlobalFlags g;
    g.wire(app);

    std::function<int(const RunConfig&)> run;

    auto* eval_cmd = app.add_subcommand(
        "eval", "evaluate an expression; with no argument, read lines from stdin");
    eval_cmd->fallthrough();
    std::string eval_expr;
    auto* eval_arg = eval_cmd->add_option("expr", eval_expr, "expression, e.g. \"st((dx+dx^2)/dx)\"");
    eval_cmd->callback([&] {
        run = [&](const RunConfig& cfg) {
            return cmd_eval(cfg, eval_arg->count() ? std::optional<std::string>(eval_expr)
                                                   : std::nullopt);
        };
    });

    auto* derive = app.add_subcommand("derive", "reenact a classical derivation, step by step");
    derive->require_subcommand(1);
    derive->fallthrough();

    auto* dexp = derive->add_subcommand("exp", "exponential series from (1 + kz/n)^n");
    dexp->fallthrough();
    std::string exp_k = "1", exp_z = "1";
    int exp_rmax = 10;
    dexp->add_option("--k", exp_k, "rate constant k, as p/q or decimal (default 1)");
    dexp->add_option("--z", exp_z, "argument z, as p/q or decimal (default 1)");
    dexp->add_option("--r-max", exp_rmax, "series order to audit (default 10)")
        ->check(CLI::Range(1, 12));
    dexp->callback([&] {
        run = [&](const RunConfig& cfg) {
            return emit_report(derive_exp_series(parse_rational_flag(exp_k, "--k"),
                                                 parse_rational_flag(exp_z, "--z"), exp_rmax, cfg));
        };
    });

    auto* dsine = derive->add_subcommand("sine-product",
                                         "factorization route to sin/sinh as a product");
    dsine->fallthrough();
    double sine_x = 1.0;
    std::string sine_which = "sin";
    std::int64_t sine_k = 100;
    dsine->add_option("--x", sine_x, "evaluation point")->required();
    dsine->add_option("--which", sine_which, "sin or sinh (default sin)")
        ->check(CLI::IsMember({"sin", "sinh"}));
    dsine->add_option("--factors", sine_k, "retained factor count K (default 100)")
        ->check(CLI::PositiveNumber);
    dsine->callback([&] {
        run = [&](const RunConfig& cfg) {
            const SineWhich w = sine_which == "sinh" ? SineWhich::sinh_form : SineWhich::sin_form;
            return emit_report(derive_sine_product(sine_x, w, sine_k, cfg));
        };
    });

    auto* wallis = app.add_subcommand("wallis", "Wallis product partial audit");
    wallis->fallthrough();
    std::int64_t wallis_n = 10000;
    wallis->add_option("--factors", wallis_n, "paired factor count N (default 10000)")
        ->check(CLI::PositiveNumber);
    wallis->callback([&] {
        run = [&](const RunConfig& cfg) { return emit_report(wallis_report(wallis_n, cfg)); };
    });

    auto* basel = app.add_subcommand("basel", "Basel sum, two routes");
    basel->fallthrough();
    std::int64_t basel_n = 10000;
    std::string basel_route = "direct";
    basel->add_option("--terms", basel_n, "term count N (default 10000)")
        ->check(CLI::PositiveNumber);
    basel->add_option("--route", basel_route, "direct or coefficients (default direct)")
        ->check(CLI::IsMember({"direct", "coefficients"}));
    basel->callback([&] {
        run = [&](const RunConfig& cfg) {
            const BaselRoute r =
                basel_route == "coefficients" ? BaselRoute::coefficients : BaselRoute::direct;
            return emit_report(basel_report(basel_n, r, cfg));
        };
    });

    auto* lhopital = app.add_subcommand("lhopital", "(1 - x^z)/z at infinitesimal z");
    lhopital->fallthrough();
    double lh_x = 2.0;
    lhopital->add_option("--x", lh_x, "base x > 0, x != 1")->required();
    lhopital->callback([&] {
        run = [&](const RunConfig& cfg) { return emit_report(lhopital_report(lh_x, cfg)); };
    });

    auto* integrate = app.add_subcommand("integrate", "hyperfinite rectangle sums with shadow");
    integrate->fallthrough();
    std::string int_fn = "square";
    double int_a = 0.0, int_b = 1.0;
    integrate->add_option("--fn", int_fn, "integrand: square, cube, sin, exp, recip");
    integrate->add_option("--a", int_a, "lower endpoint (default 0)");
    integrate->add_option("--b", int_b, "upper endpoint (default 1)");
    integrate->callback([&] {
        run = [&](const RunConfig& cfg) {
            return emit_report(integrate_report(int_fn, int_a, int_b, cfg));
        };
    });

    auto* check = app.add_subcommand("check", "run a single audited check");
    check->require_subcommand(1);
    check->fallthrough();

    auto* econv = check->add_subcommand("econv", "three-condition convergence audit");
    econv->fallthrough();
    std::string econv_kind = "sum", econv_rule;
    double econv_x = 1.0;
    econv->add_option("--kind", econv_kind, "sum or product (default sum)")
        ->check(CLI::IsMember({"sum", "product"}));
    econv->add_option("--rule", econv_rule,
                      "term rule name or inline c1*k^a/(c2*N^b)")
        ->required();
    econv->add_option("--x", econv_x, "free parameter for parameterized rules (default 1)");
    econv->callback([&] {
        run = [&](const RunConfig& cfg) {
            const AggregateKind k =
                econv_kind == "product" ? AggregateKind::product : AggregateKind::sum;
            return cmd_check_econv(cfg, k, econv_rule, econv_x);
        };
    });

    auto* transfer = check->add_subcommand("transfer", "aggregate gap between close term rules");
    transfer->fallthrough();
    std::string tr_kind = "sum", tr_a, tr_b;
    double tr_x = 1.0;
    transfer->add_option("--kind", tr_kind, "sum or product (default sum)")
        ->check(CLI::IsMember({"sum", "product"}));
    transfer->add_option("--rule-a", tr_a, "first term rule")->required();
    transfer->add_option("--rule-b", tr_b, "second term rule")->required();
    transfer->add_option("--x", tr_x, "free parameter for parameterized rules (default 1)");
    transfer->callback([&] {
        run = [&](const RunConfig& cfg) {
            const AggregateKind k = tr_kind == "product" ? AggregateKind::product : AggregateKind::sum;
            return cmd_check_transfer(cfg, k, tr_a, tr_b, tr_x);
        };
    });

    auto* fact = check->add_subcommand("factorization", "cyclotomic identity for a^i - b^i");
    fact->fallthrough();
    int fact_i = 5, fact_trials = 100;
    unsigned long long fact_seed = 20210922ull;
    double fact_a = 0.0, fact_b = 0.0;
    fact->add_option("--i", fact_i, "exponent i in [2, 64]")->required()->check(CLI::Range(2, 64));
    auto* fact_a_opt = fact->add_option("--a", fact_a, "check one point instead of sampling");
    auto* fact_b_opt = fact->add_option("--b", fact_b, "check one point instead of sampling");
    fact->add_option("--trials", fact_trials, "random sample count (default 100)")
        ->check(CLI::PositiveNumber);
    fact->add_option("--seed", fact_seed, "sampling seed");
    fact->callback([&] {
        run = [&](const RunConfig& cfg) {
            return cmd_check_factorization(
                cfg, fact_i,
                fact_a_opt->count() ? std::optional<double>(fact_a) : std::nullopt,
                fact_b_opt->count() ? std::optional<double>(fact_b) : std::nullopt, fact_trials,
                fact_seed);
        };
    });

    auto* step4 = check->add_subcommand("step4", "cosine-replacement bound |p_k| <= gamma/k^2");
    step4->fallthrough();
    double s4_x = 1.0;
    std::int64_t s4_k = 500;
    step4->add_option("--x", s4_x, "evaluation point (default 1)");
    step4->add_option("--factors", s4_k, "checked factor count K (default 500)")
        ->check(CLI::PositiveNumber);
    step4->callback([&] {
        run = [&](const RunConfig& cfg) { return cmd_check_step4(cfg, s4_x, s4_k); };
    });

    auto* arch = check->add_subcommand("archimedean", "Elements V Def. 4 comparability");
    arch->fallthrough();
    std::string arch_x, arch_y;
    arch->add_option("x", arch_x, "first value (expression)")->required();
    arch->add_option("y", arch_y, "second value (expression)")->required();
    arch->callback([&] {
        run = [&](const RunConfig& cfg) { return cmd_check_archimedean(cfg, arch_x, arch_y); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::fprintf(stderr, "run 'nonarch --help' for usage\n");
        return exit_usage;
    }

    RunConfig cfg;
    try {
        cfg = g.assemble();
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }

    try {
        return run(cfg);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify_engine_error(e);
    }
}
