#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

// End-to-end tests against the installed binary: every invocation goes
// through a real shell, so quoting, exit codes, and stream separation are
// exercised exactly as a user would hit them.

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(NONARCH_CLI_PATH) + " " + args;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int rc = pclose(pipe);
    REQUIRE(WIFEXITED(rc));
    r.status = WEXITSTATUS(rc);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("eval prints the standard part of a difference quotient") {
    const RunResult r = run_cli("eval \"st((dx+dx^2)/dx)\"");
    CHECK(r.status == 0);
    CHECK(r.out == "1\n");
}

TEST_CASE("eval renders Laurent values canonically and honors truncation") {
    CHECK(run_cli("eval \"1 + eps - 1/2*eps^2\"").out == "1 + eps - 1/2*eps^2\n");
    CHECK(run_cli("eval \"2*omega + 3\"").out == "2*omega + 3\n");
    CHECK(run_cli("--truncation 4 eval \"1/(1-eps)\"").out == "1 + eps + eps^2 + eps^3 + eps^4\n");
    CHECK(run_cli("eval \"1/(1-eps)\" --truncation 6").out ==
          "1 + eps + eps^2 + eps^3 + eps^4 + eps^5 + eps^6\n");
    CHECK(run_cli("eval \"aeq(sin(eps)/eps, 1)\"").out == "true\n");
    CHECK(run_cli("eval \"val(eps^3/2)\"").out == "3\n");
}

TEST_CASE("eval JSON carries input, value, kind, and empty diagnostics") {
    const RunResult r = run_cli("eval \"st(1 + eps)\" --format json 2>/dev/null");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["input"] == "st(1 + eps)");
    CHECK(j["value"] == "1");
    CHECK(j["kind"] == "number");
    CHECK(j["diagnostics"].is_array());
    CHECK(j["diagnostics"].empty());
}

TEST_CASE("eval distinguishes parse errors (2) from evaluation errors (1)") {
    CHECK(run_cli("eval \"st((dx\" 2>/dev/null").status == 2);
    CHECK(run_cli("eval \"frob(2)\" 2>/dev/null").status == 2);
    CHECK(run_cli("eval \"2^eps\" 2>/dev/null").status == 2);
    CHECK(run_cli("eval \"1/(eps-eps)\" 2>/dev/null").status == 1);
    CHECK(run_cli("eval \"st(omega)\" 2>/dev/null").status == 1);
}

TEST_CASE("eval JSON error objects carry code, message, and span") {
    const RunResult r = run_cli("eval \"st(omega)\" --format json 2>/dev/null");
    CHECK(r.status == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["kind"] == "error");
    CHECK(j["value"].is_null());
    REQUIRE(j["diagnostics"].size() == 1);
    CHECK(j["diagnostics"][0]["code"] == "UnlimitedInput");
    CHECK(j["diagnostics"][0]["span"]["begin"] == 3);
    CHECK(j["diagnostics"][0]["span"]["end"] == 8);
}

TEST_CASE("eval line mode evaluates stdin and reports partial failure") {
    const RunResult ok = run_cli("eval <<'EOF' 2>/dev/null\n1+eps\n2^5\nEOF");
    CHECK(ok.status == 0);
    CHECK(ok.out == "1 + eps\n32\n");
    const RunResult mixed = run_cli("eval <<'EOF' 2>/dev/null\n1+eps\nst(omega)\n2^5\nEOF");
    CHECK(mixed.status == 1);
    CHECK(mixed.out == "1 + eps\n32\n");
}

TEST_CASE("derive sine-product emits a passing JSON report") {
    const RunResult r =
        run_cli("derive sine-product --x 1.5707963 --which sin --factors 100 --format json 2>/dev/null");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["derivation"] == "sine-product");
    CHECK(j["overall"] == true);
    CHECK(j["config"]["mode"] == "exact");
    CHECK(j["config"]["params"]["factors"] == "100");
    REQUIRE(j["steps"].size() == 8);
    for (const auto& s : j["steps"]) {
        CHECK(s["pass"] == true);
        CHECK(s["residual"].is_string());  // exact mode serializes numbers as strings
    }
    CHECK(j["steps"][0]["id"] == "binomial-difference");
    CHECK(j["steps"].back()["id"] == "partial-product");
}

TEST_CASE("check econv fails the harmonic sum on boundedness with exit 1") {
    const RunResult r = run_cli("check econv --kind sum --rule harmonic 2>/dev/null");
    CHECK(r.status == 1);
    CHECK(contains(r.out, "(ii)  bounded      FAIL"));
    CHECK(contains(r.out, "overall: FAIL"));

    const RunResult g = run_cli("check econv --kind sum --rule geometric 2>/dev/null");
    CHECK(g.status == 0);
    CHECK(contains(g.out, "overall: pass"));

    const RunResult w = run_cli("check econv --kind product --rule wallis-pair 2>/dev/null");
    CHECK(w.status == 0);
}

TEST_CASE("check transfer closes the binomial-vs-exponential gap") {
    const RunResult r =
        run_cli("check transfer --rule-a binomial-exp --rule-b exp-terms --x 1 --format json 2>/dev/null");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["rule_a"] == "binomial-exp");
    const double order = std::stod(j["decay_order"].get<std::string>());
    CHECK(order > 0.8);
    for (const auto& t : j["per_term"]) CHECK(t["shrinking"] == true);
}

TEST_CASE("check factorization passes for generic and exact indices") {
    const RunResult r5 = run_cli("check factorization --i 5 --format json 2>/dev/null");
    CHECK(r5.status == 0);
    const auto j5 = nlohmann::json::parse(r5.out);
    CHECK(j5["pass"] == true);
    CHECK(std::stod(j5["worst_relative"].get<std::string>()) <= 1e-9);
    CHECK_FALSE(j5.contains("exact_zero"));

    const RunResult r6 = run_cli("check factorization --i 6 --format json 2>/dev/null");
    const auto j6 = nlohmann::json::parse(r6.out);
    CHECK(j6["exact_zero"] == true);

    const RunResult point = run_cli("check factorization --i 8 --a 1.25 --b -0.5 2>/dev/null");
    CHECK(point.status == 0);
}

TEST_CASE("check step4 reports a finite gamma with holdout evidence") {
    const RunResult r =
        run_cli("check step4 --x 1 --factors 200 --schedule 3125:2:5 --format json 2>/dev/null");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    const double gamma = std::stod(j["gamma"].get<std::string>());
    CHECK(gamma > 0.0);
    const double ratio = std::stod(j["p1_decay_ratio"].get<std::string>());
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("check archimedean separates comparable and incomparable pairs") {
    const RunResult yes = run_cli("check archimedean 2 7 --format json 2>/dev/null");
    CHECK(yes.status == 0);
    const auto jy = nlohmann::json::parse(yes.out);
    CHECK(jy["comparable"] == true);
    CHECK(jy["witness"] == "4");

    const RunResult no = run_cli("check archimedean eps 3 --format json 2>/dev/null");
    CHECK(no.status == 1);
    const auto jn = nlohmann::json::parse(no.out);
    CHECK(jn["comparable"] == false);
    CHECK(jn["witness"].is_null());
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("badcmd 2>/dev/null").status == 2);
    CHECK(run_cli("derive exp --r-max 40 2>/dev/null").status == 2);
    CHECK(run_cli("check econv --rule nosuch 2>/dev/null").status == 2);
    CHECK(run_cli("wallis --schedule 1:1:1 2>/dev/null").status == 2);
    CHECK(run_cli("lhopital --x -3 2>/dev/null").status == 2);
    CHECK(run_cli("--tol sine-final=-1 wallis 2>/dev/null").status == 2);
    CHECK(run_cli("--tol nosuch=0.5 wallis 2>/dev/null").status == 2);
}

TEST_CASE("failing tolerances surface as exit 1, and overrides rescue them") {
    const RunResult fail = run_cli("wallis --factors 2000 2>/dev/null");
    CHECK(fail.status == 1);
    CHECK(contains(fail.out, "FAIL"));
    const RunResult pass = run_cli("wallis --factors 2000 --tol wallis=1e-3 2>/dev/null");
    CHECK(pass.status == 0);
}

TEST_CASE("config file values apply and flags override them") {
    const std::string path = "test_cli_config.tmp";
    {
        std::ofstream f(path);
        f << "# comment line\n"
          << "truncation = 4\n"
          << "format = json\n"
          << "tol.wallis = 1e-3\n";
    }
    const RunResult file_only = run_cli("eval \"1/(1-eps)\" --config " + path + " 2>/dev/null");
    CHECK(file_only.status == 0);
    const auto j = nlohmann::json::parse(file_only.out);
    CHECK(j["value"] == "1 + eps + eps^2 + eps^3 + eps^4");

    const RunResult overridden =
        run_cli("eval \"1/(1-eps)\" --config " + path + " --truncation 6 --format text 2>/dev/null");
    CHECK(overridden.out == "1 + eps + eps^2 + eps^3 + eps^4 + eps^5 + eps^6\n");

    const RunResult tol = run_cli("wallis --factors 2000 --config " + path + " --format text 2>/dev/null");
    CHECK(tol.status == 0);

    CHECK(run_cli("eval 1 --config no_such_file.cfg 2>/dev/null").status == 2);
    std::remove(path.c_str());
}

TEST_CASE("identical invocations produce byte-identical JSON") {
    const std::string cmd = "derive exp --z 1/2 --schedule 1000:2:5 --format json 2>/dev/null";
    const RunResult a = run_cli(cmd);
    const RunResult b = run_cli(cmd);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());

    const std::string approx = "basel --terms 500 --mode approx --format json --tol basel=1e-2 2>/dev/null";
    const RunResult c = run_cli(approx);
    const RunResult d = run_cli(approx);
    CHECK(c.out == d.out);
}
