#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonarch/coefficient.hpp"
#include "nonarch/config.hpp"
#include "nonarch/errors.hpp"

namespace nonarch {

/// One audited step of a derivation. `residual` is the measured defect
/// (always nonnegative), `bound` an analytic or configured ceiling when one
/// applies, and `anchor` names the classical source the step reenacts.
struct StepRecord {
    std::string id;
    std::string anchor;
    std::string claim;
    double residual = 0.0;
    std::optional<double> bound;
    bool pass = false;
};

struct DerivationReport {
    std::string derivation;
    RunConfig config;
    std::map<std::string, std::string> params;  // run parameters, stringified
    std::vector<StepRecord> steps;
    bool overall = false;

    void add_step(StepRecord step) {
        if (step.id.empty()) raise(errc::invalid_argument, "step id must be nonempty");
        if (step.anchor.empty()) raise(errc::invalid_argument, "step '" + step.id + "' lacks an anchor");
        if (!(step.residual >= 0.0))
            raise(errc::invalid_argument, "step '" + step.id + "' has a negative or non-finite residual");
        steps.push_back(std::move(step));
    }

    // Overall verdict is the conjunction of the step verdicts, nothing else.
    void finalize() {
        overall = true;
        for (const auto& s : steps) overall = overall && s.pass;
    }
};

namespace detail {

// Lenient monotonicity for audited residual tracks: tiny floating-point
// wobble at the noise floor is not a regression.
inline bool nonincreasing(const std::vector<double>& v) {
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] > v[j - 1] * (1.0 + 1e-9) + 1e-18) return false;
    return true;
}

// In exact mode numbers are emitted as decimal strings so the byte stream
// does not depend on the JSON library's float formatting; in approx mode
// plain JSON numbers are used.
inline nlohmann::ordered_json json_number(double v, bool exact_mode) {
    if (exact_mode) return nlohmann::ordered_json(double_to_string(v));
    return nlohmann::ordered_json(v);
}

}  // namespace detail

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["truncation"] = cfg.truncation;
    j["schedule"] = {{"base", cfg.schedule.base},
                     {"ratio", cfg.schedule.ratio},
                     {"count", cfg.schedule.count},
                     {"parity", parity_name(cfg.parity)}};
    j["mode"] = cfg.exact_mode ? "exact" : "approx";
    nlohmann::ordered_json tol;
    for (const auto& [name, v] : cfg.tolerances) tol[name] = detail::json_number(v, cfg.exact_mode);
    j["tolerances"] = tol;
    return j;
}

inline nlohmann::ordered_json report_to_json(const DerivationReport& rep) {
    nlohmann::ordered_json j;
    j["derivation"] = rep.derivation;
    j["config"] = config_to_json(rep.config);
    if (!rep.params.empty()) {
        nlohmann::ordered_json p;
        for (const auto& [k, v] : rep.params) p[k] = v;
        j["config"]["params"] = p;
    }
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : rep.steps) {
        nlohmann::ordered_json js;
        js["id"] = s.id;
        js["anchor"] = s.anchor;
        js["claim"] = s.claim;
        js["residual"] = detail::json_number(s.residual, rep.config.exact_mode);
        if (s.bound) js["bound"] = detail::json_number(*s.bound, rep.config.exact_mode);
        js["pass"] = s.pass;
        j["steps"].push_back(js);
    }
    j["overall"] = rep.overall;
    return j;
}

inline std::string report_to_text(const DerivationReport& rep) {
    std::string out = "derivation: " + rep.derivation + "\n";
    for (const auto& [k, v] : rep.params) out += "  param " + k + " = " + v + "\n";
    for (const auto& s : rep.steps) {
        char line[256];
        if (s.bound)
            std::snprintf(line, sizeof line, "  %-28s residual %-12.6g bound %-12.6g %s\n", s.id.c_str(),
                          s.residual, *s.bound, s.pass ? "pass" : "FAIL");
        else
            std::snprintf(line, sizeof line, "  %-28s residual %-12.6g %s\n", s.id.c_str(), s.residual,
                          s.pass ? "pass" : "FAIL");
        out += line;
    }
    out += std::string("overall: ") + (rep.overall ? "pass" : "FAIL") + "\n";
    return out;
}

inline std::string render_report(const DerivationReport& rep) {
    if (rep.config.format == OutputFormat::json) return report_to_json(rep).dump(2) + "\n";
    return report_to_text(rep);
}

}  // namespace nonarch
