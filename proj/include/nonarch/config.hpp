#pragma once

#include <map>
#include <string>

#include "nonarch/errors.hpp"
#include "nonarch/schedule.hpp"

namespace nonarch {

enum class OutputFormat { text, json };

/// One run's knobs: truncation depth, probe schedule, arithmetic mode,
/// output format and the named tolerance table. Every tolerance has a
/// documented default and can be overridden per run.
struct RunConfig {
    int truncation = 16;
    ScheduleSpec schedule{};
    Parity parity = Parity::none;
    bool exact_mode = true;
    OutputFormat format = OutputFormat::text;
    std::map<std::string, double> tolerances = default_tolerances();

    static std::map<std::string, double> default_tolerances() {
        return {
            {"identity", 1e-9},        // double-precision algebraic identities, relative
            {"factorization", 1e-9},   // step-2 product identity, relative
            {"shadow", 1e-8},          // sequence shadow convergence
            {"tail", 1e-5},            // convergence-audit tail aggregates
            {"transfer", 1e-4},        // aggregate gap in transfer checks
            {"exp-coeff", 5e-5},       // binomial vs 1/r! coefficients
            {"exp-cumulative", 1e-4},  // summed coefficient residual
            {"step1", 1e-4},           // binomial difference vs 2 sinh x
            {"sine-final", 1e-3},      // partial product vs sin/sinh
            {"normalization", 1e-12},  // first Maclaurin coefficient
            {"integral", 1e-6},        // hyperfinite integral shadow
            {"wallis", 1e-4},          // partial product vs pi/2
            {"basel", 2e-4},           // partial sum vs pi^2/6
        };
    }

    double tolerance(const std::string& name) const {
        auto it = tolerances.find(name);
        if (it == tolerances.end()) raise(errc::invalid_argument, "unknown tolerance '" + name + "'");
        return it->second;
    }

    void set_tolerance(const std::string& name, double value) {
        if (!(value > 0.0)) raise(errc::invalid_argument, "tolerance '" + name + "' must be positive");
        if (tolerances.find(name) == tolerances.end())
            raise(errc::invalid_argument, "unknown tolerance '" + name + "'");
        tolerances[name] = value;
    }

    void validate() const {
        if (truncation < 2) raise(errc::invalid_argument, "truncation must be at least 2");
        for (const auto& [name, v] : tolerances)
            if (!(v > 0.0)) raise(errc::invalid_argument, "tolerance '" + name + "' must be positive");
    }

    InfiniteIndex make_index() const { return InfiniteIndex(schedule, parity); }
};

}  // namespace nonarch
