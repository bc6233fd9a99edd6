#pragma once

#include <stdexcept>
#include <string>

namespace nonarch {

enum class errc {
    division_by_zero,
    truncation_underflow,
    unlimited_input,
    zero_input,
    geometric_zero_denominator,
    nonpositive_input,
    domain_error,
    non_finite_result,
    evaluation_error,
    divergence_detected,
    prerequisite_failed,
    factorization_mismatch,
    normalization_failure,
    fit_failure,
    invalid_argument,
    syntax_error,
    unknown_function,
    arity_mismatch,
    non_integer_exponent,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::division_by_zero: return "DivisionByZero";
        case errc::truncation_underflow: return "TruncationUnderflow";
        case errc::unlimited_input: return "UnlimitedInput";
        case errc::zero_input: return "ZeroInput";
        case errc::geometric_zero_denominator: return "GeometricZeroDenominator";
        case errc::nonpositive_input: return "NonpositiveInput";
        case errc::domain_error: return "DomainError";
        case errc::non_finite_result: return "NonFiniteResult";
        case errc::evaluation_error: return "EvaluationError";
        case errc::divergence_detected: return "DivergenceDetected";
        case errc::prerequisite_failed: return "PrerequisiteFailed";
        case errc::factorization_mismatch: return "FactorizationMismatch";
        case errc::normalization_failure: return "NormalizationFailure";
        case errc::fit_failure: return "FitFailure";
        case errc::invalid_argument: return "InvalidArgument";
        case errc::syntax_error: return "SyntaxError";
        case errc::unknown_function: return "UnknownFunction";
        case errc::arity_mismatch: return "ArityMismatch";
        case errc::non_integer_exponent: return "NonIntegerExponent";
    }
    return "UnknownError";
}

/// All engine failures carry a machine-checkable code plus a human message.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace nonarch
