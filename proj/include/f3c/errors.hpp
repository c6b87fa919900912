#pragma once

#include <stdexcept>
#include <string>

namespace f3c {

enum class ErrorCode {
    MismatchedStructure,
    MissingCoupling,
    NonPositiveLinewidth,
    PoleAtEnergy,
    DegenerateDenominator,
    EmptyGrid,
    SpanTooNarrow,
    GridOutsideSpan,
    ConvergenceFailure,
    UnknownPreset,
    IoFailure,
    MalformedFile,
    InvalidArgument,
};

constexpr const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MismatchedStructure: return "MismatchedStructure";
        case ErrorCode::MissingCoupling: return "MissingCoupling";
        case ErrorCode::NonPositiveLinewidth: return "NonPositiveLinewidth";
        case ErrorCode::PoleAtEnergy: return "PoleAtEnergy";
        case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::SpanTooNarrow: return "SpanTooNarrow";
        case ErrorCode::GridOutsideSpan: return "GridOutsideSpan";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

/// Domain error carrying a machine-greppable code. what() starts with the
/// code name so diagnostics stay one-line parseable.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

}  // namespace f3c
