#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

enum class ErrorCode {
    ProbabilityNotNormalized,
    LossOutOfRange,
    PowersNotAscending,
    DegenerateGammaOne,
    InvalidSpec,
    InfeasiblePower,
    SingularSystem,
    InconsistentOccupancy,
    BracketNotFound,
    DegenerateBracket,
    DegenerateLoss,
    SolverFailure,
    ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Error raised by every library routine; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ProbabilityNotNormalized: return "ProbabilityNotNormalized";
        case ErrorCode::LossOutOfRange: return "LossOutOfRange";
        case ErrorCode::PowersNotAscending: return "PowersNotAscending";
        case ErrorCode::DegenerateGammaOne: return "DegenerateGammaOne";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InfeasiblePower: return "InfeasiblePower";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::InconsistentOccupancy: return "InconsistentOccupancy";
        case ErrorCode::BracketNotFound: return "BracketNotFound";
        case ErrorCode::DegenerateBracket: return "DegenerateBracket";
        case ErrorCode::DegenerateLoss: return "DegenerateLoss";
        case ErrorCode::SolverFailure: return "SolverFailure";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace aoi
