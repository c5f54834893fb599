#pragma once

#include <stdexcept>
#include <string>

namespace mixlab {

enum class ErrorCode {
    DimensionMismatch,
    InvalidArgument,
    InvalidInput,
    Reducible,
    NoConvergence,
    NotReversible,
    EigenFailure,
    ZeroStationaryMass,
    BudgetExceeded,
    NoUpperBracket,
    TooLarge,
    InvalidKind,
    TimeTooSmall,
    NonPositiveMixingTime,
    MonotonicityViolated,
    DegenerateRates,
    DomainError,
    InadmissibleParams,
    UnknownSchedule,
};

const char* error_code_name(ErrorCode code);

// Input errors map to CLI exit code 2, everything else to exit code 3.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mixlab
