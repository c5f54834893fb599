#include "mixlab/error.hpp"

namespace mixlab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotReversible: return "NotReversible";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::ZeroStationaryMass: return "ZeroStationaryMass";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NoUpperBracket: return "NoUpperBracket";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::InvalidKind: return "InvalidKind";
        case ErrorCode::TimeTooSmall: return "TimeTooSmall";
        case ErrorCode::NonPositiveMixingTime: return "NonPositiveMixingTime";
        case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
        case ErrorCode::DegenerateRates: return "DegenerateRates";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InadmissibleParams: return "InadmissibleParams";
        case ErrorCode::UnknownSchedule: return "UnknownSchedule";
    }
    return "Unknown";
}

bool is_input_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidInput:
        case ErrorCode::Reducible:
        case ErrorCode::NotReversible:
        case ErrorCode::ZeroStationaryMass:
        case ErrorCode::TooLarge:
        case ErrorCode::InvalidKind:
        case ErrorCode::TimeTooSmall:
        case ErrorCode::MonotonicityViolated:
        case ErrorCode::DegenerateRates:
        case ErrorCode::DomainError:
        case ErrorCode::InadmissibleParams:
        case ErrorCode::UnknownSchedule:
            return true;
        default:
            return false;
    }
}

}  // namespace mixlab
