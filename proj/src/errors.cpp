#include "ondelay/errors.hpp"

namespace ondelay {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonIncreasingTimes: return "NonIncreasingTimes";
        case ErrorCode::FirstTimeNotZero: return "FirstTimeNotZero";
        case ErrorCode::NonPositiveDelay: return "NonPositiveDelay";
        case ErrorCode::HorizonBeyondSchedule: return "HorizonBeyondSchedule";
        case ErrorCode::InvalidPeriodicPattern: return "InvalidPeriodicPattern";
        case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::GramNotSymmetric: return "GramNotSymmetric";
        case ErrorCode::GramNotPositiveDefinite: return "GramNotPositiveDefinite";
        case ErrorCode::NotDissipative: return "NotDissipative";
        case ErrorCode::AntiDampingSignViolated: return "AntiDampingSignViolated";
        case ErrorCode::MissingFeedbackOperator: return "MissingFeedbackOperator";
        case ErrorCode::NotExponentiallyStable: return "NotExponentiallyStable";
        case ErrorCode::NumericalAbscissaNotNegative: return "NumericalAbscissaNotNegative";
        case ErrorCode::DefectiveEigenbasis: return "DefectiveEigenbasis";
        case ErrorCode::IntervalTooShort: return "IntervalTooShort";
        case ErrorCode::InvalidEnvelope: return "InvalidEnvelope";
        case ErrorCode::StepNotAligned: return "StepNotAligned";
        case ErrorCode::MissingHistory: return "MissingHistory";
        case ErrorCode::HorizonExceeded: return "HorizonExceeded";
        case ErrorCode::LookupBeforeHistory: return "LookupBeforeHistory";
        case ErrorCode::WindowUnderflow: return "WindowUnderflow";
        case ErrorCode::PreconditionUnmet: return "PreconditionUnmet";
        case ErrorCode::InconsistentTailDeclaration: return "InconsistentTailDeclaration";
        case ErrorCode::NonPositiveDecay: return "NonPositiveDecay";
        case ErrorCode::KernelMassExceedsOne: return "KernelMassExceedsOne";
        case ErrorCode::TruncationTooShort: return "TruncationTooShort";
        case ErrorCode::BadSubinterval: return "BadSubinterval";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownAxis: return "UnknownAxis";
    }
    return "UnknownError";
}

bool is_input_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotExponentiallyStable:
        case ErrorCode::NumericalAbscissaNotNegative:
        case ErrorCode::DefectiveEigenbasis:
        case ErrorCode::IntervalTooShort:
        case ErrorCode::WindowUnderflow:
        case ErrorCode::NotDissipative:
        case ErrorCode::AntiDampingSignViolated:
            return false;
        default:
            return true;
    }
}

}  // namespace ondelay
