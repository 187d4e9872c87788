#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ondelay {

enum class ErrorCode {
    // schedule
    NonIncreasingTimes,
    FirstTimeNotZero,
    NonPositiveDelay,
    HorizonBeyondSchedule,
    InvalidPeriodicPattern,
    TimeOutOfRange,
    // system
    DimensionMismatch,
    GramNotSymmetric,
    GramNotPositiveDefinite,
    NotDissipative,
    AntiDampingSignViolated,
    MissingFeedbackOperator,
    // semigroup
    NotExponentiallyStable,
    NumericalAbscissaNotNegative,
    DefectiveEigenbasis,
    IntervalTooShort,
    InvalidEnvelope,
    // integrator
    StepNotAligned,
    MissingHistory,
    HorizonExceeded,
    LookupBeforeHistory,
    // monitor
    WindowUnderflow,
    // certificates
    PreconditionUnmet,
    InconsistentTailDeclaration,
    // models
    NonPositiveDecay,
    KernelMassExceedsOne,
    TruncationTooShort,
    BadSubinterval,
    // cli / io
    ConfigError,
    ParseError,
    UnknownAxis,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Errors raised by the library carry a machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// True for errors caused by the user's input rather than by the numerics.
[[nodiscard]] bool is_input_error(ErrorCode code) noexcept;

}  // namespace ondelay
