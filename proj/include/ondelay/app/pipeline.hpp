#pragma once

#include "ondelay/app/config.hpp"
#include "ondelay/certificates.hpp"
#include "ondelay/errors.hpp"
#include "ondelay/integrator.hpp"
#include "ondelay/monitor.hpp"
#include "ondelay/schedule.hpp"
#include "ondelay/semigroup.hpp"
#include "ondelay/system.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace ondelay::app {

// The only exit codes the command line emits.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNotCertified = 3;
inline constexpr int kExitInapplicable = 4;
inline constexpr int kExitNumericalError = 5;

/// 2 for input errors, 5 for numerical failures.
[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct BuiltModel {
    DelaySystem system;
    // Non-empty when the generator decouples into independent blocks.
    std::vector<ModalBlock> blocks;
    Vector default_initial_state;
};

[[nodiscard]] SwitchingSchedule build_schedule(const ScheduleSection& section);
[[nodiscard]] BuiltModel build_model(const ModelSection& model, const FeedbackSection& feedback);
[[nodiscard]] SemigroupEnvelope build_envelope(const EnvelopeSection& section, const BuiltModel& model);

/// A finite feedback list must cover every odd interval that starts before the horizon.
void cross_validate(const BuiltModel& model, const SwitchingSchedule& schedule);

struct SimulateResult {
    SwitchingSchedule schedule;
    SemigroupEnvelope envelope;
    double h_requested = 0.0;
    double h = 0.0;
    double t_end = 0.0;
    Trajectory trajectory;
    InequalityReport report;
};

/// Needs model, schedule, envelope, feedback and run sections.
[[nodiscard]] SimulateResult run_simulate(const RunConfig& cfg);

struct CertifyResult {
    SwitchingSchedule schedule;
    SemigroupEnvelope envelope;
    FeedbackMode mode = FeedbackMode::delayed;
    std::vector<CertificateReport> reports;
    int exit_code = kExitInapplicable;
};

/// 0 if any report is certified, else 3 if any is applicable, else 4.
[[nodiscard]] int aggregate_exit(const std::vector<CertificateReport>& reports) noexcept;

/// Needs model, schedule, envelope, feedback and certify sections. Exponential theorems
/// produce one report per requested convention.
[[nodiscard]] CertifyResult run_certify(const RunConfig& cfg);

enum class SweepAxis { B_bar, T0, T_tilde, tau, a, mu0, delta };

[[nodiscard]] std::string_view to_string(SweepAxis axis) noexcept;
/// Throws UnknownAxis.
[[nodiscard]] SweepAxis sweep_axis_from_string(std::string_view name);

struct SweepRow {
    double value = 0.0;
    std::optional<double> d;      // absent when the certificate is inapplicable
    std::optional<double> alpha;  // present only when d < 1
    Verdict verdict = Verdict::inapplicable;
};

/// Exponential certificate at every value of the axis on a periodic schedule. Rows follow
/// the input order whatever the number of worker threads.
[[nodiscard]] std::vector<SweepRow> run_sweep(const RunConfig& cfg, SweepAxis axis,
                                              const std::vector<double>& values, std::size_t threads);

/// First pair of consecutive rows whose d values lie on opposite sides of 1.
[[nodiscard]] std::optional<std::pair<std::size_t, std::size_t>> find_crossing(const std::vector<SweepRow>& rows);

struct ValidateResult {
    SwitchingSchedule schedule;
    std::optional<SemigroupEnvelope> envelope;
    double t_star = 0.0;
    HypothesisReport hypotheses;
};

/// Needs the schedule section; T* comes from the envelope when model and envelope are given,
/// else it is 0.
[[nodiscard]] ValidateResult run_validate(const RunConfig& cfg);

}  // namespace ondelay::app
