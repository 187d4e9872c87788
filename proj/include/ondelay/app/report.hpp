#pragma once

#include "ondelay/certificates.hpp"
#include "ondelay/integrator.hpp"
#include "ondelay/monitor.hpp"
#include "ondelay/schedule.hpp"
#include "ondelay/semigroup.hpp"

#include <json.hpp>

#include <filesystem>

namespace ondelay::app {

// Non-finite doubles (an unbounded verified horizon, a missing Rayleigh bound) become null.
[[nodiscard]] nlohmann::json to_json(const SemigroupEnvelope& env);
[[nodiscard]] nlohmann::json to_json(const CertificateReport& report);
[[nodiscard]] nlohmann::json to_json(const InequalityCheck& check);
[[nodiscard]] nlohmann::json to_json(const InequalityReport& report);
[[nodiscard]] nlohmann::json to_json(const SwitchingSchedule& schedule);
[[nodiscard]] nlohmann::json to_json(const HypothesisReport& report);

/// Columns t, interval_index, kind, norm and optionally state_0..state_{d-1}; doubles in %.17g.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, bool with_states);

/// Pretty-printed, newline-terminated. Creates missing parent directories.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace ondelay::app
