#pragma once

#include "ondelay/certificates.hpp"
#include "ondelay/integrator.hpp"
#include "ondelay/models.hpp"
#include "ondelay/semigroup.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ondelay::app {

struct ModelSection {
    std::string type;  // scalar | viscoelastic_wave | locally_damped_wave | dense
    double a = 1.0;
    std::size_t n_x = 30;
    std::size_t n_s = 40;
    double s_max = 20.0;
    MemoryKernel kernel;
    double omega1_left = 0.7;
    Subinterval omega2{0.2, 0.4};
    // dense: paths relative to the config file
    std::filesystem::path generator;
    std::optional<std::filesystem::path> gram;
    std::vector<std::filesystem::path> feedback;
};

struct ScheduleSection {
    bool periodic = false;
    std::vector<double> switch_times;
    std::optional<double> horizon;
    double even_length = 0.0;
    double odd_length = 0.0;
    std::size_t cycles = 0;
    double delay = 1.0;
};

struct EnvelopeSection {
    EnvelopeStrategy strategy = EnvelopeStrategy::numerical_abscissa;
    double M = 1.0;
    double mu = 0.0;
};

struct FeedbackSection {
    FeedbackMode mode = FeedbackMode::delayed;
    std::vector<double> values;
    bool cyclic = true;
};

struct RunSection {
    double h = 1e-3;
    std::optional<double> t_end;
    HistoryKind history = HistoryKind::unreachable;
    std::optional<std::vector<double>> initial_state;
    std::string trajectory = "trajectory.csv";
    std::string monitor = "monitor.json";
};

struct CertifySection {
    std::vector<TheoremId> theorems;
    std::optional<std::size_t> cycles;
    std::optional<double> target_bound;
    std::optional<AsymptoticPattern> pattern;
    std::optional<TailDeclaration> tail;          // remark_sufficient
    std::optional<double> min_even_length;        // remark_sufficient
    std::vector<CConvention> conventions{CConvention::as_stated, CConvention::squared_variant};
    std::string output = "certificates.json";
};

struct RunConfig {
    std::optional<ModelSection> model;
    std::optional<ScheduleSection> schedule;
    std::optional<EnvelopeSection> envelope;
    std::optional<FeedbackSection> feedback;
    std::optional<RunSection> run;
    std::optional<CertifySection> certify;
    std::filesystem::path base_dir;

    /// Throws ConfigError naming the section when it is absent.
    const ModelSection& require_model() const;
    const ScheduleSection& require_schedule() const;
    const EnvelopeSection& require_envelope() const;
    const FeedbackSection& require_feedback() const;
    const RunSection& require_run() const;
    const CertifySection& require_certify() const;
};

/// Unknown keys, wrong types and out-of-range values raise ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
/// Reads and parses a JSON file; unreadable or malformed files raise ConfigError.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

}  // namespace ondelay::app
