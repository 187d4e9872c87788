#pragma once

#include "ondelay/cycle_factors.hpp"
#include "ondelay/schedule.hpp"
#include "ondelay/semigroup.hpp"
#include "ondelay/system.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ondelay {

enum class TheoremId { CP1, CP3, CP1AD, expTh, exp2, expAD, remark_sufficient };

enum class Verdict { certified_finite_horizon, certified_asymptotic_pattern, not_certified, inapplicable };

/// Which constant the exponential tests plug in for the delay-free reduction:
/// as_stated uses M e^{-mu T0}, squared_variant uses (M e^{-mu T0})^2.
enum class CConvention { as_stated, squared_variant };

enum class ExponentialVariant { delayed_general, delayed_small, anti_damping };

[[nodiscard]] std::string_view to_string(TheoremId id) noexcept;
[[nodiscard]] std::string_view to_string(Verdict v) noexcept;
[[nodiscard]] std::string_view to_string(CConvention c) noexcept;
[[nodiscard]] std::string_view to_string(ExponentialVariant v) noexcept;
/// Throws ConfigError on an unknown name.
[[nodiscard]] TheoremId theorem_from_string(std::string_view name);

[[nodiscard]] TheoremId theorem_for(CycleVariant v) noexcept;
[[nodiscard]] TheoremId theorem_for(ExponentialVariant v) noexcept;
[[nodiscard]] CycleVariant cycle_variant_of(ExponentialVariant v) noexcept;

[[nodiscard]] constexpr bool is_certified(Verdict v) noexcept {
    return v == Verdict::certified_finite_horizon || v == Verdict::certified_asymptotic_pattern;
}

/// Declared bound on the terms a_n = B_{2n+1} T_{2n+1}.
struct TailDeclaration {
    enum class Kind { geometric, zero_after, bounded_sum };
    Kind kind = Kind::geometric;
    double ratio = 0.5;    // geometric: a_n <= scale * ratio^n, ratio in [0, 1)
    double scale = 1.0;
    std::size_t zero_after = 0;  // zero_after: a_n = 0 for n >= zero_after
    double total = 0.0;    // bounded_sum: sum of all a_n <= total

    /// Upper bound on the full series implied by the declaration and the listed terms.
    [[nodiscard]] double implied_total(const std::vector<double>& listed) const;
};

[[nodiscard]] std::string_view to_string(TailDeclaration::Kind k) noexcept;
[[nodiscard]] TailDeclaration::Kind tail_kind_from_string(std::string_view name);

/// (p1) uniform contraction plus a summable feedback tail, or (p2) periodic data.
struct AsymptoticPattern {
    enum class Kind { summable_tail, periodic };
    Kind kind = Kind::periodic;
    std::optional<TailDeclaration> tail;     // required for summable_tail
    std::optional<double> min_even_length;   // T-bar; the periodic even length is used if absent
};

struct SeriesOptions {
    std::size_t cycles = 1;
    std::optional<double> target_bound;  // on ||U(t_{2N})||^2 / ||U0||^2
    std::optional<AsymptoticPattern> pattern;
};

struct ExponentialPrediction {
    double d = 0.0;
    double alpha = 0.0;
    double period = 0.0;
    double c_envelope = 0.0;        // M e^{-mu T0}
    double c_squared_factor = 0.0;  // (M e^{-mu T0})^2
    double c_used = 0.0;
    // Largest amplification inside one cycle: e^{B T_tilde} max(1, M). Not tied to d.
    double C = 1.0;
    // C / sqrt(d): with it ||U(t)|| <= envelope_constant e^{-alpha t} ||U0|| for every t >= 0.
    double envelope_constant = 1.0;
};

struct CertificateReport {
    TheoremId theorem = TheoremId::CP1;
    std::string variant;
    std::optional<CConvention> convention;
    bool applicable = true;
    std::vector<std::string> unmet;
    std::vector<double> log_terms;
    // Series theorems: S_n. Exponential theorems: the single value d.
    std::vector<double> partial_sums;
    std::vector<double> running_products;
    // Upper bound on ||U(t_{2n+2})||^2 / ||U0||^2 per cycle, exp(S_n).
    std::vector<double> bound_curve;
    Verdict verdict = Verdict::not_certified;
    std::optional<ExponentialPrediction> predicted;
    std::string pattern;
    std::vector<std::string> notes;
};

/// Per-cycle log-terms ln(factor) with c_n = (M e^{-mu T_{2n}})^2 and the odd-interval norm B_n.
[[nodiscard]] CertificateReport series_certificate(const SwitchingSchedule& schedule,
                                                   const FeedbackNorms& norms,
                                                   const SemigroupEnvelope& env, CycleVariant variant,
                                                   const SeriesOptions& options);

/// Summable sum of B_{2n+1} T_{2n+1} together with uniformly contracting even intervals.
/// Throws InconsistentTailDeclaration when the listed terms contradict the declaration.
[[nodiscard]] CertificateReport remark_sufficient_test(const SwitchingSchedule& schedule,
                                                       const FeedbackNorms& norms,
                                                       const SemigroupEnvelope& env,
                                                       const TailDeclaration& tail,
                                                       std::optional<double> min_even_length,
                                                       bool anti_damping = false);

/// Sup-test for periodic schedules with even length T0 and odd length T_tilde.
[[nodiscard]] CertificateReport exponential_certificate(double T0, double T_tilde, double sup_norm,
                                                        const SemigroupEnvelope& env, double tau,
                                                        ExponentialVariant variant,
                                                        CConvention convention);

[[nodiscard]] double exponential_d(double T0, double T_tilde, double sup_norm,
                                   const SemigroupEnvelope& env, ExponentialVariant variant,
                                   CConvention convention);

struct FactorComparison {
    double small_delay = 0.0;
    double general = 0.0;
    bool small_is_less = false;
};

/// Both per-cycle factors for the same (B, T, c). For B, T > 0 and c in (0, 1) small < general.
[[nodiscard]] FactorComparison compare_small_delay_vs_general(double B, double T, double c);

}  // namespace ondelay
