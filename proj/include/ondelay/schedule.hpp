#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ondelay {

enum class IntervalKind { delay_free, feedback_active };

[[nodiscard]] constexpr IntervalKind kind_of_interval(std::size_t index) noexcept {
    return index % 2 == 0 ? IntervalKind::delay_free : IntervalKind::feedback_active;
}

struct IntervalLocation {
    std::size_t index = 0;
    IntervalKind kind = IntervalKind::delay_free;
    double offset = 0.0;  // t - t_index
};

/// Switching instants t_0 = 0 < t_1 < ... splitting time into half-open intervals
/// [t_n, t_{n+1}). Even intervals carry no feedback, odd ones carry feedback.
///
/// A schedule stores finitely many switches. When built with `periodic = true` the
/// interval-length pattern is cycled until the stored switches cover
/// `horizon + delay`, so quantities that look one delay ahead remain defined.
class SwitchingSchedule {
public:
    [[nodiscard]] static SwitchingSchedule build(std::vector<double> switch_times, double delay,
                                                 double horizon, bool periodic = false);

    /// Alternating lengths (T0, T_tilde) repeated for `cycles` cycles; horizon is
    /// cycles * (T0 + T_tilde).
    [[nodiscard]] static SwitchingSchedule periodic(double even_length, double odd_length,
                                                    std::size_t cycles, double delay);

    [[nodiscard]] double delay() const noexcept { return delay_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] bool is_periodic() const noexcept { return periodic_; }

    [[nodiscard]] const std::vector<double>& switch_times() const noexcept { return times_; }
    [[nodiscard]] double switch_time(std::size_t n) const { return times_.at(n); }
    [[nodiscard]] double last_switch_time() const noexcept { return times_.back(); }

    /// Number of complete intervals [t_n, t_{n+1}).
    [[nodiscard]] std::size_t interval_count() const noexcept { return times_.size() - 1; }
    [[nodiscard]] double length(std::size_t n) const { return times_.at(n + 1) - times_.at(n); }
    [[nodiscard]] std::vector<double> lengths() const;

    /// Length of interval n, continuing the declared pattern past the stored switches of a
    /// periodic schedule. Throws TimeOutOfRange beyond the stored switches otherwise.
    [[nodiscard]] double extended_length(std::size_t n) const;
    /// Intervals in one repetition of the pattern (all stored intervals when not periodic).
    [[nodiscard]] std::size_t pattern_intervals() const noexcept { return pattern_intervals_; }

    /// Complete (even, odd) pairs, i.e. cycles ending at some t_{2n+2}.
    [[nodiscard]] std::size_t full_cycles() const noexcept { return interval_count() / 2; }

    /// Interval containing t in [0, horizon]. A time equal to the last stored
    /// switch is reported as the end of the final complete interval.
    [[nodiscard]] IntervalLocation interval_at(double t) const;

    /// Index of the interval containing t for any t in [0, last_switch_time()).
    [[nodiscard]] std::size_t locate(double t) const;

private:
    SwitchingSchedule(std::vector<double> times, double delay, double horizon, bool periodic,
                      std::size_t pattern_intervals)
        : times_(std::move(times)),
          delay_(delay),
          horizon_(horizon),
          periodic_(periodic),
          pattern_intervals_(pattern_intervals) {}

    std::vector<double> times_;
    double delay_;
    double horizon_;
    bool periodic_;
    std::size_t pattern_intervals_;
};

struct HypothesisReport {
    std::vector<bool> even_geq_tau;    // T_{2n} >= tau
    std::vector<bool> even_gt_tstar;   // T_{2n} > T*
    std::vector<bool> odd_leq_tau;     // T_{2n+1} <= tau
    std::optional<double> periodic_even;  // common even length T0
    std::optional<double> periodic_odd;   // common odd length T_tilde

    [[nodiscard]] bool all_even_geq_tau() const;
    [[nodiscard]] bool all_even_gt_tstar() const;
    [[nodiscard]] bool all_odd_leq_tau() const;
};

inline constexpr double kPeriodicityTolerance = 1e-12;

// Interval lengths are differences of switch times, so comparisons against the
// delay allow for the rounding of that subtraction.
[[nodiscard]] inline bool length_at_least(double len, double bound) noexcept {
    return len >= bound * (1.0 - kPeriodicityTolerance);
}
[[nodiscard]] inline bool length_at_most(double len, double bound) noexcept {
    return len <= bound * (1.0 + kPeriodicityTolerance);
}

[[nodiscard]] HypothesisReport validate_hypotheses(const SwitchingSchedule& schedule,
                                                   double t_star);

}  // namespace ondelay
