#include "ondelay/schedule.hpp"

#include "ondelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ondelay {

namespace {

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kPeriodicityTolerance * std::max(std::abs(a), std::abs(b));
}

template <typename Pred>
bool all_of(const std::vector<bool>& v, Pred pred) {
    return std::all_of(v.begin(), v.end(), pred);
}

}  // namespace

SwitchingSchedule SwitchingSchedule::build(std::vector<double> switch_times, double delay,
                                           double horizon, bool periodic) {
    if (switch_times.empty()) {
        throw Error(ErrorCode::FirstTimeNotZero, "switch_times is empty");
    }
    if (switch_times.front() != 0.0) {
        throw Error(ErrorCode::FirstTimeNotZero, "first switch time must be 0");
    }
    for (std::size_t k = 1; k < switch_times.size(); ++k) {
        if (!(switch_times[k] > switch_times[k - 1])) {
            throw Error(ErrorCode::NonIncreasingTimes,
                        "switch time " + std::to_string(k) + " does not exceed its predecessor");
        }
    }
    if (!(delay > 0.0) || !std::isfinite(delay)) {
        throw Error(ErrorCode::NonPositiveDelay, "delay must be positive");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw Error(ErrorCode::TimeOutOfRange, "horizon must be finite and nonnegative");
    }

    if (!periodic) {
        const double last = switch_times.back();
        if (horizon > last * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
            throw Error(ErrorCode::HorizonBeyondSchedule,
                        "horizon exceeds the last switch time and no periodic extension was declared");
        }
        const std::size_t intervals = switch_times.size() - 1;
        return SwitchingSchedule(std::move(switch_times), delay, horizon, false, intervals);
    }

    const std::size_t pattern_intervals = switch_times.size() - 1;
    if (pattern_intervals == 0 || pattern_intervals % 2 != 0) {
        throw Error(ErrorCode::InvalidPeriodicPattern,
                    "a periodic pattern needs an even, nonzero number of intervals");
    }
    const double period = switch_times.back();
    const double needed = horizon + delay;
    std::vector<double> times = switch_times;
    for (std::size_t cycle = 1; times.back() < needed; ++cycle) {
        const double base = static_cast<double>(cycle) * period;
        for (std::size_t i = 1; i < switch_times.size(); ++i) times.push_back(base + switch_times[i]);
    }
    return SwitchingSchedule(std::move(times), delay, horizon, true, pattern_intervals);
}

SwitchingSchedule SwitchingSchedule::periodic(double even_length, double odd_length,
                                              std::size_t cycles, double delay) {
    if (!(even_length > 0.0) || !(odd_length > 0.0)) {
        throw Error(ErrorCode::NonIncreasingTimes, "periodic interval lengths must be positive");
    }
    const double horizon = static_cast<double>(cycles) * (even_length + odd_length);
    return build({0.0, even_length, even_length + odd_length}, delay, horizon, true);
}

std::vector<double> SwitchingSchedule::lengths() const {
    std::vector<double> out;
    out.reserve(interval_count());
    for (std::size_t n = 0; n < interval_count(); ++n) out.push_back(length(n));
    return out;
}

double SwitchingSchedule::extended_length(std::size_t n) const {
    if (n < interval_count()) return length(n);
    if (!periodic_) {
        throw Error(ErrorCode::TimeOutOfRange, "interval " + std::to_string(n) + " is beyond the stored switches");
    }
    return length(n % pattern_intervals_);
}

std::size_t SwitchingSchedule::locate(double t) const {
    if (!(t >= 0.0) || !(t < times_.back())) {
        throw Error(ErrorCode::TimeOutOfRange, "time " + std::to_string(t) + " outside stored switches");
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
}

IntervalLocation SwitchingSchedule::interval_at(double t) const {
    if (!(t >= 0.0) || t > horizon_) {
        throw Error(ErrorCode::TimeOutOfRange, "time " + std::to_string(t) + " outside [0, horizon]");
    }
    if (t >= times_.back()) {
        if (interval_count() == 0) return {0, IntervalKind::delay_free, 0.0};
        const std::size_t n = interval_count() - 1;
        return {n, kind_of_interval(n), t - times_[n]};
    }
    const std::size_t n = locate(t);
    return {n, kind_of_interval(n), t - times_[n]};
}

bool HypothesisReport::all_even_geq_tau() const {
    return all_of(even_geq_tau, [](bool b) { return b; });
}
bool HypothesisReport::all_even_gt_tstar() const {
    return all_of(even_gt_tstar, [](bool b) { return b; });
}
bool HypothesisReport::all_odd_leq_tau() const {
    return all_of(odd_leq_tau, [](bool b) { return b; });
}

HypothesisReport validate_hypotheses(const SwitchingSchedule& schedule, double t_star) {
    HypothesisReport report;
    const double tau = schedule.delay();
    std::vector<double> even;
    std::vector<double> odd;
    for (std::size_t n = 0; n < schedule.interval_count(); ++n) {
        const double len = schedule.length(n);
        if (n % 2 == 0) {
            even.push_back(len);
            report.even_geq_tau.push_back(length_at_least(len, tau));
            report.even_gt_tstar.push_back(len > t_star);
        } else {
            odd.push_back(len);
            report.odd_leq_tau.push_back(length_at_most(len, tau));
        }
    }
    auto common = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        for (double x : v) {
            if (!nearly_equal(x, v.front())) return std::nullopt;
        }
        return v.front();
    };
    report.periodic_even = common(even);
    report.periodic_odd = common(odd);
    return report;
}

}  // namespace ondelay
