#pragma once

#include <cmath>
#include <string_view>

namespace ondelay {

/// Which per-cycle bound relates ||U(t_{2n+2})||^2 to ||U(t_{2n})||^2.
enum class CycleVariant { general, small_delay, anti_damping };

[[nodiscard]] constexpr std::string_view to_string(CycleVariant v) noexcept {
    switch (v) {
        case CycleVariant::general: return "general";
        case CycleVariant::small_delay: return "small_delay";
        case CycleVariant::anti_damping: return "anti_damping";
    }
    return "unknown";
}

// In all three, b is the feedback norm on the odd interval, t its length and c the
// squared-norm reduction over the preceding delay-free interval.

/// e^{2bt} (c + t b)
[[nodiscard]] inline double general_cycle_log(double b, double t, double c) {
    return 2.0 * b * t + std::log(c + t * b);
}

/// e^{bt} (c + 1 - e^{-bt}); requires the odd interval to be no longer than the delay.
[[nodiscard]] inline double small_delay_cycle_log(double b, double t, double c) {
    return b * t + std::log(c - std::expm1(-b * t));
}

/// e^{2dt} c
[[nodiscard]] inline double anti_damping_cycle_log(double d, double t, double c) {
    return 2.0 * d * t + std::log(c);
}

[[nodiscard]] inline double cycle_log(CycleVariant v, double b, double t, double c) {
    switch (v) {
        case CycleVariant::general: return general_cycle_log(b, t, c);
        case CycleVariant::small_delay: return small_delay_cycle_log(b, t, c);
        case CycleVariant::anti_damping: return anti_damping_cycle_log(b, t, c);
    }
    return std::nan("");
}

[[nodiscard]] inline double cycle_factor(CycleVariant v, double b, double t, double c) {
    switch (v) {
        case CycleVariant::general: return std::exp(2.0 * b * t) * (c + t * b);
        case CycleVariant::small_delay: return std::exp(b * t) * (c - std::expm1(-b * t));
        case CycleVariant::anti_damping: return std::exp(2.0 * b * t) * c;
    }
    return std::nan("");
}

}  // namespace ondelay
