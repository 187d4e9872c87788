#pragma once

#include "ondelay/cycle_factors.hpp"
#include "ondelay/integrator.hpp"
#include "ondelay/semigroup.hpp"
#include "ondelay/system.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ondelay {

/// F(t) = 1/2 ||U(t)||^2 + 1/2 int_{t-tau}^{t} ||B(s+tau)|| ||U(s)||^2 ds on the nodes
/// 0..node_count()-1. F is defined at t_k only when the stored switches reach t_k + tau.
struct LyapunovSeries {
    std::size_t delay_steps = 0;
    std::vector<double> squared_norms;  // ||U_k||^2
    std::vector<double> window;         // the integral term
    std::vector<double> values;         // F
    // Weighted trapezoid cells ||B(s_j + tau)|| (||U_j||^2 + ||U_{j+1}||^2) h / 2 for
    // j = -m..node_count()-2, stored at offset j + m.
    std::vector<double> cells;

    [[nodiscard]] std::size_t node_count() const noexcept { return values.size(); }
    [[nodiscard]] double cell(long long j) const {
        return cells.at(static_cast<std::size_t>(j + static_cast<long long>(delay_steps)));
    }
    /// F_{k+1} - F_{k-1}, telescoped so that no large window sums cancel.
    [[nodiscard]] double central_difference(std::size_t k) const;
};

struct InequalityCheck {
    std::string name;
    std::size_t n = 0;  // interval or cycle index
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    double slack = 0.0;  // rhs + tolerance - lhs
    bool pass = true;
    bool applicable = true;
    double t = 0.0;  // node where the entry was evaluated (worst node for pointwise checks)
    std::string note;
};

struct InequalityReport {
    std::vector<InequalityCheck> checks;

    void append(std::vector<InequalityCheck> more);
    /// Smallest slack over applicable entries; +inf when there are none.
    [[nodiscard]] double worst_slack() const;
    [[nodiscard]] std::size_t failures() const;
    [[nodiscard]] std::size_t applicable_count() const;
    [[nodiscard]] std::vector<InequalityCheck> named(const std::string& name) const;
};

/// Throws WindowUnderflow when the window reaches t < 0 with nonzero weight and the
/// history is unreachable.
[[nodiscard]] LyapunovSeries lyapunov_series(const Trajectory& traj, const DelaySystem& system);

/// ||U(t_{2n+1})||^2 <= c_n ||U(t_{2n})||^2 per even interval.
[[nodiscard]] std::vector<InequalityCheck> check_even_contraction(const Trajectory& traj,
                                                                  const SemigroupEnvelope& env);

/// ||U|| nonincreasing node to node on every even interval.
[[nodiscard]] std::vector<InequalityCheck> check_delay_free_monotone(const Trajectory& traj);

/// ||U(t)|| <= M e^{-mu (t - t_{2n})} ||U(t_{2n})|| on even intervals, for offsets inside the
/// verified range of the envelope.
[[nodiscard]] std::vector<InequalityCheck> check_envelope_bound(const Trajectory& traj,
                                                                const SemigroupEnvelope& env);

/// Delayed mode: F'(t) <= B_{2n+1} ||U(t)||^2 on odd intervals.
/// Anti-damping mode: d/dt ||U||^2 <= 2 D_{2n+1} ||U||^2.
/// Central differences at interior nodes; one entry per odd interval at its worst node.
[[nodiscard]] std::vector<InequalityCheck> check_F_derivative(const Trajectory& traj,
                                                              const LyapunovSeries& series,
                                                              const DelaySystem& system);

/// d/dt ||U||^2 <= B_{2n+1} ||U(t)||^2 + B_{2n+1} ||U(t_{2n})||^2 on odd intervals with
/// T_{2n+1} <= tau and T_{2n} >= tau.
[[nodiscard]] std::vector<InequalityCheck> check_growth_bound(const Trajectory& traj,
                                                              const DelaySystem& system);

/// ||U(t_{2n+2})||^2 / ||U(t_{2n})||^2 against the variant's per-cycle factor.
[[nodiscard]] std::vector<InequalityCheck> check_cycle_bounds(const Trajectory& traj,
                                                              const SemigroupEnvelope& env,
                                                              const DelaySystem& system,
                                                              CycleVariant variant);

/// F(t_{2n+2}) <= e^{2 B_{2n+1} T_{2n+1}} F(t_{2n+1}), the integrated derivative bound.
[[nodiscard]] std::vector<InequalityCheck> check_lyapunov_odd_growth(const Trajectory& traj,
                                                                     const LyapunovSeries& series,
                                                                     const DelaySystem& system);

/// ||U(t)|| <= e^{B_{2n+1} (t - t_{2n+1})} ||U(t_{2n})|| on odd intervals: the within-cycle
/// amplification behind the exponential certificate's constant.
[[nodiscard]] std::vector<InequalityCheck> check_odd_interval_bound(const Trajectory& traj,
                                                                    const DelaySystem& system);

/// Every check relevant to the system's feedback mode.
[[nodiscard]] InequalityReport run_all_checks(const Trajectory& traj, const DelaySystem& system,
                                              const SemigroupEnvelope& env);

}  // namespace ondelay
