#pragma once

#include "ondelay/schedule.hpp"
#include "ondelay/system.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ondelay {

enum class HistoryKind {
    unreachable,       // T0 >= tau: feedback never reads t < 0
    constant_initial,  // U(t) = U0 on [-tau, 0)
    table,             // caller-supplied values at t = -tau, -tau + h, ..., -h
};

struct HistorySpec {
    HistoryKind kind = HistoryKind::unreachable;
    std::vector<Vector> table;
};

struct DelayedValue {
    Vector value;
    bool convention_only = false;  // U0 returned for an unreachable history node
};

/// Uniformly sampled solution on nodes t_k = k h, k = 0..node_count()-1.
class Trajectory {
public:
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] std::size_t delay_steps() const noexcept { return delay_steps_; }
    [[nodiscard]] const SwitchingSchedule& schedule() const noexcept { return schedule_; }
    [[nodiscard]] HistoryKind history_kind() const noexcept { return history_kind_; }

    [[nodiscard]] std::size_t node_count() const noexcept { return states_.size(); }
    [[nodiscard]] double time(std::size_t k) const noexcept { return static_cast<double>(k) * step_; }
    [[nodiscard]] const Vector& state(std::size_t k) const { return states_.at(k); }
    [[nodiscard]] const std::vector<Vector>& states() const noexcept { return states_; }
    [[nodiscard]] double norm(std::size_t k) const { return norms_.at(k); }
    [[nodiscard]] const std::vector<double>& norms() const noexcept { return norms_; }

    /// Interval index of t_k (half-open convention).
    [[nodiscard]] std::size_t interval_of_node(std::size_t k) const { return node_interval_.at(k); }
    /// Grid index of switch time t_n; defined for switches up to the end of the stored grid
    /// plus one delay.
    [[nodiscard]] std::size_t switch_node(std::size_t n) const { return switch_nodes_.at(n); }
    [[nodiscard]] std::size_t switch_node_count() const noexcept { return switch_nodes_.size(); }

    /// Norm of U at node j in [-delay_steps, node_count); nullopt where history is unreachable.
    [[nodiscard]] std::optional<double> extended_norm(long long j) const;

    /// U(t - tau) for a grid time t.
    [[nodiscard]] DelayedValue delayed_lookup(double t) const;
    [[nodiscard]] DelayedValue delayed_lookup_node(std::size_t k) const;

private:
    friend Trajectory simulate(const DelaySystem&, const SwitchingSchedule&, const Vector&, double, double,
                               const HistorySpec&);
    Trajectory(double step, std::size_t delay_steps, SwitchingSchedule schedule)
        : step_(step), delay_steps_(delay_steps), schedule_(std::move(schedule)) {}

    double step_;
    std::size_t delay_steps_;
    SwitchingSchedule schedule_;
    HistoryKind history_kind_ = HistoryKind::unreachable;
    std::vector<Vector> history_;  // nodes -m..-1
    std::vector<double> history_norms_;
    std::vector<Vector> states_;
    std::vector<double> norms_;
    std::vector<std::size_t> node_interval_;
    std::vector<std::size_t> switch_nodes_;
};

/// Exponential integrator with trapezoidal forcing:
///   U_{k+1} = E (U_k + h/2 f_k) + h/2 f_{k+1},  E = exp(hA).
/// In delayed mode f_k = B_n U_{k-m} with m = tau/h, always already computed. In
/// anti-damping mode f_{k+1} uses the predictor E (U_k + h f_k).
///
/// Preconditions: tau/h, t_end/h and every switch time up to t_end + tau are
/// integer multiples of h; t_end <= horizon.
[[nodiscard]] Trajectory simulate(const DelaySystem& system, const SwitchingSchedule& schedule,
                                  const Vector& u0, double h, double t_end,
                                  const HistorySpec& history = {});

/// Largest step tau/k <= h_requested (k integer) that also places every switch time up to
/// t_end + tau and t_end itself on the grid. Throws StepNotAligned if none exists with
/// k <= max_divisions.
[[nodiscard]] double aligned_step(const SwitchingSchedule& schedule, double h_requested, double t_end,
                                  std::size_t max_divisions = 10'000'000);

/// True when x / h is an integer up to rounding.
[[nodiscard]] bool on_grid(double x, double h) noexcept;

}  // namespace ondelay
