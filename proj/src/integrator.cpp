#include "ondelay/integrator.hpp"

#include "ondelay/errors.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace ondelay {

namespace {

std::size_t grid_index(double x, double h) { return static_cast<std::size_t>(std::llround(x / h)); }

// Feedback operator applied through a sparse copy when that is cheaper.
class FeedbackApplier {
public:
    explicit FeedbackApplier(const Matrix& b) {
        const Index nnz = (b.array() != 0.0).count();
        if (b.rows() > 32 && nnz < b.size() / 10) {
            sparse_ = b.sparseView();
            use_sparse_ = true;
        } else {
            dense_ = b;
        }
    }
    [[nodiscard]] Vector apply(const Vector& x) const {
        if (use_sparse_) return sparse_ * x;
        return dense_ * x;
    }

private:
    Matrix dense_;
    Eigen::SparseMatrix<double> sparse_;
    bool use_sparse_ = false;
};

}  // namespace

bool on_grid(double x, double h) noexcept {
    const double r = x / h;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

double aligned_step(const SwitchingSchedule& schedule, double h_requested, double t_end,
                    std::size_t max_divisions) {
    if (!(h_requested > 0.0) || !std::isfinite(h_requested)) {
        throw Error(ErrorCode::StepNotAligned, "step must be positive");
    }
    const double tau = schedule.delay();
    const double reach = t_end + tau;
    std::vector<double> targets{t_end};
    for (double t : schedule.switch_times()) {
        if (t > reach * (1.0 + 1e-12)) break;
        targets.push_back(t);
    }
    const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / h_requested * (1.0 - 1e-12))));
    for (std::size_t k = first; k <= max_divisions; ++k) {
        const double h = tau / static_cast<double>(k);
        bool ok = true;
        for (double t : targets) {
            if (!on_grid(t, h)) {
                ok = false;
                break;
            }
        }
        if (ok) return h;
    }
    throw Error(ErrorCode::StepNotAligned, "no step tau/k with k <= " + std::to_string(max_divisions) +
                                               " places all switch times and t_end on the grid");
}

std::optional<double> Trajectory::extended_norm(long long j) const {
    if (j >= 0) return norms_.at(static_cast<std::size_t>(j));
    const long long m = static_cast<long long>(delay_steps_);
    if (j < -m) throw Error(ErrorCode::LookupBeforeHistory, "node before -tau");
    if (history_kind_ == HistoryKind::unreachable) return std::nullopt;
    return history_norms_[static_cast<std::size_t>(j + m)];
}

DelayedValue Trajectory::delayed_lookup_node(std::size_t k) const {
    if (k >= states_.size()) throw Error(ErrorCode::HorizonExceeded, "node beyond the trajectory");
    if (k >= delay_steps_) return {states_[k - delay_steps_], false};
    const std::size_t slot = k;  // history index of node k - m
    if (history_kind_ == HistoryKind::unreachable) return {states_.front(), true};
    return {history_[slot], false};
}

DelayedValue Trajectory::delayed_lookup(double t) const {
    if (t < 0.0) {
        throw Error(ErrorCode::LookupBeforeHistory, "time before 0 has no delayed value in the trajectory");
    }
    if (!on_grid(t, step_)) throw Error(ErrorCode::StepNotAligned, "lookup time is not a grid node");
    return delayed_lookup_node(grid_index(t, step_));
}

Trajectory simulate(const DelaySystem& system, const SwitchingSchedule& schedule, const Vector& u0, double h,
                    double t_end, const HistorySpec& history) {
    const Index dim = system.dim();
    if (u0.size() != dim) throw Error(ErrorCode::DimensionMismatch, "U0 has the wrong dimension");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::StepNotAligned, "step must be positive");
    if (!(t_end >= 0.0) || t_end > schedule.horizon() * (1.0 + 1e-12)) {
        throw Error(ErrorCode::HorizonExceeded, "t_end " + format_double(t_end) + " exceeds the schedule horizon " +
                                                    format_double(schedule.horizon()));
    }
    const double tau = schedule.delay();
    if (!on_grid(tau, h)) throw Error(ErrorCode::StepNotAligned, "tau/h is not an integer");
    if (!on_grid(t_end, h)) throw Error(ErrorCode::StepNotAligned, "t_end/h is not an integer");

    const std::size_t m = grid_index(tau, h);
    const std::size_t last = grid_index(t_end, h);
    Trajectory traj(h, m, schedule);

    // Switch nodes up to one delay past t_end, as far as the schedule stores them.
    const double reach = t_end + tau;
    for (std::size_t n = 0; n < schedule.switch_times().size(); ++n) {
        const double t = schedule.switch_time(n);
        if (t > reach * (1.0 + 1e-12)) break;
        if (!on_grid(t, h)) {
            throw Error(ErrorCode::StepNotAligned, "switch time t_" + std::to_string(n) + " is not on the grid");
        }
        traj.switch_nodes_.push_back(grid_index(t, h));
    }

    traj.node_interval_.resize(last + 1);
    {
        std::size_t n = 0;
        for (std::size_t k = 0; k <= last; ++k) {
            while (n + 1 < traj.switch_nodes_.size() && traj.switch_nodes_[n + 1] <= k) ++n;
            traj.node_interval_[k] = n;
        }
    }

    const bool delayed = system.mode() == FeedbackMode::delayed;
    traj.history_kind_ = history.kind;
    if (delayed) {
        // Some step inside an odd interval reads node k - m < 0.
        bool needs_history = false;
        if (traj.switch_nodes_.size() > 1 && traj.switch_nodes_[1] < last) {
            needs_history = traj.switch_nodes_[1] < m;
        }
        switch (history.kind) {
            case HistoryKind::unreachable:
                if (needs_history) {
                    throw Error(ErrorCode::MissingHistory,
                                "the first feedback interval starts before tau; supply a history");
                }
                break;
            case HistoryKind::constant_initial:
                traj.history_.assign(m, u0);
                break;
            case HistoryKind::table:
                if (history.table.size() != m) {
                    throw Error(ErrorCode::MissingHistory,
                                "history table needs tau/h = " + std::to_string(m) + " entries");
                }
                for (const Vector& v : history.table) {
                    if (v.size() != dim) throw Error(ErrorCode::DimensionMismatch, "history entry has the wrong dimension");
                }
                traj.history_ = history.table;
                break;
        }
    } else if (history.kind == HistoryKind::constant_initial) {
        traj.history_.assign(m, u0);
    } else if (history.kind == HistoryKind::table) {
        traj.history_ = history.table;
    }
    const InnerProduct& g = system.inner_product();
    for (const Vector& v : traj.history_) traj.history_norms_.push_back(g.norm(v));

    std::vector<FeedbackApplier> appliers;
    appliers.reserve(system.feedback_count());
    for (const Matrix& b : system.feedback_ops()) appliers.emplace_back(b);
    auto applier = [&](std::size_t interval) -> const FeedbackApplier& {
        const std::size_t k = (interval - 1) / 2;
        const std::size_t count = appliers.size();
        if (count == 0 || (!system.cyclic() && k >= count)) {
            throw Error(ErrorCode::MissingFeedbackOperator,
                        "no feedback operator for odd interval " + std::to_string(interval));
        }
        return appliers[system.cyclic() ? k % count : k];
    };
    auto delayed_state = [&](std::size_t k) -> const Vector& {
        if (k >= m) return traj.states_[k - m];
        if (traj.history_.empty()) throw Error(ErrorCode::MissingHistory, "feedback reads t < 0");
        return traj.history_[k];
    };

    const Matrix e = expm(h * system.generator());
    traj.states_.reserve(last + 1);
    traj.norms_.reserve(last + 1);
    traj.states_.push_back(u0);
    traj.norms_.push_back(g.norm(u0));

    const double half = 0.5 * h;
    for (std::size_t k = 0; k < last; ++k) {
        const std::size_t n = traj.node_interval_[k];
        const Vector& u = traj.states_[k];
        Vector next;
        if (n % 2 == 0) {
            next = e * u;
        } else if (delayed) {
            const FeedbackApplier& b = applier(n);
            const Vector f_left = b.apply(delayed_state(k));
            const Vector f_right = b.apply(delayed_state(k + 1));
            next = e * (u + half * f_left) + half * f_right;
        } else {
            const FeedbackApplier& b = applier(n);
            const Vector f_left = b.apply(u);
            const Vector predictor = e * (u + h * f_left);
            next = e * (u + half * f_left) + half * b.apply(predictor);
        }
        traj.norms_.push_back(g.norm(next));
        traj.states_.push_back(std::move(next));
    }
    return traj;
}

}  // namespace ondelay
