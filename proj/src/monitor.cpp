#include "ondelay/monitor.hpp"

#include "ondelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ondelay {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kExactTolerance = 1e-9;
constexpr double kMonotoneTolerance = 1e-10;
constexpr double kCycleTolerance = 1e-6;
constexpr std::size_t kStencilHalfWidth = 2;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

InequalityCheck make_check(std::string name, std::size_t n, double lhs, double rhs, double tol, double t) {
    InequalityCheck c;
    c.name = std::move(name);
    c.n = n;
    c.lhs = lhs;
    c.rhs = rhs;
    c.tolerance = tol;
    c.slack = rhs + tol - lhs;
    c.pass = c.slack >= 0.0;
    c.t = t;
    return c;
}

InequalityCheck not_applicable(std::string name, std::size_t n, std::string note) {
    InequalityCheck c;
    c.name = std::move(name);
    c.n = n;
    c.lhs = nan();
    c.rhs = nan();
    c.tolerance = nan();
    c.slack = nan();
    c.pass = true;
    c.applicable = false;
    c.note = std::move(note);
    return c;
}

// Keeps the entry with the smallest slack.
void keep_worst(std::optional<InequalityCheck>& worst, InequalityCheck candidate) {
    if (!worst || candidate.slack < worst->slack) worst = std::move(candidate);
}

std::size_t last_node(const Trajectory& traj) { return traj.node_count() - 1; }

// Switch nodes inside the trajectory, i.e. <= last node.
std::size_t switches_within(const Trajectory& traj) {
    std::size_t count = 0;
    while (count < traj.switch_node_count() && traj.switch_node(count) <= last_node(traj)) ++count;
    return count;
}

double interval_length(const Trajectory& traj, std::size_t n) { return traj.schedule().length(n); }

bool even_at_least_tau(const Trajectory& traj, std::size_t n) {
    return length_at_least(interval_length(traj, n), traj.schedule().delay());
}

// T_{2i} >= tau and, when stored, T_{2i+2} >= tau.
bool window_stays_in_cycle(const Trajectory& traj, std::size_t i) {
    if (!even_at_least_tau(traj, 2 * i)) return false;
    if (2 * i + 2 < traj.schedule().interval_count() && !even_at_least_tau(traj, 2 * i + 2)) return false;
    return true;
}

// Nodes near which a derivative of ||U||^2 or F may jump: switch nodes and switch nodes
// shifted back by one delay.
std::vector<bool> smooth_mask(const Trajectory& traj) {
    const std::size_t count = traj.node_count();
    std::vector<bool> smooth(count, true);
    const auto m = static_cast<long long>(traj.delay_steps());
    const auto w = static_cast<long long>(kStencilHalfWidth);
    for (std::size_t i = 0; i < traj.switch_node_count(); ++i) {
        const auto s = static_cast<long long>(traj.switch_node(i));
        for (long long p : {s, s - m}) {
            for (long long k = p - w; k <= p + w; ++k) {
                if (k >= 0 && k < static_cast<long long>(count)) smooth[static_cast<std::size_t>(k)] = false;
            }
        }
    }
    return smooth;
}

// Central-difference derivative of y at k and a tolerance covering its O(h^2)
// truncation error (from the five-point third difference) and rounding.
struct FiniteDifference {
    double derivative;
    double tolerance;
};

template <typename CentralDiff, typename Value>
FiniteDifference finite_difference(std::size_t k, double h, CentralDiff diff, Value y) {
    const double third = y(k + 2) - 2.0 * y(k + 1) + 2.0 * y(k - 1) - y(k - 2);
    const double scale = std::abs(y(k + 2)) + std::abs(y(k + 1)) + std::abs(y(k - 1)) + std::abs(y(k - 2));
    return {diff(k) / (2.0 * h), std::abs(third) / (2.0 * h) + 16.0 * kEps * scale / h};
}

double feedback_norm_of_interval(const DelaySystem& system, std::size_t interval) {
    if (interval % 2 == 0) return 0.0;
    return system.op_norm((interval - 1) / 2);
}

}  // namespace

double LyapunovSeries::central_difference(std::size_t k) const {
    const auto j = static_cast<long long>(k);
    const auto m = static_cast<long long>(delay_steps);
    return 0.5 * (squared_norms.at(k + 1) - squared_norms.at(k - 1)) +
           0.5 * ((cell(j) + cell(j - 1)) - (cell(j - m) + cell(j - m - 1)));
}

void InequalityReport::append(std::vector<InequalityCheck> more) {
    for (auto& c : more) checks.push_back(std::move(c));
}

double InequalityReport::worst_slack() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
        if (c.applicable) worst = std::min(worst, c.slack);
    }
    return worst;
}

std::size_t InequalityReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.applicable && !c.pass; }));
}

std::size_t InequalityReport::applicable_count() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.applicable; }));
}

std::vector<InequalityCheck> InequalityReport::named(const std::string& name) const {
    std::vector<InequalityCheck> out;
    for (const auto& c : checks) {
        if (c.name == name) out.push_back(c);
    }
    return out;
}

LyapunovSeries lyapunov_series(const Trajectory& traj, const DelaySystem& system) {
    LyapunovSeries series;
    const std::size_t m = traj.delay_steps();
    const double h = traj.step();
    series.delay_steps = m;
    const bool delayed = system.mode() == FeedbackMode::delayed;

    // F(t_k) needs the interval of node k + m - 1. The trajectory stores the switches up to
    // t_end + tau; when the schedule continues past them every needed interval is known,
    // otherwise F stops one delay before the last switch.
    const std::size_t stored = traj.switch_node_count();
    const bool schedule_continues = traj.schedule().interval_count() + 1 > stored;
    std::size_t count = traj.node_count();
    if (!schedule_continues) {
        const std::size_t reach = stored > 0 ? traj.switch_node(stored - 1) : 0;
        if (reach < m) return series;
        count = std::min(count, reach - m + 1);
    }

    series.squared_norms.resize(traj.node_count());
    for (std::size_t k = 0; k < traj.node_count(); ++k) series.squared_norms[k] = traj.norm(k) * traj.norm(k);

    // Interval of node q for q < reach.
    std::vector<double> weight(count + m, 0.0);
    if (delayed) {
        std::size_t n = 0;
        for (std::size_t q = 0; q < weight.size(); ++q) {
            while (n + 1 < stored && traj.switch_node(n + 1) <= q) ++n;
            weight[q] = feedback_norm_of_interval(system, n);
        }
    }

    auto squared = [&](long long j) -> double {
        const std::optional<double> nrm = traj.extended_norm(j);
        if (!nrm) {
            throw Error(ErrorCode::WindowUnderflow,
                        "the delay window reaches t < 0 with nonzero weight and no history");
        }
        return *nrm * *nrm;
    };

    // Cells j = -m .. count - 2.
    series.cells.assign(count - 1 + m, 0.0);
    for (std::size_t idx = 0; idx < series.cells.size(); ++idx) {
        const double w = weight[idx];  // node j + m = idx
        if (w == 0.0) continue;
        const long long j = static_cast<long long>(idx) - static_cast<long long>(m);
        series.cells[idx] = w * 0.5 * h * (squared(j) + squared(j + 1));
    }

    std::vector<long double> prefix(series.cells.size() + 1, 0.0L);
    for (std::size_t i = 0; i < series.cells.size(); ++i) prefix[i + 1] = prefix[i] + series.cells[i];

    series.window.resize(count);
    series.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        // Cells j = k - m .. k - 1 sit at offsets k .. k + m - 1.
        const long double integral = prefix[k + m] - prefix[k];
        series.window[k] = static_cast<double>(0.5L * integral);
        series.values[k] = 0.5 * series.squared_norms[k] + series.window[k];
    }
    series.squared_norms.resize(count);
    return series;
}

std::vector<InequalityCheck> check_even_contraction(const Trajectory& traj, const SemigroupEnvelope& env) {
    std::vector<InequalityCheck> out;
    const std::size_t sw = switches_within(traj);
    for (std::size_t n = 0; n + 1 < sw; n += 2) {
        const double len = interval_length(traj, n);
        double c = 0.0;
        try {
            c = contraction_factor(env, len);
        } catch (const Error&) {
            out.push_back(not_applicable("even_contraction", n, "T_2n <= T*"));
            continue;
        }
        const double before = traj.norm(traj.switch_node(n));
        const double after = traj.norm(traj.switch_node(n + 1));
        const double lhs = after * after;
        const double rhs = c * before * before;
        auto check = make_check("even_contraction", n, lhs, rhs, kExactTolerance * std::max(lhs, rhs),
                                traj.time(traj.switch_node(n + 1)));
        if (len > env.verified_horizon) check.note = "interval longer than the verified envelope range";
        out.push_back(std::move(check));
    }
    return out;
}

std::vector<InequalityCheck> check_delay_free_monotone(const Trajectory& traj) {
    std::vector<InequalityCheck> out;
    const std::size_t last = last_node(traj);
    for (std::size_t n = 0; n < traj.switch_node_count(); n += 2) {
        const std::size_t begin = traj.switch_node(n);
        if (begin >= last) break;
        const std::size_t end = n + 1 < traj.switch_node_count() ? std::min(traj.switch_node(n + 1), last) : last;
        std::optional<InequalityCheck> worst;
        for (std::size_t k = begin; k < end; ++k) {
            const double lhs = traj.norm(k + 1);
            const double rhs = traj.norm(k);
            keep_worst(worst, make_check("delay_free_monotone", n, lhs, rhs, kMonotoneTolerance * rhs,
                                         traj.time(k + 1)));
        }
        if (worst) out.push_back(std::move(*worst));
    }
    return out;
}

std::vector<InequalityCheck> check_envelope_bound(const Trajectory& traj, const SemigroupEnvelope& env) {
    std::vector<InequalityCheck> out;
    const std::size_t last = last_node(traj);
    for (std::size_t n = 0; n < traj.switch_node_count(); n += 2) {
        const std::size_t begin = traj.switch_node(n);
        if (begin >= last) break;
        const std::size_t end = n + 1 < traj.switch_node_count() ? std::min(traj.switch_node(n + 1), last) : last;
        const double start = traj.norm(begin);
        std::optional<InequalityCheck> worst;
        for (std::size_t k = begin; k <= end; ++k) {
            const double offset = traj.time(k) - traj.time(begin);
            if (offset > env.verified_horizon) break;
            const double lhs = traj.norm(k);
            const double rhs = env.M * std::exp(-env.mu * offset) * start;
            keep_worst(worst, make_check("envelope_bound", n, lhs, rhs, kExactTolerance * std::max(lhs, rhs),
                                         traj.time(k)));
        }
        if (worst) out.push_back(std::move(*worst));
    }
    return out;
}

std::vector<InequalityCheck> check_F_derivative(const Trajectory& traj, const LyapunovSeries& series,
                                                const DelaySystem& system) {
    std::vector<InequalityCheck> out;
    const bool delayed = system.mode() == FeedbackMode::delayed;
    const std::string name = delayed ? "lyapunov_derivative" : "antidamping_growth";
    const std::vector<bool> smooth = smooth_mask(traj);
    const double h = traj.step();
    const std::size_t last = last_node(traj);
    // Delayed mode needs F up to k + 2.
    const std::size_t limit = delayed ? series.node_count() : traj.node_count();

    for (std::size_t n = 1; n < traj.switch_node_count(); n += 2) {
        const std::size_t begin = traj.switch_node(n);
        if (begin >= last) break;
        const std::size_t i = (n - 1) / 2;
        if (delayed && !window_stays_in_cycle(traj, i)) {
            out.push_back(not_applicable(name, n, "requires T_2n >= tau and T_2n+2 >= tau"));
            continue;
        }
        const std::size_t end = n + 1 < traj.switch_node_count() ? std::min(traj.switch_node(n + 1), last) : last;
        const double b = system.op_norm(i);
        std::optional<InequalityCheck> worst;
        for (std::size_t k = begin + kStencilHalfWidth; k + kStencilHalfWidth <= end; ++k) {
            if (!smooth[k] || k + kStencilHalfWidth >= limit) continue;
            FiniteDifference fd{};
            double rhs = 0.0;
            const double sq = traj.norm(k) * traj.norm(k);
            if (delayed) {
                fd = finite_difference(
                    k, h, [&](std::size_t j) { return series.central_difference(j); },
                    [&](std::size_t j) { return series.values[j]; });
                rhs = b * sq;
            } else {
                auto y = [&](std::size_t j) { return traj.norm(j) * traj.norm(j); };
                fd = finite_difference(k, h, [&](std::size_t j) { return y(j + 1) - y(j - 1); }, y);
                rhs = 2.0 * b * sq;
            }
            keep_worst(worst, make_check(name, n, fd.derivative, rhs, fd.tolerance, traj.time(k)));
        }
        if (worst) {
            out.push_back(std::move(*worst));
        } else {
            out.push_back(not_applicable(name, n, "no interior nodes with a smooth stencil"));
        }
    }
    return out;
}

std::vector<InequalityCheck> check_growth_bound(const Trajectory& traj, const DelaySystem& system) {
    std::vector<InequalityCheck> out;
    if (system.mode() != FeedbackMode::delayed) return out;
    const std::vector<bool> smooth = smooth_mask(traj);
    const double h = traj.step();
    const double tau = traj.schedule().delay();
    const std::size_t last = last_node(traj);
    auto y = [&](std::size_t j) { return traj.norm(j) * traj.norm(j); };

    for (std::size_t n = 1; n < traj.switch_node_count(); n += 2) {
        const std::size_t begin = traj.switch_node(n);
        if (begin >= last) break;
        const std::size_t i = (n - 1) / 2;
        if (!length_at_most(interval_length(traj, n), tau) || !even_at_least_tau(traj, n - 1)) {
            out.push_back(not_applicable("growth_bound", n, "requires T_2n+1 <= tau and T_2n >= tau"));
            continue;
        }
        const std::size_t end = n + 1 < traj.switch_node_count() ? std::min(traj.switch_node(n + 1), last) : last;
        const double b = system.op_norm(i);
        const double anchor = y(traj.switch_node(n - 1));
        std::optional<InequalityCheck> worst;
        for (std::size_t k = begin + kStencilHalfWidth; k + kStencilHalfWidth <= end; ++k) {
            if (!smooth[k]) continue;
            const FiniteDifference fd = finite_difference(k, h, [&](std::size_t j) { return y(j + 1) - y(j - 1); }, y);
            keep_worst(worst, make_check("growth_bound", n, fd.derivative, b * (y(k) + anchor), fd.tolerance,
                                         traj.time(k)));
        }
        if (worst) {
            out.push_back(std::move(*worst));
        } else {
            out.push_back(not_applicable("growth_bound", n, "no interior nodes with a smooth stencil"));
        }
    }
    return out;
}

std::vector<InequalityCheck> check_cycle_bounds(const Trajectory& traj, const SemigroupEnvelope& env,
                                                const DelaySystem& system, CycleVariant variant) {
    std::vector<InequalityCheck> out;
    const std::string name = "cycle_" + std::string(to_string(variant));
    const bool anti = system.mode() == FeedbackMode::anti_damping;
    const double tau = traj.schedule().delay();
    const std::size_t sw = switches_within(traj);
    for (std::size_t i = 0; 2 * i + 2 < sw; ++i) {
        const std::size_t n = 2 * i;
        if ((variant == CycleVariant::anti_damping) != anti) {
            out.push_back(not_applicable(name, i, "variant does not match the feedback mode"));
            continue;
        }
        const double even_len = interval_length(traj, n);
        const double odd_len = interval_length(traj, n + 1);
        if (!(even_len > t_star(env))) {
            out.push_back(not_applicable(name, i, "T_2n <= T*"));
            continue;
        }
        if (variant != CycleVariant::anti_damping && !window_stays_in_cycle(traj, i)) {
            out.push_back(not_applicable(name, i, "requires T_2n >= tau and T_2n+2 >= tau"));
            continue;
        }
        if (variant == CycleVariant::small_delay && !length_at_most(odd_len, tau)) {
            out.push_back(not_applicable(name, i, "requires T_2n+1 <= tau"));
            continue;
        }
        const double c = contraction_factor(env, even_len);
        const double factor = cycle_factor(variant, system.op_norm(i), odd_len, c);
        const double start = traj.norm(traj.switch_node(n));
        const double end = traj.norm(traj.switch_node(n + 2));
        const double ratio = start > 0.0 ? (end * end) / (start * start) : 0.0;
        out.push_back(make_check(name, i, ratio, factor, kCycleTolerance * factor, traj.time(traj.switch_node(n + 2))));
    }
    return out;
}

std::vector<InequalityCheck> check_lyapunov_odd_growth(const Trajectory& traj, const LyapunovSeries& series,
                                                       const DelaySystem& system) {
    std::vector<InequalityCheck> out;
    if (system.mode() != FeedbackMode::delayed) return out;
    const std::size_t sw = switches_within(traj);
    for (std::size_t i = 0; 2 * i + 2 < sw; ++i) {
        const std::size_t n = 2 * i + 1;
        const std::size_t end_node = traj.switch_node(n + 1);
        if (end_node >= series.node_count()) {
            out.push_back(not_applicable("lyapunov_odd_growth", n, "F undefined at t_2n+2"));
            continue;
        }
        if (!window_stays_in_cycle(traj, i)) {
            out.push_back(not_applicable("lyapunov_odd_growth", n, "requires T_2n >= tau and T_2n+2 >= tau"));
            continue;
        }
        const double growth = std::exp(2.0 * system.op_norm(i) * interval_length(traj, n));
        const double rhs = growth * series.values[traj.switch_node(n)];
        const double lhs = series.values[end_node];
        out.push_back(make_check("lyapunov_odd_growth", n, lhs, rhs, kCycleTolerance * rhs, traj.time(end_node)));
    }
    return out;
}

std::vector<InequalityCheck> check_odd_interval_bound(const Trajectory& traj, const DelaySystem& system) {
    std::vector<InequalityCheck> out;
    const bool delayed = system.mode() == FeedbackMode::delayed;
    const std::size_t last = last_node(traj);
    for (std::size_t n = 1; n < traj.switch_node_count(); n += 2) {
        const std::size_t begin = traj.switch_node(n);
        if (begin >= last) break;
        const std::size_t i = (n - 1) / 2;
        if (delayed && !even_at_least_tau(traj, n - 1)) {
            out.push_back(not_applicable("odd_interval_bound", n, "requires T_2n >= tau"));
            continue;
        }
        const std::size_t end = n + 1 < traj.switch_node_count() ? std::min(traj.switch_node(n + 1), last) : last;
        const double b = system.op_norm(i);
        // Delayed feedback only reads values from [t_2n, t], where the norm is bounded by
        // its value at t_2n; anti-damping acts on the current state.
        const double anchor = delayed ? traj.norm(traj.switch_node(n - 1)) : traj.norm(begin);
        std::optional<InequalityCheck> worst;
        for (std::size_t k = begin; k <= end; ++k) {
            const double rhs = std::exp(b * (traj.time(k) - traj.time(begin))) * anchor;
            keep_worst(worst, make_check("odd_interval_bound", n, traj.norm(k), rhs, kExactTolerance * rhs,
                                         traj.time(k)));
        }
        if (worst) out.push_back(std::move(*worst));
    }
    return out;
}

InequalityReport run_all_checks(const Trajectory& traj, const DelaySystem& system, const SemigroupEnvelope& env) {
    InequalityReport report;
    report.append(check_even_contraction(traj, env));
    report.append(check_delay_free_monotone(traj));
    report.append(check_envelope_bound(traj, env));
    if (system.mode() == FeedbackMode::delayed) {
        const LyapunovSeries series = lyapunov_series(traj, system);
        report.append(check_F_derivative(traj, series, system));
        report.append(check_growth_bound(traj, system));
        report.append(check_cycle_bounds(traj, env, system, CycleVariant::general));
        report.append(check_cycle_bounds(traj, env, system, CycleVariant::small_delay));
        report.append(check_lyapunov_odd_growth(traj, series, system));
    } else {
        const LyapunovSeries series;
        report.append(check_F_derivative(traj, series, system));
        report.append(check_cycle_bounds(traj, env, system, CycleVariant::anti_damping));
    }
    report.append(check_odd_interval_bound(traj, system));
    return report;
}

}  // namespace ondelay
