#include "ondelay/app/report.hpp"

#include "ondelay/errors.hpp"
#include "ondelay/linalg.hpp"

#include <cmath>
#include <fstream>

namespace ondelay::app {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json numbers(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

json to_json(const SemigroupEnvelope& env) {
    return {{"M", number(env.M)},
            {"mu", number(env.mu)},
            {"T_star", number(t_star(env))},
            {"strategy", std::string(to_string(env.strategy))},
            {"certified", env.certified},
            {"verified_horizon", number(env.verified_horizon)},
            {"spectral_abscissa", number(env.spectral_abscissa)},
            {"numerical_abscissa", number(env.numerical_abscissa)}};
}

json to_json(const CertificateReport& r) {
    json out{{"theorem", std::string(to_string(r.theorem))},
             {"variant", r.variant},
             {"convention", r.convention ? json(std::string(to_string(*r.convention))) : json(nullptr)},
             {"applicable", r.applicable},
             {"unmet", r.unmet},
             {"log_terms", numbers(r.log_terms)},
             {"partial_sums", numbers(r.partial_sums)},
             {"running_products", numbers(r.running_products)},
             {"bound_curve", numbers(r.bound_curve)},
             {"verdict", std::string(to_string(r.verdict))},
             {"pattern", r.pattern},
             {"notes", r.notes}};
    if (r.predicted) {
        const auto& p = *r.predicted;
        out["predicted"] = {{"d", number(p.d)},
                            {"alpha", number(p.alpha)},
                            {"period", number(p.period)},
                            {"c_envelope", number(p.c_envelope)},
                            {"c_squared_factor", number(p.c_squared_factor)},
                            {"c_used", number(p.c_used)},
                            {"C", number(p.C)},
                            {"envelope_constant", number(p.envelope_constant)}};
    } else {
        out["predicted"] = nullptr;
    }
    return out;
}

json to_json(const InequalityCheck& c) {
    return {{"name", c.name},       {"n", c.n},           {"lhs", number(c.lhs)},
            {"rhs", number(c.rhs)}, {"slack", number(c.slack)}, {"pass", c.pass},
            {"applicable", c.applicable}, {"tolerance", number(c.tolerance)}, {"t", number(c.t)},
            {"note", c.note}};
}

json to_json(const InequalityReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) checks.push_back(to_json(c));
    return {{"checks", std::move(checks)},
            {"worst_slack", number(report.worst_slack())},
            {"failures", report.failures()},
            {"applicable", report.applicable_count()}};
}

json to_json(const SwitchingSchedule& s) {
    return {{"switch_times", numbers(s.switch_times())},
            {"lengths", numbers(s.lengths())},
            {"delay", number(s.delay())},
            {"horizon", number(s.horizon())},
            {"periodic", s.is_periodic()}};
}

json to_json(const HypothesisReport& h) {
    return {{"even_geq_tau", h.even_geq_tau},
            {"even_gt_tstar", h.even_gt_tstar},
            {"odd_leq_tau", h.odd_leq_tau},
            {"all_even_geq_tau", h.all_even_geq_tau()},
            {"all_even_gt_tstar", h.all_even_gt_tstar()},
            {"all_odd_leq_tau", h.all_odd_leq_tau()},
            {"periodic_even", h.periodic_even ? json(*h.periodic_even) : json(nullptr)},
            {"periodic_odd", h.periodic_odd ? json(*h.periodic_odd) : json(nullptr)}};
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, bool with_states) {
    auto out = open_for_write(path);
    const Index d = traj.node_count() > 0 ? traj.state(0).size() : 0;
    out << "t,interval_index,kind,norm";
    if (with_states) {
        for (Index i = 0; i < d; ++i) out << ",state_" << i;
    }
    out << '\n';
    for (std::size_t k = 0; k < traj.node_count(); ++k) {
        const std::size_t n = traj.interval_of_node(k);
        out << format_double(traj.time(k)) << ',' << n << ','
            << (kind_of_interval(n) == IntervalKind::delay_free ? "delay_free" : "feedback_active") << ','
            << format_double(traj.norm(k));
        if (with_states) {
            const Vector& u = traj.state(k);
            for (Index i = 0; i < d; ++i) out << ',' << format_double(u(i));
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::ConfigError, "failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::ConfigError, "failed writing '" + path.string() + "'");
}

}  // namespace ondelay::app
