#include "ondelay/app/pipeline.hpp"

#include "ondelay/errors.hpp"
#include "ondelay/linalg.hpp"
#include "ondelay/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <numbers>
#include <thread>

namespace ondelay::app {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

constexpr double pi = std::numbers::pi;

// An empty list means no feedback and is always reusable.
bool feedback_cyclic(const FeedbackSection& f) { return f.values.empty() || f.cyclic; }

void require_delayed(const FeedbackSection& f, const std::string& type) {
    if (f.mode != FeedbackMode::delayed) fail("model type '" + type + "' supports only the delayed feedback mode");
}

BuiltModel from_dense(const ModelSection& m, const FeedbackSection& f) {
    if (!f.values.empty()) fail("dense models take their feedback from matrix files; 'feedback.values' must be empty");
    Matrix a = read_dense_matrix(m.generator);
    const Index d = a.rows();
    InnerProduct g = m.gram ? InnerProduct(read_dense_matrix(*m.gram)) : InnerProduct::identity(d);
    std::vector<Matrix> ops;
    for (const auto& p : m.feedback) ops.push_back(read_dense_matrix(p));
    DelaySystem sys(std::move(a), std::move(ops), f.mode, std::move(g), f.cyclic);
    return {std::move(sys), {}, Vector::Ones(d)};
}

double point_value(const SweepRow& row) { return row.d ? *row.d : std::numeric_limits<double>::quiet_NaN(); }

// Exponential certificates need a declared pattern; detecting one on a finite explicit
// schedule would be extrapolation.
std::optional<std::pair<double, double>> periodic_lengths(const ScheduleSection& s) {
    if (s.periodic) return std::pair{s.even_length, s.odd_length};
    return std::nullopt;
}

bool is_exponential(TheoremId id) {
    return id == TheoremId::expTh || id == TheoremId::exp2 || id == TheoremId::expAD;
}

ExponentialVariant exponential_variant_of(TheoremId id) {
    switch (id) {
        case TheoremId::exp2: return ExponentialVariant::delayed_small;
        case TheoremId::expAD: return ExponentialVariant::anti_damping;
        default: return ExponentialVariant::delayed_general;
    }
}

CycleVariant series_variant_of(TheoremId id) {
    switch (id) {
        case TheoremId::CP3: return CycleVariant::small_delay;
        case TheoremId::CP1AD: return CycleVariant::anti_damping;
        default: return CycleVariant::general;
    }
}

bool wants_anti_damping(TheoremId id) { return id == TheoremId::CP1AD || id == TheoremId::expAD; }

CertificateReport mode_mismatch(TheoremId id, FeedbackMode mode) {
    CertificateReport r;
    r.theorem = id;
    r.variant = is_exponential(id) ? std::string(to_string(exponential_variant_of(id)))
                                   : std::string(to_string(series_variant_of(id)));
    r.applicable = false;
    r.verdict = Verdict::inapplicable;
    r.unmet.push_back(std::string("the system's feedback mode is ") +
                      (mode == FeedbackMode::delayed ? "delayed" : "anti_damping"));
    return r;
}

CertificateReport not_periodic(TheoremId id, std::optional<CConvention> convention) {
    CertificateReport r;
    r.theorem = id;
    r.variant = std::string(to_string(exponential_variant_of(id)));
    r.convention = convention;
    r.applicable = false;
    r.verdict = Verdict::inapplicable;
    r.unmet.emplace_back("the schedule is not declared periodic");
    return r;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept { return is_input_error(code) ? kExitConfigError : kExitNumericalError; }

SwitchingSchedule build_schedule(const ScheduleSection& s) {
    if (s.periodic) return SwitchingSchedule::periodic(s.even_length, s.odd_length, s.cycles, s.delay);
    if (s.switch_times.empty()) fail("'schedule.switch_times' must not be empty");
    const double horizon = s.horizon.value_or(s.switch_times.back());
    return SwitchingSchedule::build(s.switch_times, s.delay, horizon);
}

BuiltModel build_model(const ModelSection& m, const FeedbackSection& f) {
    if (m.type == "scalar") {
        DelaySystem sys = build_scalar(m.a, f.values, f.mode, feedback_cyclic(f));
        return {std::move(sys), {}, Vector::Ones(1)};
    }
    if (m.type == "viscoelastic_wave") {
        require_delayed(f, m.type);
        auto model = build_viscoelastic_wave(m.n_x, m.n_s, m.s_max, m.kernel, f.values, feedback_cyclic(f));
        Vector x0 = model.initial_state([](double x, double t) { return std::sin(pi * x) * std::cos(t); },
                                        [](double x) { return std::sin(2.0 * pi * x); });
        auto blocks = model.modal_blocks();
        return {std::move(model.system), std::move(blocks), std::move(x0)};
    }
    if (m.type == "locally_damped_wave") {
        require_delayed(f, m.type);
        auto model =
            build_locally_damped_wave(m.n_x, m.a, m.omega1_left, m.omega2, f.values, feedback_cyclic(f));
        Vector x0 = model.initial_state([](double x) { return std::sin(pi * x); },
                                        [](double x) { return std::sin(2.0 * pi * x); });
        return {std::move(model.system), {}, std::move(x0)};
    }
    if (m.type == "dense") return from_dense(m, f);
    fail("unknown model type '" + m.type + "'");
}

SemigroupEnvelope build_envelope(const EnvelopeSection& e, const BuiltModel& model) {
    if (e.strategy == EnvelopeStrategy::pinned) return pinned_envelope(e.M, e.mu);
    if (!model.blocks.empty()) return estimate_envelope(model.blocks, e.strategy);
    return estimate_envelope(model.system.generator(), model.system.inner_product(), e.strategy);
}

void cross_validate(const BuiltModel& model, const SwitchingSchedule& schedule) {
    if (model.system.cyclic()) return;
    std::size_t needed = 0;
    for (std::size_t n = 1; n < schedule.interval_count(); n += 2) {
        if (schedule.switch_time(n) < schedule.horizon()) ++needed;
    }
    const std::size_t given = model.system.feedback_count();
    if (given < needed) {
        fail("the feedback list has " + std::to_string(given) + " entries but the schedule has " +
             std::to_string(needed) + " odd intervals before the horizon; add values or set 'cyclic'");
    }
}

SimulateResult run_simulate(const RunConfig& cfg) {
    const auto& model_s = cfg.require_model();
    const auto& sched_s = cfg.require_schedule();
    const auto& env_s = cfg.require_envelope();
    const auto& fb_s = cfg.require_feedback();
    const auto& run_s = cfg.require_run();

    SwitchingSchedule schedule = build_schedule(sched_s);
    BuiltModel model = build_model(model_s, fb_s);
    cross_validate(model, schedule);

    const double t_end = run_s.t_end.value_or(schedule.horizon());
    if (t_end > schedule.horizon()) {
        fail("'run.t_end' = " + format_double(t_end) + " exceeds the schedule horizon " +
             format_double(schedule.horizon()));
    }
    Vector u0 = model.default_initial_state;
    if (run_s.initial_state) {
        const auto& v = *run_s.initial_state;
        if (static_cast<Index>(v.size()) != model.system.dim()) {
            fail("'run.initial_state' has " + std::to_string(v.size()) + " entries, the model dimension is " +
                 std::to_string(model.system.dim()));
        }
        u0 = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    }
    SemigroupEnvelope env = build_envelope(env_s, model);

    const double h = aligned_step(schedule, run_s.h, t_end);
    Trajectory traj = simulate(model.system, schedule, u0, h, t_end, HistorySpec{run_s.history, {}});
    InequalityReport report = run_all_checks(traj, model.system, env);
    return {std::move(schedule), env, run_s.h, h, t_end, std::move(traj), std::move(report)};
}

int aggregate_exit(const std::vector<CertificateReport>& reports) noexcept {
    bool applicable = false;
    for (const auto& r : reports) {
        if (is_certified(r.verdict)) return kExitCertified;
        applicable = applicable || r.applicable;
    }
    return applicable ? kExitNotCertified : kExitInapplicable;
}

CertifyResult run_certify(const RunConfig& cfg) {
    const auto& model_s = cfg.require_model();
    const auto& sched_s = cfg.require_schedule();
    const auto& env_s = cfg.require_envelope();
    const auto& fb_s = cfg.require_feedback();
    const auto& cert_s = cfg.require_certify();

    SwitchingSchedule schedule = build_schedule(sched_s);
    BuiltModel model = build_model(model_s, fb_s);
    cross_validate(model, schedule);
    SemigroupEnvelope env = build_envelope(env_s, model);
    const FeedbackMode mode = model.system.mode();
    const FeedbackNorms norms = model.system.feedback_norms();
    const bool anti = mode == FeedbackMode::anti_damping;

    std::vector<CertificateReport> reports;
    for (TheoremId id : cert_s.theorems) {
        if (id == TheoremId::remark_sufficient) {
            if (!cert_s.tail) fail("theorem 'remark_sufficient' needs 'certify.tail'");
            reports.push_back(remark_sufficient_test(schedule, norms, env, *cert_s.tail, cert_s.min_even_length, anti));
            continue;
        }
        if (wants_anti_damping(id) != anti) {
            reports.push_back(mode_mismatch(id, mode));
            continue;
        }
        if (is_exponential(id)) {
            const auto lengths = periodic_lengths(sched_s);
            for (CConvention c : cert_s.conventions) {
                if (!lengths) {
                    reports.push_back(not_periodic(id, c));
                    continue;
                }
                reports.push_back(exponential_certificate(lengths->first, lengths->second, norms.sup(), env,
                                                          schedule.delay(), exponential_variant_of(id), c));
            }
            continue;
        }
        SeriesOptions opts;
        opts.cycles = cert_s.cycles.value_or(std::max<std::size_t>(1, schedule.full_cycles()));
        opts.target_bound = cert_s.target_bound;
        opts.pattern = cert_s.pattern;
        reports.push_back(series_certificate(schedule, norms, env, series_variant_of(id), opts));
    }
    const int code = aggregate_exit(reports);
    return {std::move(schedule), env, mode, std::move(reports), code};
}

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::B_bar: return "B_bar";
        case SweepAxis::T0: return "T0";
        case SweepAxis::T_tilde: return "T_tilde";
        case SweepAxis::tau: return "tau";
        case SweepAxis::a: return "a";
        case SweepAxis::mu0: return "mu0";
        case SweepAxis::delta: return "delta";
    }
    return "unknown";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
    for (auto axis : {SweepAxis::B_bar, SweepAxis::T0, SweepAxis::T_tilde, SweepAxis::tau, SweepAxis::a,
                      SweepAxis::mu0, SweepAxis::delta}) {
        if (to_string(axis) == name) return axis;
    }
    throw Error(ErrorCode::UnknownAxis,
                "unknown sweep axis '" + std::string(name) + "' (expected B_bar, T0, T_tilde, tau, a, mu0 or delta)");
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                                std::size_t threads) {
    const auto& model_s = cfg.require_model();
    const auto& sched_s = cfg.require_schedule();
    const auto& env_s = cfg.require_envelope();
    const auto& fb_s = cfg.require_feedback();
    if (!sched_s.periodic) fail("sweeps need a periodic schedule section");

    TheoremId theorem = fb_s.mode == FeedbackMode::anti_damping ? TheoremId::expAD : TheoremId::expTh;
    CConvention convention = CConvention::as_stated;
    if (cfg.certify) {
        const auto& ts = cfg.certify->theorems;
        const auto it = std::find_if(ts.begin(), ts.end(), is_exponential);
        if (it != ts.end()) theorem = *it;
        convention = cfg.certify->conventions.front();
    }
    if (wants_anti_damping(theorem) != (fb_s.mode == FeedbackMode::anti_damping)) {
        fail("theorem '" + std::string(to_string(theorem)) + "' does not match the feedback mode");
    }

    const bool rebuilds = axis == SweepAxis::a || axis == SweepAxis::mu0 || axis == SweepAxis::delta;
    if ((axis == SweepAxis::mu0 || axis == SweepAxis::delta) && model_s.type != "viscoelastic_wave") {
        fail("axis '" + std::string(to_string(axis)) + "' needs a viscoelastic_wave model");
    }
    if (axis == SweepAxis::a && model_s.type != "scalar" && model_s.type != "locally_damped_wave") {
        fail("axis 'a' needs a scalar or locally_damped_wave model");
    }

    // Shared envelope and feedback bound unless the axis changes the model.
    std::optional<SemigroupEnvelope> shared_env;
    double shared_sup = 0.0;
    if (!rebuilds && !values.empty()) {
        const BuiltModel model = build_model(model_s, fb_s);
        shared_env = build_envelope(env_s, model);
        shared_sup = model.system.feedback_norms().sup();
    }

    auto evaluate = [&](double value) {
        double T0 = sched_s.even_length;
        double Tt = sched_s.odd_length;
        double tau = sched_s.delay;
        double sup = shared_sup;
        SemigroupEnvelope env;
        if (rebuilds) {
            ModelSection m = model_s;
            if (axis == SweepAxis::a) m.a = value;
            if (axis == SweepAxis::mu0) m.kernel.mu0 = value;
            if (axis == SweepAxis::delta) m.kernel.delta = value;
            const BuiltModel model = build_model(m, fb_s);
            env = build_envelope(env_s, model);
            sup = model.system.feedback_norms().sup();
        } else {
            env = *shared_env;
        }
        switch (axis) {
            case SweepAxis::B_bar: sup = value; break;
            case SweepAxis::T0: T0 = value; break;
            case SweepAxis::T_tilde: Tt = value; break;
            case SweepAxis::tau: tau = value; break;
            default: break;
        }
        const auto r = exponential_certificate(T0, Tt, sup, env, tau, exponential_variant_of(theorem), convention);
        SweepRow row;
        row.value = value;
        row.verdict = r.verdict;
        if (!r.partial_sums.empty()) row.d = r.partial_sums.front();
        if (r.predicted) row.alpha = r.predicted->alpha;
        return row;
    };

    std::vector<SweepRow> rows(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                rows[i] = evaluate(values[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, values.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::optional<std::pair<std::size_t, std::size_t>> find_crossing(const std::vector<SweepRow>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double a = point_value(rows[i - 1]);
        const double b = point_value(rows[i]);
        if (std::isnan(a) || std::isnan(b)) continue;
        if ((a < 1.0) != (b < 1.0)) return std::pair{i - 1, i};
    }
    return std::nullopt;
}

ValidateResult run_validate(const RunConfig& cfg) {
    SwitchingSchedule schedule = build_schedule(cfg.require_schedule());
    std::optional<SemigroupEnvelope> env;
    if (cfg.model && cfg.envelope) {
        const FeedbackSection fb = cfg.feedback.value_or(FeedbackSection{});
        const BuiltModel model = build_model(*cfg.model, fb);
        cross_validate(model, schedule);
        env = build_envelope(*cfg.envelope, model);
    } else if (cfg.envelope && cfg.envelope->strategy == EnvelopeStrategy::pinned) {
        env = pinned_envelope(cfg.envelope->M, cfg.envelope->mu);
    }
    const double ts = env ? t_star(*env) : 0.0;
    HypothesisReport hyp = validate_hypotheses(schedule, ts);
    return {std::move(schedule), env, ts, std::move(hyp)};
}

}  // namespace ondelay::app
