#include "ondelay/certificates.hpp"

#include "ondelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ondelay {

std::string_view to_string(TheoremId id) noexcept {
    switch (id) {
        case TheoremId::CP1: return "CP1";
        case TheoremId::CP3: return "CP3";
        case TheoremId::CP1AD: return "CP1AD";
        case TheoremId::expTh: return "expTh";
        case TheoremId::exp2: return "exp2";
        case TheoremId::expAD: return "expAD";
        case TheoremId::remark_sufficient: return "remark_sufficient";
    }
    return "unknown";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::certified_finite_horizon: return "certified_finite_horizon";
        case Verdict::certified_asymptotic_pattern: return "certified_asymptotic_pattern";
        case Verdict::not_certified: return "not_certified";
        case Verdict::inapplicable: return "inapplicable";
    }
    return "unknown";
}

std::string_view to_string(CConvention c) noexcept {
    return c == CConvention::as_stated ? "as_stated" : "squared_variant";
}

std::string_view to_string(ExponentialVariant v) noexcept {
    switch (v) {
        case ExponentialVariant::delayed_general: return "delayed_general";
        case ExponentialVariant::delayed_small: return "delayed_small";
        case ExponentialVariant::anti_damping: return "anti_damping";
    }
    return "unknown";
}

TheoremId theorem_from_string(std::string_view name) {
    for (auto id : {TheoremId::CP1, TheoremId::CP3, TheoremId::CP1AD, TheoremId::expTh, TheoremId::exp2,
                    TheoremId::expAD, TheoremId::remark_sufficient}) {
        if (to_string(id) == name) return id;
    }
    throw Error(ErrorCode::ConfigError, "unknown theorem '" + std::string(name) + "'");
}

TheoremId theorem_for(CycleVariant v) noexcept {
    switch (v) {
        case CycleVariant::general: return TheoremId::CP1;
        case CycleVariant::small_delay: return TheoremId::CP3;
        case CycleVariant::anti_damping: return TheoremId::CP1AD;
    }
    return TheoremId::CP1;
}

TheoremId theorem_for(ExponentialVariant v) noexcept {
    switch (v) {
        case ExponentialVariant::delayed_general: return TheoremId::expTh;
        case ExponentialVariant::delayed_small: return TheoremId::exp2;
        case ExponentialVariant::anti_damping: return TheoremId::expAD;
    }
    return TheoremId::expTh;
}

CycleVariant cycle_variant_of(ExponentialVariant v) noexcept {
    switch (v) {
        case ExponentialVariant::delayed_general: return CycleVariant::general;
        case ExponentialVariant::delayed_small: return CycleVariant::small_delay;
        case ExponentialVariant::anti_damping: return CycleVariant::anti_damping;
    }
    return CycleVariant::general;
}

std::string_view to_string(TailDeclaration::Kind k) noexcept {
    switch (k) {
        case TailDeclaration::Kind::geometric: return "geometric";
        case TailDeclaration::Kind::zero_after: return "zero_after";
        case TailDeclaration::Kind::bounded_sum: return "bounded_sum";
    }
    return "unknown";
}

TailDeclaration::Kind tail_kind_from_string(std::string_view name) {
    for (auto k : {TailDeclaration::Kind::geometric, TailDeclaration::Kind::zero_after,
                   TailDeclaration::Kind::bounded_sum}) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorCode::ConfigError, "unknown tail kind '" + std::string(name) + "'");
}

double TailDeclaration::implied_total(const std::vector<double>& listed) const {
    switch (kind) {
        case Kind::geometric: return scale / (1.0 - ratio);
        case Kind::zero_after: {
            const std::size_t k = std::min(zero_after, listed.size());
            return std::accumulate(listed.begin(), listed.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
        }
        case Kind::bounded_sum: return total;
    }
    return std::numeric_limits<double>::infinity();
}

namespace {

constexpr std::size_t kProbeTerms = 1000;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Cycle n is available when its odd interval is stored or continues a periodic pattern.
bool cycle_available(const SwitchingSchedule& s, std::size_t n) {
    return s.is_periodic() || 2 * n + 1 < s.interval_count();
}

bool even_available(const SwitchingSchedule& s, std::size_t n) {
    return s.is_periodic() || 2 * n < s.interval_count();
}

// Number of cycles after which both the schedule pattern and the cyclic norm list repeat.
std::size_t period_in_cycles(const SwitchingSchedule& s, const FeedbackNorms& norms) {
    const std::size_t sched = std::max<std::size_t>(1, s.pattern_intervals() / 2);
    const std::size_t fb = std::max<std::size_t>(1, norms.values.size());
    return std::lcm(sched, fb);
}

bool fully_periodic(const SwitchingSchedule& s, const FeedbackNorms& norms) {
    return s.is_periodic() && norms.cyclic && !norms.values.empty();
}

std::optional<double> periodic_min_even(const SwitchingSchedule& s) {
    if (!s.is_periodic()) return std::nullopt;
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.pattern_intervals(); i += 2) m = std::min(m, s.length(i));
    return m;
}

// Preconditions of the variant for cycles 0..n_cycles-1, recording the first violation of each kind.
std::vector<std::string> series_preconditions(const SwitchingSchedule& s, const FeedbackNorms& norms,
                                              double ts, CycleVariant variant, std::size_t n_cycles) {
    std::vector<std::string> unmet;
    if (n_cycles == 0) {
        unmet.emplace_back("at least one cycle is required");
        return unmet;
    }
    const double tau = s.delay();
    bool short_even = false;
    bool below_star = false;
    bool long_odd = false;
    for (std::size_t n = 0; n < n_cycles; ++n) {
        if (!cycle_available(s, n)) {
            unmet.push_back("the schedule stores only " + std::to_string(n) + " cycles");
            break;
        }
        if (!norms.covers(n)) {
            unmet.push_back("no feedback norm for odd interval " + std::to_string(2 * n + 1));
            break;
        }
        const double te = s.extended_length(2 * n);
        const double to = s.extended_length(2 * n + 1);
        if (!below_star && !(te > ts)) {
            below_star = true;
            unmet.push_back("T_" + std::to_string(2 * n) + " = " + fmt(te) + " does not exceed T* = " + fmt(ts));
        }
        if (variant != CycleVariant::anti_damping && !short_even && !length_at_least(te, tau)) {
            short_even = true;
            unmet.push_back("T_" + std::to_string(2 * n) + " = " + fmt(te) + " is shorter than the delay");
        }
        if (variant == CycleVariant::small_delay && !long_odd && !length_at_most(to, tau)) {
            long_odd = true;
            unmet.push_back("T_" + std::to_string(2 * n + 1) + " = " + fmt(to) + " exceeds the delay");
        }
    }
    // The window of the functional at t_{2N} must fall inside the following delay-free interval.
    if (unmet.empty() && variant != CycleVariant::anti_damping && even_available(s, n_cycles) &&
        !length_at_least(s.extended_length(2 * n_cycles), tau)) {
        unmet.push_back("T_" + std::to_string(2 * n_cycles) + " is shorter than the delay");
    }
    return unmet;
}

double cycle_log_at(const SwitchingSchedule& s, const FeedbackNorms& norms, const SemigroupEnvelope& env,
                    CycleVariant variant, std::size_t n) {
    const double c = contraction_factor(env, s.extended_length(2 * n));
    return cycle_log(variant, norms.at(n), s.extended_length(2 * n + 1), c);
}

struct RemarkOutcome {
    bool passed = false;
    std::vector<double> terms;       // B_n T_{2n+1}
    std::vector<double> log_c;       // ln c_n
    std::vector<std::string> notes;
};

RemarkOutcome evaluate_remark(const SwitchingSchedule& s, const FeedbackNorms& norms,
                              const SemigroupEnvelope& env, const TailDeclaration& tail,
                              std::optional<double> min_even, bool anti_damping) {
    RemarkOutcome out;
    if (tail.kind == TailDeclaration::Kind::geometric &&
        !(tail.ratio >= 0.0 && tail.ratio < 1.0 && tail.scale >= 0.0)) {
        throw Error(ErrorCode::ConfigError, "a geometric tail needs 0 <= ratio < 1 and scale >= 0");
    }
    if (tail.kind == TailDeclaration::Kind::bounded_sum && !(tail.total >= 0.0 && std::isfinite(tail.total))) {
        throw Error(ErrorCode::ConfigError, "a bounded_sum tail needs a finite nonnegative total");
    }

    std::size_t probe = kProbeTerms;
    if (!s.is_periodic()) probe = std::min(probe, s.interval_count() / 2);
    if (!norms.cyclic) probe = std::min(probe, norms.values.size());
    if (probe == 0) throw Error(ErrorCode::PreconditionUnmet, "no complete cycle to probe");

    const double rel = 1e-12;
    double running = 0.0;
    for (std::size_t n = 0; n < probe; ++n) {
        const double a = norms.at(n) * s.extended_length(2 * n + 1);
        out.terms.push_back(a);
        running += a;
        bool ok = true;
        switch (tail.kind) {
            case TailDeclaration::Kind::geometric:
                ok = a <= tail.scale * std::pow(tail.ratio, static_cast<double>(n)) * (1.0 + rel);
                break;
            case TailDeclaration::Kind::zero_after: ok = n < tail.zero_after || a == 0.0; break;
            case TailDeclaration::Kind::bounded_sum: ok = running <= tail.total * (1.0 + rel); break;
        }
        if (!ok) {
            throw Error(ErrorCode::InconsistentTailDeclaration,
                        "term " + std::to_string(n) + " (B T = " + fmt(a) + ", partial sum " + fmt(running) +
                            ") contradicts the declared " + std::string(to_string(tail.kind)) + " tail");
        }
    }
    if (fully_periodic(s, norms)) {
        const std::size_t per = period_in_cycles(s, norms);
        double sum = 0.0;
        for (std::size_t n = 0; n < per; ++n) sum += norms.at(n) * s.extended_length(2 * n + 1);
        if (sum > 0.0) {
            throw Error(ErrorCode::InconsistentTailDeclaration,
                        "periodic data with per-period sum of B T = " + fmt(sum) + " > 0 is not summable");
        }
    }
    out.notes.push_back("sum of B T is at most " + fmt(tail.implied_total(out.terms)));

    const std::optional<double> tbar = min_even ? min_even : periodic_min_even(s);
    const double ts = t_star(env);
    for (std::size_t n = 0; n < probe; ++n) {
        const double te = s.extended_length(2 * n);
        out.log_c.push_back(te > ts ? std::log(contraction_factor(env, te)) : 0.0);
    }
    if (!tbar) {
        out.notes.emplace_back("no uniform lower bound on the delay-free lengths was declared");
        return out;
    }
    if (!(*tbar > ts)) {
        out.notes.push_back("the declared lower bound " + fmt(*tbar) + " does not exceed T* = " + fmt(ts));
        return out;
    }
    if (!anti_damping && !length_at_least(*tbar, s.delay())) {
        out.notes.push_back("the declared lower bound " + fmt(*tbar) + " is shorter than the delay");
        return out;
    }
    for (std::size_t n = 0; n < probe; ++n) {
        if (!length_at_least(s.extended_length(2 * n), *tbar)) {
            throw Error(ErrorCode::InconsistentTailDeclaration,
                        "T_" + std::to_string(2 * n) + " is below the declared lower bound " + fmt(*tbar));
        }
    }
    out.notes.push_back("c_n <= " + fmt(contraction_factor(env, *tbar)) + " < 1 for every n");
    out.passed = true;
    return out;
}

}  // namespace

CertificateReport series_certificate(const SwitchingSchedule& schedule, const FeedbackNorms& norms,
                                     const SemigroupEnvelope& env, CycleVariant variant,
                                     const SeriesOptions& options) {
    CertificateReport r;
    r.theorem = theorem_for(variant);
    r.variant = std::string(to_string(variant));
    const double ts = t_star(env);
    r.unmet = series_preconditions(schedule, norms, ts, variant, options.cycles);
    if (!r.unmet.empty()) {
        r.applicable = false;
        r.verdict = Verdict::inapplicable;
        return r;
    }

    long double sum = 0.0L;
    long double product = 1.0L;
    for (std::size_t n = 0; n < options.cycles; ++n) {
        const double te = schedule.extended_length(2 * n);
        const double to = schedule.extended_length(2 * n + 1);
        const double c = contraction_factor(env, te);
        const double b = norms.at(n);
        const double term = cycle_log(variant, b, to, c);
        sum += term;
        product *= cycle_factor(variant, b, to, c);
        r.log_terms.push_back(term);
        r.partial_sums.push_back(static_cast<double>(sum));
        r.running_products.push_back(static_cast<double>(product));
        r.bound_curve.push_back(std::exp(static_cast<double>(sum)));
    }

    r.verdict = Verdict::not_certified;
    if (options.pattern) {
        const auto& p = *options.pattern;
        if (p.kind == AsymptoticPattern::Kind::periodic) {
            r.pattern = "periodic";
            if (!fully_periodic(schedule, norms)) {
                r.notes.emplace_back("the periodic pattern needs a periodic schedule and a cyclic norm list");
            } else {
                const std::size_t per = period_in_cycles(schedule, norms);
                // Preconditions already hold for every cycle of the pattern when they hold on one period.
                const auto unmet = series_preconditions(schedule, norms, ts, variant, per);
                if (!unmet.empty()) {
                    r.notes.push_back("the pattern violates a precondition: " + unmet.front());
                } else {
                    double per_period = 0.0;
                    for (std::size_t n = 0; n < per; ++n) per_period += cycle_log_at(schedule, norms, env, variant, n);
                    r.notes.push_back("log-term sum over one period of " + std::to_string(per) +
                                      " cycles is " + fmt(per_period));
                    if (per_period < 0.0) r.verdict = Verdict::certified_asymptotic_pattern;
                }
            }
        } else {
            r.pattern = "summable_tail";
            if (!p.tail) throw Error(ErrorCode::ConfigError, "the summable_tail pattern needs a tail declaration");
            auto outcome = evaluate_remark(schedule, norms, env, *p.tail, p.min_even_length,
                                           variant == CycleVariant::anti_damping);
            r.notes.insert(r.notes.end(), outcome.notes.begin(), outcome.notes.end());
            if (outcome.passed) r.verdict = Verdict::certified_asymptotic_pattern;
        }
    }
    if (r.verdict == Verdict::not_certified && options.target_bound) {
        if (r.bound_curve.back() <= *options.target_bound) r.verdict = Verdict::certified_finite_horizon;
        else r.notes.push_back("bound " + fmt(r.bound_curve.back()) + " exceeds the target " + fmt(*options.target_bound));
    }
    return r;
}

CertificateReport remark_sufficient_test(const SwitchingSchedule& schedule, const FeedbackNorms& norms,
                                         const SemigroupEnvelope& env, const TailDeclaration& tail,
                                         std::optional<double> min_even_length, bool anti_damping) {
    CertificateReport r;
    r.theorem = TheoremId::remark_sufficient;
    r.variant = anti_damping ? "anti_damping" : "delayed";
    r.pattern = "summable_tail";
    auto outcome = evaluate_remark(schedule, norms, env, tail, min_even_length, anti_damping);
    r.log_terms = std::move(outcome.log_c);
    double running = 0.0;
    for (double a : outcome.terms) {
        running += a;
        r.partial_sums.push_back(running);
    }
    r.notes = std::move(outcome.notes);
    r.verdict = outcome.passed ? Verdict::certified_asymptotic_pattern : Verdict::not_certified;
    return r;
}

double exponential_d(double T0, double T_tilde, double sup_norm, const SemigroupEnvelope& env,
                     ExponentialVariant variant, CConvention convention) {
    const double c_env = envelope_value(env, T0);
    const double c = convention == CConvention::as_stated ? c_env : c_env * c_env;
    return cycle_factor(cycle_variant_of(variant), sup_norm, T_tilde, c);
}

CertificateReport exponential_certificate(double T0, double T_tilde, double sup_norm,
                                          const SemigroupEnvelope& env, double tau,
                                          ExponentialVariant variant, CConvention convention) {
    CertificateReport r;
    r.theorem = theorem_for(variant);
    r.variant = std::string(to_string(variant));
    r.convention = convention;
    r.pattern = "periodic";
    const double ts = t_star(env);
    if (!(T0 > 0.0) || !(T_tilde > 0.0)) r.unmet.emplace_back("interval lengths must be positive");
    if (!(sup_norm >= 0.0) || !std::isfinite(sup_norm)) r.unmet.emplace_back("the feedback bound must be finite and nonnegative");
    if (!(T0 > ts)) r.unmet.push_back("T0 = " + fmt(T0) + " does not exceed T* = " + fmt(ts));
    if (variant != ExponentialVariant::anti_damping && !length_at_least(T0, tau)) {
        r.unmet.push_back("T0 = " + fmt(T0) + " is shorter than the delay " + fmt(tau));
    }
    if (variant == ExponentialVariant::delayed_small && !length_at_most(T_tilde, tau)) {
        r.unmet.push_back("T_tilde = " + fmt(T_tilde) + " exceeds the delay " + fmt(tau));
    }
    if (!r.unmet.empty()) {
        r.applicable = false;
        r.verdict = Verdict::inapplicable;
        return r;
    }

    ExponentialPrediction p;
    p.period = T0 + T_tilde;
    p.c_envelope = envelope_value(env, T0);
    p.c_squared_factor = p.c_envelope * p.c_envelope;
    p.c_used = convention == CConvention::as_stated ? p.c_envelope : p.c_squared_factor;
    p.d = cycle_factor(cycle_variant_of(variant), sup_norm, T_tilde, p.c_used);
    r.log_terms.push_back(std::log(p.d));
    r.partial_sums.push_back(p.d);
    if (!(p.d < 1.0)) {
        r.verdict = Verdict::not_certified;
        r.notes.push_back("d = " + fmt(p.d) + " is not below 1");
        return r;
    }
    p.alpha = std::log(1.0 / p.d) / (2.0 * p.period);
    p.C = std::exp(sup_norm * T_tilde) * std::max(1.0, env.M);
    p.envelope_constant = p.C / std::sqrt(p.d);
    r.predicted = p;
    r.verdict = Verdict::certified_asymptotic_pattern;
    return r;
}

FactorComparison compare_small_delay_vs_general(double B, double T, double c) {
    FactorComparison out;
    out.small_delay = cycle_factor(CycleVariant::small_delay, B, T, c);
    out.general = cycle_factor(CycleVariant::general, B, T, c);
    out.small_is_less = out.small_delay < out.general;
    return out;
}

}  // namespace ondelay
