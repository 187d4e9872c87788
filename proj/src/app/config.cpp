#include "ondelay/app/config.hpp"

#include "ondelay/errors.hpp"

#include <fstream>
#include <set>

namespace ondelay::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

// Typed access to one JSON object that remembers which keys were read, so that leftovers
// can be reported as unknown.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) fail("section '" + name_ + "' must be an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    [[nodiscard]] const json& raw(const std::string& key) {
        if (!j_.contains(key)) fail("section '" + name_ + "' is missing '" + key + "'");
        seen_.insert(key);
        return j_.at(key);
    }

    [[nodiscard]] double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) fail(where(key) + " must be a number");
        return v.get<double>();
    }

    [[nodiscard]] std::optional<double> opt_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    [[nodiscard]] std::size_t count(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(where(key) + " must be a nonnegative integer");
        return v.get<std::size_t>();
    }

    [[nodiscard]] std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) fail(where(key) + " must be a string");
        return v.get<std::string>();
    }

    [[nodiscard]] bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) fail(where(key) + " must be true or false");
        return v.get<bool>();
    }

    [[nodiscard]] std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail(where(key) + " must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    [[nodiscard]] std::vector<std::string> texts(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(where(key) + " must be an array of strings");
        std::vector<std::string> out;
        for (const auto& x : v) {
            if (!x.is_string()) fail(where(key) + " must be an array of strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.contains(item.key())) fail("unknown key '" + item.key() + "' in section '" + name_ + "'");
        }
    }

    [[nodiscard]] std::string where(const std::string& key) const { return "'" + name_ + "." + key + "'"; }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

double positive(Section& s, const std::string& key) {
    const double v = s.number(key);
    if (!(v > 0.0)) fail(s.where(key) + " must be positive");
    return v;
}

ModelSection parse_model(const json& j, const std::filesystem::path& base) {
    Section s(j, "model");
    ModelSection m;
    m.type = s.text("type");
    if (m.type == "scalar") {
        m.a = s.number("a");
    } else if (m.type == "viscoelastic_wave") {
        m.n_x = s.count("n_x");
        m.n_s = s.count("n_s");
        m.s_max = s.number("s_max");
        m.kernel = {s.number("mu0"), s.number("delta")};
    } else if (m.type == "locally_damped_wave") {
        m.n_x = s.count("n_x");
        m.a = s.number("a");
        m.omega1_left = s.number("omega1_left");
        const auto w2 = s.numbers("omega2");
        if (w2.size() != 2) fail("'model.omega2' must be [left, right]");
        m.omega2 = {w2[0], w2[1]};
    } else if (m.type == "dense") {
        m.generator = base / s.text("generator");
        if (s.has("gram")) m.gram = base / s.text("gram");
        for (const auto& p : s.texts("feedback")) m.feedback.push_back(base / p);
        if (m.feedback.empty()) fail("'model.feedback' needs at least one matrix file");
    } else {
        fail("unknown model type '" + m.type + "'");
    }
    s.finish();
    return m;
}

ScheduleSection parse_schedule(const json& j) {
    Section s(j, "schedule");
    ScheduleSection out;
    const std::string type = s.text("type");
    out.delay = positive(s, "delay");
    if (type == "explicit") {
        out.switch_times = s.numbers("switch_times");
        out.horizon = s.opt_number("horizon");
    } else if (type == "periodic") {
        out.periodic = true;
        out.even_length = positive(s, "T0");
        out.odd_length = positive(s, "T_tilde");
        out.cycles = s.count("n_cycles");
        if (out.cycles == 0) fail("'schedule.n_cycles' must be at least 1");
    } else {
        fail("schedule type must be 'explicit' or 'periodic', got '" + type + "'");
    }
    s.finish();
    return out;
}

EnvelopeSection parse_envelope(const json& j) {
    Section s(j, "envelope");
    EnvelopeSection out;
    out.strategy = envelope_strategy_from_string(s.text("strategy"));
    if (out.strategy == EnvelopeStrategy::pinned) {
        out.M = s.number("M");
        out.mu = s.number("mu");
    }
    s.finish();
    return out;
}

FeedbackSection parse_feedback(const json& j) {
    Section s(j, "feedback");
    FeedbackSection out;
    if (s.has("mode")) {
        const std::string mode = s.text("mode");
        if (mode == "delayed") out.mode = FeedbackMode::delayed;
        else if (mode == "anti_damping") out.mode = FeedbackMode::anti_damping;
        else fail("feedback mode must be 'delayed' or 'anti_damping', got '" + mode + "'");
    }
    if (s.has("values")) out.values = s.numbers("values");
    out.cyclic = s.flag("cyclic", true);
    s.finish();
    return out;
}

RunSection parse_run(const json& j) {
    Section s(j, "run");
    RunSection out;
    out.h = positive(s, "h");
    out.t_end = s.opt_number("t_end");
    if (out.t_end && !(*out.t_end > 0.0)) fail("'run.t_end' must be positive");
    if (s.has("history")) {
        const std::string h = s.text("history");
        if (h == "unreachable") out.history = HistoryKind::unreachable;
        else if (h == "constant_initial") out.history = HistoryKind::constant_initial;
        else fail("'run.history' must be 'unreachable' or 'constant_initial'");
    }
    if (s.has("initial_state")) out.initial_state = s.numbers("initial_state");
    if (s.has("trajectory")) out.trajectory = s.text("trajectory");
    if (s.has("monitor")) out.monitor = s.text("monitor");
    s.finish();
    return out;
}

TailDeclaration parse_tail(const json& j) {
    Section s(j, "tail");
    TailDeclaration t;
    t.kind = tail_kind_from_string(s.text("kind"));
    switch (t.kind) {
        case TailDeclaration::Kind::geometric:
            t.ratio = s.number("ratio");
            t.scale = s.number("scale");
            break;
        case TailDeclaration::Kind::zero_after: t.zero_after = s.count("after"); break;
        case TailDeclaration::Kind::bounded_sum: t.total = s.number("total"); break;
    }
    s.finish();
    return t;
}

AsymptoticPattern parse_pattern(const json& j) {
    Section s(j, "pattern");
    AsymptoticPattern p;
    const std::string kind = s.text("kind");
    if (kind == "periodic") {
        p.kind = AsymptoticPattern::Kind::periodic;
    } else if (kind == "summable_tail") {
        p.kind = AsymptoticPattern::Kind::summable_tail;
        p.tail = parse_tail(s.raw("tail"));
        p.min_even_length = s.opt_number("min_even_length");
    } else {
        fail("pattern kind must be 'periodic' or 'summable_tail', got '" + kind + "'");
    }
    s.finish();
    return p;
}

CertifySection parse_certify(const json& j) {
    Section s(j, "certify");
    CertifySection out;
    for (const auto& name : s.texts("theorems")) out.theorems.push_back(theorem_from_string(name));
    if (out.theorems.empty()) fail("'certify.theorems' must list at least one theorem");
    if (s.has("cycles")) out.cycles = s.count("cycles");
    out.target_bound = s.opt_number("target_bound");
    if (s.has("pattern")) out.pattern = parse_pattern(s.raw("pattern"));
    if (s.has("tail")) out.tail = parse_tail(s.raw("tail"));
    out.min_even_length = s.opt_number("min_even_length");
    if (s.has("conventions")) {
        out.conventions.clear();
        for (const auto& c : s.texts("conventions")) {
            if (c == "as_stated") out.conventions.push_back(CConvention::as_stated);
            else if (c == "squared_variant") out.conventions.push_back(CConvention::squared_variant);
            else fail("unknown convention '" + c + "'");
        }
        if (out.conventions.empty()) fail("'certify.conventions' must not be empty");
    }
    if (s.has("output")) out.output = s.text("output");
    s.finish();
    return out;
}

template <typename T>
const T& required(const std::optional<T>& section, const char* name) {
    if (!section) fail(std::string("missing section '") + name + "'");
    return *section;
}

}  // namespace

const ModelSection& RunConfig::require_model() const { return required(model, "model"); }
const ScheduleSection& RunConfig::require_schedule() const { return required(schedule, "schedule"); }
const EnvelopeSection& RunConfig::require_envelope() const { return required(envelope, "envelope"); }
const FeedbackSection& RunConfig::require_feedback() const { return required(feedback, "feedback"); }
const RunSection& RunConfig::require_run() const { return required(run, "run"); }
const CertifySection& RunConfig::require_certify() const { return required(certify, "certify"); }

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    Section top(doc, "config");
    RunConfig cfg;
    cfg.base_dir = base_dir;
    if (top.has("model")) cfg.model = parse_model(top.raw("model"), base_dir);
    if (top.has("schedule")) cfg.schedule = parse_schedule(top.raw("schedule"));
    if (top.has("envelope")) cfg.envelope = parse_envelope(top.raw("envelope"));
    if (top.has("feedback")) cfg.feedback = parse_feedback(top.raw("feedback"));
    if (top.has("run")) cfg.run = parse_run(top.raw("run"));
    if (top.has("certify")) cfg.certify = parse_certify(top.raw("certify"));
    top.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

}  // namespace ondelay::app
