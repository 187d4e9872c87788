#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ondelay/app/config.hpp"
#include "ondelay/app/pipeline.hpp"
#include "ondelay/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace ondelay;
using namespace ondelay::app;
using nlohmann::json;

namespace {

const fs::path cli = ONDELAY_CLI_PATH;
const fs::path configs = ONDELAY_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ondelay_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = "'" + cli.string() + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

ErrorCode parse_error_of(const json& doc) {
    try {
        (void)parse_config(doc);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a config error");
    return ErrorCode::ParseError;
}

const json scalar_periodic = {
    {"model", {{"type", "scalar"}, {"a", 1.0}}},
    {"schedule", {{"type", "periodic"}, {"T0", 2.0}, {"T_tilde", 1.0}, {"n_cycles", 10}, {"delay", 1.0}}},
    {"envelope", {{"strategy", "pinned"}, {"M", 1.0}, {"mu", 1.0}}},
    {"feedback", {{"values", {0.1}}}},
    {"certify", {{"theorems", {"expTh"}}}},
};

}  // namespace

TEST_CASE("strict config parsing") {
    json doc = scalar_periodic;
    CHECK_NOTHROW((void)parse_config(doc));

    doc["model"]["extra"] = 1;
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    doc = scalar_periodic;
    doc["plots"] = json::object();
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    doc = scalar_periodic;
    doc["schedule"]["T0"] = "two";
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    doc = scalar_periodic;
    doc["schedule"]["n_cycles"] = -3;
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    doc = scalar_periodic;
    doc["certify"]["theorems"] = {"CP9"};
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    doc = scalar_periodic;
    doc["envelope"] = {{"strategy", "guess"}};
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    // Keys of another model type are unknown for this one.
    doc = scalar_periodic;
    doc["model"]["n_s"] = 10;
    CHECK(parse_error_of(doc) == ErrorCode::ConfigError);

    const RunConfig cfg = parse_config(scalar_periodic);
    CHECK(cfg.schedule->periodic);
    CHECK(cfg.schedule->cycles == 10);
    CHECK(cfg.certify->conventions.size() == 2);
    CHECK_FALSE(cfg.run.has_value());
    try {
        (void)cfg.require_run();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("'run'") != std::string::npos);
    }
}

TEST_CASE("feedback list must cover the odd intervals unless cyclic") {
    json doc = scalar_periodic;
    doc["feedback"] = {{"values", {0.1, 0.2, 0.3}}, {"cyclic", false}};
    try {
        (void)run_certify(parse_config(doc));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
    doc["feedback"]["cyclic"] = true;
    CHECK(run_certify(parse_config(doc)).exit_code == kExitCertified);

    std::vector<double> ten(10, 0.1);
    doc["feedback"] = {{"values", ten}, {"cyclic", false}};
    CHECK(run_certify(parse_config(doc)).exit_code == kExitCertified);
}

TEST_CASE("simulate: scalar demo writes one row per node") {
    const fs::path dir = scratch("simulate");
    const Run r = run("simulate --config '" + (configs / "scalar_demo.json").string() + "' --out '" + dir.string() + "'",
                      dir);
    CHECK(r.code == 0);
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(count_lines(csv) == 5001 + 1);
    CHECK(csv.rfind("t,interval_index,kind,norm\n", 0) == 0);
    CHECK(r.out.find("final_norm=") != std::string::npos);
    CHECK(r.out.find("worst_slack=") != std::string::npos);

    const json monitor = load_json(dir / "monitor.json");
    CHECK(monitor["failures"] == 0);
    CHECK(monitor["checks"].size() > 0);
    for (const auto& c : monitor["checks"]) {
        for (const char* key : {"name", "n", "lhs", "rhs", "slack", "pass", "applicable", "tolerance"}) {
            CHECK(c.contains(key));
        }
    }

    const Run states = run("simulate --emit-states --config '" + (configs / "scalar_demo.json").string() +
                               "' --out '" + dir.string() + "'",
                           dir);
    CHECK(states.code == 0);
    CHECK(slurp(dir / "trajectory.csv").rfind("t,interval_index,kind,norm,state_0\n", 0) == 0);
}

TEST_CASE("simulate: an unaligned step is reduced and reported") {
    const fs::path dir = scratch("align");
    json doc = load_json(configs / "scalar_demo.json");
    doc["run"]["h"] = 0.003;
    const fs::path cfg = write_config(dir, doc);
    const Run r = run("simulate --config '" + cfg.string() + "' --out '" + dir.string() + "'", dir);
    CHECK(r.code == 0);
    CHECK(r.err.find("h adjusted from 0.0030000000000000001") != std::string::npos);
    // 334 steps per unit delay is the largest aligned choice below 0.003.
    CHECK(count_lines(slurp(dir / "trajectory.csv")) == 5 * 334 + 2);
}

TEST_CASE("input errors exit with 2") {
    const fs::path dir = scratch("errors");
    json doc = load_json(configs / "scalar_demo.json");
    doc.erase("model");
    fs::path cfg = write_config(dir, doc);
    Run r = run("simulate --config '" + cfg.string() + "' --out '" + dir.string() + "'", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("model") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{ \"model\": ";
    r = run("certify --config '" + (dir / "broken.json").string() + "'", dir);
    CHECK(r.code == 2);

    r = run("certify", dir);
    CHECK(r.code == 2);
    r = run("launch --config x.json", dir);
    CHECK(r.code == 2);

    doc = load_json(configs / "scalar_demo.json");
    doc["model"]["a"] = -1.0;
    cfg = write_config(dir, doc);
    r = run("simulate --config '" + cfg.string() + "' --out '" + dir.string() + "'", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("NonPositiveDecay") != std::string::npos);
}

TEST_CASE("numerical errors exit with 5") {
    const fs::path dir = scratch("numerical");
    json doc = load_json(configs / "locally_damped_wave.json");
    doc["model"]["a"] = 0.0;
    doc["model"]["n_x"] = 10;
    const fs::path cfg = write_config(dir, doc);
    const Run r = run("certify --config '" + cfg.string() + "' --out '" + dir.string() + "'", dir);
    CHECK(r.code == 5);
    CHECK(r.err.find("NotExponentiallyStable") != std::string::npos);
}

TEST_CASE("certify exit codes") {
    const fs::path dir = scratch("certify");
    Run r = run("certify --config '" + (configs / "exponential_demo.json").string() + "' --out '" + dir.string() + "'",
                dir);
    CHECK(r.code == 0);
    const json doc = load_json(dir / "certificates.json");
    CHECK(doc["exit_code"] == 0);
    bool found = false;
    for (const auto& rep : doc["reports"]) {
        if (rep["theorem"] == "expTh" && rep["convention"] == "as_stated") {
            found = true;
            CHECK(rep["verdict"] == "certified_asymptotic_pattern");
            CHECK(rep["predicted"]["alpha"].get<double>() == doctest::Approx(0.2078).epsilon(1e-4));
            CHECK(rep["predicted"]["d"].get<double>() == doctest::Approx(0.287440).epsilon(1e-5));
        }
    }
    CHECK(found);

    r = run("certify --config '" + (configs / "exponential_unstable.json").string() + "' --out '" + dir.string() + "'",
            dir);
    CHECK(r.code == 3);
    r = run("certify --config '" + (configs / "short_even_intervals.json").string() + "' --out '" + dir.string() +
                "'",
            dir);
    CHECK(r.code == 4);
    CHECK(r.out.find("does not exceed T*") != std::string::npos);
}

TEST_CASE("certify: theorem and feedback mode must agree") {
    json doc = scalar_periodic;
    doc["certify"]["theorems"] = {"expAD", "CP1AD"};
    const auto res = run_certify(parse_config(doc));
    CHECK(res.exit_code == kExitInapplicable);
    for (const auto& r : res.reports) CHECK(r.verdict == Verdict::inapplicable);

    doc = scalar_periodic;
    doc["schedule"] = {{"type", "explicit"}, {"switch_times", {0, 2, 3, 5, 6}}, {"delay", 1.0}};
    const auto explicit_res = run_certify(parse_config(doc));
    CHECK(explicit_res.exit_code == kExitInapplicable);
}

TEST_CASE("sweep") {
    const fs::path dir = scratch("sweep");
    json doc = scalar_periodic;
    const fs::path cfg = write_config(dir, doc);

    Run r = run("sweep --config '" + cfg.string() + "' --out '" + dir.string() + "' --axis B_bar --values ''", dir);
    CHECK(r.code == 0);
    CHECK(slurp(dir / "sweep.csv") == "value,d,alpha,verdict\n");

    std::string grid;
    for (int i = 0; i <= 10; ++i) grid += (i ? "," : "") + std::to_string(0.05 * i);
    r = run("sweep --threads 4 --config '" + cfg.string() + "' --out '" + dir.string() + "' --axis B_bar --values " +
                grid,
            dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("d crosses 1 between B_bar=0.34999999999999998") != std::string::npos);
    CHECK(r.out.find("and B_bar=0.40000000000000002") != std::string::npos);
    const std::string threaded = slurp(dir / "sweep.csv");
    CHECK(count_lines(threaded) == 12);

    r = run("sweep --threads 1 --config '" + cfg.string() + "' --out '" + dir.string() + "' --axis B_bar --values " +
                grid,
            dir);
    CHECK(slurp(dir / "sweep.csv") == threaded);

    r = run("sweep --config '" + cfg.string() + "' --out '" + dir.string() + "' --axis gamma --values 1", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("UnknownAxis") != std::string::npos);

    r = run("sweep --config '" + cfg.string() + "' --out '" + dir.string() + "' --axis mu0 --values 0.5", dir);
    CHECK(r.code == 2);

    // d is nonincreasing in T0.
    const auto rows = run_sweep(parse_config(scalar_periodic), SweepAxis::T0, {1.0, 1.5, 2.0, 3.0, 5.0, 8.0}, 2);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].d.has_value());
        CHECK(*rows[i].d <= *rows[i - 1].d);
    }
    // The closed form at each point.
    for (const auto& row : run_sweep(parse_config(scalar_periodic), SweepAxis::B_bar, {0.0, 0.3, 1.0}, 1)) {
        const double b = row.value;
        CHECK(*row.d == doctest::Approx(std::exp(2 * b) * (std::exp(-2.0) + b)).epsilon(1e-14));
    }
    // The a axis rebuilds the model: the numerical abscissa gives mu = a.
    json rebuilt = scalar_periodic;
    rebuilt["envelope"] = {{"strategy", "numerical_abscissa"}};
    const auto a_rows = run_sweep(parse_config(rebuilt), SweepAxis::a, {0.5, 1.0, 2.0}, 3);
    for (const auto& row : a_rows) {
        CHECK(*row.d == doctest::Approx(std::exp(0.2) * (std::exp(-2.0 * row.value) + 0.1)).epsilon(1e-14));
    }
}

TEST_CASE("validate reports hypotheses and dumps matrices") {
    const fs::path dir = scratch("validate");
    const Run r = run("validate --dump-matrices --config '" + (configs / "short_even_intervals.json").string() +
                          "' --out '" + dir.string() + "'",
                      dir);
    CHECK(r.code == 0);
    const json doc = load_json(dir / "hypotheses.json");
    CHECK(doc["T_star"].get<double>() == doctest::Approx(std::log(10.0)));
    CHECK(doc["hypotheses"]["all_even_geq_tau"] == true);
    CHECK(doc["hypotheses"]["all_even_gt_tstar"] == false);
    CHECK(fs::exists(dir / "generator.txt"));
    CHECK(fs::exists(dir / "feedback_0.txt"));

    // The dumped matrices round-trip through a dense model.
    json dense = load_json(configs / "exponential_demo.json");
    dense["model"] = {{"type", "dense"},
                      {"generator", (dir / "generator.txt").string()},
                      {"gram", (dir / "gram.txt").string()},
                      {"feedback", {(dir / "feedback_0.txt").string()}}};
    dense["feedback"] = json::object();
    const auto from_files = run_certify(parse_config(dense));
    const auto direct = run_certify(parse_config(load_json(configs / "exponential_demo.json")));
    REQUIRE(from_files.reports.size() == direct.reports.size());
    for (std::size_t i = 0; i < direct.reports.size(); ++i) {
        CHECK(from_files.reports[i].verdict == direct.reports[i].verdict);
        CHECK(from_files.reports[i].partial_sums == direct.reports[i].partial_sums);
    }
}

TEST_CASE("identical configs give bit-identical outputs") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        CHECK(run("simulate --emit-states --config '" + (configs / "exponential_demo.json").string() + "' --out '" +
                      dir.string() + "'",
                  dir)
                  .code == 0);
        CHECK(run("certify --config '" + (configs / "exponential_demo.json").string() + "' --out '" + dir.string() +
                      "'",
                  dir)
                  .code == 0);
    }
    for (const char* f : {"trajectory.csv", "monitor.json", "certificates.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
}
