// ondelay: simulate, certify, sweep and validate switched delay-feedback systems from a JSON config.

#include "ondelay/app/config.hpp"
#include "ondelay/app/pipeline.hpp"
#include "ondelay/app/report.hpp"
#include "ondelay/errors.hpp"
#include "ondelay/linalg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace ondelay;
using namespace ondelay::app;

namespace {

struct Options {
    std::string config;
    std::string out = ".";
    std::size_t threads = 1;
    bool emit_states = false;
    bool dump_matrices = false;
    std::string axis;
    std::string values;
};

fs::path output_path(const Options& o, const std::string& name) {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(o.out) / p;
}

// Comma- or whitespace-separated decimals; an empty string is an empty list.
std::vector<double> parse_values(const std::string& text) {
    std::string spaced = text;
    for (char& c : spaced) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(spaced);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size()) throw Error(ErrorCode::ConfigError, "bad sweep value '" + token + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_simulate(const Options& o) {
    const RunConfig cfg = load_config(o.config);
    const SimulateResult r = run_simulate(cfg);
    if (r.h != r.h_requested) {
        std::cerr << "note: h adjusted from " << format_double(r.h_requested) << " to " << format_double(r.h)
                  << " so that the delay, the switch times and t_end lie on the grid\n";
    }
    const auto& run = *cfg.run;
    write_trajectory_csv(output_path(o, run.trajectory), r.trajectory, o.emit_states);
    nlohmann::json monitor = to_json(r.report);
    monitor["envelope"] = to_json(r.envelope);
    monitor["h"] = r.h;
    monitor["t_end"] = r.t_end;
    write_json(output_path(o, run.monitor), monitor);
    std::printf("simulate: nodes=%zu h=%s final_norm=%s worst_slack=%s checks=%zu failures=%zu\n",
                r.trajectory.node_count(), format_double(r.h).c_str(),
                format_double(r.trajectory.norms().back()).c_str(), format_double(r.report.worst_slack()).c_str(),
                r.report.applicable_count(), r.report.failures());
    return kExitCertified;
}

int cmd_certify(const Options& o) {
    const RunConfig cfg = load_config(o.config);
    const CertifyResult r = run_certify(cfg);
    nlohmann::json doc;
    doc["envelope"] = to_json(r.envelope);
    doc["schedule"] = to_json(r.schedule);
    doc["feedback_mode"] = r.mode == FeedbackMode::delayed ? "delayed" : "anti_damping";
    doc["reports"] = nlohmann::json::array();
    for (const auto& rep : r.reports) doc["reports"].push_back(to_json(rep));
    doc["exit_code"] = r.exit_code;
    write_json(output_path(o, cfg.certify->output), doc);
    for (const auto& rep : r.reports) {
        std::printf("%s %s%s%s: %s", std::string(to_string(rep.theorem)).c_str(), rep.variant.c_str(),
                    rep.convention ? " " : "",
                    rep.convention ? std::string(to_string(*rep.convention)).c_str() : "",
                    std::string(to_string(rep.verdict)).c_str());
        if (rep.predicted) {
            std::printf(" d=%s alpha=%s", format_double(rep.predicted->d).c_str(),
                        format_double(rep.predicted->alpha).c_str());
        }
        for (const auto& u : rep.unmet) std::printf(" [unmet: %s]", u.c_str());
        std::printf("\n");
    }
    return r.exit_code;
}

int cmd_sweep(const Options& o) {
    const RunConfig cfg = load_config(o.config);
    const SweepAxis axis = sweep_axis_from_string(o.axis);
    const std::vector<double> values = parse_values(o.values);
    const auto rows = run_sweep(cfg, axis, values, o.threads);

    const fs::path path = output_path(o, "sweep.csv");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
    out << "value,d,alpha,verdict\n";
    for (const auto& row : rows) {
        out << format_double(row.value) << ',' << (row.d ? format_double(*row.d) : "") << ','
            << (row.alpha ? format_double(*row.alpha) : "") << ',' << to_string(row.verdict) << '\n';
    }
    std::printf("sweep %s: %zu points\n", std::string(to_string(axis)).c_str(), rows.size());
    if (const auto c = find_crossing(rows)) {
        std::printf("d crosses 1 between %s=%s (d=%s) and %s=%s (d=%s)\n", o.axis.c_str(),
                    format_double(rows[c->first].value).c_str(), format_double(*rows[c->first].d).c_str(),
                    o.axis.c_str(), format_double(rows[c->second].value).c_str(),
                    format_double(*rows[c->second].d).c_str());
    }
    return kExitCertified;
}

int cmd_validate(const Options& o) {
    const RunConfig cfg = load_config(o.config);
    const ValidateResult r = run_validate(cfg);
    nlohmann::json doc;
    doc["schedule"] = to_json(r.schedule);
    doc["T_star"] = r.t_star;
    doc["envelope"] = r.envelope ? to_json(*r.envelope) : nlohmann::json(nullptr);
    doc["hypotheses"] = to_json(r.hypotheses);
    write_json(output_path(o, "hypotheses.json"), doc);

    if (o.dump_matrices) {
        const BuiltModel model = build_model(cfg.require_model(), cfg.feedback.value_or(FeedbackSection{}));
        write_dense_matrix(output_path(o, "generator.txt"), model.system.generator());
        write_dense_matrix(output_path(o, "gram.txt"), model.system.inner_product().gram());
        for (std::size_t k = 0; k < model.system.feedback_count(); ++k) {
            write_dense_matrix(output_path(o, "feedback_" + std::to_string(k) + ".txt"),
                               model.system.feedback_ops()[k]);
        }
    }
    const auto& h = r.hypotheses;
    std::printf("validate: intervals=%zu T*=%s even>=tau:%s even>T*:%s odd<=tau:%s periodic:%s\n",
                r.schedule.interval_count(), format_double(r.t_star).c_str(), h.all_even_geq_tau() ? "yes" : "no",
                h.all_even_gt_tstar() ? "yes" : "no", h.all_odd_leq_tau() ? "yes" : "no",
                h.periodic_even && h.periodic_odd ? "yes" : "no");
    return kExitCertified;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability certificates and simulation for switched delay-feedback systems"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
    };
    auto* simulate = app.add_subcommand("simulate", "Integrate the system and check every per-interval inequality");
    add_common(simulate);
    simulate->add_flag("--emit-states", o.emit_states, "Add state_i columns to the trajectory CSV");

    auto* certify = app.add_subcommand("certify", "Evaluate the requested stability certificates");
    add_common(certify);

    auto* sweep = app.add_subcommand("sweep", "Exponential certificate over a parameter grid");
    add_common(sweep);
    sweep->add_option("--axis", o.axis, "B_bar, T0, T_tilde, tau, a, mu0 or delta")->required();
    sweep->add_option("--values", o.values, "Comma-separated parameter values (may be empty)")->required();
    sweep->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Report the schedule hypotheses only");
    add_common(validate);
    validate->add_flag("--dump-matrices", o.dump_matrices, "Write the assembled matrices as text files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kExitConfigError;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (certify->parsed()) return cmd_certify(o);
        if (sweep->parsed()) return cmd_sweep(o);
        return cmd_validate(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumericalError;
    }
}
