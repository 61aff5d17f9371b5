// Scenario-driven CLI for the two-photon entanglement simulator.
//
// Exit codes: 0 success, 1 scenario parse error, 2 contract violation while
// running, 3 no-signaling verification failure (never expected; it would
// signal an implementation bug).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entsim/entsim.hpp"

namespace {

struct CommandConfig {
    std::string file;
    std::string format = "table";
    std::string out_path;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    CLI::Option* shots_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommandConfig& cfg) {
    cmd->add_option("file", cfg.file, "scenario file")->required();
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    cmd->add_option("--out", cfg.out_path, "write output to this path instead of stdout");
    cfg.seed_opt = cmd->add_option("--seed", cfg.seed, "override the scenario seed");
    cfg.shots_opt = cmd->add_option("--shots", cfg.shots, "override the scenario shot count");
}

entsim::EmitFormat to_format(const std::string& name) {
    if (name == "json") return entsim::EmitFormat::Json;
    if (name == "csv") return entsim::EmitFormat::Csv;
    return entsim::EmitFormat::Table;
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out{out_path, std::ios::binary};
    if (!out) {
        std::cerr << "error: cannot open output file '" << out_path << "'\n";
        return 2;
    }
    out << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon polarization entanglement simulator"};
    app.require_subcommand(1);

    CommandConfig cfg;
    std::string tags_prefix;

    CLI::App* cmd_run = app.add_subcommand("run", "full analysis: analytic tables, sampling, "
                                                  "coincidence pipeline, no-signaling check");
    CLI::App* cmd_table = app.add_subcommand("table", "analytic tables only");
    CLI::App* cmd_chsh =
        app.add_subcommand("chsh", "CHSH S from four measurement pairs (a0 b0, a0 b1, a1 b0, a1 b1)");
    CLI::App* cmd_nosignal = app.add_subcommand("nosignal", "no-signaling verification only");
    CLI::App* cmd_coinc =
        app.add_subcommand("coincidence", "time-tag coincidence pipeline for each measurement");
    for (CLI::App* cmd : {cmd_run, cmd_table, cmd_chsh, cmd_nosignal, cmd_coinc})
        add_common_options(cmd, cfg);
    cmd_coinc->add_option("--tags-out", tags_prefix,
                          "also write tag streams as <prefix>-m<k>-{A,B}.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        entsim::Scenario sc = entsim::load_scenario(cfg.file);
        if (cfg.seed_opt->count() > 0) sc.seed = cfg.seed;
        if (cfg.shots_opt->count() > 0) sc.shots = cfg.shots;

        entsim::RunOptions opts;
        if (cmd_table->parsed()) {
            opts.sampling = false;
            opts.coincidence = false;
        } else if (cmd_chsh->parsed()) {
            opts.chsh = true;
            opts.coincidence = false;
        } else if (cmd_nosignal->parsed()) {
            opts.measurements = false;
        } else if (cmd_coinc->parsed()) {
            entsim::require(sc.coincidence.has_value(),
                            "coincidence: scenario has no coincidence directive");
            opts.sampling = false;
        }

        const entsim::ScenarioReport report = entsim::run_scenario(sc, opts);

        if (cmd_coinc->parsed() && !tags_prefix.empty()) {
            entsim::TwoPhotonState evolved = sc.initial_state;
            for (const auto& op : sc.ops_a) evolved = entsim::apply_local(evolved, op);
            for (const auto& op : sc.ops_b) evolved = entsim::apply_local(evolved, op);
            for (std::size_t k = 0; k < sc.measurements.size(); ++k) {
                const entsim::AnalyzerSetting a{entsim::Arm::A, sc.measurements[k].first};
                const entsim::AnalyzerSetting b{entsim::Arm::B, sc.measurements[k].second};
                const auto [sa, sb] = entsim::generate_streams(
                    evolved, a, b, sc.coincidence->source, sc.coincidence->duration,
                    entsim::detail::measurement_seed(sc.seed, k));
                for (const auto* stream : {&sa, &sb}) {
                    const std::string path = tags_prefix + "-m" + std::to_string(k) + "-" +
                                             entsim::arm_name(stream->station()) + ".csv";
                    std::ofstream out{path, std::ios::binary};
                    if (!out) {
                        std::cerr << "error: cannot open '" << path << "'\n";
                        return 2;
                    }
                    entsim::write_tag_stream(out, *stream);
                }
            }
        }

        if (const int rc = write_output(emit(report, to_format(cfg.format)), cfg.out_path))
            return rc;
        if (!report.no_signaling.pass) {
            std::cerr << "error: no-signaling verification FAILED (max deviation "
                      << report.no_signaling.max_deviation << ")\n";
            return 3;
        }
        return 0;
    } catch (const entsim::ScenarioParseError& e) {
        std::cerr << "error: cannot parse '" << cfg.file << "'\n" << e.what() << '\n';
        return 1;
    } catch (const entsim::ContractViolation& e) {
        std::cerr << "error running scenario '" << cfg.file << "': " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error running scenario '" << cfg.file << "': " << e.what() << '\n';
        return 2;
    }
}
