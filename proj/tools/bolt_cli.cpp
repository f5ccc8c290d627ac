#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bolt/bolt.hpp"

namespace {

int fail(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying Bayesian optimization toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run_cmd->add_option("--config", config_path, "Experiment config")->required();

    std::string in_dir, out_csv;
    auto* agg_cmd = app.add_subcommand("aggregate", "Normalize mean final average regret across algorithms");
    agg_cmd->add_option("--in", in_dir, "Directory of trace CSVs")->required();
    agg_cmd->add_option("--out", out_csv, "Output CSV")->required();

    std::string figure, theory_out;
    auto* theory_cmd = app.add_subcommand("theory", "Write theory curves as CSV");
    theory_cmd->add_option("--figure", figure, "slope or usize")->required()->check(CLI::IsMember({"slope", "usize"}));
    theory_cmd->add_option("--out", theory_out, "Output CSV")->required();

    auto* bench_cmd = app.add_subcommand("bench", "Benchmark utilities");
    bench_cmd->require_subcommand(1);
    auto* bench_list = bench_cmd->add_subcommand("list", "List built-in benchmarks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        if (run_cmd->parsed()) {
            const auto cfg = bolt::load_config(config_path);
            const auto traces = bolt::run(cfg);
            const auto s = bolt::summarize(traces);
            std::cout << bolt::summary_json(s);
        } else if (agg_cmd->parsed()) {
            bolt::aggregate(in_dir, out_csv);
        } else if (theory_cmd->parsed()) {
            std::ostringstream csv;
            bolt::emit_theory_curves(bolt::parse_theory_figure(figure), csv);
            bolt::write_file_atomic(theory_out, csv.str());
        } else if (bench_list->parsed()) {
            for (const auto& name : bolt::benchmark_names()) {
                const auto b = bolt::make_benchmark(name);
                std::cout << name << " d=" << b.dim() << " noise_variance=" << bolt::format_double(b.spec().noise_variance)
                          << " cost=" << bolt::format_double(b.cost()) << '\n';
            }
        }
    } catch (const bolt::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
