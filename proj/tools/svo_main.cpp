#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "svo/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"svo: exact recursive uncertainty-set estimation for scalar LTI plants"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", report_path;
    bool force_oracle = false;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto* run_cmd = app.add_subcommand("run", "execute a run from a config file");
    run_cmd->add_option("config", config_path, "config JSON")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_flag("--oracle", force_oracle, "force the exact-recursion oracle on");
    run_cmd->add_option("--seed", seed, "override the disturbance seed")
        ->each([&](const std::string&) { seed_set = true; });

    auto* plot_cmd = app.add_subcommand("export-plot", "emit CSV plot data from a report");
    plot_cmd->add_option("report", report_path, "report JSON produced by run")->required();
    plot_cmd->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            svo::RunConfig cfg = svo::load_config_file(config_path);
            if (force_oracle)
                cfg.oracle = true;
            if (seed_set) {
                cfg.seeded = true;
                cfg.seed = seed;
                cfg.measurements.clear();
            }
            svo::RunReport report = svo::run(cfg);
            std::filesystem::create_directories(out_dir);
            const auto path = std::filesystem::path(out_dir) / "report.json";
            std::ofstream out(path);
            out << svo::report_to_json(report) << "\n";
            if (!report.stop_reason.empty())
                std::fprintf(stderr, "svo: %s\n", report.stop_reason.c_str());
            std::printf("%s\n", path.string().c_str());
            return report.exit_code;
        }
        if (plot_cmd->parsed()) {
            std::ifstream in(report_path);
            if (!in) {
                std::fprintf(stderr, "svo: cannot open %s\n", report_path.c_str());
                return 1;
            }
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            svo::export_plot(svo::report_from_json(text), out_dir);
            return 0;
        }
    } catch (const svo::ConfigError& e) {
        std::fprintf(stderr, "svo: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "svo: error: %s\n", e.what());
        return 1;
    }
    return 0;
}
