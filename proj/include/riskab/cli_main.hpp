#pragma once
// Argument parsing for the riskab tool, callable in-process for tests.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riskab/cli.hpp"

namespace riskab::cli {

inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Simulation toolkit for risk-sensitive abstention in two-action bandits"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::uint64_t seed_opt = 0;
    std::int64_t reps_opt = 0;
    std::string out_opt;
    int workers_opt = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed_opt, "override base_seed");
        sub->add_option("--reps", reps_opt, "override replications");
        sub->add_option("--out", out_opt, "override output directory");
        sub->add_option("--workers", workers_opt, "override worker threads");
        sub->add_flag("--audit", ov.audit, "audit each trace against the concentration event");
    };

    CLI::App* run = app.add_subcommand("run", "single-horizon Monte Carlo run");
    add_common(run);
    CLI::App* sweep = app.add_subcommand("sweep", "horizon sweep with per-T schedules");
    add_common(sweep);

    CLI::App* demo = app.add_subcommand("demo", "built-in impossibility demos");
    std::string which;
    std::uint64_t demo_seed = 1;
    std::string demo_out;
    std::int64_t demo_T = 10000;
    demo->add_option("--which", which, "need_for_caution or limits_of_caution")->required();
    demo->add_option("--seed", demo_seed, "base seed");
    demo->add_option("--out", demo_out, "output directory");
    demo->add_option("--T", demo_T, "horizon (limits_of_caution)");

    CLI::App* report = app.add_subcommand("report", "merge sweep results under a directory");
    std::string report_dir;
    report->add_option("dir", report_dir, "directory to scan")->required();

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("riskab");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_store.size());
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            err << e.what() << "\n";
            return e.get_exit_code();
        }
        return app.exit(e, out, err);  // --help / --version
    }

    try {
        CLI::App* active = run->parsed() ? run : (sweep->parsed() ? sweep : nullptr);
        if (active) {
            if (active->count("--seed")) ov.seed = seed_opt;
            if (active->count("--reps")) ov.reps = reps_opt;
            if (active->count("--out")) ov.out = out_opt;
            if (active->count("--workers")) ov.workers = workers_opt;
        }

        if (run->parsed()) return cmd_run(load_and_override(config_path, ov), out);
        if (sweep->parsed()) return cmd_sweep(load_and_override(config_path, ov), out);
        if (demo->parsed()) return cmd_demo(which, demo_seed, demo_out, demo_T, out);
        if (report->parsed()) return cmd_report(report_dir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, out, err);
}

}  // namespace riskab::cli
