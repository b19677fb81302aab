#include "shapeform/error.hpp"
#include "shapeform/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace shapeform;

namespace {

void report(const RunOutcome& out) {
    for (const auto& r : out.runs) {
        std::cout << r.name << ": mode=" << r.mode << " finalScale=" << r.final_scale << " J=" << r.cost
                  << " totalPath=" << r.paths.total << " termination=" << r.termination;
        if (!r.diagnostic.empty()) std::cout << " (" << r.diagnostic << ")";
        std::cout << '\n';
    }
    for (const auto& c : out.comparisons)
        std::cout << "  " << c.table << ' ' << c.row << ' ' << c.quantity << ": reference=" << c.reference
                  << " computed=" << c.computed << " relError=" << c.rel_error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Formation shape control experiments"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    Overrides ov;
    double dt = 0.0;
    double t_max = 0.0;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--dt", dt, "Integration step")->check(CLI::PositiveNumber);
        cmd->add_option("--tmax", t_max, "Integration horizon")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Seed for randomized suites");
        cmd->add_option("--parallel", ov.parallel, "Worker threads")->check(CLI::Range(1, 256));
    };

    std::string config_path;
    std::string table;
    auto* run_cmd = app.add_subcommand("run", "Run one configuration");
    run_cmd->add_option("config", config_path, "JSON config file")->required();
    add_common(run_cmd);
    auto* scan_cmd = app.add_subcommand("scan-scale", "Scan constant scales from a configuration");
    scan_cmd->add_option("config", config_path, "JSON config file")->required();
    add_common(scan_cmd);
    auto* repro_cmd = app.add_subcommand("reproduce", "Reproduce a table from the built-in setups");
    repro_cmd->add_option("table", table, "table1, table2, table3 or localization")
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "table3", "localization"}));
    add_common(repro_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto set_overrides = [&](CLI::App* cmd) {
        if (cmd->count("--dt")) ov.dt = dt;
        if (cmd->count("--tmax")) ov.t_max = t_max;
        if (cmd->count("--seed")) ov.seed = seed;
    };

    try {
        RunOutcome out;
        if (run_cmd->parsed() || scan_cmd->parsed()) {
            CLI::App* cmd = run_cmd->parsed() ? run_cmd : scan_cmd;
            set_overrides(cmd);
            ExperimentConfig cfg = load_config(config_path);
            apply_overrides(cfg, ov);
            if (!cmd->count("--out") && !cfg.output_dir.empty()) out_dir = cfg.output_dir;
            if (scan_cmd->parsed() && cfg.scan.empty()) throw ConfigError("scale.scan: required for scan-scale");
            out = scan_cmd->parsed() ? scan_scale(cfg, out_dir, ov) : run(cfg, out_dir, ov);
        } else {
            set_overrides(repro_cmd);
            out = reproduce(table, out_dir, ov);
        }
        report(out);
        return out.ok ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
