#pragma once

#include "shapeform/localization.hpp"
#include "shapeform/scale_control.hpp"
#include "shapeform/simulation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shapeform {

enum class Mode { Constant, Scan, Varying, Controllable };

std::string to_string(Mode m);

struct ExperimentConfig {
    std::string name = "run";
    Graph graph;
    Realization z0;
    ShapeVector shape;
    Mode mode = Mode::Varying;
    std::optional<double> sc;  // empty means the analytic optimum
    std::vector<double> scan;
    double lambda = 0.0;
    std::optional<Realization> target;
    std::optional<std::pair<double, double>> clamp;
    SimConfig sim;
    std::string output_dir;
    std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::uint64_t> seed;
    int parallel = 1;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov);

struct ReferenceComparison {
    std::string table;
    std::string row;
    std::string quantity;
    double reference = 0.0;
    double computed = 0.0;
    double rel_error = 0.0;
};

ReferenceComparison compare(std::string table, std::string row, std::string quantity, double reference, double computed);

struct RunSummary {
    std::string name;
    std::string mode;
    double final_scale = 0.0;
    double cost = 0.0;
    bool truncated = false;
    PathLengths paths;
    ConvergenceReport convergence;
    std::string termination;
    std::string diagnostic;
    std::optional<double> closed_form_cost;
    std::optional<ControllabilityResult> controllability;
    std::vector<ReferenceComparison> comparisons;

    bool ok() const;
    nlohmann::json to_json() const;
};

// Simulates one configuration; scan mode is rejected here.
RunSummary simulate(const ExperimentConfig& cfg, Trajectory* traj_out = nullptr);

struct RunOutcome {
    std::vector<RunSummary> runs;
    std::vector<ReferenceComparison> comparisons;
    bool ok = true;
};

// Writes trajectory.csv, metrics.csv and summary.json into out_dir.
RunOutcome run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, const Overrides& ov = {});

// One run per grid value plus the analytic optimum; writes scan.csv.
RunOutcome scan_scale(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, const Overrides& ov = {});

// table1, table2, table3 or localization; writes comparison.csv and summary.json.
RunOutcome reproduce(const std::string& table, const std::filesystem::path& out_dir, const Overrides& ov = {});

// Built-in configurations used by reproduce.
ExperimentConfig builtin_four_agent(char graph, Mode mode, std::optional<double> sc = std::nullopt);
ExperimentConfig builtin_six_agent(char graph, bool primed);
ExperimentConfig builtin_localization(Mode mode);

void write_summary_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_comparison_csv(const std::filesystem::path& path, const std::vector<ReferenceComparison>& rows);

}  // namespace shapeform
