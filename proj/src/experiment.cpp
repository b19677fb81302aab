#include "shapeform/experiment.hpp"

#include "shapeform/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

namespace shapeform {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Constant: return "constant";
        case Mode::Scan: return "scan";
        case Mode::Varying: return "varying";
        case Mode::Controllable: return "controllable";
    }
    return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

double number_at(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(field, "must be finite");
    return v;
}

Eigen::VectorXd vector_at(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = number_at(j[k], field + "[" + std::to_string(k) + "]");
    return v;
}

int positive_int_at(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    const auto v = j.get<long long>();
    if (v < 1) fail(field, "must be at least 1");
    return static_cast<int>(v);
}

Graph parse_graph(const json& j) {
    if (!j.is_object()) fail("graph", "expected an object with n and edges");
    if (!j.contains("n")) fail("graph.n", "missing");
    const int n = positive_int_at(j["n"], "graph.n");
    if (!j.contains("edges") || !j["edges"].is_array()) fail("graph.edges", "expected an array of [u, v] pairs");
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < j["edges"].size(); ++k) {
        const auto& e = j["edges"][k];
        const std::string field = "graph.edges[" + std::to_string(k) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            fail(field, "expected a pair of integer labels");
        const int u = e[0].get<int>();
        const int v = e[1].get<int>();
        if (u < 1 || v < 1 || u > n || v > n) fail(field, "label outside [1, n]");
        if (u == v) fail(field, "self-loop");
        edges.emplace_back(u, v);
    }
    try {
        const bool canonical = j.value("canonical", false);
        Graph g = canonical ? Graph::canonical(n, std::move(edges)) : Graph(n, std::move(edges));
        if (!g.is_connected()) fail("graph.edges", "graph is not connected");
        return g;
    } catch (const TopologyError& ex) {
        fail("graph.edges", ex.what());
    }
}

Mode parse_mode(const json& j) {
    if (!j.is_string()) fail("mode", "expected a string");
    const auto s = j.get<std::string>();
    if (s == "constant") return Mode::Constant;
    if (s == "scan") return Mode::Scan;
    if (s == "varying") return Mode::Varying;
    if (s == "controllable") return Mode::Controllable;
    fail("mode", "unknown mode '" + s + "'");
}

std::vector<double> parse_scan(const json& j) {
    std::vector<double> grid;
    if (j.is_array()) {
        const Eigen::VectorXd v = vector_at(j, "scale.scan");
        grid.assign(v.data(), v.data() + v.size());
    } else if (j.is_object()) {
        const double start = number_at(j.value("start", json()), "scale.scan.start");
        const double stop = number_at(j.value("stop", json()), "scale.scan.stop");
        const double step = number_at(j.value("step", json()), "scale.scan.step");
        if (!(step > 0.0) || stop < start) fail("scale.scan", "needs start <= stop and a positive step");
        const auto count = static_cast<int>(std::floor((stop - start) / step + 1e-9));
        for (int k = 0; k <= count; ++k) grid.push_back(std::round((start + k * step) * 1e12) / 1e12);
    } else {
        fail("scale.scan", "expected an array or {start, stop, step}");
    }
    if (grid.empty()) fail("scale.scan", "empty grid");
    for (double v : grid)
        if (!(v > 0.0)) fail("scale.scan", "grid values must be strictly positive");
    return grid;
}

template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count < 2) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(threads, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_text(const fs::path& path, const std::string& text) {
    // Write then rename so readers never see a partial file.
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw Error("cannot write " + tmp.string());
        os << text;
    }
    fs::rename(tmp, path);
}

std::string metrics_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,residual,lyapunov,scale\n" << std::setprecision(12);
    for (const auto& s : traj.samples) os << s.t << ',' << s.residual << ',' << s.lyapunov << ',' << s.scale << '\n';
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    return os.str();
}

json comparisons_json(const std::vector<ReferenceComparison>& rows) {
    json out = json::array();
    for (const auto& c : rows)
        out.push_back({{"table", c.table},
                       {"row", c.row},
                       {"quantity", c.quantity},
                       {"reference", c.reference},
                       {"computed", c.computed},
                       {"relError", c.rel_error}});
    return out;
}

Realization derived_target(const ExperimentConfig& cfg, const std::shared_ptr<const ControllerArtifacts>& art) {
    const Trajectory ref = integrate(cfg.z0, VaryingScaleController(art), cfg.sim);
    if (!ref.converged()) throw Error("reference run for the controllability target did not converge");
    const Realization& zf = ref.final().z;
    const double factor = std::sqrt(cfg.lambda / ref.final().scale);
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    const Eigen::Index n = zf.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i) centroid += zf.segment<2>(2 * i);
    centroid /= static_cast<double>(n);
    Realization target = zf;
    for (Eigen::Index i = 0; i < n; ++i) target.segment<2>(2 * i) = centroid + factor * (zf.segment<2>(2 * i) - centroid);
    return target;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected a JSON object");
    ExperimentConfig cfg;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) fail("name", "expected a string");
        cfg.name = doc["name"].get<std::string>();
    }
    if (!doc.contains("graph")) fail("graph", "missing");
    cfg.graph = parse_graph(doc["graph"]);
    const int n = cfg.graph.vertex_count();

    if (!doc.contains("z0")) fail("z0", "missing");
    cfg.z0 = vector_at(doc["z0"], "z0");
    if (cfg.z0.size() != 2 * n) fail("z0", "length must equal 2n = " + std::to_string(2 * n));
    if (is_collinear(cfg.z0)) fail("z0", "realization is collinear");

    if (!doc.contains("shape") || !doc["shape"].is_object()) fail("shape", "expected {values, squared}");
    const auto& shape = doc["shape"];
    if (!shape.contains("squared") || !shape["squared"].is_boolean())
        fail("shape.squared", "flag required: true for squared lengths, false for lengths");
    if (!shape.contains("values")) fail("shape.values", "missing");
    const Eigen::VectorXd values = vector_at(shape["values"], "shape.values");
    if (values.size() != static_cast<Eigen::Index>(cfg.graph.edge_count()))
        fail("shape.values", "length must equal the edge count " + std::to_string(cfg.graph.edge_count()));
    if ((values.array() <= 0.0).any()) fail("shape.values", "entries must be positive");
    cfg.shape = shape["squared"].get<bool>() ? ShapeVector::from_squared(values) : ShapeVector::from_lengths(values);

    cfg.mode = parse_mode(doc.value("mode", json("varying")));

    const json scale = doc.value("scale", json::object());
    if (!scale.is_object()) fail("scale", "expected an object");
    if (scale.contains("sc")) {
        const auto& sc = scale["sc"];
        if (sc.is_string()) {
            if (sc.get<std::string>() != "optimal") fail("scale.sc", "expected a number or \"optimal\"");
        } else {
            cfg.sc = number_at(sc, "scale.sc");
            if (!(*cfg.sc > 0.0)) fail("scale.sc", "must be positive");
        }
    }
    if (scale.contains("scan")) cfg.scan = parse_scan(scale["scan"]);
    if (scale.contains("lambda")) {
        cfg.lambda = number_at(scale["lambda"], "scale.lambda");
        if (!(cfg.lambda > 0.0)) fail("scale.lambda", "must be positive");
    }
    if (scale.contains("target")) {
        cfg.target = vector_at(scale["target"], "scale.target");
        if (cfg.target->size() != 2 * n) fail("scale.target", "length must equal 2n");
    }
    if (scale.contains("clamp")) {
        const Eigen::VectorXd c = vector_at(scale["clamp"], "scale.clamp");
        if (c.size() != 2 || !(c(0) > 0.0 && c(0) < c(1))) fail("scale.clamp", "expected [min, max] with 0 < min < max");
        cfg.clamp = std::pair{c(0), c(1)};
    }
    if (cfg.mode == Mode::Scan && cfg.scan.empty()) fail("scale.scan", "required in scan mode");
    if (cfg.mode == Mode::Controllable && !(cfg.lambda > 0.0)) fail("scale.lambda", "required in controllable mode");

    const json sim = doc.value("sim", json::object());
    if (!sim.is_object()) fail("sim", "expected an object");
    if (sim.contains("dt")) cfg.sim.dt = number_at(sim["dt"], "sim.dt");
    if (sim.contains("tmax")) cfg.sim.t_max = number_at(sim["tmax"], "sim.tmax");
    if (sim.contains("tol")) cfg.sim.convergence_tol = number_at(sim["tol"], "sim.tol");
    if (sim.contains("stride")) cfg.sim.record_stride = positive_int_at(sim["stride"], "sim.stride");
    try {
        cfg.sim.validate();
    } catch (const PreconditionError& ex) {
        fail("sim", ex.what());
    }

    if (doc.contains("output")) {
        if (!doc["output"].is_string()) fail("output", "expected a string");
        cfg.output_dir = doc["output"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path.string() + ": cannot open");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& ex) {
        throw ConfigError(path.string() + ": " + ex.what());
    }
    return parse_config(doc);
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
    if (ov.dt) cfg.sim.dt = *ov.dt;
    if (ov.t_max) cfg.sim.t_max = *ov.t_max;
    if (ov.seed) cfg.seed = *ov.seed;
    try {
        cfg.sim.validate();
    } catch (const PreconditionError& ex) {
        throw ConfigError(std::string("overrides: ") + ex.what());
    }
}

ReferenceComparison compare(std::string table, std::string row, std::string quantity, double reference, double computed) {
    return {std::move(table), std::move(row), std::move(quantity), reference, computed,
            std::abs(computed - reference) / std::abs(reference)};
}

bool RunSummary::ok() const {
    if (termination != to_string(Termination::Converged)) return false;
    return !controllability || controllability->feasible;
}

json RunSummary::to_json() const {
    json j;
    j["name"] = name;
    j["mode"] = mode;
    j["finalScale"] = final_scale;
    j["J"] = cost;
    j["truncated"] = truncated;
    j["pathLengths"] = paths.per_agent;
    j["totalPath"] = paths.total;
    j["maxAgent"] = paths.max_agent;
    j["rate"] = convergence.rate_defined ? json(convergence.rate) : json(nullptr);
    j["rateRSquared"] = convergence.rate_defined ? json(convergence.r_squared) : json(nullptr);
    j["finalResidual"] = convergence.residual;
    j["terminationReason"] = termination;
    if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
    if (closed_form_cost) j["closedFormJ"] = *closed_form_cost;
    if (controllability) {
        const auto& c = *controllability;
        j["controllability"] = {{"feasible", c.feasible},
                                {"gains", std::vector<double>(c.gains.data(), c.gains.data() + c.gains.size())},
                                {"linearResidual", c.linear_residual},
                                {"finalScale", c.final_scale},
                                {"iterations", c.iterations},
                                {"diagnostic", c.diagnostic}};
    }
    j["referenceComparisons"] = comparisons_json(comparisons);
    return j;
}

RunSummary simulate(const ExperimentConfig& cfg, Trajectory* traj_out) {
    if (cfg.mode == Mode::Scan) throw ConfigError("mode: scan runs go through scan_scale");
    auto art = std::make_shared<const ControllerArtifacts>(ControllerArtifacts::build(cfg.graph, cfg.shape));
    RunSummary sum;
    sum.name = cfg.name;
    sum.mode = to_string(cfg.mode);

    Trajectory traj;
    if (cfg.mode == Mode::Constant) {
        const Geometry e0 = edge_vector(cfg.z0, art->incidence());
        const double sc = cfg.sc ? *cfg.sc : optimal_constant_scale(e0, cfg.shape);
        sum.closed_form_cost = constant_cost_closed_form(e0, cfg.shape, sc);
        traj = integrate(cfg.z0, ConstantScaleController(art, sc), cfg.sim);
    } else if (cfg.mode == Mode::Varying) {
        traj = integrate(cfg.z0, VaryingScaleController(art, std::nullopt, cfg.clamp), cfg.sim);
    } else {
        const Realization target = cfg.target ? *cfg.target : derived_target(cfg, art);
        ControllabilityOptions opt;
        opt.dt = cfg.sim.dt;
        opt.t_max = cfg.sim.t_max;
        opt.convergence_tol = cfg.sim.convergence_tol;
        sum.controllability = solve_controllability_gains(cfg.z0, target, cfg.lambda, *art, opt);
        if (sum.controllability->feasible)
            traj = integrate(cfg.z0, VaryingScaleController(art, sum.controllability->gains, cfg.clamp), cfg.sim);
        else
            traj = integrate(cfg.z0, VaryingScaleController(art, std::nullopt, cfg.clamp), cfg.sim);
    }
    if (!traj.samples.empty()) {
        sum.final_scale = traj.final().scale;
        sum.cost = traj.final().cumulative_cost;
        sum.paths = path_lengths(traj);
        sum.convergence = convergence_report(traj);
    }
    sum.truncated = !traj.converged();
    sum.termination = to_string(traj.termination);
    sum.diagnostic = traj.diagnostic;
    if (traj_out) *traj_out = std::move(traj);
    return sum;
}

void write_summary_file(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_comparison_csv(const fs::path& path, const std::vector<ReferenceComparison>& rows) {
    std::ostringstream os;
    os << "table,row,quantity,reference,computed,relError\n" << std::setprecision(12);
    for (const auto& c : rows)
        os << c.table << ',' << c.row << ',' << c.quantity << ',' << c.reference << ',' << c.computed << ',' << c.rel_error
           << '\n';
    write_text(path, os.str());
}

RunOutcome run(const ExperimentConfig& config, const fs::path& out_dir, const Overrides& ov) {
    ExperimentConfig cfg = config;
    apply_overrides(cfg, ov);
    if (cfg.mode == Mode::Scan) return scan_scale(cfg, out_dir, ov);
    fs::create_directories(out_dir);
    Trajectory traj;
    RunSummary sum = simulate(cfg, &traj);
    write_text(out_dir / "trajectory.csv", trajectory_csv(traj));
    write_text(out_dir / "metrics.csv", metrics_csv(traj));
    write_summary_file(out_dir / "summary.json", sum.to_json());
    RunOutcome out;
    out.ok = sum.ok();
    out.runs.push_back(std::move(sum));
    return out;
}

RunOutcome scan_scale(const ExperimentConfig& config, const fs::path& out_dir, const Overrides& ov) {
    ExperimentConfig base = config;
    apply_overrides(base, ov);
    if (base.scan.empty()) throw ConfigError("scale.scan: required for a scan");
    const ControllerArtifacts art = ControllerArtifacts::build(base.graph, base.shape);
    const double optimum = optimal_constant_scale(edge_vector(base.z0, art.incidence()), base.shape);

    std::vector<double> grid = base.scan;
    grid.push_back(optimum);
    std::vector<RunSummary> runs(grid.size());
    parallel_for(grid.size(), ov.parallel, [&](std::size_t k) {
        ExperimentConfig cfg = base;
        cfg.mode = Mode::Constant;
        cfg.sc = grid[k];
        std::ostringstream name;
        name << (k + 1 == grid.size() ? "optimal" : "sc") << '_' << std::setprecision(6) << grid[k];
        cfg.name = name.str();
        runs[k] = simulate(cfg);
    });

    fs::create_directories(out_dir);
    std::ostringstream csv;
    csv << "label,sc,J,closedFormJ,totalPath,maxAgent,terminationReason\n" << std::setprecision(12);
    RunOutcome out;
    json arr = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& r = runs[k];
        csv << (k + 1 == grid.size() ? "optimal" : "grid") << ',' << grid[k] << ',' << r.cost << ','
            << *r.closed_form_cost << ',' << r.paths.total << ',' << r.paths.max_agent << ',' << r.termination << '\n';
        arr.push_back(r.to_json());
        out.ok = out.ok && r.ok();
    }
    write_text(out_dir / "scan.csv", csv.str());
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < grid.size(); ++k)
        if (runs[k].cost < runs[best].cost) best = k;
    json doc{{"mode", "scan"},
             {"gridArgmin", grid[best]},
             {"analyticOptimum", optimum},
             {"runs", arr},
             {"referenceComparisons", json::array()}};
    write_summary_file(out_dir / "summary.json", doc);
    out.runs = std::move(runs);
    return out;
}

ExperimentConfig builtin_four_agent(char graph, Mode mode, std::optional<double> sc) {
    ExperimentConfig cfg;
    Eigen::VectorXd sbar(5);
    if (graph == 'a') {
        cfg.graph = Graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {2, 4}});
        sbar << 3, 3, 3, 2, 3;
    } else if (graph == 'b') {
        cfg.graph = Graph(4, {{1, 2}, {2, 3}, {1, 4}, {1, 3}, {3, 4}});
        sbar << 3, 3, 2, 4 + std::sqrt(15.0), 3;
    } else {
        throw PreconditionError("four-agent graphs are 'a' and 'b'");
    }
    if (triangular_complement(cfg.graph).edge_count() != 1)
        throw TopologyError("four-agent graph must have one complement edge");
    cfg.name = std::string("four_") + graph;
    cfg.shape = ShapeVector::from_squared(sbar);
    cfg.z0.resize(8);
    cfg.z0 << 0, 0, 1, 0, 1, 2, 0, 2;
    cfg.mode = mode;
    cfg.sc = sc;
    return cfg;
}

ExperimentConfig builtin_six_agent(char graph, bool primed) {
    ExperimentConfig cfg;
    Eigen::VectorXd sbar(9);
    std::size_t complement = 6;
    switch (graph) {
        case 'a':
            cfg.graph = Graph(6, {{1, 2}, {2, 3}, {1, 4}, {1, 5}, {4, 5}, {2, 5}, {3, 5}, {2, 6}, {3, 6}});
            sbar << 3.6, 1, 1.01, 0.52, 0.41, 2.61, 2.41, 0.29, 0.89;
            complement = 5;
            break;
        case 'b':
            cfg.graph = Graph(6, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 5}, {4, 5}, {2, 6}, {3, 6}, {5, 6}});
            sbar << 3.6, 1, 4, 1.01, 0.52, 0.41, 0.29, 0.89, 1.16;
            break;
        case 'c':
            cfg.graph = Graph(6, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 5}, {5, 6}, {2, 5}, {4, 6}, {3, 6}});
            sbar << 3.6, 1, 4, 1.01, 0.52, 1.16, 2.61, 2.89, 0.89;
            break;
        case 'd':
            cfg.graph = Graph(6, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {4, 5}, {1, 6}, {1, 3}, {1, 5}, {5, 6}});
            sbar << 3.6, 1, 4, 1.01, 0.41, 2, 4.6, 0.52, 1.16;
            break;
        default: throw PreconditionError("six-agent graphs are 'a' to 'd'");
    }
    if (triangular_complement(cfg.graph).edge_count() != complement)
        throw TopologyError("six-agent graph complement size does not match its figure");
    cfg.name = std::string("six_") + graph + (primed ? "_primed" : "");
    cfg.shape = ShapeVector::from_squared(sbar);
    cfg.z0.resize(12);
    cfg.z0 << 0.1, 0.6, 2, 1, 2, 0, 0, -1, 0.5, 0.4, 1.5, 0.8;
    if (primed) cfg.z0.segment<2>(6) << -1, 0;
    cfg.mode = Mode::Varying;
    cfg.sim.t_max = 300.0;
    return cfg;
}

ExperimentConfig builtin_localization(Mode mode) {
    ExperimentConfig cfg;
    cfg.graph = Graph(3, {{1, 2}, {2, 3}, {1, 3}});
    cfg.shape = ShapeVector::from_squared(Eigen::Vector3d::Ones());
    cfg.z0.resize(6);
    cfg.z0 << 0, 0, 3, 1.5, 4, 0;
    cfg.mode = mode;
    if (mode == Mode::Constant) cfg.sc = 0.5;
    cfg.name = std::string("localization_") + to_string(mode);
    return cfg;
}

namespace {

struct ReferenceRow {
    std::string row;
    std::optional<double> scale;
    double cost;
    std::vector<double> paths;
    double total;
};

void add_row_comparisons(const std::string& table, const ReferenceRow& p, const RunSummary& r,
                         std::vector<ReferenceComparison>& out) {
    if (p.scale) out.push_back(compare(table, p.row, "finalScale", *p.scale, r.final_scale));
    out.push_back(compare(table, p.row, "J", p.cost, r.cost));
    for (std::size_t i = 0; i < p.paths.size() && i < r.paths.per_agent.size(); ++i)
        out.push_back(compare(table, p.row, "path" + std::to_string(i + 1), p.paths[i], r.paths.per_agent[i]));
    out.push_back(compare(table, p.row, "totalPath", p.total, r.paths.total));
}

std::string join_csv(const fs::path& dir, const std::string& name) { return (dir / (name + ".csv")).string(); }

}  // namespace

RunOutcome reproduce(const std::string& table, const fs::path& out_dir, const Overrides& ov) {
    std::vector<ExperimentConfig> configs;
    std::vector<ReferenceRow> reference;
    if (table == "table1") {
        for (double sc : {0.1, 0.3, 0.9, 0.5}) configs.push_back(builtin_four_agent('a', Mode::Constant, sc));
        configs.push_back(builtin_four_agent('a', Mode::Varying));
        reference = {{"sc=0.1", std::nullopt, 5.5227, {0.5167, 0.7831, 0.4686, 0.8318}, 2.6002},
                 {"sc=0.3", std::nullopt, 2.8944, {0.4306, 0.5534, 0.3297, 0.6700}, 1.9837},
                 {"sc=0.9", std::nullopt, 5.1248, {0.9559, 0.6111, 0.9346, 0.6331}, 3.1347},
                 {"sc=0.5", std::nullopt, 2.1249, {0.5775, 0.4608, 0.4933, 0.6003}, 2.1319},
                 {"varying", 0.3, 1.7402, {0.3898, 0.5190, 0.2814, 0.6519}, 1.8422}};
        for (std::size_t k = 0; k < 4; ++k) configs[k].name = "table1_" + reference[k].row;
        configs[4].name = "table1_varying";
    } else if (table == "table2") {
        configs = {builtin_four_agent('a', Mode::Varying), builtin_four_agent('b', Mode::Varying)};
        configs[0].name = "table2_Ga";
        configs[1].name = "table2_Gb";
        reference = {{"Ga", 0.3159, 1.7402, {0.3898, 0.5190, 0.2814, 0.6519}, 1.8422},
                 {"Gb", 0.3563, 4.2120, {0.3711, 0.5013, 0.3705, 0.6338}, 1.8766}};
    } else if (table == "table3") {
        for (bool primed : {false, true})
            for (char g : {'a', 'b', 'c', 'd'}) configs.push_back(builtin_six_agent(g, primed));
        reference = {{"Ga", 0.5873, 0.6918, {0.3143, 0.2128, 0.2214, 0.5202, 0.4290, 0.1411}, 1.8388},
                 {"Gb", 0.5652, 0.7724, {0.2805, 0.1532, 0.1737, 0.5289, 0.4500, 0.1488}, 1.7351},
                 {"Gc", 0.5369, 0.9152, {0.2900, 0.2767, 0.1799, 0.5628, 0.4139, 0.2713}, 1.9946},
                 {"Gd", 0.5589, 0.9169, {0.2407, 0.1185, 0.2152, 0.5305, 0.3916, 0.1189}, 1.6154},
                 {"Ga'", 0.6105, 1.0284, {0.5100, 0.2428, 0.1906, 0.7621, 0.3985, 0.1467}, 2.2507},
                 {"Gb'", 0.5838, 1.5533, {0.6338, 0.4744, 0.5584, 0.7953, 0.3977, 0.3489}, 3.2086},
                 {"Gc'", 0.5421, 1.7603, {0.4980, 0.5902, 0.4058, 0.8065, 0.4816, 0.4097}, 3.1918},
                 {"Gd'", 0.5570, 2.4951, {0.5947, 0.2069, 0.4649, 0.8142, 0.3718, 0.4263}, 2.8788}};
        for (std::size_t k = 0; k < configs.size(); ++k) configs[k].name = "table3_" + configs[k].name;
    } else if (table == "localization") {
        configs = {builtin_localization(Mode::Constant), builtin_localization(Mode::Varying)};
    } else {
        throw ConfigError("reproduce: unknown table '" + table + "' (expected table1, table2, table3 or localization)");
    }
    for (auto& c : configs) {
        apply_overrides(c, ov);
        if (c.mode == Mode::Constant && c.name.rfind("table1_", 0) != 0 && !c.sc) c.sc = 0.5;
    }

    const fs::path dir = out_dir / table;
    fs::create_directories(dir);
    RunOutcome out;
    out.runs.resize(configs.size());
    std::vector<Trajectory> trajs(configs.size());
    std::vector<LocalizationRun> loc(configs.size());
    parallel_for(configs.size(), ov.parallel, [&](std::size_t k) {
        if (table == "localization") {
            auto art = std::make_shared<const ControllerArtifacts>(
                ControllerArtifacts::build(configs[k].graph, configs[k].shape));
            std::unique_ptr<Controller> ctl;
            if (configs[k].mode == Mode::Constant)
                ctl = std::make_unique<ConstantScaleController>(art, *configs[k].sc);
            else
                ctl = std::make_unique<VaryingScaleController>(art);
            loc[k] = localization_experiment(configs[k].z0, *ctl, configs[k].sim);
            trajs[k] = loc[k].trajectory;
            RunSummary s;
            s.name = configs[k].name;
            s.mode = to_string(configs[k].mode);
            s.final_scale = trajs[k].final().scale;
            s.cost = trajs[k].final().cumulative_cost;
            s.truncated = !trajs[k].converged();
            s.paths = path_lengths(trajs[k]);
            s.convergence = convergence_report(trajs[k]);
            s.termination = to_string(trajs[k].termination);
            s.diagnostic = trajs[k].diagnostic;
            out.runs[k] = std::move(s);
        } else {
            out.runs[k] = simulate(configs[k], &trajs[k]);
        }
    });

    for (std::size_t k = 0; k < configs.size(); ++k) {
        write_text(join_csv(dir, configs[k].name + "_trajectory"), trajectory_csv(trajs[k]));
        if (k < reference.size()) {
            std::vector<ReferenceComparison> rows;
            add_row_comparisons(table, reference[k], out.runs[k], rows);
            if (table == "table1" && out.runs[k].closed_form_cost)
                rows.push_back(compare(table, reference[k].row, "closedFormJ", reference[k].cost, *out.runs[k].closed_form_cost));
            out.runs[k].comparisons = rows;
            out.comparisons.insert(out.comparisons.end(), rows.begin(), rows.end());
        }
        out.ok = out.ok && out.runs[k].ok();
    }

    json extra = json::object();
    if (table == "localization") {
        for (std::size_t k = 0; k < configs.size(); ++k) {
            std::ostringstream os;
            write_localization_csv(os, loc[k].series);
            write_text(join_csv(dir, configs[k].name), os.str());
        }
        const DominanceReport dom = determinant_dominance(loc[1].series, loc[0].series, 0.05, 1e-9);
        extra = {{"comparedSamples", dom.compared},
                 {"violations", dom.violations},
                 {"worstMargin", dom.worst_margin}};
        out.comparisons.push_back(
            compare(table, "optimal", "fisherDet", 2.25, fisher_determinant(optimal_angles(), 1.0, 1.0)));
    }

    json runs = json::array();
    for (const auto& r : out.runs) runs.push_back(r.to_json());
    json doc{{"table", table}, {"runs", runs}, {"referenceComparisons", comparisons_json(out.comparisons)}};
    if (!extra.empty()) doc["determinantDominance"] = extra;
    write_comparison_csv(dir / "comparison.csv", out.comparisons);
    write_summary_file(dir / "summary.json", doc);
    return out;
}

}  // namespace shapeform
