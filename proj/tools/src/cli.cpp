#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

namespace spsc::cli {

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::size_t> n, stages, clusters, repeats, n0, baseline_reps, kmeans_max_iter;
    std::optional<std::int64_t> horizon;
    std::optional<double> epsilon, alpha;
    std::vector<std::int64_t> stage_boundaries;
    std::vector<double> references;
    std::string references_file;
    bool ci_mode = false;
    bool standardize = false;
    std::map<std::string, std::optional<double>> model;

    std::string pilot_file;
    std::vector<std::string> sweep_params;
    std::size_t sweep_reps = 500;
};

std::string dashed(std::string key) {
    for (auto& c : key) {
        if (c == '_') c = '-';
    }
    return key;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config with model/policy/output sections");
    sub->add_option("--seed", f.seed, "Master seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "Worker threads (0 = available parallelism)");
    sub->add_option("--n", f.n, "Replication budget N");
    sub->add_option("--horizon", f.horizon, "Final time T");
    sub->add_option("--stages", f.stages, "SPSC stages m");
    sub->add_option("--clusters", f.clusters, "SPSC clusters k");
    sub->add_option("--stage-boundaries", f.stage_boundaries, "Explicit t(0),...,t(m)")->delimiter(',');
    sub->add_option("--kmeans-max-iter", f.kmeans_max_iter, "Lloyd iteration cap");
    sub->add_flag("--standardize", f.standardize, "Cluster on per-dimension z-scores");
    sub->add_option("--repeats", f.repeats, "Comparison repeats R");
    sub->add_option("--epsilon", f.epsilon, "Target relative error");
    sub->add_option("--alpha", f.alpha, "1 - confidence level");
    sub->add_option("--n0", f.n0, "Pilot replications");
    sub->add_option("--baseline-reps", f.baseline_reps, "Replications of the reference MC run");
    sub->add_option("--references", f.references, "Reference probabilities S1,S2,S3 (skips the baseline)")
        ->delimiter(',');
    sub->add_option("--references-file", f.references_file,
                    "CSV solution,reference,... (e.g. a previous baseline.csv); skips the baseline");
    sub->add_flag("--ci-mode", f.ci_mode, "Desk-scale defaults: 200 repeats, 5000 baseline replications");
    for (const auto& name : model_field_names()) {
        sub->add_option("--" + dashed(name), f.model[name], "Model: " + name);
    }
}

std::vector<double> read_references(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open references file '" + path + "'");
    std::map<std::string, double> by_name;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("solution", 0) == 0)) continue;
        std::istringstream fields(line);
        std::string name, value;
        if (!std::getline(fields, name, ',') || !std::getline(fields, value, ',')) {
            throw ConfigError("references file line " + std::to_string(line_no) + ": expected solution,reference");
        }
        try {
            by_name[name] = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("references file line " + std::to_string(line_no) + ": not a number");
        }
    }
    std::vector<double> refs;
    for (const char* name : {"S1", "S2", "S3"}) {
        const auto it = by_name.find(name);
        if (it == by_name.end()) throw ConfigError("references file '" + path + "' has no row for " + name);
        refs.push_back(it->second);
    }
    return refs;
}

RunConfig resolve(const Flags& f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : load_config_file(f.config_path);
    for (const auto& [name, value] : f.model) {
        if (value) set_model_field(c.model, name, *value);
    }
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out_dir = *f.out;
    if (f.threads) c.threads = *f.threads;
    if (f.n) c.n = *f.n;
    if (f.horizon) c.horizon = *f.horizon;
    if (f.stages) c.stages = *f.stages;
    if (f.clusters) c.clusters = *f.clusters;
    if (!f.stage_boundaries.empty()) c.stage_boundaries = f.stage_boundaries;
    if (f.kmeans_max_iter) c.kmeans_max_iter = *f.kmeans_max_iter;
    if (f.standardize) c.standardize = true;
    if (f.repeats) c.repeats = *f.repeats;
    if (f.epsilon) c.epsilon = *f.epsilon;
    if (f.alpha) c.alpha = *f.alpha;
    if (f.n0) c.n0 = *f.n0;
    if (f.baseline_reps) c.baseline_reps = *f.baseline_reps;
    if (!f.references_file.empty()) c.references = read_references(f.references_file);
    if (!f.references.empty()) c.references = f.references;
    if (f.ci_mode) c.ci_mode = true;
    c.validate();
    return c;
}

std::vector<SweepAxis> parse_axes(const std::vector<std::string>& params) {
    std::vector<SweepAxis> axes;
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw ConfigError("sweep: expected --param name=v1,v2,... got '" + p + "'");
        SweepAxis axis{p.substr(0, eq), {}};
        std::stringstream values(p.substr(eq + 1));
        std::string v;
        while (std::getline(values, v, ',')) {
            try {
                axis.second.push_back(std::stod(v));
            } catch (const std::exception&) {
                throw ConfigError("sweep: bad value '" + v + "' for " + axis.first);
            }
        }
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) throw ConfigError("sweep: give at least one --param");
    return axes;
}

void echo_config(const RunConfig& c) {
    std::filesystem::create_directories(c.out_dir);
    std::ofstream out(std::filesystem::path(c.out_dir) / "effective_config.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write effective_config.json in " + c.out_dir);
    out << to_json(c).dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    if (!args.empty() && args.front() == "run") args.erase(args.begin());
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector

    CLI::App app{"SPSC versus Monte Carlo execution policies on a prey-predator model", "spsc"};
    app.require_subcommand(1);
    Flags f;
    auto* mc = app.add_subcommand("mc", "Plain Monte Carlo: N independent replications");
    auto* spsc = app.add_subcommand("spsc", "Simulation/partitioning/selection/cloning policy");
    auto* nreps = app.add_subcommand("nreps", "Replications needed for a relative-error target");
    auto* compare = app.add_subcommand("compare", "Repeat both policies and compare detection and error");
    auto* sweep = app.add_subcommand("sweep", "Outcome frequencies over a grid of model parameters");
    for (auto* sub : {mc, spsc, nreps, compare, sweep}) add_common(sub, f);
    nreps->add_option("--pilot", f.pilot_file, "CSV observable,s,mean used instead of a pilot run");
    sweep->add_option("--param", f.sweep_params, "Model field and values, e.g. prey_reproduce_prob=0.03,0.05")
        ->required();
    sweep->add_option("--reps", f.sweep_reps, "MC replications per grid point");

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const RunConfig config = resolve(f);
        std::vector<SweepAxis> axes;
        if (sweep->parsed()) axes = parse_axes(f.sweep_params);
        echo_config(config);
        if (mc->parsed()) cmd_mc(config, out);
        else if (spsc->parsed()) cmd_spsc(config, out);
        else if (nreps->parsed()) cmd_nreps(config, f.pilot_file, out);
        else if (compare->parsed()) cmd_compare(config, out);
        else cmd_sweep(config, axes, f.sweep_reps, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace spsc::cli
