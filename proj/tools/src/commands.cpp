#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "spsc/csv.hpp"
#include "spsc/policy_mc.hpp"
#include "spsc/random_stream.hpp"
#include "spsc/stats.hpp"

namespace spsc::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    const fs::path path = fs::path(config.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_estimates(std::ostream& out, std::span<const SolutionPredicate> preds, const std::vector<double>& est) {
    out << "solution,estimate\n";
    for (std::size_t i = 0; i < preds.size(); ++i) out << preds[i].name() << ',' << format_real(est[i]) << '\n';
}

void write_finals_header(std::ostream& out, const SimulationModel& model) {
    out << "replication,lineage_id,weight";
    for (const auto& name : model.observable_names()) out << ',' << name;
    out << '\n';
}

void write_observables(std::ostream& out, const ObservableVector& x) {
    for (double v : x.values()) out << ',' << format_real(v);
    out << '\n';
}

void log_estimates(std::ostream& log, std::span<const SolutionPredicate> preds, const std::vector<double>& est) {
    for (std::size_t i = 0; i < preds.size(); ++i) log << "  " << preds[i].name() << "  " << format_real(est[i]) << '\n';
}

std::uint64_t baseline_seed(std::uint64_t seed) {
    // Comparison repeats draw indices from 0 upward; the baseline sits at
    // the other end of the index space.
    return derive_seed(seed, std::numeric_limits<std::uint64_t>::max());
}

}  // namespace

void cmd_mc(const RunConfig& config, std::ostream& log) {
    const PreyPredatorModel model(config.model);
    const auto preds = builtin_solutions();
    const McResult res = mc_run(model, config.n, config.horizon, config.seed, config.effective_threads());

    std::vector<double> est;
    for (const auto& p : preds) est.push_back(mc_estimate(res, p));
    auto out = open_output(config, "estimates.csv");
    write_estimates(out, preds, est);

    auto finals = open_output(config, "finals.csv");
    write_finals_header(finals, model);
    const std::string w = format_real(1.0 / static_cast<double>(res.n));
    for (std::size_t i = 0; i < res.finals.size(); ++i) {
        finals << i << ',' << i << ',' << w;
        write_observables(finals, res.finals[i]);
    }
    log << "mc: N=" << config.n << " T=" << config.horizon << " seed=" << config.seed << '\n';
    log_estimates(log, preds, est);
}

void cmd_spsc(const RunConfig& config, std::ostream& log) {
    const PreyPredatorModel model(config.model);
    const auto preds = builtin_solutions();
    const SpscResult res = spsc_run(model, config.spsc_config());

    std::vector<double> est;
    for (const auto& p : preds) est.push_back(spsc_estimate(res, p));
    auto out = open_output(config, "estimates.csv");
    write_estimates(out, preds, est);

    auto finals = open_output(config, "finals.csv");
    write_finals_header(finals, model);
    for (std::size_t i = 0; i < res.finals.size(); ++i) {
        const auto& f = res.finals[i];
        finals << i << ',' << f.lineage_id << ',' << format_real(to_double(f.weight));
        write_observables(finals, f.observables);
    }

    for (std::size_t s = 0; s + 1 < res.stages.size(); ++s) {
        auto stage = open_output(config, "stage_" + std::to_string(s + 1) + ".csv");
        write_stage_csv(stage, res.stages[s]);
    }
    auto report = open_output(config, "spsc_report.json");
    write_spsc_report(report, res, preds);

    log << "spsc: N=" << config.n << " T=" << config.horizon << " m=" << config.stages << " k=" << config.clusters
        << " seed=" << config.seed << '\n';
    log_estimates(log, preds, est);
}

namespace {

std::vector<PilotRow> read_pilot(const std::string& path, double epsilon, double alpha, std::size_t n0) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pilot file '" + path + "'");
    std::vector<PilotRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("observable", 0) == 0)) continue;
        std::istringstream fields(line);
        std::string name, s, mean;
        if (!std::getline(fields, name, ',') || !std::getline(fields, s, ',') || !std::getline(fields, mean, ',')) {
            throw ConfigError("pilot file line " + std::to_string(line_no) + ": expected observable,s,mean");
        }
        PilotRow row;
        row.observable = name;
        try {
            row.stats = SampleStats{std::stod(mean), std::stod(s), n0};
        } catch (const std::exception&) {
            throw ConfigError("pilot file line " + std::to_string(line_no) + ": not a number");
        }
        row.n_required = required_replications(row.stats, epsilon, alpha);
        rows.push_back(row);
    }
    if (rows.empty()) throw ConfigError("pilot file '" + path + "' has no rows");
    return rows;
}

}  // namespace

void cmd_nreps(const RunConfig& config, const std::string& pilot_file, std::ostream& log) {
    std::vector<PilotRow> rows;
    if (!pilot_file.empty()) {
        rows = read_pilot(pilot_file, config.epsilon, config.alpha, config.n0);
    } else {
        const PreyPredatorModel model(config.model);
        const McResult pilot = mc_run(model, config.n0, config.horizon, config.seed, config.effective_threads());
        const auto names = model.observable_names();
        rows = pilot_table(pilot.finals, names, config.epsilon, config.alpha);
    }
    auto out = open_output(config, "nreps.csv");
    write_pilot_csv(out, rows);
    write_pilot_csv(log, rows);
    std::int64_t n = 0;
    for (const auto& r : rows) n = std::max(n, r.n_required);
    log << "n_required_max," << n << '\n';
}

void cmd_compare(const RunConfig& config, std::ostream& log) {
    const PreyPredatorModel model(config.model);
    const auto preds = builtin_solutions();
    const unsigned threads = config.effective_threads();

    std::vector<double> refs = config.references;
    if (refs.empty()) {
        const std::size_t b = config.effective_baseline_reps();
        const McResult base = mc_run(model, b, config.horizon, baseline_seed(config.seed), threads);
        auto out = open_output(config, "baseline.csv");
        out << "solution,reference,hits,replications\n";
        for (const auto& p : preds) {
            const std::size_t hits = count_inside(base.finals, p);
            refs.push_back(static_cast<double>(hits) / static_cast<double>(b));
            out << p.name() << ',' << format_real(refs.back()) << ',' << hits << ',' << b << '\n';
        }
        log << "baseline: " << b << " replications\n";
        log_estimates(log, preds, refs);
        for (std::size_t i = 0; i < refs.size(); ++i) {
            if (refs[i] == 0.0) {
                throw std::runtime_error("baseline never reached " + preds[i].name() +
                                         "; raise --baseline-reps or pass --references");
            }
        }
    }

    const ComparisonReport report = compare_policies(model, config.n, config.horizon, config.spsc_config(),
                                                     config.effective_repeats(), preds, refs, config.seed, threads);
    {
        auto out = open_output(config, "repeats.csv");
        write_repeats_csv(out, report);
    }
    {
        auto out = open_output(config, "summary.csv");
        write_summary_csv(out, report);
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto out = open_output(config, "histogram_abs_error_" + preds[i].name() + ".csv");
        write_histogram_csv(out, report.mc.abs_errors[i], report.spsc.abs_errors[i]);
    }
    {
        auto out = open_output(config, "histogram_aggregate_error.csv");
        write_histogram_csv(out, report.mc.aggregate_errors, report.spsc.aggregate_errors);
    }
    log << "compare: R=" << report.repeats << " N=" << config.n << '\n';
    write_summary_csv(log, report);
}

void cmd_sweep(const RunConfig& config, const std::vector<SweepAxis>& axes, std::size_t reps, std::ostream& log) {
    if (reps < 1) throw ConfigError("sweep: --reps must be >= 1");
    std::size_t points = 1;
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw ConfigError("sweep: no values for " + name);
        PreyPredatorConfig probe = config.model;
        if (!set_model_field(probe, name, values.front())) throw ConfigError("sweep: unknown model field " + name);
        points *= values.size();
    }

    const auto preds = builtin_solutions();
    auto out = open_output(config, "sweep.csv");
    for (const auto& [name, values] : axes) out << name << ',';
    out << "S1,S2,S3,none,in_target\n";

    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t p = 0; p < points; ++p) {
        PreyPredatorConfig model_config = config.model;
        std::ostringstream row;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const double v = axes[a].second[idx[a]];
            set_model_field(model_config, axes[a].first, v);
            row << format_real(v) << ',';
        }
        try {
            model_config.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("sweep: ") + e.what());
        }
        const PreyPredatorModel model(model_config);
        const McResult res = mc_run(model, reps, config.horizon, config.seed, config.effective_threads());
        std::size_t unclassified = reps;
        std::vector<double> freq;
        for (const auto& s : preds) {
            const std::size_t hits = count_inside(res.finals, s);
            unclassified -= hits;
            freq.push_back(static_cast<double>(hits) / static_cast<double>(reps));
        }
        const bool in_target = freq[2] >= 0.95 && freq[2] <= 0.99;
        for (double f : freq) row << format_real(f) << ',';
        row << format_real(static_cast<double>(unclassified) / static_cast<double>(reps)) << ','
            << (in_target ? 1 : 0) << '\n';
        out << row.str();
        log << row.str();

        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < axes[a].second.size()) break;
            idx[a] = 0;
        }
    }
}

}  // namespace spsc::cli
