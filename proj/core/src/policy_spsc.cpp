#include "spsc/policy_spsc.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "spsc/csv.hpp"
#include "spsc/parallel.hpp"

namespace spsc {

void SpscConfig::validate() const {
    if (n < 1) throw std::invalid_argument("SpscConfig: N must be >= 1");
    if (stages < 1) throw std::invalid_argument("SpscConfig: m must be >= 1");
    if (clusters < 1) throw std::invalid_argument("SpscConfig: k must be >= 1");
    if (clusters > n) throw std::invalid_argument("SpscConfig: k must not exceed N");
    if (horizon < 1) throw std::invalid_argument("SpscConfig: T must be >= 1");
    if (kmeans_max_iter < 1) throw std::invalid_argument("SpscConfig: kmeans max_iter must be >= 1");
    if (delegates_per_cluster != 1) throw std::invalid_argument("SpscConfig: only one delegate per cluster is supported");
    if (stage_boundaries.empty()) {
        if (static_cast<std::int64_t>(stages) > horizon) throw std::invalid_argument("SpscConfig: more stages than steps");
        return;
    }
    if (stage_boundaries.size() != stages + 1) throw std::invalid_argument("SpscConfig: need m+1 stage boundaries");
    if (stage_boundaries.front() != 0 || stage_boundaries.back() != horizon) {
        throw std::invalid_argument("SpscConfig: boundaries must start at 0 and end at T");
    }
    for (std::size_t i = 1; i < stage_boundaries.size(); ++i) {
        if (stage_boundaries[i] <= stage_boundaries[i - 1]) {
            throw std::invalid_argument("SpscConfig: boundaries must be strictly increasing");
        }
    }
}

std::vector<std::int64_t> SpscConfig::boundaries() const {
    return stage_boundaries.empty() ? homogeneous_boundaries(horizon, stages) : stage_boundaries;
}

std::vector<std::int64_t> homogeneous_boundaries(std::int64_t horizon, std::size_t stages) {
    if (stages < 1 || horizon < static_cast<std::int64_t>(stages)) {
        throw std::invalid_argument("homogeneous_boundaries: need 1 <= m <= T");
    }
    const auto m = static_cast<std::int64_t>(stages);
    std::vector<std::int64_t> b(stages + 1);
    for (std::int64_t i = 0; i <= m; ++i) b[static_cast<std::size_t>(i)] = (2 * i * horizon + m) / (2 * m);
    for (std::size_t i = 1; i < b.size(); ++i) b[i] = std::max(b[i], b[i - 1] + 1);
    if (b.back() != horizon) throw std::logic_error("homogeneous_boundaries: repair overshot the horizon");
    return b;
}

namespace {

std::vector<ObservableVector> observe_all(const SimulationModel& model, const std::vector<Replication>& reps) {
    std::vector<ObservableVector> obs;
    obs.reserve(reps.size());
    for (const auto& r : reps) obs.push_back(model.observe(r.state()));
    return obs;
}

Weight sum_weights(const std::vector<Replication>& reps) {
    Weight s(0);
    for (const auto& r : reps) s += r.weight();
    return s;
}

}  // namespace

SpscResult spsc_run(const SimulationModel& model, const SpscConfig& config) {
    config.validate();
    const auto bounds = config.boundaries();
    const std::size_t n = config.n;
    const std::size_t m = config.stages;

    SpscResult result;
    result.config = config;
    StreamIdCounter ids;

    std::vector<Replication> reps;
    reps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        reps.push_back(make_replication(model, config.master_seed, ids.next(), Weight(1, static_cast<long long>(n))));
    }
    std::vector<std::size_t> source_of(n, 0);
    std::vector<std::size_t> source_clones{n};

    for (std::size_t stage = 0; stage < m; ++stage) {
        const std::int64_t steps = bounds[stage + 1] - bounds[stage];
        try {
            parallel_for(reps.size(), config.threads,
                         [&](std::size_t i) { advance(reps[i], model, steps, config.horizon); });
        } catch (const SimulationError& e) {
            std::ostringstream msg;
            msg << "stage " << stage << ": " << e.what();
            throw SimulationError(msg.str());
        }

        StageRecord rec;
        rec.stage = stage;
        rec.t_begin = bounds[stage];
        rec.t_end = bounds[stage + 1];
        rec.source_clones = source_clones;
        rec.source_of = source_of;
        rec.observables = observe_all(model, reps);

        if (stage + 1 == m) {
            rec.weight_sum = sum_weights(reps);
            for (std::size_t i = 0; i < reps.size(); ++i) {
                result.finals.push_back(
                    FinalReplication{rec.observables[i], reps[i].weight(), reps[i].lineage_id(), source_of[i]});
            }
            result.stages.push_back(std::move(rec));
            break;
        }

        const std::vector<ObservableVector> points =
            config.standardize ? standardize(rec.observables) : rec.observables;
        RandomStream policy_stream(config.master_seed, policy_stream_id(stage));
        Partition part = kmeans(points, KMeansOptions{config.clusters, config.kmeans_max_iter}, policy_stream);
        const std::size_t k = part.k_effective;
        rec.delegates = select_delegates(part, points);

        rec.cluster_weights.assign(k, Weight(0));
        rec.transitions.assign(source_clones.size(), std::vector<std::size_t>(k, 0));
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const std::size_t c = part.assignments[i];
            rec.cluster_weights[c] += reps[i].weight();
            ++rec.transitions[source_of[i]][c];
        }
        rec.allocation = allocate_clones(k, n, policy_stream);

        // Rebuild the population, clusters ordered by delegate index.
        std::vector<std::size_t> order(k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return rec.delegates[a] < rec.delegates[b]; });

        std::vector<Replication> next;
        next.reserve(n);
        std::vector<std::size_t> next_source;
        next_source.reserve(n);
        for (std::size_t c : order) {
            const Weight w = rec.cluster_weights[c] / static_cast<long long>(rec.allocation[c]);
            Replication& delegate = reps[rec.delegates[c]];
            for (std::size_t j = 1; j < rec.allocation[c]; ++j) {
                // Clones are taken before the delegate moves into `next`.
                next.push_back(deep_clone(delegate, ids.next(), w));
                next_source.push_back(c);
            }
            delegate.set_weight(w);
            next.insert(next.end() - static_cast<std::ptrdiff_t>(rec.allocation[c] - 1), std::move(delegate));
            next_source.push_back(c);
        }
        reps = std::move(next);
        source_of = std::move(next_source);
        source_clones = rec.allocation;

        rec.weight_sum = sum_weights(reps);
        if (rec.weight_sum != 1) throw std::logic_error("spsc_run: weight not conserved");
        rec.partition = std::move(part);
        result.stages.push_back(std::move(rec));
    }
    return result;
}

double conditional_estimate(const StageRecord& record, std::size_t source, std::size_t target) {
    if (!record.partition) throw std::out_of_range("conditional_estimate: final stage has no target partition");
    if (source >= record.source_clones.size() || target >= record.partition->k_effective) {
        throw std::out_of_range("conditional_estimate: unknown cluster index");
    }
    const std::size_t clones = record.source_clones[source];
    if (clones == 0) throw std::out_of_range("conditional_estimate: source cluster has no clones");
    return static_cast<double>(record.transitions[source][target]) / static_cast<double>(clones);
}

Weight spsc_estimate_exact(const SpscResult& result, const SolutionPredicate& predicate) {
    Weight s(0);
    for (const auto& f : result.finals) {
        if (predicate(f.observables)) s += f.weight;
    }
    return s;
}

double spsc_estimate(const SpscResult& result, const SolutionPredicate& predicate) {
    return to_double(spsc_estimate_exact(result, predicate));
}

double path_sum_oracle(const SpscResult& result, const SolutionPredicate& predicate) {
    const auto& stages = result.stages;
    if (stages.empty()) throw std::invalid_argument("path_sum_oracle: empty result");

    double paths = 1.0;
    for (std::size_t i = 0; i + 1 < stages.size(); ++i) paths *= static_cast<double>(stages[i].partition->k_effective);
    if (paths > 1e6) throw std::length_error("path_sum_oracle: too many paths to enumerate");

    // Last factor: P(X_T in S | source cluster of the final stage).
    const StageRecord& last = stages.back();
    std::vector<double> final_factor(last.source_clones.size(), 0.0);
    for (std::size_t s = 0; s < last.source_clones.size(); ++s) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < last.observables.size(); ++i) {
            if (last.source_of[i] == s && predicate(last.observables[i])) ++hits;
        }
        final_factor[s] = static_cast<double>(hits) / static_cast<double>(last.source_clones[s]);
    }

    // Depth-first over cluster paths S_0 -> c_1 -> ... -> c_{m-1}.
    double total = 0.0;
    auto walk = [&](auto&& self, std::size_t stage, std::size_t source, double product) -> void {
        if (stage + 1 == stages.size()) {
            total += product * final_factor[source];
            return;
        }
        const StageRecord& rec = stages[stage];
        for (std::size_t target = 0; target < rec.partition->k_effective; ++target) {
            const double p = conditional_estimate(rec, source, target);
            if (p == 0.0) continue;
            self(self, stage + 1, target, product * p);
        }
    };
    walk(walk, 0, 0, 1.0);
    return total;
}

void write_spsc_report(std::ostream& out, const SpscResult& result, std::span<const SolutionPredicate> predicates) {
    using nlohmann::json;
    const auto& cfg = result.config;
    json report;
    report["config"] = {
        {"n", cfg.n},
        {"stages", cfg.stages},
        {"clusters", cfg.clusters},
        {"horizon", cfg.horizon},
        {"stage_boundaries", cfg.boundaries()},
        {"master_seed", cfg.master_seed},
        {"standardize", cfg.standardize},
    };
    json stages = json::array();
    for (const auto& rec : result.stages) {
        json s;
        s["stage"] = rec.stage;
        s["t_begin"] = rec.t_begin;
        s["t_end"] = rec.t_end;
        s["source_clones"] = rec.source_clones;
        s["weight_sum"] = to_double(rec.weight_sum);
        if (rec.partition) {
            json centroids = json::array();
            for (const auto& c : rec.partition->centroids) {
                centroids.push_back(std::vector<double>(c.values().begin(), c.values().end()));
            }
            std::vector<double> weights;
            for (const auto& w : rec.cluster_weights) weights.push_back(to_double(w));
            s["k_effective"] = rec.partition->k_effective;
            s["wcss"] = rec.partition->wcss;
            s["centroids"] = centroids;
            s["cluster_sizes"] = rec.partition->cluster_sizes();
            s["cluster_weights"] = weights;
            s["delegates"] = rec.delegates;
            s["allocation"] = rec.allocation;
            s["transitions"] = rec.transitions;
        }
        stages.push_back(std::move(s));
    }
    report["stages"] = std::move(stages);
    json estimates = json::object();
    for (const auto& p : predicates) estimates[p.name()] = spsc_estimate(result, p);
    report["estimates"] = std::move(estimates);
    out << report.dump(2) << '\n';
}

void write_stage_csv(std::ostream& out, const StageRecord& record) {
    if (!record.partition) throw std::invalid_argument("write_stage_csv: final stage has no transition matrix");
    out << "source_cluster,target_cluster,transitions,source_clones,conditional_estimate\n";
    for (std::size_t s = 0; s < record.source_clones.size(); ++s) {
        for (std::size_t t = 0; t < record.partition->k_effective; ++t) {
            out << s << ',' << t << ',' << record.transitions[s][t] << ',' << record.source_clones[s] << ','
                << format_real(conditional_estimate(record, s, t)) << '\n';
        }
    }
}

}  // namespace spsc
