#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "spsc/partition.hpp"
#include "spsc/sim.hpp"
#include "spsc/solution.hpp"

namespace spsc {

struct SpscConfig {
    std::size_t n = 50;         // replication budget
    std::size_t stages = 5;     // m
    std::size_t clusters = 15;  // k
    std::int64_t horizon = 1000;
    /// t(0)=0 < ... < t(m)=horizon; empty means homogeneous boundaries.
    std::vector<std::int64_t> stage_boundaries;
    std::uint64_t master_seed = 0;
    std::size_t kmeans_max_iter = 100;
    /// Cluster on per-dimension z-scores instead of raw observables.
    bool standardize = false;
    /// Delegates kept per cluster. Only 1 is supported.
    std::size_t delegates_per_cluster = 1;
    unsigned threads = 1;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
    /// Boundaries actually used (explicit or homogeneous).
    std::vector<std::int64_t> boundaries() const;
};

/// t(i) = round(i*T/m), with duplicates bumped up by one so the sequence
/// stays strictly increasing. Requires m <= T.
std::vector<std::int64_t> homogeneous_boundaries(std::int64_t horizon, std::size_t stages);

/// Bookkeeping for one stage [t_begin, t_end].
///
/// Source clusters are the clusters of the previous boundary (a single
/// source holding all N replications for stage 0). Partition data is absent
/// for the final stage, where the solution predicate plays the role of the
/// partition.
struct StageRecord {
    std::size_t stage = 0;
    std::int64_t t_begin = 0;
    std::int64_t t_end = 0;
    std::vector<std::size_t> source_clones;  // n_i per source cluster
    std::vector<std::size_t> source_of;      // source cluster per replication
    std::vector<ObservableVector> observables;  // per replication at t_end

    std::optional<Partition> partition;
    std::vector<Weight> cluster_weights;
    std::vector<std::size_t> delegates;   // replication index per cluster
    std::vector<std::size_t> allocation;  // clones per cluster
    /// transitions[source][target]: replications from `source` that landed in `target`.
    std::vector<std::vector<std::size_t>> transitions;
    /// Total weight of the population after this stage's cloning (or at T).
    Weight weight_sum;
};

struct FinalReplication {
    ObservableVector observables;
    Weight weight;
    std::uint64_t lineage_id = 0;
    std::size_t source_cluster = 0;
};

struct SpscResult {
    std::vector<FinalReplication> finals;
    std::vector<StageRecord> stages;  // one per stage
    SpscConfig config;
};

/// Simulation / partitioning / selection / cloning over m stages.
///
/// Replications start with weight 1/N. At each interior boundary the
/// population is clustered, one delegate per cluster survives, and each
/// cluster C is restored to n_C copies carrying W(C)/n_C. The delegate keeps
/// its own stream as the first copy; the other copies get fresh stream ids.
SpscResult spsc_run(const SimulationModel& model, const SpscConfig& config);

/// transitions(source -> target) / clones(source). Throws std::out_of_range
/// on an unknown index or a final-stage record.
double conditional_estimate(const StageRecord& record, std::size_t source, std::size_t target);

/// Sum of final weights inside the predicate.
double spsc_estimate(const SpscResult& result, const SolutionPredicate& predicate);
/// Same, exactly.
Weight spsc_estimate_exact(const SpscResult& result, const SolutionPredicate& predicate);

/// Literal path-sum estimator: enumerates every cluster path through the
/// stage records and multiplies the per-stage conditional estimates. The last
/// factor is resolved per final replication. Exponential in m; throws
/// std::length_error if the number of paths exceeds 1e6.
double path_sum_oracle(const SpscResult& result, const SolutionPredicate& predicate);

/// JSON report: config echo, per-stage centroids, cluster weights,
/// transition matrices, and the estimate for each predicate.
void write_spsc_report(std::ostream& out, const SpscResult& result, std::span<const SolutionPredicate> predicates);

/// Long-format transition matrix of an interior stage:
/// source_cluster,target_cluster,transitions,source_clones,conditional_estimate
void write_stage_csv(std::ostream& out, const StageRecord& record);

}  // namespace spsc
