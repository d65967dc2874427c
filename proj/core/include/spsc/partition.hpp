#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spsc/random_stream.hpp"
#include "spsc/sim.hpp"

namespace spsc {

/// Grouping of points into non-empty clusters.
struct Partition {
    std::vector<std::size_t> assignments;     // per point, in [0, k_effective)
    std::vector<ObservableVector> centroids;  // k_effective entries
    std::size_t k_effective = 0;
    double wcss = 0.0;
    /// Within-cluster sum of squares after each assignment step, then the
    /// final value. Non-increasing for Lloyd iterations.
    std::vector<double> wcss_trace;
    std::size_t iterations = 0;

    std::vector<std::size_t> cluster_sizes() const;
};

struct KMeansOptions {
    std::size_t k = 15;
    std::size_t max_iter = 100;
};

/// Lloyd's algorithm with k-means++ seeding drawn from `stream`.
///
/// k is capped at the number of distinct points. An empty cluster is
/// re-seeded at the point farthest from its assigned centroid (once per
/// iteration); clusters still empty at the end are dropped and the rest
/// renumbered in order of first appearance.
Partition kmeans(std::span<const ObservableVector> points, const KMeansOptions& options, RandomStream& stream);

/// For each cluster, the member nearest (Euclidean) to its centroid; ties go
/// to the lowest point index.
std::vector<std::size_t> select_delegates(const Partition& partition, std::span<const ObservableVector> points);

/// Clone counts per delegate: floor(n/k) each, with the remainder handed out
/// one extra to delegates drawn uniformly without replacement.
std::vector<std::size_t> allocate_clones(std::size_t k_effective, std::size_t n, RandomStream& stream);

/// Per-dimension z-scores (population std; constant dimensions map to 0).
std::vector<ObservableVector> standardize(std::span<const ObservableVector> points);

}  // namespace spsc
