#include "spsc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spsc {

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix to_matrix(std::span<const ObservableVector> points) {
    Matrix m;
    m.reserve(points.size());
    for (const auto& p : points) m.emplace_back(p.values().begin(), p.values().end());
    return m;
}

std::size_t count_distinct(const Matrix& pts) {
    std::vector<const std::vector<double>*> refs;
    refs.reserve(pts.size());
    for (const auto& p : pts) refs.push_back(&p);
    std::sort(refs.begin(), refs.end(), [](auto* a, auto* b) { return *a < *b; });
    auto last = std::unique(refs.begin(), refs.end(), [](auto* a, auto* b) { return *a == *b; });
    return static_cast<std::size_t>(last - refs.begin());
}

Matrix seed_plus_plus(const Matrix& pts, std::size_t k, RandomStream& stream) {
    const std::size_t n = pts.size();
    Matrix centers;
    centers.reserve(k);
    centers.push_back(pts[stream.uniform_index(n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(pts[i], centers[0]);

    while (centers.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        const double target = stream.uniform01() * total;
        std::size_t chosen = n;
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) continue;
            cum += d2[i];
            chosen = i;
            if (cum > target) break;
        }
        if (chosen == n) break;  // every point coincides with a center
        centers.push_back(pts[chosen]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
    }
    return centers;
}

// Nearest center per point (lowest index on ties); returns the cost.
double assign_nearest(const Matrix& pts, const Matrix& centers, std::vector<std::size_t>& out) {
    double cost = 0.0;
    out.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::size_t best = 0;
        double best_d = squared_distance(pts[i], centers[0]);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = squared_distance(pts[i], centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out[i] = best;
        cost += best_d;
    }
    return cost;
}

// Means of each cluster; empty clusters keep their previous center and are
// reported through `empty`.
void update_means(const Matrix& pts, const std::vector<std::size_t>& assign, Matrix& centers,
                  std::vector<std::size_t>& empty) {
    const std::size_t dim = pts.front().size();
    Matrix sums(centers.size(), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(centers.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& s = sums[assign[i]];
        for (std::size_t d = 0; d < dim; ++d) s[d] += pts[i][d];
        ++counts[assign[i]];
    }
    empty.clear();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (counts[c] == 0) {
            empty.push_back(c);
            continue;
        }
        for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
}

void repair_empty(const Matrix& pts, const std::vector<std::size_t>& assign, Matrix& centers,
                  const std::vector<std::size_t>& empty) {
    std::vector<bool> used(pts.size(), false);
    for (std::size_t c : empty) {
        std::size_t far = pts.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (used[i]) continue;
            const double d = squared_distance(pts[i], centers[assign[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == pts.size()) return;
        used[far] = true;
        centers[c] = pts[far];
    }
}

}  // namespace

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(k_effective, 0);
    for (std::size_t a : assignments) ++sizes[a];
    return sizes;
}

Partition kmeans(std::span<const ObservableVector> points, const KMeansOptions& options, RandomStream& stream) {
    if (points.empty()) throw std::invalid_argument("kmeans: no points");
    if (options.k == 0) throw std::invalid_argument("kmeans: k must be positive");
    if (options.max_iter == 0) throw std::invalid_argument("kmeans: max_iter must be positive");
    const std::size_t dim = points.front().dimension();
    for (const auto& p : points) {
        if (p.dimension() != dim) throw std::invalid_argument("kmeans: mixed dimensions");
    }

    const Matrix pts = to_matrix(points);
    const std::size_t k = std::min(options.k, count_distinct(pts));

    Partition out;
    Matrix centers = seed_plus_plus(pts, k, stream);
    std::vector<std::size_t> assign;
    std::vector<std::size_t> next;
    std::vector<std::size_t> empty;
    out.wcss_trace.push_back(assign_nearest(pts, centers, assign));

    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        ++out.iterations;
        update_means(pts, assign, centers, empty);
        if (!empty.empty()) repair_empty(pts, assign, centers, empty);
        out.wcss_trace.push_back(assign_nearest(pts, centers, next));
        if (next == assign) break;
        assign.swap(next);
    }

    // Renumber non-empty clusters by first appearance and recompute means.
    std::vector<std::size_t> relabel(centers.size(), std::numeric_limits<std::size_t>::max());
    std::size_t live = 0;
    for (auto& a : assign) {
        if (relabel[a] == std::numeric_limits<std::size_t>::max()) relabel[a] = live++;
        a = relabel[a];
    }
    Matrix final_centers(live, std::vector<double>(dim, 0.0));
    update_means(pts, assign, final_centers, empty);

    out.assignments = std::move(assign);
    out.k_effective = live;
    out.wcss = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) out.wcss += squared_distance(pts[i], final_centers[out.assignments[i]]);
    out.wcss_trace.push_back(out.wcss);
    out.centroids.reserve(live);
    for (auto& c : final_centers) out.centroids.emplace_back(std::move(c));
    return out;
}

std::vector<std::size_t> select_delegates(const Partition& partition, std::span<const ObservableVector> points) {
    if (partition.assignments.size() != points.size()) {
        throw std::invalid_argument("select_delegates: partition does not match points");
    }
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> delegates(partition.k_effective, none);
    std::vector<double> best(partition.k_effective, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t c = partition.assignments[i];
        const double d = squared_distance(points[i].values(), partition.centroids[c].values());
        if (d < best[c]) {
            best[c] = d;
            delegates[c] = i;
        }
    }
    for (std::size_t d : delegates) {
        if (d == none) throw std::invalid_argument("select_delegates: empty cluster");
    }
    return delegates;
}

std::vector<std::size_t> allocate_clones(std::size_t k_effective, std::size_t n, RandomStream& stream) {
    if (k_effective == 0) throw std::invalid_argument("allocate_clones: k must be positive");
    if (k_effective > n) throw std::invalid_argument("allocate_clones: more delegates than replications");
    const std::size_t base = n / k_effective;
    const std::size_t remainder = n - base * k_effective;
    std::vector<std::size_t> counts(k_effective, base);

    // Partial Fisher-Yates: the first `remainder` slots are a uniform sample.
    std::vector<std::size_t> order(k_effective);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < remainder; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(stream.uniform_index(k_effective - i));
        std::swap(order[i], order[j]);
        ++counts[order[i]];
    }
    return counts;
}

std::vector<ObservableVector> standardize(std::span<const ObservableVector> points) {
    if (points.empty()) return {};
    const std::size_t dim = points.front().dimension();
    const double n = static_cast<double>(points.size());
    std::vector<double> mean(dim, 0.0);
    std::vector<double> sd(dim, 0.0);
    for (const auto& p : points) {
        for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
    }
    for (auto& m : mean) m /= n;
    for (const auto& p : points) {
        for (std::size_t d = 0; d < dim; ++d) sd[d] += (p[d] - mean[d]) * (p[d] - mean[d]);
    }
    for (auto& s : sd) s = std::sqrt(s / n);

    std::vector<ObservableVector> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        std::vector<double> z(dim);
        for (std::size_t d = 0; d < dim; ++d) z[d] = sd[d] > 0.0 ? (p[d] - mean[d]) / sd[d] : 0.0;
        out.emplace_back(std::move(z));
    }
    return out;
}

}  // namespace spsc
