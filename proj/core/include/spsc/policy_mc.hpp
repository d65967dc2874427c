#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spsc/sim.hpp"
#include "spsc/solution.hpp"

namespace spsc {

/// Final observables of N independent replications, in stream-id order.
struct McResult {
    std::vector<ObservableVector> finals;
    std::size_t n = 0;
    std::int64_t horizon = 0;
    std::uint64_t master_seed = 0;
};

/// Runs replications with stream ids 0..n-1 to `horizon`. Output does not
/// depend on `threads` (0 = hardware concurrency).
McResult mc_run(const SimulationModel& model, std::size_t n, std::int64_t horizon, std::uint64_t master_seed,
                unsigned threads = 1);

/// Relative frequency of finals inside the predicate.
double mc_estimate(const McResult& result, const SolutionPredicate& predicate);

std::size_t count_inside(std::span<const ObservableVector> finals, const SolutionPredicate& predicate);

struct SampleStats {
    double mean = 0.0;
    double sample_std = 0.0;  // n-1 denominator
    std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> samples);

/// Replications needed for relative error `epsilon` at confidence
/// 1 - alpha: ceil((z_{1-alpha/2} * s / (epsilon * mean))^2), at least 1.
/// Throws std::domain_error when |mean| < 1e-12.
std::int64_t required_replications(const SampleStats& stats, double epsilon, double alpha);
std::int64_t required_replications(std::span<const double> pilot, double epsilon, double alpha);

/// Maximum of the per-observable counts.
std::int64_t required_replications_vector(std::span<const std::vector<double>> pilots, double epsilon,
                                          double alpha);

/// Inverse standard normal CDF. Acklam's rational approximation followed by
/// one Halley step against erfc; absolute error well below 1e-8.
double normal_quantile(double p);
double normal_cdf(double x);

struct PilotRow {
    std::string observable;
    SampleStats stats;
    std::int64_t n_required = 0;
};

/// Per-observable rows computed from the final observables of a pilot run.
std::vector<PilotRow> pilot_table(std::span<const ObservableVector> finals, std::span<const std::string> names,
                                  double epsilon, double alpha);

/// CSV rows `observable,s,mean,n_required` with a header line.
void write_pilot_csv(std::ostream& out, std::span<const PilotRow> rows);

}  // namespace spsc
