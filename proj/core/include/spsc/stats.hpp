#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spsc/policy_spsc.hpp"
#include "spsc/sim.hpp"
#include "spsc/solution.hpp"

namespace spsc {

/// A solution counts as detected when it received any probability mass.
inline bool detection(double estimate) { return estimate > 0.0; }

double abs_error(double estimate, double reference);

/// Sum over solutions of |(est - ref) / ref|. References must be positive.
double aggregate_relative_error(std::span<const double> estimates, std::span<const double> references);

enum class Alternative { less, greater, two_sided };

struct WmwResult {
    double u = 0.0;  // Mann-Whitney U of the first sample
    double p_value = 1.0;
    bool exact = false;
    bool degenerate = false;  // every observation identical
};

/// Wilcoxon-Mann-Whitney rank-sum test of `a` against `b`.
///
/// `less` means a tends to be smaller than b. Ties receive midranks. When
/// min(|a|,|b|) <= 8 and there are no ties the p-value is exact, from the
/// null distribution of U over all rank assignments; otherwise it uses the
/// normal approximation with tie-corrected variance and continuity
/// correction.
WmwResult wilcoxon_mann_whitney(std::span<const double> a, std::span<const double> b, Alternative alternative);

/// One-sided pooled two-proportion z-test of H1: p_x > p_y.
double two_proportion_p_greater(std::size_t successes_x, std::size_t n_x, std::size_t successes_y, std::size_t n_y);

/// Per-solution estimates from one policy execution with the given seed.
using PolicyRunner = std::function<std::vector<double>(std::uint64_t seed)>;

struct PolicyOutcome {
    std::string name;
    std::vector<std::vector<double>> estimates;   // [repeat][solution]
    std::vector<std::vector<bool>> detected;      // [repeat][solution]
    std::vector<std::vector<double>> abs_errors;  // [solution][repeat]
    std::vector<double> aggregate_errors;         // [repeat]
    std::vector<double> detection_rates;          // [solution]
    double joint_detection_rate = 0.0;
    std::size_t joint_detections = 0;
    double mean_unclassified_mass = 0.0;  // 1 - sum of estimates, averaged
};

struct ComparisonReport {
    std::vector<std::string> solutions;
    std::vector<double> references;
    std::size_t repeats = 0;
    PolicyOutcome mc;
    PolicyOutcome spsc;
    std::vector<WmwResult> wmw_abs_error;  // per solution, H1: Err_SPSC < Err_MC
    WmwResult wmw_aggregate;               // H1: aggregate Err_SPSC < aggregate Err_MC
    std::vector<double> detection_p;       // per solution, H1: SPSC detects more often
    double joint_detection_p = 1.0;
};

/// Runs both policies `repeats` times with distinct derived seeds, then
/// fills detection rates, errors and test results. Repeats run on up to
/// `threads` workers; all reductions follow repeat order.
ComparisonReport compare_policies(const PolicyRunner& mc, const PolicyRunner& spsc, std::size_t repeats,
                                  std::span<const SolutionPredicate> solutions, std::span<const double> references,
                                  std::uint64_t master_seed, unsigned threads = 1);

/// Model-backed overload: MC with mc_config.n replications, SPSC with
/// spsc_config (seed fields are overridden per repeat).
ComparisonReport compare_policies(const SimulationModel& model, std::size_t mc_n, std::int64_t horizon,
                                  const SpscConfig& spsc_config, std::size_t repeats,
                                  std::span<const SolutionPredicate> solutions, std::span<const double> references,
                                  std::uint64_t master_seed, unsigned threads = 1);

/// repeat_id,policy,solution,estimate,detected,abs_error
void write_repeats_csv(std::ostream& out, const ComparisonReport& report);

/// metric,target,mc,spsc,alternative,p_value
void write_summary_csv(std::ostream& out, const ComparisonReport& report);

/// bin_lo,bin_hi,count_mc,count_spsc over a shared equal-width binning.
void write_histogram_csv(std::ostream& out, std::span<const double> mc_errors, std::span<const double> spsc_errors,
                         std::size_t bins = 20);

}  // namespace spsc
