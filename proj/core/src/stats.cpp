#include "spsc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "spsc/csv.hpp"
#include "spsc/parallel.hpp"
#include "spsc/policy_mc.hpp"

namespace spsc {

double abs_error(double estimate, double reference) { return std::abs(estimate - reference); }

double aggregate_relative_error(std::span<const double> estimates, std::span<const double> references) {
    if (estimates.size() != references.size()) throw std::invalid_argument("aggregate_relative_error: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!(references[i] > 0.0)) throw std::invalid_argument("aggregate_relative_error: reference must be positive");
        sum += std::abs((estimates[i] - references[i]) / references[i]);
    }
    return sum;
}

namespace {

struct Ranking {
    std::vector<double> ranks;  // pooled order: a then b
    double tie_term = 0.0;      // sum of t^3 - t over tie groups
    bool has_ties = false;
};

Ranking midranks(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size() + b.size();
    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

    Ranking r;
    r.ranks.resize(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && pooled[idx[j]] == pooled[idx[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) r.ranks[idx[t]] = rank;
        const double t = static_cast<double>(j - i);
        if (j - i > 1) {
            r.has_ties = true;
            r.tie_term += t * t * t - t;
        }
        i = j;
    }
    return r;
}

// Null distribution of U for sample sizes (n1, n2): counts[u] = number of
// rank assignments with that U, built over the smaller sample's rank sum.
std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2) {
    const std::size_t s = std::min(n1, n2);
    const std::size_t n = n1 + n2;
    const std::size_t max_sum = s * n;
    // dp[c][r]: ways to choose c ranks from those seen so far with sum r.
    std::vector<std::vector<double>> dp(s + 1, std::vector<double>(max_sum + 1, 0.0));
    dp[0][0] = 1.0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
        for (std::size_t c = std::min(s, rank); c >= 1; --c) {
            auto& to = dp[c];
            const auto& from = dp[c - 1];
            for (std::size_t r = max_sum; r >= rank; --r) to[r] += from[r - rank];
        }
    }
    const std::size_t offset = s * (s + 1) / 2;
    std::vector<double> counts(n1 * n2 + 1, 0.0);
    for (std::size_t r = offset; r <= max_sum; ++r) {
        if (r - offset < counts.size()) counts[r - offset] = dp[s][r];
    }
    return counts;
}

}  // namespace

WmwResult wilcoxon_mann_whitney(std::span<const double> a, std::span<const double> b, Alternative alternative) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon_mann_whitney: samples must be non-empty");
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    const Ranking rk = midranks(a, b);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum += rk.ranks[i];

    WmwResult res;
    res.u = rank_sum - n1 * (n1 + 1.0) / 2.0;

    const bool all_equal = std::all_of(a.begin(), a.end(), [&](double x) { return x == a.front(); }) &&
                           std::all_of(b.begin(), b.end(), [&](double x) { return x == a.front(); });
    if (all_equal) {
        res.degenerate = true;
        res.p_value = 1.0;
        return res;
    }

    if (std::min(a.size(), b.size()) <= 8 && !rk.has_ties) {
        res.exact = true;
        const auto counts = exact_u_counts(a.size(), b.size());
        const auto u = static_cast<std::size_t>(std::llround(res.u));
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        const double below = std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(u) + 1, 0.0);
        const double above = std::accumulate(counts.begin() + static_cast<std::ptrdiff_t>(u), counts.end(), 0.0);
        switch (alternative) {
            case Alternative::less: res.p_value = below / total; break;
            case Alternative::greater: res.p_value = above / total; break;
            case Alternative::two_sided: res.p_value = std::min(1.0, 2.0 * std::min(below, above) / total); break;
        }
        return res;
    }

    const double mu = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - rk.tie_term / (n * (n - 1.0)));
    const double sigma = std::sqrt(var);
    double p = 1.0;
    switch (alternative) {
        case Alternative::less: p = normal_cdf((res.u - mu + 0.5) / sigma); break;
        case Alternative::greater: p = normal_cdf(-(res.u - mu - 0.5) / sigma); break;
        case Alternative::two_sided: p = 2.0 * normal_cdf(-(std::abs(res.u - mu) - 0.5) / sigma); break;
    }
    res.p_value = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
    return res;
}

double two_proportion_p_greater(std::size_t successes_x, std::size_t n_x, std::size_t successes_y, std::size_t n_y) {
    if (n_x == 0 || n_y == 0) throw std::invalid_argument("two_proportion_p_greater: empty sample");
    const double px = static_cast<double>(successes_x) / static_cast<double>(n_x);
    const double py = static_cast<double>(successes_y) / static_cast<double>(n_y);
    const double pooled = static_cast<double>(successes_x + successes_y) / static_cast<double>(n_x + n_y);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n_x) + 1.0 / static_cast<double>(n_y)));
    if (se == 0.0) return 1.0;
    return normal_cdf(-(px - py) / se);
}

namespace {

PolicyOutcome summarize(std::string name, std::vector<std::vector<double>> estimates, std::span<const double> references) {
    PolicyOutcome out;
    out.name = std::move(name);
    const std::size_t repeats = estimates.size();
    const std::size_t s = references.size();
    out.detected.assign(repeats, std::vector<bool>(s, false));
    out.abs_errors.assign(s, std::vector<double>(repeats, 0.0));
    out.aggregate_errors.assign(repeats, 0.0);
    out.detection_rates.assign(s, 0.0);

    double unclassified = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto& est = estimates[r];
        if (est.size() != s) throw std::invalid_argument("compare_policies: runner returned wrong number of estimates");
        bool all = true;
        double mass = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            const bool d = detection(est[i]);
            out.detected[r][i] = d;
            all = all && d;
            if (d) out.detection_rates[i] += 1.0;
            out.abs_errors[i][r] = abs_error(est[i], references[i]);
            mass += est[i];
        }
        if (all) ++out.joint_detections;
        out.aggregate_errors[r] = aggregate_relative_error(est, references);
        unclassified += 1.0 - mass;
    }
    for (auto& d : out.detection_rates) d /= static_cast<double>(repeats);
    out.joint_detection_rate = static_cast<double>(out.joint_detections) / static_cast<double>(repeats);
    out.mean_unclassified_mass = unclassified / static_cast<double>(repeats);
    out.estimates = std::move(estimates);
    return out;
}

std::size_t count_detected(const PolicyOutcome& o, std::size_t solution) {
    std::size_t c = 0;
    for (const auto& row : o.detected) c += row[solution] ? 1 : 0;
    return c;
}

}  // namespace

ComparisonReport compare_policies(const PolicyRunner& mc, const PolicyRunner& spsc, std::size_t repeats,
                                  std::span<const SolutionPredicate> solutions, std::span<const double> references,
                                  std::uint64_t master_seed, unsigned threads) {
    if (repeats < 2) throw std::invalid_argument("compare_policies: need at least 2 repeats");
    if (solutions.size() != references.size()) throw std::invalid_argument("compare_policies: one reference per solution");
    for (double r : references) {
        if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("compare_policies: references must lie in (0,1]");
    }

    std::vector<std::vector<double>> mc_est(repeats);
    std::vector<std::vector<double>> spsc_est(repeats);
    parallel_for(2 * repeats, threads, [&](std::size_t job) {
        const std::size_t r = job / 2;
        const std::uint64_t seed = derive_seed(master_seed, job);
        if (job % 2 == 0) {
            mc_est[r] = mc(seed);
        } else {
            spsc_est[r] = spsc(seed);
        }
    });

    ComparisonReport report;
    for (const auto& s : solutions) report.solutions.push_back(s.name());
    report.references.assign(references.begin(), references.end());
    report.repeats = repeats;
    report.mc = summarize("mc", std::move(mc_est), references);
    report.spsc = summarize("spsc", std::move(spsc_est), references);

    for (std::size_t i = 0; i < solutions.size(); ++i) {
        report.wmw_abs_error.push_back(
            wilcoxon_mann_whitney(report.spsc.abs_errors[i], report.mc.abs_errors[i], Alternative::less));
        report.detection_p.push_back(
            two_proportion_p_greater(count_detected(report.spsc, i), repeats, count_detected(report.mc, i), repeats));
    }
    report.wmw_aggregate =
        wilcoxon_mann_whitney(report.spsc.aggregate_errors, report.mc.aggregate_errors, Alternative::less);
    report.joint_detection_p =
        two_proportion_p_greater(report.spsc.joint_detections, repeats, report.mc.joint_detections, repeats);
    return report;
}

ComparisonReport compare_policies(const SimulationModel& model, std::size_t mc_n, std::int64_t horizon,
                                  const SpscConfig& spsc_config, std::size_t repeats,
                                  std::span<const SolutionPredicate> solutions, std::span<const double> references,
                                  std::uint64_t master_seed, unsigned threads) {
    std::vector<SolutionPredicate> preds(solutions.begin(), solutions.end());
    PolicyRunner mc = [&model, mc_n, horizon, preds](std::uint64_t seed) {
        const McResult res = mc_run(model, mc_n, horizon, seed, 1);
        std::vector<double> est;
        for (const auto& p : preds) est.push_back(mc_estimate(res, p));
        return est;
    };
    PolicyRunner spsc = [&model, spsc_config, preds](std::uint64_t seed) {
        SpscConfig cfg = spsc_config;
        cfg.master_seed = seed;
        cfg.threads = 1;
        const SpscResult res = spsc_run(model, cfg);
        std::vector<double> est;
        for (const auto& p : preds) est.push_back(spsc_estimate(res, p));
        return est;
    };
    return compare_policies(mc, spsc, repeats, solutions, references, master_seed, threads);
}

void write_repeats_csv(std::ostream& out, const ComparisonReport& report) {
    out << "repeat_id,policy,solution,estimate,detected,abs_error\n";
    for (std::size_t r = 0; r < report.repeats; ++r) {
        for (const PolicyOutcome* o : {&report.mc, &report.spsc}) {
            for (std::size_t i = 0; i < report.solutions.size(); ++i) {
                out << r << ',' << o->name << ',' << report.solutions[i] << ',' << format_real(o->estimates[r][i]) << ','
                    << (o->detected[r][i] ? 1 : 0) << ',' << format_real(o->abs_errors[i][r]) << '\n';
            }
        }
    }
}

namespace {

double mean_of(std::span<const double> xs) {
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
    out << "metric,target,mc,spsc,alternative,p_value\n";
    const auto& sols = report.solutions;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        out << "reference," << sols[i] << ',' << format_real(report.references[i]) << ','
            << format_real(report.references[i]) << ",,\n";
    }
    for (std::size_t i = 0; i < sols.size(); ++i) {
        out << "detection_rate," << sols[i] << ',' << format_real(report.mc.detection_rates[i]) << ','
            << format_real(report.spsc.detection_rates[i]) << ",spsc>mc," << format_real(report.detection_p[i]) << '\n';
    }
    out << "detection_rate,joint," << format_real(report.mc.joint_detection_rate) << ','
        << format_real(report.spsc.joint_detection_rate) << ",spsc>mc," << format_real(report.joint_detection_p) << '\n';
    for (std::size_t i = 0; i < sols.size(); ++i) {
        out << "abs_error_mean," << sols[i] << ',' << format_real(mean_of(report.mc.abs_errors[i])) << ','
            << format_real(mean_of(report.spsc.abs_errors[i])) << ",spsc<mc,"
            << format_real(report.wmw_abs_error[i].p_value) << '\n';
    }
    out << "aggregate_relative_error_mean,joint," << format_real(mean_of(report.mc.aggregate_errors)) << ','
        << format_real(mean_of(report.spsc.aggregate_errors)) << ",spsc<mc,"
        << format_real(report.wmw_aggregate.p_value) << '\n';
    out << "unclassified_mass_mean,none," << format_real(report.mc.mean_unclassified_mass) << ','
        << format_real(report.spsc.mean_unclassified_mass) << ",,\n";
}

void write_histogram_csv(std::ostream& out, std::span<const double> mc_errors, std::span<const double> spsc_errors,
                         std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("write_histogram_csv: bins must be positive");
    double hi = 0.0;
    for (double x : mc_errors) hi = std::max(hi, x);
    for (double x : spsc_errors) hi = std::max(hi, x);
    if (hi == 0.0) bins = 1;
    const double width = hi / static_cast<double>(bins);

    std::vector<std::size_t> mc_counts(bins, 0);
    std::vector<std::size_t> spsc_counts(bins, 0);
    auto bin_of = [&](double x) {
        if (width == 0.0) return std::size_t{0};
        return std::min(bins - 1, static_cast<std::size_t>(x / width));
    };
    for (double x : mc_errors) ++mc_counts[bin_of(x)];
    for (double x : spsc_errors) ++spsc_counts[bin_of(x)];

    out << "bin_lo,bin_hi,count_mc,count_spsc\n";
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = width * static_cast<double>(b);
        const double up = (b + 1 == bins) ? hi : width * static_cast<double>(b + 1);
        out << format_real(lo) << ',' << format_real(up) << ',' << mc_counts[b] << ',' << spsc_counts[b] << '\n';
    }
}

}  // namespace spsc
