#include "spsc/policy_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "spsc/csv.hpp"
#include "spsc/parallel.hpp"

namespace spsc {

McResult mc_run(const SimulationModel& model, std::size_t n, std::int64_t horizon, std::uint64_t master_seed,
                unsigned threads) {
    if (n < 1) throw std::invalid_argument("mc_run: N must be >= 1");
    if (horizon < 1) throw std::invalid_argument("mc_run: T must be >= 1");

    McResult result;
    result.n = n;
    result.horizon = horizon;
    result.master_seed = master_seed;
    result.finals.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        auto rep = make_replication(model, master_seed, i, Weight(1, static_cast<long long>(n)));
        advance(rep, model, horizon, horizon);
        result.finals[i] = model.observe(rep.state());
    });
    return result;
}

std::size_t count_inside(std::span<const ObservableVector> finals, const SolutionPredicate& predicate) {
    return static_cast<std::size_t>(std::count_if(finals.begin(), finals.end(),
                                                  [&](const ObservableVector& x) { return predicate(x); }));
}

double mc_estimate(const McResult& result, const SolutionPredicate& predicate) {
    if (result.finals.empty()) throw std::invalid_argument("mc_estimate: empty result");
    return static_cast<double>(count_inside(result.finals, predicate)) / static_cast<double>(result.finals.size());
}

SampleStats sample_stats(std::span<const double> samples) {
    SampleStats s;
    s.count = samples.size();
    if (samples.empty()) return s;
    double sum = 0.0;
    for (double x : samples) sum += x;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count < 2) return s;
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.sample_std = std::sqrt(ss / static_cast<double>(s.count - 1));
    return s;
}

std::int64_t required_replications(const SampleStats& stats, double epsilon, double alpha) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("required_replications: epsilon outside (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("required_replications: alpha outside (0,1)");
    if (stats.sample_std < 0.0) throw std::invalid_argument("required_replications: negative sample std");
    if (std::abs(stats.mean) < 1e-12) throw std::domain_error("relative-error criterion undefined (zero mean)");

    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double root = z * stats.sample_std / (epsilon * stats.mean);
    const double n = std::ceil(root * root);
    if (n >= 9.0e18) throw std::overflow_error("required_replications: result out of range");
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

std::int64_t required_replications(std::span<const double> pilot, double epsilon, double alpha) {
    if (pilot.size() < 2) throw std::invalid_argument("required_replications: pilot needs at least 2 samples");
    return required_replications(sample_stats(pilot), epsilon, alpha);
}

std::int64_t required_replications_vector(std::span<const std::vector<double>> pilots, double epsilon,
                                          double alpha) {
    if (pilots.empty()) throw std::invalid_argument("required_replications_vector: no observables");
    std::int64_t n = 1;
    for (const auto& p : pilots) n = std::max(n, required_replications(p, epsilon, alpha));
    return n;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement. Work in the tail nearer to p to keep precision.
    const double e = (p < 0.5) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

std::vector<PilotRow> pilot_table(std::span<const ObservableVector> finals, std::span<const std::string> names,
                                  double epsilon, double alpha) {
    if (finals.empty()) throw std::invalid_argument("pilot_table: empty pilot");
    const std::size_t dim = finals.front().dimension();
    if (names.size() != dim) throw std::invalid_argument("pilot_table: names do not match dimension");
    std::vector<PilotRow> rows;
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> column;
        column.reserve(finals.size());
        for (const auto& f : finals) column.push_back(f[d]);
        PilotRow row;
        row.observable = names[d];
        row.stats = sample_stats(column);
        if (row.stats.count < 2) throw std::invalid_argument("pilot_table: pilot needs at least 2 samples");
        row.n_required = required_replications(row.stats, epsilon, alpha);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_pilot_csv(std::ostream& out, std::span<const PilotRow> rows) {
    out << "observable,s,mean,n_required\n";
    for (const auto& r : rows) {
        out << r.observable << ',' << format_real(r.stats.sample_std) << ',' << format_real(r.stats.mean) << ','
            << r.n_required << '\n';
    }
}

}  // namespace spsc
