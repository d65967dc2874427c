// Acceptance harness: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria not listed in --known-red.
//
//   acceptance [--quick] [--out DIR] [--known-red 1,8]
//
// --quick skips the R=200 comparison campaign (criteria 8 and 9).
// --out writes the campaign's summary, repeats and baseline CSVs to DIR.
// --known-red lists criteria whose failure is documented; they still print
// FAIL but do not count towards the exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "spsc/csv.hpp"
#include "spsc/parallel.hpp"
#include "spsc/partition.hpp"
#include "spsc/policy_mc.hpp"
#include "spsc/policy_spsc.hpp"
#include "spsc/prey_predator.hpp"
#include "spsc/stats.hpp"

namespace fs = std::filesystem;
using namespace spsc;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-12;
constexpr double kWeightTol = 1e-9;
constexpr double kRowTol = 1e-12;
constexpr double kWmwTol = 1e-12;
constexpr double kCoexLo = 0.95;
constexpr double kCoexHi = 0.99;
constexpr double kJointFactor = 1.3;
constexpr double kAlpha = 0.05;

constexpr std::size_t kBaselineReps = 5000;
constexpr std::size_t kRepeats = 200;
constexpr std::size_t kCampaignN = 50;
constexpr std::int64_t kCampaignT = 1000;
constexpr std::uint64_t kCampaignSeed = 0;

std::vector<int> failed;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
    if (!pass) failed.push_back(id);
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << " :: " << detail << "  (" << std::fixed
              << std::setprecision(1) << seconds << " s)" << std::endl;
    std::cout.unsetf(std::ios::floatfield);
}

template <typename F>
void criterion(int id, const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail += std::string(" exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, pass, detail, s);
}

std::string fmt(double x, int precision = 6) {
    std::ostringstream o;
    o << std::setprecision(precision) << x;
    return o.str();
}

SpscConfig spsc_config(std::size_t n, std::size_t m, std::size_t k, std::int64_t t, std::uint64_t seed) {
    SpscConfig c;
    c.n = n;
    c.stages = m;
    c.clusters = k;
    c.horizon = t;
    c.master_seed = seed;
    return c;
}

std::vector<SolutionPredicate> predicates_with_whole_space() {
    const auto b = builtin_solutions();
    std::vector<SolutionPredicate> p(b.begin(), b.end());
    p.push_back(SolutionPredicate::whole_space(3));
    return p;
}

// ---------------------------------------------------------------------------

bool c1_sample_size(std::string& d) {
    const auto prey = required_replications(SampleStats{783.77, 697.83, 150}, 0.05, 0.05);
    const auto pred = required_replications(SampleStats{128.67, 196.95, 150}, 0.05, 0.05);
    const auto vmax = std::max(prey, pred);
    d = "prey=" + std::to_string(prey) + " (want 1219), predators=" + std::to_string(pred) +
        " (want 3600), max=" + std::to_string(vmax) + " (want 3600)";
    return prey == 1219 && pred == 3600 && vmax == 3600;
}

bool c2_degenerate(std::string& d) {
    const PreyPredatorModel model{PreyPredatorConfig{}};
    const auto preds = builtin_solutions();
    std::size_t m1_ok = 0, kn_ok = 0, kn_checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const McResult mc = mc_run(model, 20, 100, seed);
        const SpscResult one = spsc_run(model, spsc_config(20, 1, 15, 100, seed));
        bool same = true;
        for (const auto& p : preds) same = same && spsc_estimate(one, p) == mc_estimate(mc, p);
        m1_ok += same ? 1 : 0;

        const SpscResult kn = spsc_run(model, spsc_config(20, 5, 20, 100, seed));
        const bool distinct = std::all_of(kn.stages.begin(), kn.stages.end(), [](const StageRecord& s) {
            return !s.partition || s.partition->k_effective == 20;
        });
        if (!distinct) continue;
        ++kn_checked;
        same = true;
        for (const auto& p : preds) same = same && spsc_estimate(kn, p) == mc_estimate(mc, p);
        kn_ok += same ? 1 : 0;
    }
    d = "m=1: " + std::to_string(m1_ok) + "/20 exact; k=N: " + std::to_string(kn_ok) + "/" +
        std::to_string(kn_checked) + " exact (seeds with all-distinct observables)";
    return m1_ok == 20 && kn_checked > 0 && kn_ok == kn_checked;
}

bool c3_path_sum(std::string& d) {
    const PreyPredatorModel model{PreyPredatorConfig{}};
    const auto preds = predicates_with_whole_space();
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SpscResult r = spsc_run(model, spsc_config(12, 3, 3, 60, seed));
        for (const auto& p : preds) worst = std::max(worst, std::abs(spsc_estimate(r, p) - path_sum_oracle(r, p)));
    }
    d = "max |estimate - oracle| = " + fmt(worst) + " over 10 seeds x 4 predicates (tol 1e-12)";
    return worst <= kOracleTol;
}

bool c4_conservation(std::string& d) {
    const PreyPredatorModel model{PreyPredatorConfig{}};
    double worst_weight = 0.0, worst_row = 0.0;
    std::size_t stages = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SpscResult r = spsc_run(model, spsc_config(50, 5, 15, 500, seed));
        for (const auto& st : r.stages) {
            ++stages;
            worst_weight = std::max(worst_weight, std::abs(to_double(st.weight_sum) - 1.0));
            if (!st.partition) continue;
            for (std::size_t src = 0; src < st.transitions.size(); ++src) {
                double row = 0.0;
                for (std::size_t c = 0; c < st.transitions[src].size(); ++c) row += conditional_estimate(st, src, c);
                worst_row = std::max(worst_row, std::abs(row - 1.0));
            }
        }
    }
    d = std::to_string(stages) + " stages; max |weight sum - 1| = " + fmt(worst_weight) +
        ", max |row sum - 1| = " + fmt(worst_row);
    return worst_weight <= kWeightTol && worst_row <= kRowTol;
}

bool c5_allocation(std::string& d) {
    RandomStream gen(2024, 0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(gen.uniform01() * 500);
        const std::size_t k = 1 + static_cast<std::size_t>(gen.uniform01() * static_cast<double>(n));
        RandomStream s(7, static_cast<std::uint64_t>(trial));
        const auto a = allocate_clones(std::min(k, n), n, s);
        const std::size_t lo = n / a.size(), hi = (n + a.size() - 1) / a.size();
        const bool ok = a.size() == std::min(k, n) && std::accumulate(a.begin(), a.end(), std::size_t{0}) == n &&
                        std::all_of(a.begin(), a.end(), [&](std::size_t c) { return c == lo || c == hi; });
        bad += ok ? 0 : 1;
    }
    RandomStream s(1, 1);
    const auto a = allocate_clones(15, 50, s);
    const auto threes = std::count(a.begin(), a.end(), std::size_t{3});
    const auto fours = std::count(a.begin(), a.end(), std::size_t{4});
    d = std::to_string(1000 - bad) + "/1000 random allocations valid; k=15,N=50 -> " + std::to_string(threes) +
        "x3 + " + std::to_string(fours) + "x4";
    return bad == 0 && threes == 10 && fours == 5 && a.size() == 15;
}

double sq_dist(const ObservableVector& a, const ObservableVector& b) { return squared_distance(a.values(), b.values()); }

bool c6_kmeans(std::string& d) {
    RandomStream gen(99, 0);
    std::size_t monotone = 0, consistent = 0;
    for (int set = 0; set < 100; ++set) {
        const std::size_t n = 5 + static_cast<std::size_t>(gen.uniform01() * 200);
        const std::size_t k = 1 + static_cast<std::size_t>(gen.uniform01() * 20);
        const std::size_t modes = 1 + static_cast<std::size_t>(gen.uniform01() * 6);
        std::vector<ObservableVector> centres;
        for (std::size_t c = 0; c < modes; ++c)
            centres.push_back({400 * gen.uniform01(), 100 * gen.uniform01(), 2500 * gen.uniform01()});
        std::vector<ObservableVector> pts;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = centres[static_cast<std::size_t>(gen.uniform01() * static_cast<double>(modes))];
            pts.push_back({std::round(c[0] + 40 * (gen.uniform01() - 0.5)), std::round(c[1] + 10 * (gen.uniform01() - 0.5)),
                           std::round(c[2] + 200 * (gen.uniform01() - 0.5))});
        }
        RandomStream s(5, static_cast<std::uint64_t>(set));
        const Partition p = kmeans(pts, {k, 100}, s);

        bool mono = true;
        for (std::size_t i = 1; i < p.wcss_trace.size(); ++i)
            mono = mono && p.wcss_trace[i] <= p.wcss_trace[i - 1] * (1 + 1e-12) + 1e-9;
        monotone += mono ? 1 : 0;

        bool near = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double own = sq_dist(pts[i], p.centroids[p.assignments[i]]);
            for (const auto& c : p.centroids) near = near && own <= sq_dist(pts[i], c) * (1 + 1e-12) + 1e-9;
        }
        consistent += near ? 1 : 0;
    }

    std::vector<ObservableVector> two;
    for (int i = 0; i < 10; ++i) two.push_back(i % 2 ? ObservableVector{300, 0, 1000} : ObservableVector{0, 40, 2000});
    RandomStream s(3, 3);
    const Partition p = kmeans(two, {2, 100}, s);
    bool separated = p.k_effective == 2 && p.wcss == 0.0;
    for (std::size_t i = 0; i < two.size(); ++i) separated = separated && p.assignments[i] == p.assignments[i % 2];
    separated = separated && p.assignments[0] != p.assignments[1];

    d = "monotone " + std::to_string(monotone) + "/100, nearest-centroid " + std::to_string(consistent) +
        "/100, two sites " + (separated ? "recovered with wcss=0" : "NOT recovered");
    return monotone == 100 && consistent == 100 && separated;
}

double u_less(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : 0.0;
    return u;
}

bool c7_wmw(std::string& d) {
    // Tie-free 4v4 samples are characterised by which of the ranks 1..8 fall
    // in the first sample: all 70 splits are checked against enumeration.
    std::vector<std::vector<double>> splits_a, splits_b;
    for (unsigned mask = 0; mask < 256; ++mask) {
        if (__builtin_popcount(mask) != 4) continue;
        std::vector<double> a, b;
        for (int r = 0; r < 8; ++r) (mask >> r & 1 ? a : b).push_back(r + 1.0);
        splits_a.push_back(a);
        splits_b.push_back(b);
    }
    std::vector<double> null_u;
    for (std::size_t i = 0; i < splits_a.size(); ++i) null_u.push_back(u_less(splits_a[i], splits_b[i]));

    double worst = 0.0;
    for (std::size_t i = 0; i < splits_a.size(); ++i) {
        const double u = null_u[i];
        const double p_less = static_cast<double>(std::count_if(null_u.begin(), null_u.end(), [&](double v) { return v <= u; })) / 70.0;
        const double p_greater = static_cast<double>(std::count_if(null_u.begin(), null_u.end(), [&](double v) { return v >= u; })) / 70.0;
        const auto rl = wilcoxon_mann_whitney(splits_a[i], splits_b[i], Alternative::less);
        const auto rg = wilcoxon_mann_whitney(splits_a[i], splits_b[i], Alternative::greater);
        worst = std::max({worst, std::abs(rl.p_value - p_less), std::abs(rg.p_value - p_greater)});
    }
    const auto small = wilcoxon_mann_whitney(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}, Alternative::less);
    d = "70 splits, max |p - enumeration| = " + fmt(worst) + "; {1,2,3} vs {4,5,6} p = " + fmt(small.p_value, 17);
    return worst <= kWmwTol && small.p_value == 0.05;
}

// ---------------------------------------------------------------------------

struct Campaign {
    bool ran = false;
    std::string error;
    std::vector<double> references;
    std::vector<std::size_t> hits;
    ComparisonReport report;
};

Campaign run_campaign(const std::string& out_dir) {
    Campaign c;
    const PreyPredatorModel model{PreyPredatorConfig{}};
    const auto preds = builtin_solutions();
    const unsigned threads = default_thread_count();

    // Same seed derivation as `spsc compare --ci-mode --seed 0`.
    const McResult base = mc_run(model, kBaselineReps, kCampaignT,
                                 derive_seed(kCampaignSeed, std::numeric_limits<std::uint64_t>::max()), threads);
    for (const auto& p : preds) {
        c.hits.push_back(count_inside(base.finals, p));
        c.references.push_back(static_cast<double>(c.hits.back()) / static_cast<double>(kBaselineReps));
    }
    if (std::find(c.references.begin(), c.references.end(), 0.0) != c.references.end()) {
        c.error = "baseline never reached a solution";
        return c;
    }
    SpscConfig sc = spsc_config(kCampaignN, 5, 15, kCampaignT, kCampaignSeed);
    sc.threads = 1;
    c.report = compare_policies(model, kCampaignN, kCampaignT, sc, kRepeats, preds, c.references, kCampaignSeed,
                                threads);
    c.ran = true;

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream summary(fs::path(out_dir) / "summary.csv", std::ios::binary);
        write_summary_csv(summary, c.report);
        std::ofstream repeats(fs::path(out_dir) / "repeats.csv", std::ios::binary);
        write_repeats_csv(repeats, c.report);
        std::ofstream baseline(fs::path(out_dir) / "baseline.csv", std::ios::binary);
        baseline << "solution,reference,hits,replications\n";
        for (std::size_t i = 0; i < preds.size(); ++i)
            baseline << preds[i].name() << ',' << format_real(c.references[i]) << ',' << c.hits[i] << ','
                     << kBaselineReps << '\n';
    }
    return c;
}

bool c8_detection(const Campaign& c, std::string& d) {
    if (!c.ran) {
        d = c.error;
        return false;
    }
    const auto& r = c.report;
    const bool coex = c.references[2] >= kCoexLo && c.references[2] <= kCoexHi;
    const bool s1 = r.spsc.detection_rates[0] > r.mc.detection_rates[0];
    const bool s2 = r.spsc.detection_rates[1] > r.mc.detection_rates[1];
    const double factor = r.mc.joint_detection_rate > 0 ? r.spsc.joint_detection_rate / r.mc.joint_detection_rate
                                                        : std::numeric_limits<double>::infinity();
    const bool joint = factor >= kJointFactor;
    const bool sig = r.joint_detection_p < kAlpha;
    d = "refs S1=" + fmt(c.references[0], 4) + " S2=" + fmt(c.references[1], 4) + " S3=" + fmt(c.references[2], 4) +
        (coex ? "" : " (S3 outside [0.95,0.99])") + "; detection MC->SPSC S1 " + fmt(r.mc.detection_rates[0], 3) +
        "->" + fmt(r.spsc.detection_rates[0], 3) + " S2 " + fmt(r.mc.detection_rates[1], 3) + "->" +
        fmt(r.spsc.detection_rates[1], 3) + " joint " + fmt(r.mc.joint_detection_rate, 3) + "->" +
        fmt(r.spsc.joint_detection_rate, 3) + " (x" + fmt(factor, 3) + ", p=" + fmt(r.joint_detection_p, 3) + ")";
    return coex && s1 && s2 && joint && sig;
}

bool c9_aggregate(const Campaign& c, std::string& d) {
    if (!c.ran) {
        d = c.error;
        return false;
    }
    const auto& r = c.report;
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    d = "mean aggregate relative error MC " + fmt(mean(r.mc.aggregate_errors), 4) + " SPSC " +
        fmt(mean(r.spsc.aggregate_errors), 4) + "; one-sided WMW p = " + fmt(r.wmw_aggregate.p_value, 4);
    return r.wmw_aggregate.p_value < kAlpha;
}

// ---------------------------------------------------------------------------

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "spsc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool c10_determinism(std::string& d) {
    const fs::path root = fs::temp_directory_path() / "spsc_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands{
        {"mc", "--n", "40", "--horizon", "200"},
        {"spsc", "--n", "40", "--horizon", "200", "--stages", "4", "--clusters", "10"},
        {"nreps", "--n0", "40", "--horizon", "200"},
        {"compare", "--n", "20", "--horizon", "150", "--stages", "3", "--clusters", "6", "--repeats", "6",
         "--references", "0.02,0.05,0.93"},
        {"sweep", "--horizon", "150", "--reps", "20", "--param", "prey_reproduce_prob=0.08,0.12"},
    };
    std::size_t files = 0, differing = 0, failed_runs = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<fs::path> dirs;
        for (const char* t : {"1", "2", "4"}) {
            auto args = commands[c];
            const fs::path dir = root / (args[0] + "_t" + t);
            args.insert(args.end(), {"--seed", "17", "--threads", t, "--out", dir.string()});
            if (cli(args) != 0) ++failed_runs;
            dirs.push_back(dir);
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            if (entry.path().extension() != ".csv") continue;
            ++files;
            const std::string ref = slurp(entry.path());
            for (std::size_t i = 1; i < dirs.size(); ++i)
                differing += slurp(dirs[i] / entry.path().filename()) == ref ? 0 : 1;
        }
    }
    fs::remove_all(root);
    d = std::to_string(commands.size()) + " commands x threads {1,2,4}: " + std::to_string(files) + " CSVs, " +
        std::to_string(differing) + " differing, " + std::to_string(failed_runs) + " failed runs";
    return differing == 0 && failed_runs == 0 && files > 0;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    std::string out_dir;
    std::vector<int> known_red;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--quick") {
            quick = true;
        } else if (a == "--out" && i + 1 < argc) {
            out_dir = argv[++i];
        } else if (a == "--known-red" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string id; std::getline(list, id, ',');) known_red.push_back(std::stoi(id));
        } else {
            std::cerr << "usage: acceptance [--quick] [--out DIR] [--known-red ID,...]\n";
            return 64;
        }
    }

    criterion(1, "sample-size golden values", c1_sample_size);
    criterion(2, "degenerate equivalence with MC", c2_degenerate);
    criterion(3, "path-sum oracle", c3_path_sum);
    criterion(4, "weight conservation", c4_conservation);
    criterion(5, "clone allocation", c5_allocation);
    criterion(6, "k-means properties", c6_kmeans);
    criterion(7, "WMW exact oracle", c7_wmw);

    if (quick) {
        std::cout << "SKIP  [8] rare-solution detection (--quick)\nSKIP  [9] aggregate error WMW (--quick)" << std::endl;
    } else {
        const auto start = std::chrono::steady_clock::now();
        const Campaign c = run_campaign(out_dir);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string d8, d9;
        const bool p8 = c8_detection(c, d8);
        const bool p9 = c9_aggregate(c, d9);
        report(8, "rare-solution detection, R=200", p8, d8, s);
        report(9, "aggregate error WMW, R=200", p9, d9, 0.0);
    }
    criterion(10, "thread-count determinism", c10_determinism);

    int unexpected = 0;
    std::string red;
    for (int id : failed) {
        const bool known = std::find(known_red.begin(), known_red.end(), id) != known_red.end();
        unexpected += known ? 0 : 1;
        red += (red.empty() ? "" : ",") + std::to_string(id) + (known ? "" : "!");
    }
    if (failed.empty()) std::cout << "ALL PASS" << std::endl;
    else std::cout << failed.size() << " FAILING [" << red << "], " << unexpected << " not known red" << std::endl;
    return unexpected;
}
