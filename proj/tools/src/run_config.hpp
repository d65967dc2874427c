#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spsc/policy_spsc.hpp"
#include "spsc/prey_predator.hpp"

namespace spsc::cli {

/// Bad flags, unreadable or malformed config files, invalid values. Maps to
/// exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    PreyPredatorConfig model;

    std::size_t n = 50;
    std::int64_t horizon = 1000;
    std::size_t stages = 5;
    std::size_t clusters = 15;
    std::vector<std::int64_t> stage_boundaries;
    std::size_t kmeans_max_iter = 100;
    bool standardize = false;
    std::uint64_t seed = 0;
    std::optional<std::size_t> repeats;        // default depends on ci_mode
    std::optional<std::size_t> baseline_reps;  // default depends on ci_mode
    bool ci_mode = false;
    double epsilon = 0.05;
    double alpha = 0.05;
    std::size_t n0 = 150;
    std::vector<double> references;  // skips the baseline when set
    unsigned threads = 0;            // 0 = available parallelism

    std::string out_dir = "out";

    std::size_t effective_repeats() const { return repeats.value_or(ci_mode ? 200 : 1000); }
    std::size_t effective_baseline_reps() const { return baseline_reps.value_or(ci_mode ? 5000 : 30000); }
    unsigned effective_threads() const;

    /// Throws ConfigError.
    void validate() const;
    SpscConfig spsc_config() const;
};

/// Overlays the `model`, `policy` and `output` sections of `doc` onto
/// `config`. Unknown keys and type mismatches raise ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& doc);

RunConfig load_config_file(const std::string& path);

/// Every result-affecting field; worker count is left out so the echo does
/// not depend on it.
nlohmann::json to_json(const RunConfig& config);

/// Sets one model field by its config key. Returns false for unknown keys.
bool set_model_field(PreyPredatorConfig& model, const std::string& key, double value);
std::vector<std::string> model_field_names();

}  // namespace spsc::cli
