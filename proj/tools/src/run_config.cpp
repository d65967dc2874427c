#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "spsc/parallel.hpp"

namespace spsc::cli {

namespace {

using nlohmann::json;

struct ModelField {
    std::function<void(PreyPredatorConfig&, double)> set;
    std::function<double(const PreyPredatorConfig&)> get;
    bool integral;
};

template <typename T>
ModelField field(T PreyPredatorConfig::*member) {
    return ModelField{[member](PreyPredatorConfig& c, double v) { c.*member = static_cast<T>(v); },
                      [member](const PreyPredatorConfig& c) { return static_cast<double>(c.*member); },
                      std::is_integral_v<T>};
}

const std::map<std::string, ModelField>& model_fields() {
    static const std::map<std::string, ModelField> fields{
        {"grid_width", field(&PreyPredatorConfig::grid_width)},
        {"grid_height", field(&PreyPredatorConfig::grid_height)},
        {"initial_prey", field(&PreyPredatorConfig::initial_prey)},
        {"initial_predators", field(&PreyPredatorConfig::initial_predators)},
        {"prey_energy_gain", field(&PreyPredatorConfig::prey_energy_gain)},
        {"predator_energy_gain", field(&PreyPredatorConfig::predator_energy_gain)},
        {"prey_reproduce_prob", field(&PreyPredatorConfig::prey_reproduce_prob)},
        {"predator_reproduce_prob", field(&PreyPredatorConfig::predator_reproduce_prob)},
        {"grass_regrowth_steps", field(&PreyPredatorConfig::grass_regrowth_steps)},
        {"initial_energy_max", field(&PreyPredatorConfig::initial_energy_max)},
        {"move_energy_cost", field(&PreyPredatorConfig::move_energy_cost)},
    };
    return fields;
}

template <typename T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: wrong type for '" + key + "'");
    }
}

std::size_t get_count(const json& v, const std::string& key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError("config: '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

unsigned RunConfig::effective_threads() const { return threads == 0 ? default_thread_count() : threads; }

bool set_model_field(PreyPredatorConfig& model, const std::string& key, double value) {
    const auto it = model_fields().find(key);
    if (it == model_fields().end()) return false;
    if (it->second.integral && value != std::floor(value)) {
        throw ConfigError("config: '" + key + "' must be an integer");
    }
    it->second.set(model, value);
    return true;
}

std::vector<std::string> model_field_names() {
    std::vector<std::string> names;
    for (const auto& [name, f] : model_fields()) names.push_back(name);
    return names;
}

void RunConfig::validate() const {
    try {
        model.validate();
        spsc_config().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (n0 < 2) throw ConfigError("n0 must be >= 2");
    if (effective_repeats() < 2) throw ConfigError("repeats must be >= 2");
    if (effective_baseline_reps() < 1) throw ConfigError("baseline_reps must be >= 1");
    if (!references.empty() && references.size() != 3) throw ConfigError("references needs one value per solution (3)");
    for (double r : references) {
        if (!(r > 0.0 && r <= 1.0)) throw ConfigError("references must lie in (0,1]");
    }
    if (out_dir.empty()) throw ConfigError("output directory must not be empty");
}

SpscConfig RunConfig::spsc_config() const {
    SpscConfig c;
    c.n = n;
    c.stages = stages;
    c.clusters = clusters;
    c.horizon = horizon;
    c.stage_boundaries = stage_boundaries;
    c.master_seed = seed;
    c.kmeans_max_iter = kmeans_max_iter;
    c.standardize = standardize;
    c.threads = effective_threads();
    return c;
}

void apply_json(RunConfig& config, const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [section, body] : doc.items()) {
        if (section != "model" && section != "policy" && section != "output") {
            throw ConfigError("config: unknown section '" + section + "'");
        }
        if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    }

    if (doc.contains("model")) {
        for (const auto& [key, value] : doc["model"].items()) {
            if (!value.is_number()) throw ConfigError("config: model." + key + " must be a number");
            if (!set_model_field(config.model, key, value.get<double>())) {
                throw ConfigError("config: unknown key model." + key);
            }
        }
    }

    if (doc.contains("policy")) {
        for (const auto& [key, value] : doc["policy"].items()) {
            if (key == "n") config.n = get_count(value, key);
            else if (key == "horizon") config.horizon = get_as<std::int64_t>(value, key);
            else if (key == "stages") config.stages = get_count(value, key);
            else if (key == "clusters") config.clusters = get_count(value, key);
            else if (key == "stage_boundaries") config.stage_boundaries = get_as<std::vector<std::int64_t>>(value, key);
            else if (key == "kmeans_max_iter") config.kmeans_max_iter = get_count(value, key);
            else if (key == "standardize") config.standardize = get_as<bool>(value, key);
            else if (key == "seed") config.seed = get_as<std::uint64_t>(value, key);
            else if (key == "repeats") config.repeats = get_count(value, key);
            else if (key == "baseline_reps") config.baseline_reps = get_count(value, key);
            else if (key == "ci_mode") config.ci_mode = get_as<bool>(value, key);
            else if (key == "epsilon") config.epsilon = get_as<double>(value, key);
            else if (key == "alpha") config.alpha = get_as<double>(value, key);
            else if (key == "n0") config.n0 = get_count(value, key);
            else if (key == "references") config.references = get_as<std::vector<double>>(value, key);
            else if (key == "threads") config.threads = static_cast<unsigned>(get_count(value, key));
            else throw ConfigError("config: unknown key policy." + key);
        }
    }

    if (doc.contains("output")) {
        for (const auto& [key, value] : doc["output"].items()) {
            if (key == "dir") config.out_dir = get_as<std::string>(value, key);
            else throw ConfigError("config: unknown key output." + key);
        }
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    RunConfig config;
    apply_json(config, doc);
    return config;
}

json to_json(const RunConfig& config) {
    json model = json::object();
    for (const auto& [name, f] : model_fields()) {
        const double v = f.get(config.model);
        if (f.integral) {
            model[name] = static_cast<std::int64_t>(v);
        } else {
            model[name] = v;
        }
    }
    json policy = {
        {"n", config.n},
        {"horizon", config.horizon},
        {"stages", config.stages},
        {"clusters", config.clusters},
        {"stage_boundaries", config.spsc_config().boundaries()},
        {"kmeans_max_iter", config.kmeans_max_iter},
        {"standardize", config.standardize},
        {"seed", config.seed},
        {"repeats", config.effective_repeats()},
        {"baseline_reps", config.effective_baseline_reps()},
        {"ci_mode", config.ci_mode},
        {"epsilon", config.epsilon},
        {"alpha", config.alpha},
        {"n0", config.n0},
        {"references", config.references},
    };
    return json{{"model", model}, {"policy", policy}, {"output", {{"dir", config.out_dir}}}};
}

}  // namespace spsc::cli
