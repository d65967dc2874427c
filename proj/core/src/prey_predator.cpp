#include "spsc/prey_predator.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace spsc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("PreyPredatorConfig: ") + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

constexpr std::array<std::array<std::int32_t, 2>, 8> kMoore{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

// Scratch buffers reused across steps on one thread.
struct StepScratch {
    std::vector<std::int32_t> cell_start;  // cells + 1 offsets
    std::vector<std::int32_t> cell_live;   // live prey remaining per cell
    std::vector<std::int32_t> prey_slots;  // prey indices grouped by cell
    std::vector<std::uint8_t> removed;
    std::vector<std::uint8_t> fed;
};

StepScratch& scratch() {
    thread_local StepScratch s;
    return s;
}

}  // namespace

void PreyPredatorConfig::validate() const {
    require(grid_width > 0 && grid_height > 0, "grid must have positive area");
    require(initial_prey >= 0 && initial_predators >= 0, "initial populations must be non-negative");
    require(initial_prey <= 10 * cell_count() && initial_predators <= 10 * cell_count(),
            "initial populations exceed 10 x cell count");
    require(prey_energy_gain > 0.0 && predator_energy_gain > 0.0, "energy gains must be positive");
    require(is_probability(prey_reproduce_prob) && is_probability(predator_reproduce_prob),
            "reproduce probabilities must lie in [0,1]");
    require(grass_regrowth_steps > 0, "grass_regrowth_steps must be positive");
    require(initial_energy_max > 0.0, "initial_energy_max must be positive");
    require(move_energy_cost >= 0.0, "move_energy_cost must be non-negative");
}

PreyPredatorState pp_initialize(const PreyPredatorConfig& config, RandomStream& stream) {
    config.validate();
    PreyPredatorState state;
    state.grass.assign(static_cast<std::size_t>(config.cell_count()), GrassCell{});
    state.agents.reserve(static_cast<std::size_t>(config.initial_prey + config.initial_predators));

    auto place = [&](Species species, std::int32_t count, double gain) {
        const double max_energy = config.initial_energy_max * gain;
        for (std::int32_t i = 0; i < count; ++i) {
            Agent a{};
            a.species = species;
            a.x = static_cast<std::int32_t>(stream.uniform_index(static_cast<std::uint64_t>(config.grid_width)));
            a.y = static_cast<std::int32_t>(stream.uniform_index(static_cast<std::uint64_t>(config.grid_height)));
            a.energy = max_energy * (1.0 - stream.uniform01());  // (0, max]
            state.agents.push_back(a);
        }
    };
    place(Species::prey, config.initial_prey, config.prey_energy_gain);
    place(Species::predator, config.initial_predators, config.predator_energy_gain);
    return state;
}

void pp_step(const PreyPredatorConfig& config, PreyPredatorState& state, RandomStream& stream,
             StepEvents* events) {
    const std::int32_t width = config.grid_width;
    const std::int32_t height = config.grid_height;
    const auto cells = static_cast<std::size_t>(config.cell_count());
    auto& agents = state.agents;
    const std::size_t initial_count = agents.size();
    StepEvents ev;

    // (1) move on the torus
    for (auto& a : agents) {
        const auto& d = kMoore[stream.uniform_index(kMoore.size())];
        a.x += d[0];
        a.y += d[1];
        if (a.x < 0) a.x += width; else if (a.x >= width) a.x -= width;
        if (a.y < 0) a.y += height; else if (a.y >= height) a.y -= height;
        a.energy -= config.move_energy_cost;
    }

    // (2) graze
    for (auto& a : agents) {
        if (a.species != Species::prey) continue;
        auto& g = state.grass[static_cast<std::size_t>(a.y) * width + a.x];
        if (g.grown) {
            g.grown = false;
            g.regrow_counter = config.grass_regrowth_steps;
            a.energy += config.prey_energy_gain;
        }
    }

    // (3) hunt: each predator eats at most one uniformly chosen prey in its cell
    auto& s = scratch();
    s.removed.assign(initial_count, 0);
    s.fed.assign(initial_count, 0);
    s.cell_start.assign(cells + 1, 0);
    for (const auto& a : agents) {
        if (a.species == Species::prey) ++s.cell_start[static_cast<std::size_t>(a.y) * width + a.x + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) s.cell_start[c + 1] += s.cell_start[c];
    s.cell_live.assign(cells, 0);
    s.prey_slots.resize(static_cast<std::size_t>(s.cell_start[cells]));
    for (std::size_t i = 0; i < initial_count; ++i) {
        const auto& a = agents[i];
        if (a.species != Species::prey) continue;
        const std::size_t c = static_cast<std::size_t>(a.y) * width + a.x;
        s.prey_slots[static_cast<std::size_t>(s.cell_start[c] + s.cell_live[c]++)] = static_cast<std::int32_t>(i);
    }
    for (std::size_t i = 0; i < initial_count; ++i) {
        auto& a = agents[i];
        if (a.species != Species::predator) continue;
        const std::size_t c = static_cast<std::size_t>(a.y) * width + a.x;
        std::int32_t& live = s.cell_live[c];
        if (live == 0) continue;
        const auto pick = static_cast<std::int32_t>(stream.uniform_index(static_cast<std::uint64_t>(live)));
        std::int32_t* seg = s.prey_slots.data() + s.cell_start[c];
        const std::int32_t victim = seg[pick];
        seg[pick] = seg[live - 1];
        --live;
        s.removed[static_cast<std::size_t>(victim)] = 1;
        s.fed[i] = 1;
        a.energy += config.predator_energy_gain;
        ++ev.prey_eaten;
    }

    // (4) reproduce; offspring share the parent's cell and half its energy
    for (std::size_t i = 0; i < initial_count; ++i) {
        if (s.removed[i] || agents[i].energy <= 0.0) continue;
        const bool is_prey = agents[i].species == Species::prey;
        if (!is_prey && !s.fed[i]) continue;
        const double p = is_prey ? config.prey_reproduce_prob : config.predator_reproduce_prob;
        if (!stream.bernoulli(p)) continue;
        agents[i].energy *= 0.5;
        agents.push_back(agents[i]);
        if (is_prey) ++ev.prey_births; else ++ev.predator_births;
    }

    // (5) cull eaten and starved agents, keeping order
    std::size_t out = 0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const bool eaten = i < initial_count && s.removed[i];
        if (eaten) continue;
        if (agents[i].energy <= 0.0) {
            if (agents[i].species == Species::prey) ++ev.prey_starved; else ++ev.predators_starved;
            continue;
        }
        agents[out++] = agents[i];
    }
    agents.resize(out);

    // (6) regrow
    for (auto& g : state.grass) {
        if (g.grown) continue;
        if (--g.regrow_counter <= 0) {
            g.regrow_counter = 0;
            g.grown = true;
        }
    }

    ++state.step_count;
    if (events) *events = ev;
}

ObservableVector pp_observe(const PreyPredatorState& state) {
    double prey = 0.0;
    double predators = 0.0;
    for (const auto& a : state.agents) {
        if (a.species == Species::prey) prey += 1.0; else predators += 1.0;
    }
    double grass = 0.0;
    for (const auto& g : state.grass) grass += g.grown ? 1.0 : 0.0;
    return ObservableVector({prey, predators, grass});
}

PreyPredatorModel::PreyPredatorModel(PreyPredatorConfig config) : config_(config) {
    config_.validate();
}

std::vector<std::string> PreyPredatorModel::observable_names() const {
    return {"prey", "predators", "grass"};
}

PreyPredatorState PreyPredatorModel::initial_state(RandomStream& stream) const {
    return pp_initialize(config_, stream);
}

void PreyPredatorModel::step_state(PreyPredatorState& state, RandomStream& stream) const {
    pp_step(config_, state, stream);
}

ObservableVector PreyPredatorModel::observe_state(const PreyPredatorState& state) const {
    return pp_observe(state);
}

}  // namespace spsc
