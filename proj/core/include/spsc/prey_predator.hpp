#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spsc/sim.hpp"

namespace spsc {

/// Grass / prey / predator parameters. Defaults are the tuned desk-scale
/// configuration used by the comparison harness: at T=1000 coexistence is
/// the dominant outcome while both extinction outcomes stay rare.
struct PreyPredatorConfig {
    std::int32_t grid_width = 23;
    std::int32_t grid_height = 23;
    std::int32_t initial_prey = 64;
    std::int32_t initial_predators = 24;
    double prey_energy_gain = 8.0;
    double predator_energy_gain = 8.0;
    double prey_reproduce_prob = 0.12;
    double predator_reproduce_prob = 0.2;
    std::int32_t grass_regrowth_steps = 10;
    /// Initial energies are uniform in (0, initial_energy_max * species gain].
    double initial_energy_max = 2.0;
    double move_energy_cost = 1.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    std::int64_t cell_count() const { return std::int64_t{grid_width} * grid_height; }
};

enum class Species : std::uint8_t { prey = 0, predator = 1 };

struct Agent {
    Species species;
    std::int32_t x;
    std::int32_t y;
    double energy;

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct GrassCell {
    bool grown = true;
    std::int32_t regrow_counter = 0;

    friend bool operator==(const GrassCell&, const GrassCell&) = default;
};

struct PreyPredatorState {
    std::vector<Agent> agents;
    std::vector<GrassCell> grass;  // row-major, grid_width * grid_height
    std::int64_t step_count = 0;

    friend bool operator==(const PreyPredatorState&, const PreyPredatorState&) = default;
};

/// Per-step bookkeeping, filled by pp_step when requested.
struct StepEvents {
    std::int64_t prey_births = 0;
    std::int64_t predator_births = 0;
    std::int64_t prey_eaten = 0;
    std::int64_t prey_starved = 0;
    std::int64_t predators_starved = 0;
};

PreyPredatorState pp_initialize(const PreyPredatorConfig& config, RandomStream& stream);

/// One synchronous round: move, graze, hunt, reproduce, cull, regrow.
/// Predators only reproduce on a step in which they fed.
void pp_step(const PreyPredatorConfig& config, PreyPredatorState& state, RandomStream& stream,
             StepEvents* events = nullptr);

/// [prey_count, predator_count, grown_grass_count]
ObservableVector pp_observe(const PreyPredatorState& state);

class PreyPredatorModel final : public TypedModel<PreyPredatorState> {
public:
    explicit PreyPredatorModel(PreyPredatorConfig config);

    const PreyPredatorConfig& config() const noexcept { return config_; }

    std::size_t observable_dimension() const override { return 3; }
    std::vector<std::string> observable_names() const override;

protected:
    PreyPredatorState initial_state(RandomStream& stream) const override;
    void step_state(PreyPredatorState& state, RandomStream& stream) const override;
    ObservableVector observe_state(const PreyPredatorState& state) const override;

private:
    PreyPredatorConfig config_;
};

}  // namespace spsc
