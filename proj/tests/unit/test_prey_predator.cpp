#include <gtest/gtest.h>

#include <algorithm>

#include "spsc/prey_predator.hpp"

using namespace spsc;

namespace {

std::int64_t count_species(const PreyPredatorState& s, Species sp) {
    return std::count_if(s.agents.begin(), s.agents.end(), [&](const Agent& a) { return a.species == sp; });
}

PreyPredatorConfig small_config() {
    PreyPredatorConfig c;
    c.grid_width = 10;
    c.grid_height = 10;
    c.initial_prey = 100;
    c.initial_predators = 50;
    return c;
}

}  // namespace

TEST(PreyPredatorConfig, RejectsInvalidFields) {
    auto c = small_config();
    c.grid_width = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.prey_reproduce_prob = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.initial_prey = 1001;  // > 10 x 100 cells
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.grass_regrowth_steps = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_NO_THROW(small_config().validate());
    EXPECT_NO_THROW(PreyPredatorConfig{}.validate());
}

TEST(PpInitialize, EmptyPopulations) {
    auto c = small_config();
    c.initial_prey = 0;
    c.initial_predators = 0;
    RandomStream s(1, 0);
    const auto st = pp_initialize(c, s);
    EXPECT_TRUE(st.agents.empty());
    EXPECT_EQ(st.grass.size(), 100u);
    EXPECT_TRUE(std::all_of(st.grass.begin(), st.grass.end(), [](const GrassCell& g) { return g.grown; }));
}

TEST(PpInitialize, CountsEnergiesAndPositions) {
    const auto c = small_config();
    RandomStream s(1, 0);
    const auto st = pp_initialize(c, s);
    EXPECT_EQ(count_species(st, Species::prey), 100);
    EXPECT_EQ(count_species(st, Species::predator), 50);
    for (const auto& a : st.agents) {
        const double gain = a.species == Species::prey ? c.prey_energy_gain : c.predator_energy_gain;
        EXPECT_GT(a.energy, 0.0);
        EXPECT_LE(a.energy, c.initial_energy_max * gain);
        EXPECT_GE(a.x, 0);
        EXPECT_LT(a.x, c.grid_width);
        EXPECT_GE(a.y, 0);
        EXPECT_LT(a.y, c.grid_height);
    }
}

TEST(PpInitialize, SameSeedSamePlacement) {
    const auto c = small_config();
    RandomStream a(5, 9);
    RandomStream b(5, 9);
    EXPECT_EQ(pp_initialize(c, a), pp_initialize(c, b));
}

TEST(PpInitialize, ZeroAreaGridRejected) {
    auto c = small_config();
    c.grid_height = 0;
    RandomStream s(1, 0);
    EXPECT_THROW(pp_initialize(c, s), std::invalid_argument);
}

TEST(PpStep, EmptyWorldOnlyRegrowsGrass) {
    auto c = small_config();
    c.grass_regrowth_steps = 5;
    PreyPredatorState st;
    st.grass.assign(100, GrassCell{});
    st.grass[7] = GrassCell{false, 3};
    st.grass[8] = GrassCell{false, 1};
    RandomStream s(1, 0);
    pp_step(c, st, s);
    EXPECT_TRUE(st.agents.empty());
    EXPECT_EQ(st.grass[7], (GrassCell{false, 2}));
    EXPECT_EQ(st.grass[8], (GrassCell{true, 0}));
    EXPECT_EQ(st.step_count, 1);
}

TEST(PpStep, LonePreyWithoutDeathSourcesPersists) {
    auto c = small_config();
    c.initial_prey = 1;
    c.initial_predators = 0;
    c.move_energy_cost = 0.0;
    c.prey_reproduce_prob = 0.0;
    RandomStream s(3, 0);
    auto st = pp_initialize(c, s);
    for (int t = 0; t < 500; ++t) {
        pp_step(c, st, s);
        ASSERT_EQ(st.agents.size(), 1u);
    }
}

TEST(PpStep, PredatorsNeverIncreaseWithoutPrey) {
    // Property over random prey-free worlds: with nothing to eat, predators
    // cannot breed.
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        RandomStream gen(1000 + seed, 0);
        PreyPredatorConfig c;
        c.grid_width = 3 + static_cast<std::int32_t>(gen.uniform_index(20));
        c.grid_height = 3 + static_cast<std::int32_t>(gen.uniform_index(20));
        c.initial_prey = 0;
        c.initial_predators = static_cast<std::int32_t>(gen.uniform_index(200));
        c.predator_reproduce_prob = gen.uniform01();
        c.predator_energy_gain = 1.0 + 30.0 * gen.uniform01();
        c.move_energy_cost = 0.5 * gen.uniform01();
        RandomStream s(seed, 1);
        auto st = pp_initialize(c, s);
        auto prev = count_species(st, Species::predator);
        for (int t = 0; t < 100; ++t) {
            pp_step(c, st, s);
            const auto now = count_species(st, Species::predator);
            ASSERT_LE(now, prev) << "seed " << seed << " t " << t;
            prev = now;
        }
    }
}

TEST(PpStep, InvariantsAndBookkeepingAlongTrajectory) {
    PreyPredatorConfig c;
    RandomStream s(21, 4);
    auto st = pp_initialize(c, s);
    for (int t = 0; t < 300; ++t) {
        const auto prey0 = count_species(st, Species::prey);
        const auto pred0 = count_species(st, Species::predator);
        StepEvents ev;
        pp_step(c, st, s, &ev);
        EXPECT_EQ(count_species(st, Species::prey), prey0 + ev.prey_births - ev.prey_eaten - ev.prey_starved);
        EXPECT_EQ(count_species(st, Species::predator), pred0 + ev.predator_births - ev.predators_starved);
        for (const auto& a : st.agents) {
            ASSERT_GT(a.energy, 0.0);
            ASSERT_TRUE(a.x >= 0 && a.x < c.grid_width && a.y >= 0 && a.y < c.grid_height);
        }
        for (const auto& g : st.grass) {
            ASSERT_GE(g.regrow_counter, 0);
            ASSERT_LE(g.regrow_counter, c.grass_regrowth_steps);
            if (g.grown) ASSERT_EQ(g.regrow_counter, 0);
        }
    }
}

TEST(PpStep, DeterministicTrajectory) {
    PreyPredatorConfig c;
    RandomStream a(2, 2);
    RandomStream b(2, 2);
    auto sa = pp_initialize(c, a);
    auto sb = pp_initialize(c, b);
    for (int t = 0; t < 200; ++t) {
        pp_step(c, sa, a);
        pp_step(c, sb, b);
    }
    EXPECT_EQ(sa, sb);
}

TEST(PpObserve, EmptyWorld) {
    PreyPredatorState st;
    st.grass.assign(100, GrassCell{});
    EXPECT_EQ(pp_observe(st), (ObservableVector{0.0, 0.0, 100.0}));
}

TEST(PpObserve, MatchesInitialization) {
    RandomStream s(4, 4);
    const auto st = pp_initialize(small_config(), s);
    const auto obs = pp_observe(st);
    EXPECT_EQ(obs.dimension(), 3u);
    EXPECT_EQ(obs[0], 100.0);
    EXPECT_EQ(obs[1], 50.0);
    EXPECT_EQ(obs[2], 100.0);
}

TEST(PpObserve, MatchesDirectCount) {
    PreyPredatorConfig c;
    RandomStream s(8, 1);
    auto st = pp_initialize(c, s);
    for (int t = 0; t < 120; ++t) {
        pp_step(c, st, s);
        if (t % 10 != 0) continue;
        std::int64_t prey = 0, pred = 0, grass = 0;
        for (const auto& a : st.agents) (a.species == Species::prey ? prey : pred) += 1;
        for (const auto& g : st.grass) grass += g.grown;
        const auto obs = pp_observe(st);
        EXPECT_EQ(obs[0], static_cast<double>(prey));
        EXPECT_EQ(obs[1], static_cast<double>(pred));
        EXPECT_EQ(obs[2], static_cast<double>(grass));
    }
}

TEST(PreyPredatorModel, ImplementsModelContract) {
    PreyPredatorModel model{small_config()};
    EXPECT_EQ(model.observable_dimension(), 3u);
    EXPECT_EQ(model.observable_names(), (std::vector<std::string>{"prey", "predators", "grass"}));
    auto rep = make_replication(model, 1, 0, Weight(1));
    EXPECT_EQ(model.observe(rep.state())[0], 100.0);
    advance(rep, model, 5);
    EXPECT_EQ(TypedModel<PreyPredatorState>::unbox(rep.state()).step_count, 5);
}
