#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsc/sim.hpp"

namespace spsc::testing {

/// Lazy random walk on the integers; observables [position, steps_taken].
struct WalkState {
    std::int64_t position = 0;
    std::int64_t steps = 0;
};

class RandomWalkModel final : public TypedModel<WalkState> {
public:
    explicit RandomWalkModel(std::int64_t start = 0, std::int64_t fail_at = -1)
        : start_(start), fail_at_(fail_at) {}

    std::size_t observable_dimension() const override { return 2; }
    std::vector<std::string> observable_names() const override { return {"position", "steps"}; }

protected:
    WalkState initial_state(RandomStream& stream) const override {
        return WalkState{start_ + static_cast<std::int64_t>(stream.uniform_index(3)) - 1, 0};
    }
    void step_state(WalkState& s, RandomStream& stream) const override {
        if (s.steps == fail_at_) throw std::runtime_error("walk exploded");
        s.position += static_cast<std::int64_t>(stream.uniform_index(3)) - 1;
        ++s.steps;
    }
    ObservableVector observe_state(const WalkState& s) const override {
        return ObservableVector({static_cast<double>(s.position), static_cast<double>(s.steps)});
    }

private:
    std::int64_t start_;
    std::int64_t fail_at_;
};

/// Real-valued drift walk; observables [position]. Finals are almost surely
/// distinct, so k-means with k = N isolates every replication.
class DiffusionModel final : public TypedModel<double> {
public:
    std::size_t observable_dimension() const override { return 1; }
    std::vector<std::string> observable_names() const override { return {"position"}; }

protected:
    double initial_state(RandomStream& stream) const override { return stream.uniform01() - 0.5; }
    void step_state(double& x, RandomStream& stream) const override { x += stream.uniform01() - 0.5; }
    ObservableVector observe_state(const double& x) const override { return ObservableVector({x}); }
};

}  // namespace spsc::testing
