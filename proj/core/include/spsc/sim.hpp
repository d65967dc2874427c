#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spsc/random_stream.hpp"

namespace spsc {

/// Model observables at one time step. Fixed dimension per model; values finite.
class ObservableVector {
public:
    ObservableVector() = default;
    explicit ObservableVector(std::vector<double> values);
    ObservableVector(std::initializer_list<double> values);

    std::size_t dimension() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const ObservableVector&, const ObservableVector&) = default;

private:
    std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Probability mass carried by a replication. Kept as an exact rational so
/// that conservation and the degenerate-policy equivalences hold exactly.
using Weight = boost::multiprecision::cpp_rational;

inline double to_double(const Weight& w) { return w.convert_to<double>(); }

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModelState {
public:
    virtual ~ModelState() = default;
    virtual std::unique_ptr<ModelState> clone() const = 0;
};

/// Black-box discrete-time stochastic simulation.
///
/// A model is immutable once constructed: every operation is const, and
/// step() sees nothing but the current state and the replication's stream.
/// One model instance may therefore be shared by replications running on
/// different threads.
class SimulationModel {
public:
    virtual ~SimulationModel() = default;

    virtual std::size_t observable_dimension() const = 0;
    virtual std::vector<std::string> observable_names() const = 0;

    virtual std::unique_ptr<ModelState> initialize(RandomStream& stream) const = 0;
    virtual void step(ModelState& state, RandomStream& stream) const = 0;
    virtual ObservableVector observe(const ModelState& state) const = 0;
};

/// Adapter that lets a model work on a plain copyable State type.
template <class State>
class TypedModel : public SimulationModel {
public:
    class Box final : public ModelState {
    public:
        explicit Box(State s) : value(std::move(s)) {}
        std::unique_ptr<ModelState> clone() const override { return std::make_unique<Box>(value); }
        State value;
    };

    std::unique_ptr<ModelState> initialize(RandomStream& stream) const final {
        return std::make_unique<Box>(initial_state(stream));
    }
    void step(ModelState& state, RandomStream& stream) const final {
        step_state(unbox(state), stream);
    }
    ObservableVector observe(const ModelState& state) const final {
        return observe_state(unbox(state));
    }

    static State& unbox(ModelState& s) { return dynamic_cast<Box&>(s).value; }
    static const State& unbox(const ModelState& s) { return dynamic_cast<const Box&>(s).value; }

protected:
    virtual State initial_state(RandomStream& stream) const = 0;
    virtual void step_state(State& state, RandomStream& stream) const = 0;
    virtual ObservableVector observe_state(const State& state) const = 0;
};

/// One independently seeded simulation instance.
class Replication {
public:
    Replication(std::unique_ptr<ModelState> state, RandomStream stream, Weight weight,
                std::int64_t time, std::uint64_t lineage_id);

    Replication(Replication&&) noexcept = default;
    Replication& operator=(Replication&&) noexcept = default;

    const ModelState& state() const { return *state_; }
    ModelState& state() { return *state_; }
    std::int64_t time() const noexcept { return time_; }
    const Weight& weight() const noexcept { return weight_; }
    void set_weight(Weight w);
    const RandomStream& stream() const noexcept { return stream_; }
    RandomStream& stream() noexcept { return stream_; }
    std::uint64_t lineage_id() const noexcept { return lineage_id_; }

private:
    friend void advance(Replication&, const SimulationModel&, std::int64_t);

    std::unique_ptr<ModelState> state_;
    RandomStream stream_;
    Weight weight_;
    std::int64_t time_;
    std::uint64_t lineage_id_;
};

/// Fresh replication at t=0 whose stream and lineage id are (master_seed, stream_id).
Replication make_replication(const SimulationModel& model, std::uint64_t master_seed,
                             std::uint64_t stream_id, Weight weight);

/// Runs `steps` model steps. Model failures are rethrown as SimulationError
/// naming the lineage id and the time at which the step failed.
void advance(Replication& replication, const SimulationModel& model, std::int64_t steps);

/// advance() with the horizon precondition time + steps <= horizon checked.
void advance(Replication& replication, const SimulationModel& model, std::int64_t steps,
             std::int64_t horizon);

/// Deep copy of state and time with a fresh stream (master_seed, new_stream_id).
/// The clone's lineage id is new_stream_id.
Replication deep_clone(const Replication& parent, std::uint64_t new_stream_id, Weight new_weight);

/// Allocates stream ids for one policy run. Ids are never reused within a run.
class StreamIdCounter {
public:
    explicit StreamIdCounter(std::uint64_t first = 0) : next_(first) {}
    std::uint64_t next() noexcept { return next_++; }
    std::uint64_t peek() const noexcept { return next_; }

private:
    std::uint64_t next_;
};

/// Stream ids with the top bit set are reserved for policy-internal
/// randomness (clustering seeds, remainder allocation).
constexpr std::uint64_t policy_stream_id(std::uint64_t index) noexcept {
    return (std::uint64_t{1} << 63) | index;
}

}  // namespace spsc
