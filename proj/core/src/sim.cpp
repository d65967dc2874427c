#include "spsc/sim.hpp"

#include <cmath>
#include <sstream>

namespace spsc {

namespace {

void require_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("ObservableVector: non-finite value");
    }
}

}  // namespace

ObservableVector::ObservableVector(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_);
}

ObservableVector::ObservableVector(std::initializer_list<double> values) : values_(values) {
    require_finite(values_);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

Replication::Replication(std::unique_ptr<ModelState> state, RandomStream stream, Weight weight,
                         std::int64_t time, std::uint64_t lineage_id)
    : state_(std::move(state)), stream_(std::move(stream)), weight_(0), time_(time), lineage_id_(lineage_id) {
    if (!state_) throw std::invalid_argument("Replication: null state");
    if (time_ < 0) throw std::invalid_argument("Replication: negative time");
    set_weight(std::move(weight));
}

void Replication::set_weight(Weight w) {
    if (w < 0 || w > 1) throw std::invalid_argument("Replication: weight outside [0,1]");
    weight_ = std::move(w);
}

Replication make_replication(const SimulationModel& model, std::uint64_t master_seed,
                             std::uint64_t stream_id, Weight weight) {
    RandomStream stream(master_seed, stream_id);
    auto state = model.initialize(stream);
    return Replication(std::move(state), std::move(stream), std::move(weight), 0, stream_id);
}

void advance(Replication& replication, const SimulationModel& model, std::int64_t steps) {
    if (steps < 1) throw std::invalid_argument("advance: steps must be >= 1");
    for (std::int64_t s = 0; s < steps; ++s) {
        try {
            model.step(*replication.state_, replication.stream_);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "replication " << replication.lineage_id_ << " failed at t=" << replication.time_
                << ": " << e.what();
            throw SimulationError(msg.str());
        }
        ++replication.time_;
    }
}

void advance(Replication& replication, const SimulationModel& model, std::int64_t steps,
             std::int64_t horizon) {
    if (steps >= 1 && replication.time() + steps > horizon) {
        throw std::invalid_argument("advance: time + steps exceeds horizon");
    }
    advance(replication, model, steps);
}

Replication deep_clone(const Replication& parent, std::uint64_t new_stream_id, Weight new_weight) {
    return Replication(parent.state().clone(), RandomStream(parent.stream().master_seed(), new_stream_id),
                       std::move(new_weight), parent.time(), new_stream_id);
}

}  // namespace spsc
