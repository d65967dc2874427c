#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spsc/sim.hpp"

namespace spsc {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Region of observable space: a conjunction of closed intervals, one
/// optional constraint per dimension.
class SolutionPredicate {
public:
    SolutionPredicate(std::string name, std::vector<std::optional<Interval>> constraints);

    /// Unconstrained predicate over `dimension` observables.
    static SolutionPredicate whole_space(std::size_t dimension);
    /// Predicate no vector satisfies.
    static SolutionPredicate empty(std::size_t dimension);

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::optional<Interval>>& constraints() const noexcept { return constraints_; }

    bool contains(const ObservableVector& x) const;
    bool operator()(const ObservableVector& x) const { return contains(x); }

private:
    std::string name_;
    std::vector<std::optional<Interval>> constraints_;
    bool never_ = false;
};

/// S1 (both extinct), S2 (predators extinct, prey alive), S3 (coexistence)
/// over the [prey, predators, grass] layout.
std::array<SolutionPredicate, 3> builtin_solutions();

}  // namespace spsc
