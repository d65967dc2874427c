#include "spsc/solution.hpp"

#include <stdexcept>

namespace spsc {

SolutionPredicate::SolutionPredicate(std::string name, std::vector<std::optional<Interval>> constraints)
    : name_(std::move(name)), constraints_(std::move(constraints)) {
    for (const auto& c : constraints_) {
        if (c && !(c->lo <= c->hi)) throw std::invalid_argument("SolutionPredicate: lo > hi in " + name_);
    }
}

SolutionPredicate SolutionPredicate::whole_space(std::size_t dimension) {
    return SolutionPredicate("whole", std::vector<std::optional<Interval>>(dimension));
}

SolutionPredicate SolutionPredicate::empty(std::size_t dimension) {
    SolutionPredicate p("empty", std::vector<std::optional<Interval>>(dimension));
    p.never_ = true;
    return p;
}

bool SolutionPredicate::contains(const ObservableVector& x) const {
    if (never_) return false;
    if (x.dimension() < constraints_.size()) throw std::invalid_argument("SolutionPredicate: dimension mismatch");
    for (std::size_t d = 0; d < constraints_.size(); ++d) {
        const auto& c = constraints_[d];
        if (c && (x[d] < c->lo || x[d] > c->hi)) return false;
    }
    return true;
}

std::array<SolutionPredicate, 3> builtin_solutions() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const Interval zero{0.0, 0.0};
    const Interval alive{1.0, inf};
    return {
        SolutionPredicate("S1", {zero, zero, std::nullopt}),
        SolutionPredicate("S2", {alive, zero, std::nullopt}),
        SolutionPredicate("S3", {alive, alive, std::nullopt}),
    };
}

}  // namespace spsc
