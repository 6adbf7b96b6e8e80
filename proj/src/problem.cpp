#include "pyramid/problem.hpp"

#include <algorithm>

namespace pyramid {

GeneMask::GeneMask(std::vector<int> members) : members_(std::move(members)) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i] < 0 || (i > 0 && members_[i] <= members_[i - 1])) {
            throw ConfigurationError("gene mask members must be non-negative and strictly increasing");
        }
    }
}

GeneMask GeneMask::full(int length) {
    std::vector<int> all(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) all[static_cast<std::size_t>(i)] = i;
    return GeneMask(std::move(all));
}

bool GeneMask::contains(int gene) const {
    return std::binary_search(members_.begin(), members_.end(), gene);
}

bool GeneMask::subset_of(const GeneMask& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

bool GeneMask::disjoint_from(const GeneMask& other) const {
    auto a = members_.begin();
    auto b = other.members_.begin();
    while (a != members_.end() && b != other.members_.end()) {
        if (*a == *b) return false;
        if (*a < *b) ++a; else ++b;
    }
    return true;
}

bool GeneMask::within(int length) const {
    return members_.empty() || members_.back() < length;
}

int Topology::total_size() const {
    int total = 0;
    for (const auto& p : populations) total += p.size;
    return total;
}

void validate_topology(const Topology& topology, int length) {
    if (topology.populations.empty()) throw ConfigurationError("topology has no populations");
    const auto n = topology.populations.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pop = topology.populations[i];
        if (pop.size <= 0) throw ConfigurationError("population '" + pop.label + "' has non-positive size");
        if (pop.mask.empty()) throw ConfigurationError("population '" + pop.label + "' has an empty mask");
        if (!pop.mask.within(length)) throw ConfigurationError("population '" + pop.label + "' mask exceeds string length");
        if (pop.fitness_key == kFullFitness && static_cast<int>(pop.mask.size()) != length) {
            throw ConfigurationError("population '" + pop.label + "' uses full fitness on a partial mask");
        }
        for (int partner : pop.lower_partners) {
            if (partner < 0 || static_cast<std::size_t>(partner) >= n || static_cast<std::size_t>(partner) == i) {
                throw ConfigurationError("population '" + pop.label + "' has an invalid lower partner");
            }
            if (!topology.populations[static_cast<std::size_t>(partner)].mask.subset_of(pop.mask)) {
                throw ConfigurationError("lower partner of '" + pop.label + "' is not a subset of its mask");
            }
        }
    }
    if (static_cast<int>(topology.populations.back().mask.size()) != length) {
        throw ConfigurationError("top population must cover the full string");
    }
}

} // namespace pyramid
