#include "pyramid/operators.hpp"

#include <algorithm>
#include <numeric>

namespace pyramid {

std::vector<std::size_t> ranking(std::span<const Individual> population, Sense sense) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return better(sense, population[a].penalized, population[b].penalized);
    });
    return order;
}

std::size_t best_index(std::span<const Individual> population, Sense sense) {
    if (population.empty()) throw ContractViolation("best_index on empty population");
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (better(sense, population[i].penalized, population[best].penalized)) best = i;
    }
    return best;
}

RankWheel::RankWheel(std::span<const Individual> population, Sense sense) {
    const std::size_t n = population.size();
    if (n == 0) throw ContractViolation("rank selection on empty population");
    const auto order = ranking(population, sense);
    best_ = order.front();

    std::vector<std::uint64_t> weight(n);
    std::size_t r0 = 0;
    while (r0 < n) {
        std::size_t r1 = r0;
        while (r1 + 1 < n && population[order[r1 + 1]].penalized == population[order[r0]].penalized) ++r1;
        // Ranks r0..r1 carry weights n-r0 .. n-r1; twice their mean is integral.
        const std::uint64_t shared = 2 * n - r0 - r1;
        for (std::size_t r = r0; r <= r1; ++r) weight[order[r]] = shared;
        r0 = r1 + 1;
    }
    cumulative_.resize(n);
    std::partial_sum(weight.begin(), weight.end(), cumulative_.begin());
}

std::size_t RankWheel::select(Rng& rng) const {
    const auto ticket = rng.below(cumulative_.back());
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), ticket) - cumulative_.begin());
}

double RankWheel::probability(std::size_t index) const {
    const auto lo = index == 0 ? 0 : cumulative_[index - 1];
    return static_cast<double>(cumulative_[index] - lo) / static_cast<double>(cumulative_.back());
}

std::size_t rank_roulette_select(std::span<const Individual> population, Sense sense, Rng& rng) {
    return RankWheel(population, sense).select(rng);
}

std::pair<Genes, Genes> uniform_crossover(std::span<const int> a, std::span<const int> b, double p, Rng& rng) {
    if (a.size() != b.size()) throw ContractViolation("uniform crossover parents differ in length");
    Genes c1(a.size()), c2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (rng.bernoulli(p)) {
            c1[i] = a[i];
            c2[i] = b[i];
        } else {
            c1[i] = b[i];
            c2[i] = a[i];
        }
    }
    return {std::move(c1), std::move(c2)};
}

std::vector<int> embedding(const GeneMask& lower, const GeneMask& upper) {
    std::vector<int> positions;
    positions.reserve(lower.size());
    const auto up = upper.members();
    std::size_t j = 0;
    for (int gene : lower.members()) {
        while (j < up.size() && up[j] < gene) ++j;
        if (j == up.size() || up[j] != gene) throw ContractViolation("lower mask is not a subset of the upper mask");
        positions.push_back(static_cast<int>(j));
    }
    return positions;
}

Genes transplant(std::span<const int> lower, std::span<const int> positions, std::span<const int> upper) {
    if (lower.size() != positions.size()) throw ContractViolation("transplant length mismatch");
    Genes child(upper.begin(), upper.end());
    for (std::size_t i = 0; i < lower.size(); ++i) child[static_cast<std::size_t>(positions[i])] = lower[i];
    return child;
}

Genes cut_point_crossover(std::span<const int> lower, std::span<const int> upper, std::size_t cut) {
    if (lower.size() != upper.size() || cut > lower.size()) throw ContractViolation("cut-point crossover on mismatched parents");
    Genes child(upper.begin(), upper.end());
    std::copy_n(lower.begin(), cut, child.begin());
    return child;
}

Genes cross_level_crossover(std::span<const int> lower, const GeneMask& lower_mask,
                            std::span<const int> upper, const GeneMask& upper_mask, Rng& rng) {
    if (lower.size() != lower_mask.size() || upper.size() != upper_mask.size()) {
        throw ContractViolation("parent length does not match its mask");
    }
    if (lower_mask == upper_mask) {
        return cut_point_crossover(lower, upper, rng.index(upper.size() + 1));
    }
    return transplant(lower, embedding(lower_mask, upper_mask), upper);
}

int mutate(Genes& genes, const GeneMask& mask, const Problem& problem, double rate, Rng& rng) {
    if (genes.size() != mask.size()) throw ContractViolation("mutation on gene string not matching its mask");
    int redrawn = 0;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (rng.bernoulli(rate)) {
            const auto range = problem.alleles(mask[i]);
            genes[i] = range[rng.index(range.size())];
            ++redrawn;
        }
    }
    return redrawn;
}

} // namespace pyramid
