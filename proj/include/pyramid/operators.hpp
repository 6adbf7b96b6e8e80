#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pyramid/individual.hpp"
#include "pyramid/random.hpp"

namespace pyramid {

/// Linear rank roulette over one population. The best individual gets weight
/// `size`, the worst 1; tied individuals share the mean of their rank weights.
class RankWheel {
public:
    RankWheel() = default;
    RankWheel(std::span<const Individual> population, Sense sense);

    std::size_t select(Rng& rng) const;
    double probability(std::size_t index) const;
    /// Best individual, lowest index on ties.
    std::size_t best() const { return best_; }
    std::size_t size() const { return cumulative_.size(); }

private:
    // Doubled weights, so shared tie weights stay integral.
    std::vector<std::uint64_t> cumulative_;
    std::size_t best_ = 0;
};

std::size_t rank_roulette_select(std::span<const Individual> population, Sense sense, Rng& rng);

/// Index of the best individual by penalized fitness; ties go to the lower index.
std::size_t best_index(std::span<const Individual> population, Sense sense);

/// Indices ordered best-first by penalized fitness, ties by index.
std::vector<std::size_t> ranking(std::span<const Individual> population, Sense sense);

/// Two-parent two-child parameterised uniform crossover. Child one takes each
/// gene from `a` with probability p; child two takes the other parent's gene.
std::pair<Genes, Genes> uniform_crossover(std::span<const int> a, std::span<const int> b, double p, Rng& rng);

/// Positions of `lower`'s members inside `upper`. Throws ContractViolation
/// unless lower ⊆ upper.
std::vector<int> embedding(const GeneMask& lower, const GeneMask& upper);

/// Copy of `upper` with the genes at `positions` replaced by `lower`.
Genes transplant(std::span<const int> lower, std::span<const int> positions, std::span<const int> upper);

/// Single-point exchange on a shared gene ordering: [0, cut) from `lower`,
/// [cut, n) from `upper`.
Genes cut_point_crossover(std::span<const int> lower, std::span<const int> upper, std::size_t cut);

/// Cross-level crossover for a strict subset mask: genes on `lower_mask` come
/// from `lower`, the rest from `upper`. Equal masks use a random cut point.
Genes cross_level_crossover(std::span<const int> lower, const GeneMask& lower_mask,
                            std::span<const int> upper, const GeneMask& upper_mask, Rng& rng);

/// Re-initialises each gene with probability `rate` uniformly in its feasible
/// range. Returns the number of genes redrawn.
int mutate(Genes& genes, const GeneMask& mask, const Problem& problem, double rate, Rng& rng);

} // namespace pyramid
