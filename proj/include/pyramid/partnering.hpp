#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pyramid/pyramid.hpp"

namespace pyramid {

/// Read-only view of one generation's parents.
struct MatingContext {
    const PyramidState& state;
    std::span<const RankWheel> wheels;
};

std::vector<RankWheel> build_wheels(const PyramidState& state);

struct MateChoice {
    std::size_t partner = 0;
    /// Attractiveness and Choice build (and score) the child while choosing.
    std::optional<Genes> child;
    std::optional<Fitness> child_fitness;
    int candidates_evaluated = 0;
};

/// Chooses the partner in `partner_pop` for parent `first_index` of `first_pop`.
MateChoice select_mate(const MatingStrategy& strategy, const MatingContext& ctx, std::size_t first_pop,
                       std::size_t first_index, std::size_t partner_pop, Rng& rng);

/// Probability of accepting a pairing whose combined fitness is `combined`
/// given the best known `best`. 1 when the pairing is at least as good.
double acceptance_probability(Sense sense, double combined, double best);

/// How one partner is drawn from a complement population.
enum class PartnerPick { Rank, Random, Best, Grid };

/// The one or two partner picks an evaluation strategy uses.
std::vector<PartnerPick> partner_picks(EvalKind kind);

/// Full string made of `genes` on population `pop`'s mask and one partner per
/// complement population, picked per `pick`.
Genes assemble(const MatingContext& ctx, std::size_t pop, std::span<const int> genes, std::size_t slot,
               PartnerPick pick, Rng& rng);

struct PartnerEvaluation {
    Fitness recorded;
    std::vector<Fitness> samples;
};

/// Credits a partial solution with the full fitness of assembled solutions;
/// double strategies record the better of their two samples.
PartnerEvaluation evaluate_with_partners(const EvalStrategy& strategy, const MatingContext& ctx, std::size_t pop,
                                         std::span<const int> genes, std::size_t slot, Rng& rng);

/// Bottom populations whose masks tile the complement of `pop`'s mask.
/// Throws ConfigurationError when no exact tiling exists.
std::vector<int> complement_populations(const Topology& topology, std::size_t pop, int length);

/// Every population solves the full problem; cross-population crossover
/// becomes uniform crossover with a migrant. Connectivity mirrors the pyramid.
Topology joined_topology(const Problem& problem, const PyramidConfig& config);

/// One population holding the whole budget: a standard GA.
Topology single_population_topology(const Problem& problem, int size);

} // namespace pyramid
