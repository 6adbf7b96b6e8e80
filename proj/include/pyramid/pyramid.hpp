#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pyramid/operators.hpp"
#include "pyramid/penalty.hpp"
#include "pyramid/strategy.hpp"

namespace pyramid {

struct PyramidConfig {
    int total_population = 1000;
    int sub_population_size = 100;
    int top_population_size = 300;
    double uniform_p = 0.66;
    double mutation_rate = 0.01;
    double replacement_fraction = 0.90;
    double cross_level_probability = 0.5;
    int stagnation_limit = 50;
    int max_generations = 5000;
    /// Seconds; 0 disables the limit.
    double wall_clock_limit = 60.0;
    PenaltyRule penalty;
    std::uint64_t rng_seed = 0;

    static PyramidConfig nurse_defaults();
    static PyramidConfig mall_defaults();

    /// Throws ConfigurationError on out-of-range values.
    void validate() const;
    /// Stable hex digest of every field, used to tag run records.
    std::string digest() const;
};

/// Local search applied to full solutions of the top population.
class LocalImprover {
public:
    virtual ~LocalImprover() = default;
    virtual bool eligible(std::span<const int> genes) const = 0;
    /// Improves in place; returns the number of applied moves.
    virtual int improve(Genes& genes, double weight) const = 0;
};

struct SubPopulation {
    int id = 0;
    std::string label;
    GeneMask mask;
    int level = 0;
    int fitness_key = kFullFitness;
    std::vector<int> lower_partners;
    /// Bottom populations tiling the complement of `mask`, for partner evaluation.
    std::vector<int> complement;
    std::vector<Individual> individuals;
    PenaltyController penalty;
    Individual best_ever;
    int stale_generations = 0;

    std::size_t size() const { return individuals.size(); }
};

struct PyramidState {
    const Problem* problem = nullptr;
    PyramidConfig config;
    MatingStrategy mating;
    EvalStrategy eval;
    bool migrant_uniform = false;
    std::vector<SubPopulation> populations;
    /// embed[upper][lower]: positions of lower's genes inside upper's string.
    std::vector<std::vector<std::vector<int>>> embed;
    ToroidalGrid grid{3, 3};
    const LocalImprover* improver = nullptr;
    int generation = 0;
    int hillclimb_moves = 0;
    std::optional<Individual> best_feasible;

    std::size_t top() const { return populations.size() - 1; }
    Sense sense() const { return problem->sense(); }
};

/// Builds and evaluates the initial populations. Alleles are drawn for every
/// population before any strategy-dependent randomness, so the initial gene
/// pool depends only on (topology, config, seed).
PyramidState init_pyramid(const Problem& problem, const Topology& topology, const PyramidConfig& config,
                          MatingStrategy mating, EvalStrategy eval, Rng& rng);

/// Number of elites kept unchanged for a population of `size`.
int elite_count(int size, double replacement_fraction);

/// Per-population best penalized fitness before and right after replacement,
/// both under the weight in force during the generation.
struct StepStats {
    std::vector<double> best_before;
    std::vector<double> best_after;
    std::vector<int> cross_level_offspring;
};

StepStats generation_step(PyramidState& state, Rng& rng);

/// Child of a cross-population pairing placed in `upper`'s mask.
Genes cross_child(const PyramidState& state, std::size_t upper, std::span<const int> upper_genes,
                  std::size_t lower, std::span<const int> lower_genes, Rng& rng);

/// Direct (sub-)fitness of `genes` for population `pop`, penalized with its weight.
Fitness evaluate_direct(const PyramidState& state, std::size_t pop, std::span<const int> genes);

struct GenerationTrace {
    int generation = 0;
    double best_penalized = 0.0;
    double best_raw = 0.0;
    double best_violation = 0.0;
    std::optional<double> best_feasible_raw;
    double weight = 0.0;
};

struct RunResult {
    static constexpr int kFormatVersion = 1;

    std::uint64_t seed = 0;
    std::string config_digest;
    bool feasible = false;
    Genes best_genes;
    double best_raw = 0.0;
    double best_violation = 0.0;
    int generations = 0;
    int hillclimb_moves = 0;
    bool time_limited = false;
    std::vector<GenerationTrace> trace;
};

/// Iterates generation_step until the top population's best has not improved
/// for stagnation_limit generations (or a safety limit trips).
RunResult run(PyramidState& state, Rng& rng);

std::string to_json(const RunResult& result);
RunResult run_result_from_json(const std::string& text);

} // namespace pyramid
