#pragma once

#include <cstdint>
#include <optional>

#include "pyramid/individual.hpp"
#include "pyramid/problem.hpp"

namespace pyramid {

struct Optimum {
    /// Best raw objective over feasible strings; empty when none is feasible.
    std::optional<double> best_raw;
    Genes genes;
    std::uint64_t evaluated = 0;
    std::uint64_t feasible = 0;
};

/// Exhaustive search over every allele combination. Throws ConfigurationError
/// when the search space exceeds `limit` strings.
Optimum enumerate_optimum(const Problem& problem, std::uint64_t limit = 50'000'000);

} // namespace pyramid
