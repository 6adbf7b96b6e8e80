#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pyramid {

/// Mating partner selection for cross-population recombination.
enum class MatingKind { RankSelection, Random, Best, Distributed, Joined, Attractiveness, Choice };

/// Partner selection for crediting a partial solution with full fitness.
/// `Direct` evaluates each population with its own (sub-)fitness, no partners.
enum class EvalKind { Direct, RankBased, Random, Best, Distributed, BestRandom, RankRandom, RandomRandom };

struct MatingStrategy {
    MatingKind kind = MatingKind::RankSelection;
    int choice_candidates = 10;
    /// Rejections tolerated by Attractiveness before accepting unconditionally.
    int retry_budget = 20;
};

struct EvalStrategy {
    EvalKind kind = EvalKind::Direct;
};

std::string_view token(MatingKind kind);
std::string_view token(EvalKind kind);
std::optional<MatingKind> parse_mating(std::string_view token);
std::optional<EvalKind> parse_eval(std::string_view token);
/// Comma-separated list of accepted tokens, for diagnostics.
std::string mating_tokens();
std::string eval_tokens();

bool is_double(EvalKind kind);

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Single toroidal grid shared by all populations. Slot s of any population
/// sits on cell s mod (rows * cols), row-major.
class ToroidalGrid {
public:
    ToroidalGrid(int rows, int cols);
    /// Smallest square grid (at least 3x3) whose side is floor(sqrt(size)).
    static ToroidalGrid for_population(int size);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int cells() const { return rows_ * cols_; }

    Cell cell_of(std::size_t slot) const;
    int index_of(Cell cell) const { return cell.row * cols_ + cell.col; }
    Cell cell_at(int index) const { return {index / cols_, index % cols_}; }
    /// Moore neighbourhood with wraparound.
    std::array<Cell, 8> neighbors(Cell cell) const;
    /// Slots of a population of `population_size` sitting on `cell`.
    std::vector<std::size_t> occupants(Cell cell, std::size_t population_size) const;

private:
    int rows_;
    int cols_;
};

} // namespace pyramid
