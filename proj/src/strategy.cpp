#include "pyramid/strategy.hpp"

#include <cmath>

#include "pyramid/problem.hpp"

namespace pyramid {
namespace {

constexpr std::array<std::pair<MatingKind, std::string_view>, 7> kMatingTokens{{
    {MatingKind::RankSelection, "S"},
    {MatingKind::Random, "R"},
    {MatingKind::Best, "B"},
    {MatingKind::Distributed, "D"},
    {MatingKind::Joined, "J"},
    {MatingKind::Attractiveness, "A"},
    {MatingKind::Choice, "C"},
}};

constexpr std::array<std::pair<EvalKind, std::string_view>, 8> kEvalTokens{{
    {EvalKind::Direct, "none"},
    {EvalKind::RankBased, "S"},
    {EvalKind::Random, "R"},
    {EvalKind::Best, "B"},
    {EvalKind::Distributed, "D"},
    {EvalKind::BestRandom, "SR"},
    {EvalKind::RankRandom, "BR"},
    {EvalKind::RandomRandom, "RR"},
}};

} // namespace

std::string_view token(MatingKind kind) {
    for (const auto& [k, t] : kMatingTokens) if (k == kind) return t;
    return "?";
}

std::string_view token(EvalKind kind) {
    for (const auto& [k, t] : kEvalTokens) if (k == kind) return t;
    return "?";
}

std::optional<MatingKind> parse_mating(std::string_view t) {
    for (const auto& [k, name] : kMatingTokens) if (name == t) return k;
    return std::nullopt;
}

std::optional<EvalKind> parse_eval(std::string_view t) {
    for (const auto& [k, name] : kEvalTokens) if (name == t) return k;
    return std::nullopt;
}

std::string mating_tokens() {
    std::string out;
    for (const auto& [k, t] : kMatingTokens) {
        if (!out.empty()) out += ",";
        out += t;
    }
    return out;
}

std::string eval_tokens() {
    std::string out;
    for (const auto& [k, t] : kEvalTokens) {
        if (!out.empty()) out += ",";
        out += t;
    }
    return out;
}

bool is_double(EvalKind kind) {
    return kind == EvalKind::BestRandom || kind == EvalKind::RankRandom || kind == EvalKind::RandomRandom;
}

ToroidalGrid::ToroidalGrid(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 3 || cols < 3) throw ConfigurationError("toroidal grid must be at least 3x3");
}

ToroidalGrid ToroidalGrid::for_population(int size) {
    int side = static_cast<int>(std::floor(std::sqrt(static_cast<double>(size))));
    if (side < 3) side = 3;
    return {side, side};
}

Cell ToroidalGrid::cell_of(std::size_t slot) const {
    return cell_at(static_cast<int>(slot % static_cast<std::size_t>(cells())));
}

std::array<Cell, 8> ToroidalGrid::neighbors(Cell cell) const {
    std::array<Cell, 8> out{};
    std::size_t n = 0;
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            out[n++] = {(cell.row + dr + rows_) % rows_, (cell.col + dc + cols_) % cols_};
        }
    }
    return out;
}

std::vector<std::size_t> ToroidalGrid::occupants(Cell cell, std::size_t population_size) const {
    std::vector<std::size_t> slots;
    for (auto s = static_cast<std::size_t>(index_of(cell)); s < population_size; s += static_cast<std::size_t>(cells())) {
        slots.push_back(s);
    }
    return slots;
}

} // namespace pyramid
