#include "pyramid/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace pyramid {

PenaltyController::PenaltyController(double initial, PenaltyRule rule) : rule_(rule) {
    if (!(rule_.w_min > 0.0) || rule_.w_max < rule_.w_min) throw ConfigurationError("penalty bounds must satisfy 0 < w_min <= w_max");
    weight_ = clamp(initial);
}

double PenaltyController::clamp(double w) const {
    if (!std::isfinite(w)) w = rule_.w_max;
    return std::clamp(w, rule_.w_min, rule_.w_max);
}

double PenaltyController::update(std::span<const Individual> population, Sense sense) {
    const Individual* raw_best = nullptr;
    const Individual* best_feasible = nullptr;
    for (const auto& ind : population) {
        // Raw ties prefer the smaller violation, so a feasible individual wins.
        if (!raw_best || better(sense, ind.raw, raw_best->raw) ||
            (ind.raw == raw_best->raw && ind.violation < raw_best->violation)) {
            raw_best = &ind;
        }
        if (ind.feasible() && (!best_feasible || better(sense, ind.raw, best_feasible->raw))) best_feasible = &ind;
    }
    if (!raw_best) return weight_;

    best_raw_ = raw_best->raw;
    best_feasible_raw_ = best_feasible ? std::optional<double>(best_feasible->raw) : std::nullopt;

    if (!best_feasible) {
        weight_ = clamp(weight_ * rule_.growth);
    } else if (raw_best->feasible()) {
        weight_ = clamp(weight_ * rule_.decay);
    } else {
        weight_ = clamp(std::abs(best_feasible->raw - raw_best->raw) / raw_best->violation + rule_.delta);
    }
    return weight_;
}

} // namespace pyramid
