#pragma once

#include <optional>
#include <span>

#include "pyramid/individual.hpp"

namespace pyramid {

/// Constants of the dynamic penalty rule. All config-overridable.
struct PenaltyRule {
    double growth = 1.1;
    double decay = 0.99;
    double delta = 1.0;
    double w_min = 1.0;
    double w_max = 1e6;
};

/// Per-population adaptive penalty weight.
///
/// After each generation:
///   - no feasible individual:             weight *= growth
///   - raw-objective best is feasible:     weight *= decay
///   - otherwise: weight = |raw(best feasible) - raw(raw best)| / violation(raw best) + delta,
///     i.e. just enough to rank the best feasible individual ahead of the raw best.
/// The result is clamped to [w_min, w_max].
class PenaltyController {
public:
    PenaltyController() = default;
    PenaltyController(double initial, PenaltyRule rule);

    double weight() const { return weight_; }
    const PenaltyRule& rule() const { return rule_; }

    double update(std::span<const Individual> population, Sense sense);

    std::optional<double> best_feasible_raw() const { return best_feasible_raw_; }
    std::optional<double> best_raw() const { return best_raw_; }

private:
    double clamp(double w) const;

    double weight_ = 1.0;
    PenaltyRule rule_;
    std::optional<double> best_feasible_raw_;
    std::optional<double> best_raw_;
};

} // namespace pyramid
