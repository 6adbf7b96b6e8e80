#pragma once

#include <vector>

#include "pyramid/problem.hpp"

namespace pyramid {

using Genes = std::vector<int>;

/// An assignment string over its population's gene mask with cached fitness.
/// `weight` is the penalty weight `penalized` was computed with.
struct Individual {
    Genes genes;
    double raw = 0.0;
    double violation = 0.0;
    double penalized = 0.0;
    double weight = 0.0;

    bool feasible() const { return violation == 0.0; }

    void assign(const Evaluation& e, Sense sense, double w) {
        raw = e.raw;
        violation = e.violation;
        weight = w;
        penalized = penalize(sense, raw, violation, w);
    }

    void repenalize(Sense sense, double w) {
        weight = w;
        penalized = penalize(sense, raw, violation, w);
    }
};

} // namespace pyramid
