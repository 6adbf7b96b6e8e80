#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pyramid {

/// Thrown when a topology, strategy or experiment setup is inconsistent.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when instance data violates its invariants (e.g. an empty F(i)).
class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an operator's precondition is broken by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class Sense { minimize, maximize };

/// Objective and constraint shortfall of a (partial) solution, before penalty.
struct Evaluation {
    double raw = 0.0;
    double violation = 0.0;

    bool feasible() const { return violation == 0.0; }
};

/// Evaluation plus its penalized value under a given weight.
struct Fitness {
    double raw = 0.0;
    double violation = 0.0;
    double penalized = 0.0;

    bool feasible() const { return violation == 0.0; }
};

inline double penalize(Sense sense, double raw, double violation, double weight) {
    return sense == Sense::minimize ? raw + weight * violation : raw - weight * violation;
}

inline Fitness penalize(Sense sense, const Evaluation& e, double weight) {
    return {e.raw, e.violation, penalize(sense, e.raw, e.violation, weight)};
}

/// True when `a` is strictly better than `b` under `sense`.
inline bool better(Sense sense, double a, double b) {
    return sense == Sense::minimize ? a < b : a > b;
}

/// Ordered set of global gene indices owned by a sub-population.
class GeneMask {
public:
    GeneMask() = default;
    /// Members must be strictly increasing and non-negative.
    explicit GeneMask(std::vector<int> members);

    static GeneMask full(int length);

    std::span<const int> members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    int operator[](std::size_t i) const { return members_[i]; }

    bool contains(int gene) const;
    bool subset_of(const GeneMask& other) const;
    bool disjoint_from(const GeneMask& other) const;
    bool within(int length) const;

    friend bool operator==(const GeneMask&, const GeneMask&) = default;

private:
    std::vector<int> members_;
};

/// Fitness key meaning "evaluate with the full problem fitness".
inline constexpr int kFullFitness = -1;

struct PopulationSpec {
    std::string label;
    GeneMask mask;
    std::vector<int> lower_partners;
    int fitness_key = kFullFitness;
    int size = 0;
};

/// Sub-population layout. The last population is the top (full) population.
struct Topology {
    std::vector<PopulationSpec> populations;
    /// Cross-population crossover is plain uniform crossover with a migrant
    /// (joined topology) instead of the cross-level transplant.
    bool migrant_uniform = false;

    std::size_t top() const { return populations.size() - 1; }
    int total_size() const;
};

/// Checks subset and range rules; throws ConfigurationError.
void validate_topology(const Topology& topology, int length);

/// Problem definition consumed by the pyramid engine.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string name() const = 0;
    virtual Sense sense() const = 0;
    /// Full solution string length.
    virtual int length() const = 0;
    /// Feasible allele values for a global gene index. Never empty.
    virtual std::span<const int> alleles(int gene) const = 0;
    /// Evaluates `genes` laid out over `mask`. kFullFitness requires the full mask.
    virtual Evaluation evaluate(int fitness_key, const GeneMask& mask, std::span<const int> genes) const = 0;
    virtual Topology pyramid_topology(int sub_size, int top_size) const = 0;
    virtual std::optional<double> initial_penalty_weight() const { return std::nullopt; }
    /// Substituted objective when no run on an instance is feasible.
    virtual double censored_value() const = 0;
    /// Full-problem evaluation of a complete string.
    virtual Evaluation evaluate_full(std::span<const int> genes) const = 0;
};

} // namespace pyramid
