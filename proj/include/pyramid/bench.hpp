#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pyramid/mall.hpp"
#include "pyramid/nurse.hpp"
#include "pyramid/pyramid.hpp"

namespace pyramid::bench {

enum class Family { nurse, mall };

std::string_view token(Family family);
std::optional<Family> parse_family(std::string_view token);

/// One row of a strategy table.
struct Variant {
    MatingStrategy mating;
    EvalStrategy eval;
    bool hillclimb = false;
    /// Plain GA on one population of total_population individuals.
    bool single_population = false;

    /// "SGA", mating token, eval token, or "m/e"; "&H" marks the hillclimber.
    std::string label() const;
    friend bool operator==(const Variant& a, const Variant& b) {
        return a.mating.kind == b.mating.kind && a.eval.kind == b.eval.kind && a.hillclimb == b.hillclimb &&
               a.single_population == b.single_population;
    }
};

/// Parses labels produced by Variant::label(). Throws ConfigurationError.
Variant parse_variant(std::string_view label);

struct ExperimentConfig {
    static constexpr const char* kFormat = "pyramid-experiment";
    static constexpr int kVersion = 1;

    Family family = Family::nurse;
    /// Instance files; when empty, `generated_instances` are drawn from the generator.
    std::vector<std::string> instance_paths;
    int generated_instances = 10;
    std::uint64_t instance_seed = 1;
    nurse::GeneratorParams nurse_params;
    mall::GeneratorParams mall_params;
    std::vector<Variant> variants;
    int runs_per_instance = 20;
    std::uint64_t base_seed = 1;
    PyramidConfig pyramid = PyramidConfig::nurse_defaults();
    int hillclimb_budget = 10000;
    /// Rendered as a "Bound" row when supplied.
    std::optional<double> bound_objective;
    std::optional<double> bound_feasibility;

    static ExperimentConfig defaults(Family family);
    /// Throws ConfigurationError.
    void validate() const;
    std::string digest() const;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig experiment_from_json(const std::string& text);

/// Outcome of one (strategy, instance, run) triple.
struct CellResult {
    std::string strategy;
    int instance = 0;
    int run = 0;
    std::uint64_t seed = 0;
    bool feasible = false;
    double raw = 0.0;
    double violation = 0.0;
    double penalized = 0.0;
    int generations = 0;
    int hillclimb_moves = 0;
    bool time_limited = false;
    bool failed = false;

    friend bool operator==(const CellResult&, const CellResult&) = default;
};

/// Persisted raw results plus what aggregation needs.
struct ResultSet {
    Family family = Family::nurse;
    std::string config_digest;
    /// Strategy-major, then instance, then run.
    std::vector<CellResult> cells;
    std::optional<double> bound_objective;
    std::optional<double> bound_feasibility;
};

/// Instances of an experiment, loaded or generated.
class InstanceSet {
public:
    static InstanceSet load(const ExperimentConfig& config);

    std::size_t size() const { return problems_.size(); }
    const Problem& problem(std::size_t i) const { return *problems_[i]; }
    /// Null for families without a local improver.
    std::unique_ptr<LocalImprover> improver(std::size_t i, int budget) const;

private:
    Family family_ = Family::nurse;
    std::vector<std::unique_ptr<Problem>> problems_;
};

/// Runs one cell. Never throws: failures come back with `failed` set.
CellResult run_cell(const ExperimentConfig& config, const InstanceSet& instances, const Variant& variant,
                    int instance, int run);

/// Threads: `threads` if positive, else PYRAMID_THREADS, else 1.
ResultSet run_experiment(const ExperimentConfig& config, int threads = 0);

int thread_count(int requested);

struct InstanceSummary {
    std::string strategy;
    int instance = 0;
    int runs = 0;
    int feasible_runs = 0;
    int failed_runs = 0;
    std::optional<double> best_feasible;
    /// best_feasible, or the censored value.
    double value = 0.0;
};

struct StrategySummary {
    std::string strategy;
    int instances = 0;
    double feasibility = 0.0; ///< fraction in [0, 1]
    double mean_objective = 0.0;
    int censored_instances = 0;
    int failed_cells = 0;
};

double censored_value(Family family);
Sense sense_of(Family family);

std::vector<InstanceSummary> summarize_instances(const ResultSet& results);
/// One entry per strategy, in order of first appearance.
std::vector<StrategySummary> summarize(const ResultSet& results);

enum class ReportFormat { table, csv };

/// Deterministic rendering of the strategy summary.
std::string emit_report(const ResultSet& results, ReportFormat format);

/// One row per cell.
std::string results_to_csv(const ResultSet& results);
ResultSet results_from_csv(const std::string& text);

enum class Verdict { better, worse, tied, missing };
std::string_view token(Verdict verdict);

struct OrderingCheck {
    std::string a;
    std::string b;
    Verdict feasibility = Verdict::missing;
    Verdict objective = Verdict::missing;
};

/// Pairwise verdicts of `a` against `b`. Feasibility margin is in fraction
/// units (0.05 = 5 points); objective margin in objective units.
OrderingCheck compare(const std::vector<StrategySummary>& rows, const std::string& a, const std::string& b,
                      Sense sense, double feasibility_margin, double objective_margin);

std::vector<OrderingCheck> compare_orderings(const std::vector<StrategySummary>& rows,
                                             const std::vector<std::pair<std::string, std::string>>& pairs,
                                             Sense sense, double feasibility_margin, double objective_margin);

} // namespace pyramid::bench
