#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pyramid/pyramid.hpp"

namespace pyramid::nurse {

inline constexpr int kSlots = 14; ///< 0..6 days, 7..13 nights
inline constexpr int kDays = 7;
inline constexpr int kMaxGrades = 8;

/// 14-bit coverage vector: bit k set iff the pattern works day/night k.
using Pattern = std::uint16_t;

enum class PatternClass { Empty, Day, Night, Combined };

PatternClass classify(Pattern pattern);
int day_count(Pattern pattern);
int night_count(Pattern pattern);
bool covers(Pattern pattern, int slot);

/// Weekly ward data. Grades are 1-based, 1 being the most qualified; a nurse
/// of grade g counts towards demand of every grade s >= g.
struct NurseInstance {
    int grades = 3;
    std::vector<Pattern> patterns;
    std::vector<int> grade_of;
    Eigen::MatrixXi pref;          ///< nurses x patterns, 0 (perfect) .. 100 (unacceptable)
    std::vector<int> day_shifts;   ///< D_i, 0 when not contracted for day weeks
    std::vector<int> night_shifts; ///< N_i
    std::vector<int> combined_shifts; ///< B_i
    Eigen::MatrixXi demand;        ///< kSlots x grades; nurses of grade s or better needed on slot k
    std::vector<std::vector<int>> feasible; ///< F(i), filled by finalize()

    int nurses() const { return static_cast<int>(grade_of.size()); }
    int pattern_count() const { return static_cast<int>(patterns.size()); }
    bool qualifies(int nurse, int grade) const { return grade_of[static_cast<std::size_t>(nurse)] <= grade; }

    /// Derives F(i) and checks every invariant; throws InstanceError.
    void finalize();

    friend bool operator==(const NurseInstance& a, const NurseInstance& b);
};

/// Patterns whose day count equals D_i (pure day patterns), night count equals
/// N_i (pure night patterns) or total equals B_i (mixed patterns).
std::vector<int> feasible_patterns(const NurseInstance& instance, int nurse);

/// Nurses of grade <= `grade` whose pattern covers `slot`.
int cover(const NurseInstance& instance, std::span<const int> pattern_of, int slot, int grade);

/// Preference cost plus weight times uncovered demand over all (slot, grade).
Fitness full_fitness(const NurseInstance& instance, std::span<const int> pattern_of, double weight);

/// Bit s-1 set for grade s.
using GradeSet = unsigned;

inline constexpr GradeSet grade_bit(int grade) { return GradeSet{1} << (grade - 1); }

/// Nurses whose grade is in `set`, ascending.
std::vector<int> nurses_in(const NurseInstance& instance, GradeSet set);

/// Demand attributable to the grades in `set` on `slot`: the sum of the
/// per-grade increments of the cumulative demand.
int aggregate_demand(const NurseInstance& instance, GradeSet set, int slot);

/// Sub-fitness of a partial schedule over the nurses of `set`, ignoring
/// substitution between grades inside the set.
Fitness sub_fitness(const NurseInstance& instance, GradeSet set, std::span<const int> partial, double weight);

/// Aggregate surplus covers aggregate shortage within days and within nights.
bool is_balanced(const NurseInstance& instance, std::span<const int> pattern_of);

struct GeneratorParams {
    int nurses = 30;
    std::array<double, 3> grade_mix{0.2, 0.3, 0.5};
    double full_time = 0.6;   ///< D=5/N=4 contracts, otherwise D=4/N=3
    double day_only = 0.15;   ///< no night contract
    double night_only = 0.05; ///< no day contract
    double combined = 0.05;   ///< additionally contracted for mixed weeks (B_i)
    double tightness = 0.8;   ///< share of the nurses whose work is needed
    double cost_skew = 2.0;   ///< cost = floor(100 u^skew)
    double night_aversion = 0.3;
    int requests = 2;         ///< zero-cost requested patterns per nurse
    int universe_cap = 0;     ///< patterns kept per (class, shift count); 0 keeps all
    int combined_patterns = 20;
    /// Demand is the cover of a hidden roster worked by round(tightness * n)
    /// of the nurses, instead of tightness times the expected random supply.
    /// Every such instance is feasible.
    bool reference_roster = true;
    double reference_bias = 0.85; ///< chance the hidden roster uses a requested pattern
    int reference_cost_cap = 10;  ///< otherwise it uses a pattern at most this costly
};

/// Seeded synthetic ward. Nurses are ordered by grade.
NurseInstance generate_instance(const GeneratorParams& params, std::uint64_t seed);

/// Tiny ward for exhaustive checks: n <= 4 nurses, |F(i)| <= 8.
NurseInstance generate_tiny_instance(int nurses, std::uint64_t seed, double tightness = 0.9);

std::string to_text(const NurseInstance& instance);
NurseInstance nurse_instance_from_text(const std::string& text);

/// Adapter exposing a ward to the pyramid engine. Fitness keys are GradeSets.
class NurseProblem : public Problem {
public:
    explicit NurseProblem(NurseInstance instance);

    const NurseInstance& instance() const { return instance_; }

    std::string name() const override { return "nurse"; }
    Sense sense() const override { return Sense::minimize; }
    int length() const override { return instance_.nurses(); }
    std::span<const int> alleles(int gene) const override;
    Evaluation evaluate(int fitness_key, const GeneMask& mask, std::span<const int> genes) const override;
    Evaluation evaluate_full(std::span<const int> genes) const override;
    /// Grade pyramid: 1, 2, 3, 1+2, 2+3, 3+1, 1+2+3 (aggregate), all (exact).
    Topology pyramid_topology(int sub_size, int top_size) const override;
    double censored_value() const override { return 100.0; }

private:
    NurseInstance instance_;
    std::vector<std::array<int, kSlots>> aggregate_; ///< indexed by GradeSet
};

struct HillclimbResult {
    std::vector<int> solution;
    int moves = 0;
    int evaluations = 0;
};

/// First-improvement local search: single reassignments, pairwise swaps, then
/// chains (A takes B's pattern, B takes C's or a fresh one). Only strictly
/// improving moves are applied, so the result is never worse.
HillclimbResult hillclimb(const NurseInstance& instance, std::span<const int> solution, double weight,
                          int move_budget = 10000);

class NurseHillclimber : public LocalImprover {
public:
    NurseHillclimber(const NurseInstance& instance, int move_budget = 10000)
        : instance_(instance), budget_(move_budget) {}

    bool eligible(std::span<const int> genes) const override { return is_balanced(instance_, genes); }
    int improve(Genes& genes, double weight) const override;

private:
    const NurseInstance& instance_;
    int budget_;
};

} // namespace pyramid::nurse
