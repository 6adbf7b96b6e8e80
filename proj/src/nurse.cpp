#include "pyramid/nurse.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace pyramid::nurse {
namespace {

constexpr Pattern kDayBits = (1u << kDays) - 1;
constexpr Pattern kNightBits = static_cast<Pattern>(kDayBits << kDays);

} // namespace

PatternClass classify(Pattern pattern) {
    const bool day = (pattern & kDayBits) != 0;
    const bool night = (pattern & kNightBits) != 0;
    if (day && night) return PatternClass::Combined;
    if (day) return PatternClass::Day;
    if (night) return PatternClass::Night;
    return PatternClass::Empty;
}

int day_count(Pattern pattern) { return std::popcount(static_cast<unsigned>(pattern & kDayBits)); }
int night_count(Pattern pattern) { return std::popcount(static_cast<unsigned>(pattern & kNightBits)); }
bool covers(Pattern pattern, int slot) { return (pattern >> slot) & 1u; }

std::vector<int> feasible_patterns(const NurseInstance& inst, int nurse) {
    const auto i = static_cast<std::size_t>(nurse);
    const int d = inst.day_shifts[i], n = inst.night_shifts[i], b = inst.combined_shifts[i];
    std::vector<int> out;
    for (int j = 0; j < inst.pattern_count(); ++j) {
        const Pattern pat = inst.patterns[static_cast<std::size_t>(j)];
        bool ok = false;
        switch (classify(pat)) {
        case PatternClass::Day: ok = d > 0 && day_count(pat) == d; break;
        case PatternClass::Night: ok = n > 0 && night_count(pat) == n; break;
        case PatternClass::Combined: ok = b > 0 && day_count(pat) + night_count(pat) == b; break;
        case PatternClass::Empty: break;
        }
        if (ok) out.push_back(j);
    }
    return out;
}

void NurseInstance::finalize() {
    const int n = nurses();
    const int m = pattern_count();
    if (n <= 0) throw InstanceError("instance has no nurses");
    if (grades < 1 || grades > kMaxGrades) throw InstanceError("grade count must lie in [1, 8]");
    if (static_cast<int>(day_shifts.size()) != n || static_cast<int>(night_shifts.size()) != n ||
        static_cast<int>(combined_shifts.size()) != n) {
        throw InstanceError("D/N/B vectors must have one entry per nurse");
    }
    if (pref.rows() != n || pref.cols() != m) throw InstanceError("preference matrix must be nurses x patterns");
    if (demand.rows() != kSlots || demand.cols() != grades) throw InstanceError("demand matrix must be 14 x grades");
    for (int g : grade_of) {
        if (g < 1 || g > grades) throw InstanceError("nurse grade out of range");
    }
    for (Pattern p : patterns) {
        if (p >> kSlots) throw InstanceError("pattern uses more than 14 slots");
    }
    if ((pref.array() < 0).any() || (pref.array() > 100).any()) throw InstanceError("preference costs must lie in [0, 100]");
    if ((demand.array() < 0).any()) throw InstanceError("demand must be non-negative");
    for (int k = 0; k < kSlots; ++k) {
        for (int s = 1; s < grades; ++s) {
            if (demand(k, s) < demand(k, s - 1)) {
                throw InstanceError("demand must be cumulative: non-decreasing from grade 1 to the lowest grade");
            }
        }
    }
    feasible.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        feasible[static_cast<std::size_t>(i)] = feasible_patterns(*this, i);
        if (feasible[static_cast<std::size_t>(i)].empty()) {
            throw InstanceError("nurse " + std::to_string(i) + " has no feasible shift pattern");
        }
    }
}

bool operator==(const NurseInstance& a, const NurseInstance& b) {
    return a.grades == b.grades && a.patterns == b.patterns && a.grade_of == b.grade_of && a.pref == b.pref &&
           a.day_shifts == b.day_shifts && a.night_shifts == b.night_shifts && a.combined_shifts == b.combined_shifts &&
           a.demand == b.demand;
}

int cover(const NurseInstance& inst, std::span<const int> pattern_of, int slot, int grade) {
    int c = 0;
    for (int i = 0; i < inst.nurses(); ++i) {
        const auto pat = inst.patterns[static_cast<std::size_t>(pattern_of[static_cast<std::size_t>(i)])];
        if (inst.qualifies(i, grade) && covers(pat, slot)) ++c;
    }
    return c;
}

Fitness full_fitness(const NurseInstance& inst, std::span<const int> pattern_of, double weight) {
    std::array<int, kMaxGrades * kSlots> by_grade{};
    double raw = 0.0;
    for (int i = 0; i < inst.nurses(); ++i) {
        const int j = pattern_of[static_cast<std::size_t>(i)];
        raw += inst.pref(i, j);
        unsigned bits = inst.patterns[static_cast<std::size_t>(j)];
        int* row = by_grade.data() + (inst.grade_of[static_cast<std::size_t>(i)] - 1) * kSlots;
        while (bits) {
            row[std::countr_zero(bits)]++;
            bits &= bits - 1;
        }
    }
    int violation = 0;
    for (int k = 0; k < kSlots; ++k) {
        int cumulative = 0;
        for (int s = 0; s < inst.grades; ++s) {
            cumulative += by_grade[static_cast<std::size_t>(s * kSlots + k)];
            violation += std::max(inst.demand(k, s) - cumulative, 0);
        }
    }
    return {raw, double(violation), raw + weight * violation};
}

std::vector<int> nurses_in(const NurseInstance& inst, GradeSet set) {
    std::vector<int> out;
    for (int i = 0; i < inst.nurses(); ++i) {
        if (set & grade_bit(inst.grade_of[static_cast<std::size_t>(i)])) out.push_back(i);
    }
    return out;
}

int aggregate_demand(const NurseInstance& inst, GradeSet set, int slot) {
    int total = 0;
    for (int s = 1; s <= inst.grades; ++s) {
        if (!(set & grade_bit(s))) continue;
        total += inst.demand(slot, s - 1) - (s > 1 ? inst.demand(slot, s - 2) : 0);
    }
    return total;
}

namespace {

Fitness sub_fitness_with(const NurseInstance& inst, std::span<const int> members, std::span<const int> partial,
                         std::span<const int, kSlots> demand, double weight) {
    std::array<int, kSlots> supply{};
    double raw = 0.0;
    for (std::size_t t = 0; t < members.size(); ++t) {
        const int j = partial[t];
        raw += inst.pref(members[t], j);
        unsigned bits = inst.patterns[static_cast<std::size_t>(j)];
        while (bits) {
            supply[static_cast<std::size_t>(std::countr_zero(bits))]++;
            bits &= bits - 1;
        }
    }
    int violation = 0;
    for (std::size_t k = 0; k < kSlots; ++k) violation += std::max(demand[k] - supply[k], 0);
    return {raw, double(violation), raw + weight * violation};
}

} // namespace

Fitness sub_fitness(const NurseInstance& inst, GradeSet set, std::span<const int> partial, double weight) {
    if (set == 0 || set >= (GradeSet{1} << inst.grades)) throw ConfigurationError("grade set outside the configured grades");
    const auto members = nurses_in(inst, set);
    if (members.size() != partial.size()) throw ContractViolation("partial schedule does not match its grade set");
    std::array<int, kSlots> demand{};
    for (int k = 0; k < kSlots; ++k) demand[static_cast<std::size_t>(k)] = aggregate_demand(inst, set, k);
    return sub_fitness_with(inst, members, partial, demand, weight);
}

bool is_balanced(const NurseInstance& inst, std::span<const int> pattern_of) {
    const int lowest = inst.grades;
    for (int block = 0; block < 2; ++block) {
        int surplus = 0, shortage = 0;
        for (int k = block * kDays; k < (block + 1) * kDays; ++k) {
            const int diff = cover(inst, pattern_of, k, lowest) - inst.demand(k, lowest - 1);
            if (diff > 0) surplus += diff; else shortage -= diff;
        }
        if (surplus < shortage) return false;
    }
    return true;
}

NurseProblem::NurseProblem(NurseInstance instance) : instance_(std::move(instance)) {
    instance_.finalize();
    aggregate_.assign(std::size_t{1} << instance_.grades, {});
    for (GradeSet set = 1; set < aggregate_.size(); ++set) {
        for (int k = 0; k < kSlots; ++k) aggregate_[set][static_cast<std::size_t>(k)] = aggregate_demand(instance_, set, k);
    }
}

std::span<const int> NurseProblem::alleles(int gene) const {
    return instance_.feasible[static_cast<std::size_t>(gene)];
}

Evaluation NurseProblem::evaluate(int fitness_key, const GeneMask& mask, std::span<const int> genes) const {
    if (fitness_key == kFullFitness) return evaluate_full(genes);
    const auto set = static_cast<GradeSet>(fitness_key);
    if (fitness_key <= 0 || set >= aggregate_.size()) throw ConfigurationError("unknown nurse fitness key");
    const Fitness f = sub_fitness_with(instance_, mask.members(), genes, aggregate_[set], 0.0);
    return {f.raw, f.violation};
}

Evaluation NurseProblem::evaluate_full(std::span<const int> genes) const {
    const Fitness f = full_fitness(instance_, genes, 0.0);
    return {f.raw, f.violation};
}

Topology NurseProblem::pyramid_topology(int sub_size, int top_size) const {
    const int p = instance_.grades;
    std::vector<GradeSet> sets;
    if (p == 3) {
        sets = {0b001, 0b010, 0b100, 0b011, 0b110, 0b101, 0b111};
    } else {
        for (int size = 1; size <= p; ++size) {
            for (GradeSet s = 1; s < (GradeSet{1} << p); ++s) {
                if (std::popcount(s) == size) sets.push_back(s);
            }
        }
    }
    auto label = [&](GradeSet s) {
        std::string out;
        // Wrap-around pairs read "3+1" as in the grade cycle.
        std::vector<int> gs;
        for (int g = 1; g <= p; ++g) if (s & grade_bit(g)) gs.push_back(g);
        if (p == 3 && s == 0b101) gs = {3, 1};
        for (int g : gs) out += (out.empty() ? "" : "+") + std::to_string(g);
        return out;
    };

    Topology t;
    for (GradeSet s : sets) {
        const auto members = nurses_in(instance_, s);
        if (members.empty()) throw ConfigurationError("grade set " + label(s) + " has no nurses");
        PopulationSpec spec{label(s), GeneMask(members), {}, static_cast<int>(s), sub_size};
        for (std::size_t q = 0; q < t.populations.size(); ++q) {
            const auto other = sets[q];
            if ((other & s) == other && other != s) spec.lower_partners.push_back(static_cast<int>(q));
        }
        t.populations.push_back(std::move(spec));
    }
    PopulationSpec top{"all", GeneMask::full(instance_.nurses()), {}, kFullFitness, top_size};
    for (std::size_t q = 0; q < t.populations.size(); ++q) top.lower_partners.push_back(static_cast<int>(q));
    t.populations.push_back(std::move(top));
    return t;
}

int NurseHillclimber::improve(Genes& genes, double weight) const {
    auto result = hillclimb(instance_, genes, weight, budget_);
    genes = std::move(result.solution);
    return result.moves;
}

} // namespace pyramid::nurse
