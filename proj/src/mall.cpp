#include "pyramid/mall.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pyramid::mall {

ShopCounts size_decompose(int count) {
    if (count < 0) throw ContractViolation("negative location count");
    ShopCounts shops{};
    shops[kLarge] = count / 3;
    const int rest = count % 3;
    if (rest == 2) shops[kMedium] = 1;
    if (rest == 1) shops[kSmall] = 1;
    return shops;
}

double count_factor(int shops, int ideal) {
    return std::max(0.0, 1.0 - std::abs(shops - ideal) / static_cast<double>(std::max(ideal, 1)));
}

int MallInstance::area_of(int location) const {
    const auto it = std::upper_bound(area_start.begin(), area_start.end(), location);
    return static_cast<int>(it - area_start.begin()) - 1;
}

void MallInstance::validate() const {
    if (locations <= 0 || types <= 0) throw InstanceError("mall needs locations and shop types");
    if (area_start.size() < 2 || area_start.front() != 0 || area_start.back() != locations) {
        throw InstanceError("areas must partition the locations");
    }
    for (std::size_t a = 1; a < area_start.size(); ++a) {
        if (area_start[a] <= area_start[a - 1]) throw InstanceError("areas must be non-empty contiguous ranges");
    }
    const auto t = static_cast<std::size_t>(types);
    if (group_of.size() != t || count_bounds.size() != t) throw InstanceError("per-type tables must have one entry per type");
    if (attract.rows() != types || attract.cols() != areas() || base_rent.rows() != types || base_rent.cols() != areas() ||
        revenue.size() != types) {
        throw InstanceError("rent tables have wrong dimensions");
    }
    if ((attract.array() < 0).any() || (base_rent.array() < 0).any() || (revenue.array() < 0).any() || synergy_bonus < 0) {
        throw InstanceError("rent parameters must be non-negative");
    }
    for (const auto& b : count_bounds) {
        if (b.min < 0 || b.min > b.ideal || b.ideal > b.max) throw InstanceError("count bounds must satisfy 0 <= min <= ideal <= max");
    }
    for (int g : group_of) if (g < 0) throw InstanceError("group ids must be non-negative");
    for (int c : size_caps) if (c < 0) throw InstanceError("size caps must be non-negative");
}

bool operator==(const MallInstance& a, const MallInstance& b) {
    return a.locations == b.locations && a.area_start == b.area_start && a.types == b.types && a.group_of == b.group_of &&
           a.attract == b.attract && a.base_rent == b.base_rent && a.revenue == b.revenue &&
           a.count_bounds == b.count_bounds && a.size_caps == b.size_caps && a.size_factor == b.size_factor &&
           a.synergy_bonus == b.synergy_bonus && a.penalty_weight_init == b.penalty_weight_init;
}

namespace {

/// Rent of the locations [begin, end) of areas [area_lo, area_hi); `global`
/// adds the mall-wide constraints. `genes` is indexed from `begin`.
Fitness rent(const MallInstance& inst, std::span<const int> genes, int area_lo, int area_hi, bool global, double weight) {
    const int areas = area_hi - area_lo;
    const int begin = inst.area_start[static_cast<std::size_t>(area_lo)];
    std::vector<int> counts(static_cast<std::size_t>(inst.types * areas), 0);
    int synergy_pairs = 0;
    for (int a = area_lo; a < area_hi; ++a) {
        const int lo = inst.area_start[static_cast<std::size_t>(a)], hi = inst.area_start[static_cast<std::size_t>(a) + 1];
        for (int l = lo; l < hi; ++l) {
            const int t = genes[static_cast<std::size_t>(l - begin)];
            ++counts[static_cast<std::size_t>(t * areas + (a - area_lo))];
            if (l + 1 < hi && inst.group_of[static_cast<std::size_t>(t)] ==
                                  inst.group_of[static_cast<std::size_t>(genes[static_cast<std::size_t>(l + 1 - begin)])]) {
                ++synergy_pairs;
            }
        }
    }

    std::vector<int> shops_of(static_cast<std::size_t>(inst.types), 0);
    std::array<int, kSizeClasses> class_total{};
    for (int t = 0; t < inst.types; ++t) {
        for (int a = 0; a < areas; ++a) {
            const auto shops = size_decompose(counts[static_cast<std::size_t>(t * areas + a)]);
            for (int c = 0; c < kSizeClasses; ++c) {
                shops_of[static_cast<std::size_t>(t)] += shops[static_cast<std::size_t>(c)];
                class_total[static_cast<std::size_t>(c)] += shops[static_cast<std::size_t>(c)];
            }
        }
    }

    double raw = inst.synergy_bonus * synergy_pairs;
    for (int t = 0; t < inst.types; ++t) {
        const double cf = count_factor(shops_of[static_cast<std::size_t>(t)], inst.count_bounds[static_cast<std::size_t>(t)].ideal);
        for (int a = 0; a < areas; ++a) {
            const int n = counts[static_cast<std::size_t>(t * areas + a)];
            if (n == 0) continue;
            const auto shops = size_decompose(n);
            double sized = 0.0;
            for (int c = 0; c < kSizeClasses; ++c) sized += shops[static_cast<std::size_t>(c)] * inst.size_factor[static_cast<std::size_t>(c)];
            const int area = a + area_lo;
            raw += sized * (inst.base_rent(t, area) + inst.revenue(t) * inst.attract(t, area) * cf);
        }
    }

    double violation = 0.0;
    if (global) {
        for (int t = 0; t < inst.types; ++t) {
            const auto& b = inst.count_bounds[static_cast<std::size_t>(t)];
            const int n = shops_of[static_cast<std::size_t>(t)];
            violation += std::max(b.min - n, 0) + std::max(n - b.max, 0);
        }
        for (int c = 0; c < kSizeClasses; ++c) {
            violation += std::max(class_total[static_cast<std::size_t>(c)] - inst.size_caps[static_cast<std::size_t>(c)], 0);
        }
    }
    return {raw, violation, raw - weight * violation};
}

} // namespace

Fitness full_rent(const MallInstance& inst, std::span<const int> type_at, double weight) {
    if (static_cast<int>(type_at.size()) != inst.locations) throw ContractViolation("solution length differs from location count");
    return rent(inst, type_at, 0, inst.areas(), true, weight);
}

Fitness area_sub_fitness(const MallInstance& inst, int area, std::span<const int> partial, double weight) {
    if (area < 0 || area >= inst.areas()) throw ContractViolation("area index out of range");
    if (static_cast<int>(partial.size()) != inst.area_size(area)) throw ContractViolation("partial does not cover the area");
    return rent(inst, partial, area, area + 1, false, weight);
}

MallProblem::MallProblem(MallInstance instance) : instance_(std::move(instance)) {
    instance_.validate();
    all_types_.resize(static_cast<std::size_t>(instance_.types));
    std::iota(all_types_.begin(), all_types_.end(), 0);
}

Evaluation MallProblem::evaluate(int fitness_key, const GeneMask&, std::span<const int> genes) const {
    if (fitness_key == kFullFitness) return evaluate_full(genes);
    const Fitness f = area_sub_fitness(instance_, fitness_key, genes, 0.0);
    return {f.raw, f.violation};
}

Evaluation MallProblem::evaluate_full(std::span<const int> genes) const {
    const Fitness f = full_rent(instance_, genes, 0.0);
    return {f.raw, f.violation};
}

Topology MallProblem::pyramid_topology(int sub_size, int top_size) const {
    Topology t;
    PopulationSpec top{"all", GeneMask::full(instance_.locations), {}, kFullFitness, top_size};
    for (int a = 0; a < instance_.areas(); ++a) {
        std::vector<int> members;
        for (int l = instance_.area_start[static_cast<std::size_t>(a)]; l < instance_.area_start[static_cast<std::size_t>(a) + 1]; ++l) {
            members.push_back(l);
        }
        t.populations.push_back({std::to_string(a + 1), GeneMask(std::move(members)), {}, a, sub_size});
        top.lower_partners.push_back(a);
    }
    t.populations.push_back(std::move(top));
    return t;
}

std::optional<double> MallProblem::initial_penalty_weight() const {
    if (instance_.penalty_weight_init > 0.0) return instance_.penalty_weight_init;
    return std::nullopt;
}

} // namespace pyramid::mall
