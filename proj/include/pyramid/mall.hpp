#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pyramid/pyramid.hpp"

namespace pyramid::mall {

enum SizeClass : int { kSmall = 0, kMedium = 1, kLarge = 2 };
inline constexpr int kSizeClasses = 3;

/// Shops per size class formed by `count` same-type locations in one area.
using ShopCounts = std::array<int, kSizeClasses>;

/// Greedy largest-first: as many large (3) shops as possible, the remainder
/// of 2 forms a medium shop and of 1 a small one.
ShopCounts size_decompose(int count);

struct CountBounds {
    int min = 0;
    int ideal = 0;
    int max = 0;
    friend bool operator==(const CountBounds&, const CountBounds&) = default;
};

struct MallInstance {
    int locations = 100;
    /// area_start[a] .. area_start[a+1]-1 are the locations of area a.
    std::vector<int> area_start;
    int types = 20;
    std::vector<int> group_of;
    Eigen::MatrixXd attract;   ///< types x areas
    Eigen::MatrixXd base_rent; ///< types x areas
    Eigen::VectorXd revenue;   ///< per type
    std::vector<CountBounds> count_bounds;
    std::array<int, kSizeClasses> size_caps{};
    std::array<double, kSizeClasses> size_factor{1.0, 1.9, 2.7};
    double synergy_bonus = 1.0;
    double penalty_weight_init = 0.0;

    int areas() const { return static_cast<int>(area_start.size()) - 1; }
    int area_size(int area) const { return area_start[static_cast<std::size_t>(area) + 1] - area_start[static_cast<std::size_t>(area)]; }
    int area_of(int location) const;

    /// Throws InstanceError on broken invariants.
    void validate() const;

    friend bool operator==(const MallInstance& a, const MallInstance& b);
};

/// max(0, 1 - |n - ideal| / max(ideal, 1))
double count_factor(int shops, int ideal);

/// Rent, bound violations (type counts and size caps) and penalized rent
/// (raw - weight * violation).
Fitness full_rent(const MallInstance& instance, std::span<const int> type_at, double weight);

/// Rent of one area alone: count factors use within-area shop counts and no
/// global constraint is visible, so violation is always 0.
Fitness area_sub_fitness(const MallInstance& instance, int area, std::span<const int> partial, double weight);

struct GeneratorParams {
    int locations = 100;
    int areas = 5;
    int types = 20;
    double tightness = 0.5;
    double synergy_bonus = 1.0;
};

MallInstance generate_mall_instance(const GeneratorParams& params, std::uint64_t seed);

/// <= 12 locations, <= 4 types, two areas.
MallInstance generate_tiny_mall_instance(std::uint64_t seed);

std::string to_text(const MallInstance& instance);
MallInstance mall_instance_from_text(const std::string& text);

/// Fitness keys are area indices; the top population uses full rent.
class MallProblem : public Problem {
public:
    explicit MallProblem(MallInstance instance);

    const MallInstance& instance() const { return instance_; }

    std::string name() const override { return "mall"; }
    Sense sense() const override { return Sense::maximize; }
    int length() const override { return instance_.locations; }
    std::span<const int> alleles(int) const override { return all_types_; }
    Evaluation evaluate(int fitness_key, const GeneMask& mask, std::span<const int> genes) const override;
    Evaluation evaluate_full(std::span<const int> genes) const override;
    /// One population per area plus the full population.
    Topology pyramid_topology(int sub_size, int top_size) const override;
    std::optional<double> initial_penalty_weight() const override;
    double censored_value() const override { return 0.0; }

private:
    MallInstance instance_;
    std::vector<int> all_types_;
};

} // namespace pyramid::mall
