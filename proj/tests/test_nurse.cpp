#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "pyramid/nurse.hpp"

using namespace pyramid;
using namespace pyramid::nurse;

namespace {

std::vector<int> random_solution(const NurseInstance& inst, Rng& rng) {
    std::vector<int> sol;
    for (int i = 0; i < inst.nurses(); ++i) {
        const auto& f = inst.feasible[static_cast<std::size_t>(i)];
        sol.push_back(f[rng.index(f.size())]);
    }
    return sol;
}

// Per-grade increment of the cumulative demand, then straight-line sums.
oracle::Score grade_set_score(const NurseInstance& inst, GradeSet set, const std::vector<int>& full) {
    oracle::Score s;
    for (int k = 0; k < kSlots; ++k) {
        int need = 0, have = 0;
        for (int g = 1; g <= inst.grades; ++g) {
            if (!(set & (1u << (g - 1)))) continue;
            need += inst.demand(k, g - 1) - (g > 1 ? inst.demand(k, g - 2) : 0);
        }
        for (int i = 0; i < inst.nurses(); ++i) {
            if (set & (1u << (inst.grade_of[static_cast<std::size_t>(i)] - 1))) {
                have += (inst.patterns[static_cast<std::size_t>(full[static_cast<std::size_t>(i)])] >> k) & 1;
            }
        }
        s.violation += std::max(need - have, 0);
    }
    for (int i = 0; i < inst.nurses(); ++i) {
        if (set & (1u << (inst.grade_of[static_cast<std::size_t>(i)] - 1))) s.raw += inst.pref(i, full[static_cast<std::size_t>(i)]);
    }
    return s;
}

} // namespace

TEST_CASE("pattern classes and counts") {
    CHECK(classify(0) == PatternClass::Empty);
    CHECK(classify(0b0011111) == PatternClass::Day);
    CHECK(classify(0b0001111u << 7) == PatternClass::Night);
    CHECK(classify(0b11u | (1u << 9)) == PatternClass::Combined);
    CHECK(day_count(0b0011111) == 5);
    CHECK(night_count(0b0001111u << 7) == 4);
    CHECK(covers(0b100, 2));
    CHECK_FALSE(covers(0b100, 1));
}

TEST_CASE("feasible pattern sets match the contract definition") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 20, .combined = 0.3}, seed);
        for (int i = 0; i < inst.nurses(); ++i) {
            const auto expect = oracle::nurse_feasible(inst, i);
            CHECK(feasible_patterns(inst, i) == expect);
            CHECK(inst.feasible[static_cast<std::size_t>(i)] == expect);
            CHECK_FALSE(expect.empty());
        }
    }
}

TEST_CASE("full fitness matches the straight-line evaluator") {
    Rng rng(5);
    int cases = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 30}, seed);
        for (int t = 0; t < 200; ++t, ++cases) {
            const auto sol = random_solution(inst, rng);
            const auto want = oracle::nurse_score(inst, sol);
            const double w = rng.uniform(1, 50);
            const auto got = full_fitness(inst, sol, w);
            REQUIRE(got.raw == want.raw);
            REQUIRE(got.violation == want.violation);
            REQUIRE(got.penalized == doctest::Approx(want.raw + w * want.violation));
            for (int k = 0; k < kSlots; ++k) {
                for (int g = 1; g <= 3; ++g) {
                    int c = 0;
                    for (int i = 0; i < inst.nurses(); ++i) {
                        c += inst.grade_of[static_cast<std::size_t>(i)] <= g &&
                             ((inst.patterns[static_cast<std::size_t>(sol[static_cast<std::size_t>(i)])] >> k) & 1);
                    }
                    REQUIRE(cover(inst, sol, k, g) == c);
                }
            }
        }
    }
    CHECK(cases >= 1000);
}

TEST_CASE("sub-fitness matches per-grade increments for every grade set") {
    Rng rng(8);
    int cases = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 25}, seed);
        const NurseProblem problem(inst);
        for (int t = 0; t < 30; ++t) {
            const auto full = random_solution(inst, rng);
            for (GradeSet set = 1; set < 8; ++set, ++cases) {
                const auto members = nurses_in(inst, set);
                std::vector<int> partial;
                for (int i : members) partial.push_back(full[static_cast<std::size_t>(i)]);
                const auto want = grade_set_score(inst, set, full);
                const auto got = sub_fitness(inst, set, partial, 0.0);
                REQUIRE(got.raw == want.raw);
                REQUIRE(got.violation == want.violation);
                const auto e = problem.evaluate(static_cast<int>(set), GeneMask(members), partial);
                REQUIRE(e.raw == want.raw);
                REQUIRE(e.violation == want.violation);
            }
            // Without substitution between grades, the all-grades aggregate
            // can never report more shortage than the exact evaluator.
            REQUIRE(sub_fitness(inst, 7, full, 0.0).violation <= full_fitness(inst, full, 0.0).violation);
        }
    }
    CHECK(cases >= 1000);
}

TEST_CASE("aggregate demand is additive over disjoint grade sets") {
    const auto inst = generate_instance(GeneratorParams{.nurses = 30}, 3);
    for (int k = 0; k < kSlots; ++k) {
        CHECK(aggregate_demand(inst, 7, k) == inst.demand(k, 2));
        CHECK(aggregate_demand(inst, 1, k) == inst.demand(k, 0));
        for (GradeSet a = 1; a < 8; ++a) {
            for (GradeSet b = 1; b < 8; ++b) {
                if (a & b) continue;
                CHECK(aggregate_demand(inst, a | b, k) == aggregate_demand(inst, a, k) + aggregate_demand(inst, b, k));
            }
        }
    }
    CHECK_THROWS_AS(sub_fitness(inst, 8, std::vector<int>{}, 1.0), ConfigurationError);
    CHECK_THROWS_AS(sub_fitness(inst, 1, std::vector<int>{0}, 1.0), ContractViolation);
}

TEST_CASE("generated demand is cumulative and every reference-roster ward is feasible") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto inst = generate_tiny_instance(3 + static_cast<int>(seed % 2), seed, 1.0);
        REQUIRE(inst.nurses() <= 4);
        for (int i = 0; i < inst.nurses(); ++i) REQUIRE(inst.feasible[static_cast<std::size_t>(i)].size() <= 8);
        for (int k = 0; k < kSlots; ++k) {
            REQUIRE(inst.demand(k, 0) <= inst.demand(k, 1));
            REQUIRE(inst.demand(k, 1) <= inst.demand(k, 2));
        }
        REQUIRE(oracle::nurse_optimum(inst).feasible > 0);
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 30, .tightness = 0.0}, seed);
        CHECK(inst.demand.isZero());
    }
}

TEST_CASE("generator validation and determinism") {
    CHECK_THROWS_AS(generate_instance(GeneratorParams{.nurses = 2}, 1), InstanceError);
    CHECK_THROWS_AS(generate_instance(GeneratorParams{.tightness = 1.5}, 1), InstanceError);
    CHECK(generate_instance({}, 4) == generate_instance({}, 4));
    CHECK_FALSE(generate_instance({}, 4) == generate_instance({}, 5));
    const auto legacy = generate_instance(GeneratorParams{.nurses = 30, .tightness = 0.5, .reference_roster = false}, 2);
    CHECK(legacy.nurses() == 30);
}

TEST_CASE("instance text round-trips and rejects foreign input") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 12, .combined = 0.5}, seed);
        CHECK(nurse_instance_from_text(to_text(inst)) == inst);
    }
    CHECK_THROWS_AS(nurse_instance_from_text("{"), InstanceError);
    CHECK_THROWS_AS(nurse_instance_from_text(R"({"format":"x","version":1})"), InstanceError);
}

TEST_CASE("finalize rejects a nurse without feasible patterns") {
    auto inst = generate_instance(GeneratorParams{.nurses = 6}, 1);
    inst.day_shifts[0] = 7;
    inst.night_shifts[0] = 7;
    inst.combined_shifts[0] = 0;
    CHECK_THROWS_AS(inst.finalize(), InstanceError);
}

TEST_CASE("balance check matches its definition") {
    Rng rng(12);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = generate_instance(GeneratorParams{.nurses = 20}, seed);
        for (int t = 0; t < 100; ++t) {
            const auto sol = random_solution(inst, rng);
            bool ok = true;
            for (int block = 0; block < 2; ++block) {
                int net = 0;
                for (int k = block * 7; k < block * 7 + 7; ++k) net += cover(inst, sol, k, 3) - inst.demand(k, 2);
                ok = ok && net >= 0;
            }
            REQUIRE(is_balanced(inst, sol) == ok);
        }
    }
}

TEST_CASE("grade pyramid topology") {
    const NurseProblem p(generate_instance(GeneratorParams{.nurses = 30}, 1));
    const auto t = p.pyramid_topology(100, 300);
    REQUIRE(t.populations.size() == 8);
    std::vector<std::string> labels;
    for (const auto& pop : t.populations) labels.push_back(pop.label);
    CHECK(labels == std::vector<std::string>{"1", "2", "3", "1+2", "2+3", "3+1", "1+2+3", "all"});
    CHECK(t.populations[3].lower_partners == std::vector<int>{0, 1});
    CHECK(t.populations[6].lower_partners == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(t.populations[7].fitness_key == kFullFitness);
    CHECK_NOTHROW(validate_topology(t, 30));
    CHECK(t.total_size() == 1000);
}
