#include <bit>
#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pyramid/nurse.hpp"

namespace pyramid::nurse {
namespace {

constexpr const char* kFormat = "pyramid-nurse-instance";
constexpr int kVersion = 1;

std::string bitstring(Pattern p) {
    std::string s(kSlots, '0');
    for (int k = 0; k < kSlots; ++k) if (covers(p, k)) s[static_cast<std::size_t>(k)] = '1';
    return s;
}

Pattern parse_bitstring(const std::string& s) {
    if (s.size() != kSlots) throw InstanceError("pattern bitstring must have 14 characters");
    Pattern p = 0;
    for (int k = 0; k < kSlots; ++k) {
        const char c = s[static_cast<std::size_t>(k)];
        if (c == '1') p = static_cast<Pattern>(p | (1u << k));
        else if (c != '0') throw InstanceError("pattern bitstring must contain only 0 and 1");
    }
    return p;
}

// Patterns of `slots` consecutive bits starting at `offset` with exactly `count` set, ascending.
std::vector<Pattern> combinations(int offset, int slots, int count) {
    std::vector<Pattern> out;
    for (unsigned bits = 0; bits < (1u << slots); ++bits) {
        if (std::popcount(bits) == count) out.push_back(static_cast<Pattern>(bits << offset));
    }
    return out;
}

void sample_down(std::vector<Pattern>& group, int cap, Rng& rng) {
    if (cap <= 0 || static_cast<int>(group.size()) <= cap) return;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cap); ++i) {
        std::swap(group[i], group[i + rng.index(group.size() - i)]);
    }
    group.resize(static_cast<std::size_t>(cap));
    std::sort(group.begin(), group.end());
}

} // namespace

NurseInstance generate_instance(const GeneratorParams& params, std::uint64_t seed) {
    const int n = params.nurses;
    if (n < 3) throw InstanceError("generator needs at least one nurse per grade");
    if (!(params.tightness >= 0.0 && params.tightness <= 1.0)) throw InstanceError("tightness must lie in [0, 1]");
    Rng rng(mix64(seed ^ 0x6e75727365ULL));

    NurseInstance inst;
    inst.grades = 3;

    // Grade counts by largest remainder, at least one nurse per grade.
    std::array<int, 3> count{};
    double total_mix = params.grade_mix[0] + params.grade_mix[1] + params.grade_mix[2];
    int assigned = 0;
    for (int g = 0; g < 3; ++g) {
        count[static_cast<std::size_t>(g)] =
            std::max(1, static_cast<int>(std::floor(params.grade_mix[static_cast<std::size_t>(g)] / total_mix * n)));
        assigned += count[static_cast<std::size_t>(g)];
    }
    for (int g = 2; assigned < n; g = (g + 2) % 3, ++assigned) ++count[static_cast<std::size_t>(g)];
    for (int g = 0; assigned > n; g = (g + 1) % 3) {
        if (count[static_cast<std::size_t>(g)] > 1) {
            --count[static_cast<std::size_t>(g)];
            --assigned;
        }
    }
    for (int g = 0; g < 3; ++g) inst.grade_of.insert(inst.grade_of.end(), static_cast<std::size_t>(count[static_cast<std::size_t>(g)]), g + 1);

    bool any_combined = false;
    for (int i = 0; i < n; ++i) {
        const bool full = rng.bernoulli(params.full_time);
        int d = full ? 5 : 4, nt = full ? 4 : 3, b = 0;
        const double u = rng.uniform();
        if (u < params.day_only) nt = 0;
        else if (u < params.day_only + params.night_only) d = 0;
        else if (rng.bernoulli(params.combined)) b = d;
        any_combined = any_combined || b > 0;
        inst.day_shifts.push_back(d);
        inst.night_shifts.push_back(nt);
        inst.combined_shifts.push_back(b);
    }

    for (auto [offset, k] : {std::pair{0, 4}, {0, 5}, {kDays, 3}, {kDays, 4}}) {
        auto group = combinations(offset, kDays, k);
        sample_down(group, params.universe_cap, rng);
        inst.patterns.insert(inst.patterns.end(), group.begin(), group.end());
    }
    if (any_combined) {
        for (int b : {4, 5}) {
            std::vector<Pattern> mixed;
            for (int tries = 0; static_cast<int>(mixed.size()) < params.combined_patterns && tries < 100000; ++tries) {
                Pattern p = 0;
                while (std::popcount(static_cast<unsigned>(p)) < b) p = static_cast<Pattern>(p | (1u << rng.index(kSlots)));
                if (classify(p) == PatternClass::Combined && std::find(mixed.begin(), mixed.end(), p) == mixed.end()) {
                    mixed.push_back(p);
                }
            }
            std::sort(mixed.begin(), mixed.end());
            inst.patterns.insert(inst.patterns.end(), mixed.begin(), mixed.end());
        }
    }

    const int m = inst.pattern_count();
    inst.pref = Eigen::MatrixXi::Constant(n, m, 100);
    inst.demand = Eigen::MatrixXi::Zero(kSlots, 3);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(kSlots, 3);
    std::vector<int> roster;
    for (int i = 0; i < n; ++i) {
        const auto feasible = feasible_patterns(inst, i);
        if (feasible.empty()) throw InstanceError("generator produced a nurse without feasible patterns");
        for (int j : feasible) {
            const Pattern pat = inst.patterns[static_cast<std::size_t>(j)];
            double v = rng.uniform();
            if (classify(pat) == PatternClass::Night) v = params.night_aversion + (1.0 - params.night_aversion) * v;
            inst.pref(i, j) = std::min(100, static_cast<int>(std::floor(100.0 * std::pow(v, params.cost_skew))));
            for (int k = 0; k < kSlots; ++k) {
                if (!covers(pat, k)) continue;
                for (int s = inst.grade_of[static_cast<std::size_t>(i)]; s <= 3; ++s) {
                    expected(k, s - 1) += 1.0 / static_cast<double>(feasible.size());
                }
            }
        }
        std::vector<int> requested;
        for (int r = 0; r < params.requests; ++r) {
            const int j = feasible[rng.index(feasible.size())];
            inst.pref(i, j) = 0;
            requested.push_back(j);
        }
        if (params.reference_roster) {
            std::vector<int> cheap;
            for (int j : feasible) if (inst.pref(i, j) <= params.reference_cost_cap) cheap.push_back(j);
            int j;
            if (!requested.empty() && rng.bernoulli(params.reference_bias)) j = requested[rng.index(requested.size())];
            else if (!cheap.empty()) j = cheap[rng.index(cheap.size())];
            else j = feasible[rng.index(feasible.size())];
            roster.push_back(j);
        }
    }
    if (params.reference_roster) {
        // Only round(tightness * n) nurses of the hidden roster count; the rest are spare.
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        const auto counted = static_cast<std::size_t>(std::lround(params.tightness * n));
        for (std::size_t c = 0; c < counted; ++c) {
            const int i = order[c];
            const Pattern pat = inst.patterns[static_cast<std::size_t>(roster[static_cast<std::size_t>(i)])];
            for (int k = 0; k < kSlots; ++k) {
                if (!covers(pat, k)) continue;
                for (int s = inst.grade_of[static_cast<std::size_t>(i)]; s <= 3; ++s) inst.demand(k, s - 1) += 1;
            }
        }
    } else {
        for (int k = 0; k < kSlots; ++k) {
            for (int s = 0; s < 3; ++s) inst.demand(k, s) = static_cast<int>(std::floor(params.tightness * expected(k, s) + 1e-9));
        }
    }
    inst.finalize();
    return inst;
}

NurseInstance generate_tiny_instance(int nurses, std::uint64_t seed, double tightness) {
    GeneratorParams p;
    p.nurses = nurses;
    p.universe_cap = 4;
    p.combined = 0.0;
    p.tightness = tightness;
    p.requests = 1;
    return generate_instance(p, seed);
}

std::string to_text(const NurseInstance& inst) {
    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["n"] = inst.nurses();
    j["m"] = inst.pattern_count();
    j["p"] = inst.grades;
    auto& a = j["a"] = nlohmann::ordered_json::array();
    for (Pattern pat : inst.patterns) a.push_back(bitstring(pat));
    j["grades"] = inst.grade_of;
    auto& pref = j["pref"] = nlohmann::ordered_json::array();
    for (int i = 0; i < inst.nurses(); ++i) {
        std::vector<int> row(static_cast<std::size_t>(inst.pattern_count()));
        for (int c = 0; c < inst.pattern_count(); ++c) row[static_cast<std::size_t>(c)] = inst.pref(i, c);
        pref.push_back(row);
    }
    j["D"] = inst.day_shifts;
    j["N"] = inst.night_shifts;
    j["B"] = inst.combined_shifts;
    auto& r = j["R"] = nlohmann::ordered_json::array();
    for (int k = 0; k < kSlots; ++k) {
        std::vector<int> row(static_cast<std::size_t>(inst.grades));
        for (int s = 0; s < inst.grades; ++s) row[static_cast<std::size_t>(s)] = inst.demand(k, s);
        r.push_back(row);
    }
    return j.dump(1) + "\n";
}

NurseInstance nurse_instance_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("malformed nurse instance: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormat) throw InstanceError("not a nurse instance file");
    if (j.value("version", 0) != kVersion) throw InstanceError("unsupported nurse instance version");
    try {
        NurseInstance inst;
        const int n = j.at("n").get<int>();
        const int m = j.at("m").get<int>();
        inst.grades = j.at("p").get<int>();
        for (const auto& s : j.at("a")) inst.patterns.push_back(parse_bitstring(s.get<std::string>()));
        inst.grade_of = j.at("grades").get<std::vector<int>>();
        const auto& pref = j.at("pref");
        inst.pref.resize(n, m);
        if (static_cast<int>(pref.size()) != n) throw InstanceError("pref must have n rows");
        for (int i = 0; i < n; ++i) {
            const auto row = pref[static_cast<std::size_t>(i)].get<std::vector<int>>();
            if (static_cast<int>(row.size()) != m) throw InstanceError("pref rows must have m entries");
            for (int c = 0; c < m; ++c) inst.pref(i, c) = row[static_cast<std::size_t>(c)];
        }
        inst.day_shifts = j.at("D").get<std::vector<int>>();
        inst.night_shifts = j.at("N").get<std::vector<int>>();
        inst.combined_shifts = j.at("B").get<std::vector<int>>();
        const auto& r = j.at("R");
        if (r.size() != kSlots) throw InstanceError("R must have 14 rows");
        inst.demand.resize(kSlots, inst.grades);
        for (int k = 0; k < kSlots; ++k) {
            const auto row = r[static_cast<std::size_t>(k)].get<std::vector<int>>();
            if (static_cast<int>(row.size()) != inst.grades) throw InstanceError("R rows must have p entries");
            for (int s = 0; s < inst.grades; ++s) inst.demand(k, s) = row[static_cast<std::size_t>(s)];
        }
        if (inst.nurses() != n || inst.pattern_count() != m) throw InstanceError("n/m disagree with the data");
        inst.finalize();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("malformed nurse instance: ") + e.what());
    }
}

} // namespace pyramid::nurse
