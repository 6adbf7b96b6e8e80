#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "pyramid/mall.hpp"

namespace pyramid::mall {
namespace {

constexpr const char* kFormat = "pyramid-mall-instance";
constexpr int kVersion = 1;
constexpr int kRetryCap = 50;

// Expected shops per size class when `size` locations each draw one of `types` uniformly.
std::array<double, kSizeClasses> expected_classes(int size, int types) {
    std::array<double, kSizeClasses> out{};
    const double q = 1.0 / types;
    double pmf = std::pow(1.0 - q, size);
    for (int x = 0; x <= size; ++x) {
        const auto shops = size_decompose(x);
        for (int c = 0; c < kSizeClasses; ++c) out[static_cast<std::size_t>(c)] += pmf * shops[static_cast<std::size_t>(c)];
        if (q < 1.0) pmf *= static_cast<double>(size - x) / (x + 1) * q / (1.0 - q);
        else pmf = x + 1 == size ? 1.0 : 0.0;
    }
    return out;
}

} // namespace

MallInstance generate_mall_instance(const GeneratorParams& params, std::uint64_t seed) {
    if (params.locations < 1 || params.areas < 1 || params.areas > params.locations) {
        throw InstanceError("mall needs at least one location per area");
    }
    if (params.types < 1) throw InstanceError("mall needs at least one shop type");
    if (!(params.tightness >= 0.0 && params.tightness <= 1.0)) throw InstanceError("tightness must lie in [0, 1]");
    if (params.synergy_bonus < 0.0) throw InstanceError("synergy bonus must be non-negative");
    Rng rng(mix64(seed ^ 0x6d616c6cULL));

    MallInstance inst;
    inst.locations = params.locations;
    inst.types = params.types;
    inst.synergy_bonus = params.synergy_bonus;
    for (int a = 0; a <= params.areas; ++a) {
        inst.area_start.push_back(static_cast<int>(static_cast<long>(a) * params.locations / params.areas));
    }

    // Groups: a shuffled partition of the types into blocks of five.
    std::vector<int> order(static_cast<std::size_t>(params.types));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    inst.group_of.assign(order.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) inst.group_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i / 5);

    const int T = params.types, A = params.areas;
    inst.attract.resize(T, A);
    inst.base_rent.resize(T, A);
    inst.revenue.resize(T);
    for (int t = 0; t < T; ++t) {
        const double scale = rng.uniform(0.5, 2.0);
        inst.revenue(t) = 12.0 * rng.uniform(0.5, 2.0);
        for (int a = 0; a < A; ++a) {
            inst.attract(t, a) = rng.uniform(0.5, 1.5);
            inst.base_rent(t, a) = 4.0 * scale * rng.uniform(0.8, 1.2);
        }
    }

    std::array<double, kSizeClasses> expected{};
    for (int a = 0; a < A; ++a) {
        const auto e = expected_classes(inst.area_size(a), T);
        for (int c = 0; c < kSizeClasses; ++c) expected[static_cast<std::size_t>(c)] += T * e[static_cast<std::size_t>(c)];
    }
    const double expected_shops = expected[0] + expected[1] + expected[2];
    const double slack = 1.0 - params.tightness;

    bool ok = false;
    for (int attempt = 0; attempt < kRetryCap && !ok; ++attempt) {
        std::vector<double> popularity(static_cast<std::size_t>(T));
        for (auto& w : popularity) w = rng.uniform(0.5, 1.5);
        const double total = std::accumulate(popularity.begin(), popularity.end(), 0.0);
        inst.count_bounds.clear();
        int min_sum = 0;
        for (int t = 0; t < T; ++t) {
            CountBounds b;
            b.ideal = std::max(1, static_cast<int>(std::lround(expected_shops * popularity[static_cast<std::size_t>(t)] / total)));
            b.min = static_cast<int>(std::floor(params.tightness * b.ideal));
            b.max = b.ideal + static_cast<int>(std::ceil(b.ideal * 1.8 * slack)) + static_cast<int>(std::lround(2.0 * slack));
            min_sum += b.min;
            inst.count_bounds.push_back(b);
        }
        ok = min_sum <= params.locations;
    }
    if (!ok) throw InstanceError("could not draw satisfiable count bounds");
    for (int c = 0; c < kSizeClasses; ++c) {
        inst.size_caps[static_cast<std::size_t>(c)] =
            static_cast<int>(std::ceil(expected[static_cast<std::size_t>(c)] * (1.1 + slack)));
    }
    inst.penalty_weight_init = inst.base_rent.mean() + inst.revenue.mean() * inst.attract.mean() * 0.5;
    inst.validate();
    return inst;
}

MallInstance generate_tiny_mall_instance(std::uint64_t seed) {
    GeneratorParams p;
    p.locations = 8 + static_cast<int>(seed % 3);
    p.areas = 2;
    p.types = 3 + static_cast<int>((seed / 3) % 2);
    p.tightness = 0.5;
    return generate_mall_instance(p, seed);
}

std::string to_text(const MallInstance& inst) {
    nlohmann::ordered_json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["locations"] = inst.locations;
    j["area_start"] = inst.area_start;
    j["types"] = inst.types;
    j["group_of"] = inst.group_of;
    auto table = [&](const Eigen::MatrixXd& m) {
        auto rows = nlohmann::ordered_json::array();
        for (int r = 0; r < m.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(m.cols()));
            for (int c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
            rows.push_back(row);
        }
        return rows;
    };
    j["attract"] = table(inst.attract);
    j["base_rent"] = table(inst.base_rent);
    j["revenue"] = std::vector<double>(inst.revenue.data(), inst.revenue.data() + inst.revenue.size());
    auto& bounds = j["count_bounds"] = nlohmann::ordered_json::array();
    for (const auto& b : inst.count_bounds) bounds.push_back({b.min, b.ideal, b.max});
    j["size_caps"] = inst.size_caps;
    j["size_factor"] = inst.size_factor;
    j["synergy_bonus"] = inst.synergy_bonus;
    j["penalty_weight_init"] = inst.penalty_weight_init;
    return j.dump(1) + "\n";
}

MallInstance mall_instance_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("malformed mall instance: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormat) throw InstanceError("not a mall instance file");
    if (j.value("version", 0) != kVersion) throw InstanceError("unsupported mall instance version");
    try {
        MallInstance inst;
        inst.locations = j.at("locations").get<int>();
        inst.area_start = j.at("area_start").get<std::vector<int>>();
        inst.types = j.at("types").get<int>();
        inst.group_of = j.at("group_of").get<std::vector<int>>();
        const int areas = inst.areas();
        if (areas < 1 || inst.types < 1) throw InstanceError("mall needs areas and shop types");
        auto table = [&](const nlohmann::json& rows, Eigen::MatrixXd& m) {
            if (static_cast<int>(rows.size()) != inst.types) throw InstanceError("rent tables need one row per type");
            m.resize(inst.types, areas);
            for (int r = 0; r < inst.types; ++r) {
                const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
                if (static_cast<int>(row.size()) != areas) throw InstanceError("rent tables need one column per area");
                for (int c = 0; c < areas; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
            }
        };
        table(j.at("attract"), inst.attract);
        table(j.at("base_rent"), inst.base_rent);
        const auto revenue = j.at("revenue").get<std::vector<double>>();
        inst.revenue = Eigen::Map<const Eigen::VectorXd>(revenue.data(), static_cast<Eigen::Index>(revenue.size()));
        for (const auto& b : j.at("count_bounds")) {
            const auto v = b.get<std::vector<int>>();
            if (v.size() != 3) throw InstanceError("count bounds are [min, ideal, max] triples");
            inst.count_bounds.push_back({v[0], v[1], v[2]});
        }
        inst.size_caps = j.at("size_caps").get<std::array<int, kSizeClasses>>();
        inst.size_factor = j.at("size_factor").get<std::array<double, kSizeClasses>>();
        inst.synergy_bonus = j.at("synergy_bonus").get<double>();
        inst.penalty_weight_init = j.at("penalty_weight_init").get<double>();
        inst.validate();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw InstanceError(std::string("malformed mall instance: ") + e.what());
    }
}

} // namespace pyramid::mall
