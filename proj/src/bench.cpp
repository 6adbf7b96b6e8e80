#include "pyramid/bench.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pyramid/partnering.hpp"

namespace pyramid::bench {

std::string_view token(Family family) { return family == Family::nurse ? "nurse" : "mall"; }

std::optional<Family> parse_family(std::string_view t) {
    if (t == "nurse") return Family::nurse;
    if (t == "mall") return Family::mall;
    return std::nullopt;
}

std::string Variant::label() const {
    std::string s;
    if (single_population) s = "SGA";
    else if (eval.kind == EvalKind::Direct) s = token(mating.kind);
    else s = std::string(token(mating.kind)) + "/" + std::string(token(eval.kind));
    if (hillclimb) s += "&H";
    return s;
}

Variant parse_variant(std::string_view label) {
    Variant v;
    std::string_view rest = label;
    if (rest.size() >= 2 && rest.substr(rest.size() - 2) == "&H") {
        v.hillclimb = true;
        rest.remove_suffix(2);
    }
    if (rest == "SGA") {
        v.single_population = true;
        return v;
    }
    const auto slash = rest.find('/');
    const auto m = parse_mating(rest.substr(0, slash));
    if (!m) {
        throw ConfigurationError("unknown mating strategy in '" + std::string(label) + "'; valid: " + mating_tokens());
    }
    v.mating.kind = *m;
    if (slash != std::string_view::npos) {
        const auto e = parse_eval(rest.substr(slash + 1));
        if (!e) {
            throw ConfigurationError("unknown evaluation strategy in '" + std::string(label) + "'; valid: " + eval_tokens());
        }
        v.eval.kind = *e;
    }
    return v;
}

ExperimentConfig ExperimentConfig::defaults(Family family) {
    ExperimentConfig c;
    c.family = family;
    c.pyramid = family == Family::nurse ? PyramidConfig::nurse_defaults() : PyramidConfig::mall_defaults();
    return c;
}

void ExperimentConfig::validate() const {
    if (runs_per_instance < 1) throw ConfigurationError("runs_per_instance must be at least 1");
    if (variants.empty()) throw ConfigurationError("at least one strategy is required");
    if (instance_paths.empty() && generated_instances < 1) throw ConfigurationError("no instances to run");
    if (hillclimb_budget < 0) throw ConfigurationError("hillclimb budget must be non-negative");
    for (const auto& v : variants) {
        if (v.hillclimb && family != Family::nurse) throw ConfigurationError("the hillclimber exists for the nurse problem only");
    }
    pyramid.validate();
}

namespace {

using json = nlohmann::ordered_json;

json pyramid_json(const PyramidConfig& p) {
    return {{"total_population", p.total_population},
            {"sub_population_size", p.sub_population_size},
            {"top_population_size", p.top_population_size},
            {"uniform_p", p.uniform_p},
            {"mutation_rate", p.mutation_rate},
            {"replacement_fraction", p.replacement_fraction},
            {"cross_level_probability", p.cross_level_probability},
            {"stagnation_limit", p.stagnation_limit},
            {"max_generations", p.max_generations},
            {"wall_clock_limit", p.wall_clock_limit},
            {"penalty", {{"growth", p.penalty.growth}, {"decay", p.penalty.decay}, {"delta", p.penalty.delta},
                         {"w_min", p.penalty.w_min}, {"w_max", p.penalty.w_max}}}};
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void pyramid_from(const nlohmann::json& j, PyramidConfig& p) {
    read(j, "total_population", p.total_population);
    read(j, "sub_population_size", p.sub_population_size);
    read(j, "top_population_size", p.top_population_size);
    read(j, "uniform_p", p.uniform_p);
    read(j, "mutation_rate", p.mutation_rate);
    read(j, "replacement_fraction", p.replacement_fraction);
    read(j, "cross_level_probability", p.cross_level_probability);
    read(j, "stagnation_limit", p.stagnation_limit);
    read(j, "max_generations", p.max_generations);
    read(j, "wall_clock_limit", p.wall_clock_limit);
    if (j.contains("penalty")) {
        const auto& q = j.at("penalty");
        read(q, "growth", p.penalty.growth);
        read(q, "decay", p.penalty.decay);
        read(q, "delta", p.penalty.delta);
        read(q, "w_min", p.penalty.w_min);
        read(q, "w_max", p.penalty.w_max);
    }
}

json nurse_json(const nurse::GeneratorParams& p) {
    return {{"nurses", p.nurses}, {"grade_mix", p.grade_mix}, {"full_time", p.full_time},
            {"day_only", p.day_only}, {"night_only", p.night_only}, {"combined", p.combined},
            {"tightness", p.tightness}, {"cost_skew", p.cost_skew}, {"night_aversion", p.night_aversion},
            {"requests", p.requests}, {"universe_cap", p.universe_cap}, {"combined_patterns", p.combined_patterns},
            {"reference_roster", p.reference_roster}, {"reference_bias", p.reference_bias},
            {"reference_cost_cap", p.reference_cost_cap}};
}

void nurse_from(const nlohmann::json& j, nurse::GeneratorParams& p) {
    read(j, "nurses", p.nurses);
    read(j, "grade_mix", p.grade_mix);
    read(j, "full_time", p.full_time);
    read(j, "day_only", p.day_only);
    read(j, "night_only", p.night_only);
    read(j, "combined", p.combined);
    read(j, "tightness", p.tightness);
    read(j, "cost_skew", p.cost_skew);
    read(j, "night_aversion", p.night_aversion);
    read(j, "requests", p.requests);
    read(j, "universe_cap", p.universe_cap);
    read(j, "combined_patterns", p.combined_patterns);
    read(j, "reference_roster", p.reference_roster);
    read(j, "reference_bias", p.reference_bias);
    read(j, "reference_cost_cap", p.reference_cost_cap);
}

json mall_json(const mall::GeneratorParams& p) {
    return {{"locations", p.locations}, {"areas", p.areas}, {"types", p.types}, {"tightness", p.tightness},
            {"synergy_bonus", p.synergy_bonus}};
}

void mall_from(const nlohmann::json& j, mall::GeneratorParams& p) {
    read(j, "locations", p.locations);
    read(j, "areas", p.areas);
    read(j, "types", p.types);
    read(j, "tightness", p.tightness);
    read(j, "synergy_bonus", p.synergy_bonus);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InstanceError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string to_json(const ExperimentConfig& c) {
    json j;
    j["format"] = ExperimentConfig::kFormat;
    j["version"] = ExperimentConfig::kVersion;
    j["problem"] = token(c.family);
    j["instances"] = c.instance_paths;
    j["generated_instances"] = c.generated_instances;
    j["instance_seed"] = c.instance_seed;
    if (c.family == Family::nurse) j["generator"] = nurse_json(c.nurse_params);
    else j["generator"] = mall_json(c.mall_params);
    auto& strategies = j["strategies"] = json::array();
    for (const auto& v : c.variants) strategies.push_back(v.label());
    j["runs_per_instance"] = c.runs_per_instance;
    j["base_seed"] = c.base_seed;
    j["pyramid"] = pyramid_json(c.pyramid);
    j["hillclimb_budget"] = c.hillclimb_budget;
    if (c.bound_objective) j["bound_objective"] = *c.bound_objective;
    if (c.bound_feasibility) j["bound_feasibility"] = *c.bound_feasibility;
    return j.dump(1) + "\n";
}

ExperimentConfig experiment_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed experiment config: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != ExperimentConfig::kFormat) throw ConfigurationError("not an experiment config");
    if (j.value("version", 0) != ExperimentConfig::kVersion) throw ConfigurationError("unsupported experiment config version");
    try {
        const auto family = parse_family(j.value("problem", "nurse"));
        if (!family) throw ConfigurationError("problem must be nurse or mall");
        ExperimentConfig c = ExperimentConfig::defaults(*family);
        read(j, "instances", c.instance_paths);
        read(j, "generated_instances", c.generated_instances);
        read(j, "instance_seed", c.instance_seed);
        if (j.contains("generator")) {
            if (c.family == Family::nurse) nurse_from(j.at("generator"), c.nurse_params);
            else mall_from(j.at("generator"), c.mall_params);
        }
        for (const auto& s : j.at("strategies")) c.variants.push_back(parse_variant(s.get<std::string>()));
        read(j, "runs_per_instance", c.runs_per_instance);
        read(j, "base_seed", c.base_seed);
        if (j.contains("pyramid")) pyramid_from(j.at("pyramid"), c.pyramid);
        read(j, "hillclimb_budget", c.hillclimb_budget);
        if (j.contains("bound_objective")) c.bound_objective = j.at("bound_objective").get<double>();
        if (j.contains("bound_feasibility")) c.bound_feasibility = j.at("bound_feasibility").get<double>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed experiment config: ") + e.what());
    }
}

std::string ExperimentConfig::digest() const {
    // The per-run seed is not part of the experiment identity.
    std::string text = to_json(*this);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

InstanceSet InstanceSet::load(const ExperimentConfig& config) {
    InstanceSet set;
    set.family_ = config.family;
    const auto add = [&](const std::string& text, std::uint64_t seed, bool from_file) {
        if (config.family == Family::nurse) {
            auto inst = from_file ? nurse::nurse_instance_from_text(text) : nurse::generate_instance(config.nurse_params, seed);
            set.problems_.push_back(std::make_unique<nurse::NurseProblem>(std::move(inst)));
        } else {
            auto inst = from_file ? mall::mall_instance_from_text(text) : mall::generate_mall_instance(config.mall_params, seed);
            set.problems_.push_back(std::make_unique<mall::MallProblem>(std::move(inst)));
        }
    };
    if (!config.instance_paths.empty()) {
        for (const auto& path : config.instance_paths) add(read_file(path), 0, true);
    } else {
        for (int i = 0; i < config.generated_instances; ++i) {
            add({}, config.instance_seed + static_cast<std::uint64_t>(i), false);
        }
    }
    return set;
}

std::unique_ptr<LocalImprover> InstanceSet::improver(std::size_t i, int budget) const {
    if (family_ != Family::nurse) return nullptr;
    const auto& p = static_cast<const nurse::NurseProblem&>(*problems_[i]);
    return std::make_unique<nurse::NurseHillclimber>(p.instance(), budget);
}

CellResult run_cell(const ExperimentConfig& config, const InstanceSet& instances, const Variant& variant, int instance,
                    int run_index) {
    CellResult cell;
    cell.strategy = variant.label();
    cell.instance = instance;
    cell.run = run_index;
    cell.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(instance), static_cast<std::uint64_t>(run_index));
    try {
        const Problem& problem = instances.problem(static_cast<std::size_t>(instance));
        Topology topology;
        if (variant.single_population) topology = single_population_topology(problem, config.pyramid.total_population);
        else if (variant.mating.kind == MatingKind::Joined) topology = joined_topology(problem, config.pyramid);
        else topology = problem.pyramid_topology(config.pyramid.sub_population_size, config.pyramid.top_population_size);

        PyramidConfig pc = config.pyramid;
        pc.rng_seed = cell.seed;
        Rng rng(cell.seed);
        PyramidState state = init_pyramid(problem, topology, pc, variant.mating, variant.eval, rng);
        std::unique_ptr<LocalImprover> improver;
        if (variant.hillclimb) {
            improver = instances.improver(static_cast<std::size_t>(instance), config.hillclimb_budget);
            state.improver = improver.get();
        }
        const RunResult r = run(state, rng);
        cell.feasible = r.feasible;
        cell.raw = r.best_raw;
        cell.violation = r.best_violation;
        cell.penalized = penalize(problem.sense(), r.best_raw, r.best_violation, state.populations[state.top()].penalty.weight());
        cell.generations = r.generations;
        cell.hillclimb_moves = r.hillclimb_moves;
        cell.time_limited = r.time_limited;
    } catch (const std::exception&) {
        cell.failed = true;
        cell.feasible = false;
    }
    return cell;
}

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PYRAMID_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

ResultSet run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    const InstanceSet instances = InstanceSet::load(config);
    const int n_inst = static_cast<int>(instances.size());
    const int runs = config.runs_per_instance;
    const std::size_t per_variant = static_cast<std::size_t>(n_inst) * static_cast<std::size_t>(runs);

    ResultSet out;
    out.family = config.family;
    out.config_digest = config.digest();
    out.bound_objective = config.bound_objective;
    out.bound_feasibility = config.bound_feasibility;
    out.cells.resize(config.variants.size() * per_variant);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < out.cells.size(); k = next++) {
            const std::size_t v = k / per_variant, rest = k % per_variant;
            out.cells[k] = run_cell(config, instances, config.variants[v], static_cast<int>(rest / runs),
                                    static_cast<int>(rest % runs));
        }
    };
    const int n = std::min<int>(thread_count(threads), static_cast<int>(std::max<std::size_t>(out.cells.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace pyramid::bench
