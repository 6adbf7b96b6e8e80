#include "pyramid/pyramid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "pyramid/partnering.hpp"

namespace pyramid {
namespace {

bool needs_partner_eval(const PyramidState& state, std::size_t p) {
    return state.eval.kind != EvalKind::Direct && p != state.top() &&
           state.populations[p].fitness_key != kFullFitness;
}

std::vector<int> compute_levels(const Topology& topology) {
    const auto n = topology.populations.size();
    std::vector<int> level(n, -1);
    for (std::size_t pass = 0; pass <= n; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int lv = 0;
            bool ready = true;
            for (int partner : topology.populations[i].lower_partners) {
                const int pl = level[static_cast<std::size_t>(partner)];
                if (pl < 0) ready = false;
                lv = std::max(lv, pl + 1);
            }
            if (ready && level[i] != lv) {
                level[i] = lv;
                changed = true;
            }
        }
        if (!changed) break;
    }
    if (std::find(level.begin(), level.end(), -1) != level.end()) {
        throw ConfigurationError("topology partner graph contains a cycle");
    }
    return level;
}

void append(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
    out.push_back(';');
}

} // namespace

PyramidConfig PyramidConfig::nurse_defaults() { return {}; }

PyramidConfig PyramidConfig::mall_defaults() {
    PyramidConfig c;
    c.top_population_size = 500;
    return c;
}

void PyramidConfig::validate() const {
    if (total_population <= 0 || sub_population_size <= 0 || top_population_size <= 0) {
        throw ConfigurationError("population sizes must be positive");
    }
    if (!(uniform_p > 0.0 && uniform_p <= 1.0)) throw ConfigurationError("uniform_p must lie in (0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigurationError("mutation_rate must lie in [0, 1]");
    if (!(replacement_fraction > 0.0 && replacement_fraction < 1.0)) {
        throw ConfigurationError("replacement_fraction must lie in (0, 1)");
    }
    if (!(cross_level_probability >= 0.0 && cross_level_probability <= 1.0)) {
        throw ConfigurationError("cross_level_probability must lie in [0, 1]");
    }
    if (stagnation_limit <= 0 || max_generations <= 0) throw ConfigurationError("generation limits must be positive");
    if (!(penalty.w_min > 0.0) || penalty.w_max < penalty.w_min) throw ConfigurationError("invalid penalty bounds");
}

std::string PyramidConfig::digest() const {
    std::string s;
    for (double v : {double(total_population), double(sub_population_size), double(top_population_size), uniform_p,
                     mutation_rate, replacement_fraction, cross_level_probability, double(stagnation_limit),
                     double(max_generations), wall_clock_limit, penalty.growth, penalty.decay, penalty.delta,
                     penalty.w_min, penalty.w_max}) {
        append(s, v);
    }
    s += std::to_string(rng_seed);
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int elite_count(int size, double replacement_fraction) {
    const int replaced = static_cast<int>(std::floor(replacement_fraction * size + 1e-9));
    return std::max(0, size - replaced);
}

Fitness evaluate_direct(const PyramidState& state, std::size_t pop, std::span<const int> genes) {
    const auto& sp = state.populations[pop];
    const Evaluation e = sp.fitness_key == kFullFitness ? state.problem->evaluate_full(genes)
                                                        : state.problem->evaluate(sp.fitness_key, sp.mask, genes);
    return penalize(state.sense(), e, sp.penalty.weight());
}

Genes cross_child(const PyramidState& state, std::size_t upper, std::span<const int> upper_genes, std::size_t lower,
                  std::span<const int> lower_genes, Rng& rng) {
    if (state.migrant_uniform) {
        return uniform_crossover(upper_genes, lower_genes, state.config.uniform_p, rng).first;
    }
    if (state.populations[upper].mask == state.populations[lower].mask) {
        return cut_point_crossover(lower_genes, upper_genes, rng.index(upper_genes.size() + 1));
    }
    return transplant(lower_genes, state.embed[upper][lower], upper_genes);
}

PyramidState init_pyramid(const Problem& problem, const Topology& topology, const PyramidConfig& config,
                          MatingStrategy mating, EvalStrategy eval, Rng& rng) {
    config.validate();
    const int length = problem.length();
    validate_topology(topology, length);
    if (topology.total_size() != config.total_population) {
        throw ConfigurationError("population sizes sum to " + std::to_string(topology.total_size()) +
                                 ", expected total_population " + std::to_string(config.total_population));
    }
    for (int g = 0; g < length; ++g) {
        if (problem.alleles(g).empty()) throw InstanceError("gene " + std::to_string(g) + " has no feasible allele");
    }
    if (mating.choice_candidates < 1) throw ConfigurationError("choice_candidates must be at least 1");
    if (mating.retry_budget < 1) throw ConfigurationError("retry budget must be at least 1");

    PyramidState state;
    state.problem = &problem;
    state.config = config;
    state.mating = mating;
    state.eval = eval;
    state.migrant_uniform = topology.migrant_uniform;
    state.grid = ToroidalGrid::for_population(config.sub_population_size);

    const auto levels = compute_levels(topology);
    const auto n = topology.populations.size();
    state.populations.resize(n);
    state.embed.assign(n, std::vector<std::vector<int>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& spec = topology.populations[i];
        auto& pop = state.populations[i];
        pop.id = static_cast<int>(i);
        pop.label = spec.label;
        pop.mask = spec.mask;
        pop.level = levels[i];
        pop.fitness_key = spec.fitness_key;
        pop.lower_partners = spec.lower_partners;
        for (int partner : spec.lower_partners) {
            state.embed[i][static_cast<std::size_t>(partner)] =
                embedding(topology.populations[static_cast<std::size_t>(partner)].mask, spec.mask);
        }
        pop.individuals.resize(static_cast<std::size_t>(spec.size));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (needs_partner_eval(state, i)) state.populations[i].complement = complement_populations(topology, i, length);
    }

    // Alleles first, for every population, so strategies share initial pools.
    for (auto& pop : state.populations) {
        for (auto& ind : pop.individuals) {
            ind.genes.resize(pop.mask.size());
            for (std::size_t g = 0; g < pop.mask.size(); ++g) {
                const auto range = problem.alleles(pop.mask[g]);
                ind.genes[g] = range[rng.index(range.size())];
            }
        }
    }

    const Sense sense = problem.sense();
    for (std::size_t i = 0; i < n; ++i) {
        auto& pop = state.populations[i];
        std::vector<Evaluation> evals;
        evals.reserve(pop.size());
        double magnitude = 0.0;
        for (const auto& ind : pop.individuals) {
            evals.push_back(pop.fitness_key == kFullFitness ? problem.evaluate_full(ind.genes)
                                                            : problem.evaluate(pop.fitness_key, pop.mask, ind.genes));
            magnitude += std::abs(evals.back().raw);
        }
        const double w_init = problem.initial_penalty_weight().value_or(
            magnitude / static_cast<double>(pop.size()) / static_cast<double>(pop.mask.size()));
        pop.penalty = PenaltyController(w_init, config.penalty);
        for (std::size_t k = 0; k < pop.size(); ++k) pop.individuals[k].assign(evals[k], sense, pop.penalty.weight());
    }

    if (eval.kind != EvalKind::Direct) {
        const auto wheels = build_wheels(state);
        const MatingContext ctx{state, wheels};
        std::vector<std::vector<Fitness>> credited(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!needs_partner_eval(state, i)) continue;
            const auto& pop = state.populations[i];
            for (std::size_t k = 0; k < pop.size(); ++k) {
                credited[i].push_back(evaluate_with_partners(eval, ctx, i, pop.individuals[k].genes, k, rng).recorded);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto& pop = state.populations[i];
            for (std::size_t k = 0; k < credited[i].size(); ++k) {
                pop.individuals[k].assign({credited[i][k].raw, credited[i][k].violation}, sense, pop.penalty.weight());
            }
        }
    }

    for (auto& pop : state.populations) pop.best_ever = pop.individuals[best_index(pop.individuals, sense)];
    for (const auto& ind : state.populations[state.top()].individuals) {
        if (ind.feasible() && (!state.best_feasible || better(sense, ind.raw, state.best_feasible->raw))) {
            state.best_feasible = ind;
        }
    }
    return state;
}

namespace {

struct Offspring {
    Genes genes;
    int target_cell = -1;
};

std::vector<Offspring> breed(const PyramidState& state, const MatingContext& ctx, std::size_t p, int count,
                             int& cross_level, Rng& rng) {
    const auto& pop = state.populations[p];
    const auto& cfg = state.config;
    const bool distributed = state.mating.kind == MatingKind::Distributed;
    std::vector<Offspring> out;
    out.reserve(static_cast<std::size_t>(count));

    while (static_cast<int>(out.size()) < count) {
        const std::size_t first = ctx.wheels[p].select(rng);
        const auto& first_genes = pop.individuals[first].genes;
        const std::size_t before = out.size();

        if (!pop.lower_partners.empty() && rng.bernoulli(cfg.cross_level_probability)) {
            const auto partner_pop = static_cast<std::size_t>(pop.lower_partners[rng.index(pop.lower_partners.size())]);
            MateChoice choice = select_mate(state.mating, ctx, p, first, partner_pop, rng);
            if (choice.child) {
                out.push_back({std::move(*choice.child)});
            } else {
                const auto& partner_genes = state.populations[partner_pop].individuals[choice.partner].genes;
                out.push_back({cross_child(state, p, first_genes, partner_pop, partner_genes, rng)});
            }
            ++cross_level;
        } else {
            std::size_t second;
            if (distributed) {
                // Local mating among the eight cells around the first parent.
                std::vector<std::size_t> local;
                for (const Cell& c : state.grid.neighbors(state.grid.cell_of(first))) {
                    for (auto s : state.grid.occupants(c, pop.size())) local.push_back(s);
                }
                second = local.empty() ? ctx.wheels[p].select(rng) : local[rng.index(local.size())];
            } else {
                second = ctx.wheels[p].select(rng);
            }
            auto [c1, c2] = uniform_crossover(first_genes, pop.individuals[second].genes, cfg.uniform_p, rng);
            out.push_back({std::move(c1)});
            if (static_cast<int>(out.size()) < count) out.push_back({std::move(c2)});
        }

        for (std::size_t k = before; k < out.size(); ++k) {
            mutate(out[k].genes, pop.mask, *state.problem, cfg.mutation_rate, rng);
            if (distributed) {
                const auto around = state.grid.neighbors(state.grid.cell_of(first));
                out[k].target_cell = state.grid.index_of(around[rng.index(around.size())]);
            }
        }
    }
    return out;
}

/// Slots for offspring: free (non-elite) slots ascending, except that offspring
/// with a target cell take a free slot on that cell when one is left.
std::vector<std::size_t> place(const PyramidState& state, const std::vector<bool>& is_elite,
                               const std::vector<Offspring>& offspring) {
    std::vector<bool> taken = is_elite;
    std::vector<std::size_t> slot(offspring.size(), SIZE_MAX);
    const auto cells = static_cast<std::size_t>(state.grid.cells());
    for (std::size_t k = 0; k < offspring.size(); ++k) {
        if (offspring[k].target_cell < 0) continue;
        for (auto s = static_cast<std::size_t>(offspring[k].target_cell); s < taken.size(); s += cells) {
            if (!taken[s]) {
                taken[s] = true;
                slot[k] = s;
                break;
            }
        }
    }
    std::size_t next = 0;
    for (std::size_t k = 0; k < offspring.size(); ++k) {
        if (slot[k] != SIZE_MAX) continue;
        while (taken[next]) ++next;
        taken[next] = true;
        slot[k] = next;
    }
    return slot;
}

void apply_improver(PyramidState& state) {
    auto& top = state.populations[state.top()];
    const Sense sense = state.sense();
    const Individual* target = nullptr;
    std::size_t target_slot = 0;
    for (std::size_t k = 0; k < top.size(); ++k) {
        const auto& ind = top.individuals[k];
        if ((!target || better(sense, ind.penalized, target->penalized)) && state.improver->eligible(ind.genes)) {
            target = &ind;
            target_slot = k;
        }
    }
    if (!target) return;
    Genes genes = target->genes;
    const int moves = state.improver->improve(genes, top.penalty.weight());
    if (moves == 0) return;
    state.hillclimb_moves += moves;
    auto& ind = top.individuals[target_slot];
    ind.genes = std::move(genes);
    ind.assign(state.problem->evaluate_full(ind.genes), sense, top.penalty.weight());
}

void track_bests(PyramidState& state) {
    const Sense sense = state.sense();
    const int stale_before = state.populations[state.top()].stale_generations;
    for (auto& pop : state.populations) {
        const double w = pop.penalty.update(pop.individuals, sense);
        for (auto& ind : pop.individuals) ind.repenalize(sense, w);
        pop.best_ever.repenalize(sense, w);
        const auto& current = pop.individuals[best_index(pop.individuals, sense)];
        if (better(sense, current.penalized, pop.best_ever.penalized)) {
            pop.best_ever = current;
            pop.stale_generations = 0;
        } else {
            ++pop.stale_generations;
        }
    }
    // Once a feasible string exists the weight oscillates, so only a better
    // feasible objective counts as progress of the top population.
    const bool had_feasible = state.best_feasible.has_value();
    bool improved = false;
    for (const auto& ind : state.populations[state.top()].individuals) {
        if (ind.feasible() && (!state.best_feasible || better(sense, ind.raw, state.best_feasible->raw))) {
            state.best_feasible = ind;
            improved = true;
        }
    }
    auto& top = state.populations[state.top()];
    if (improved) top.stale_generations = 0;
    else if (had_feasible && top.stale_generations == 0) top.stale_generations = stale_before + 1;
}

} // namespace

StepStats generation_step(PyramidState& state, Rng& rng) {
    const Sense sense = state.sense();
    const auto n = state.populations.size();
    const auto wheels = build_wheels(state);
    const MatingContext ctx{state, wheels};

    StepStats stats;
    stats.best_before.resize(n);
    stats.best_after.resize(n);
    stats.cross_level_offspring.assign(n, 0);

    std::vector<std::vector<Individual>> next(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& pop = state.populations[p];
        const int size = static_cast<int>(pop.size());
        const int elites = elite_count(size, state.config.replacement_fraction);
        stats.best_before[p] = pop.individuals[wheels[p].best()].penalized;

        const auto order = ranking(pop.individuals, sense);
        std::vector<bool> is_elite(pop.size(), false);
        for (int e = 0; e < elites; ++e) is_elite[order[static_cast<std::size_t>(e)]] = true;

        auto offspring = breed(state, ctx, p, size - elites, stats.cross_level_offspring[p], rng);
        const auto slots = place(state, is_elite, offspring);

        next[p] = pop.individuals;
        for (std::size_t k = 0; k < offspring.size(); ++k) {
            Individual& child = next[p][slots[k]];
            child.genes = std::move(offspring[k].genes);
            const Fitness f = needs_partner_eval(state, p)
                                  ? evaluate_with_partners(state.eval, ctx, p, child.genes, slots[k], rng).recorded
                                  : evaluate_direct(state, p, child.genes);
            child.assign({f.raw, f.violation}, sense, pop.penalty.weight());
        }
    }

    for (std::size_t p = 0; p < n; ++p) {
        state.populations[p].individuals = std::move(next[p]);
        stats.best_after[p] = state.populations[p].individuals[best_index(state.populations[p].individuals, sense)].penalized;
    }
    if (state.improver) apply_improver(state);
    track_bests(state);
    ++state.generation;
    return stats;
}

namespace {

GenerationTrace snapshot(const PyramidState& state) {
    const auto& top = state.populations[state.top()];
    const auto& best = top.individuals[best_index(top.individuals, state.sense())];
    GenerationTrace t;
    t.generation = state.generation;
    t.best_penalized = best.penalized;
    t.best_raw = best.raw;
    t.best_violation = best.violation;
    if (state.best_feasible) t.best_feasible_raw = state.best_feasible->raw;
    t.weight = top.penalty.weight();
    return t;
}

} // namespace

RunResult run(PyramidState& state, Rng& rng) {
    RunResult result;
    result.seed = state.config.rng_seed;
    result.config_digest = state.config.digest();
    result.trace.push_back(snapshot(state));

    const auto start = std::chrono::steady_clock::now();
    const auto& top = state.populations[state.top()];
    while (top.stale_generations < state.config.stagnation_limit && state.generation < state.config.max_generations) {
        if (state.config.wall_clock_limit > 0.0) {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() > state.config.wall_clock_limit) {
                result.time_limited = true;
                break;
            }
        }
        generation_step(state, rng);
        result.trace.push_back(snapshot(state));
    }

    if (state.improver) {
        const Sense sense = state.sense();
        std::vector<Genes> finals;
        if (state.best_feasible) finals.push_back(state.best_feasible->genes);
        finals.push_back(top.best_ever.genes);
        for (auto& genes : finals) {
            if (!state.improver->eligible(genes)) continue;
            const int moves = state.improver->improve(genes, top.penalty.weight());
            state.hillclimb_moves += moves;
            Individual ind;
            ind.genes = genes;
            ind.assign(state.problem->evaluate_full(genes), sense, top.penalty.weight());
            if (ind.feasible() && (!state.best_feasible || better(sense, ind.raw, state.best_feasible->raw))) {
                state.best_feasible = ind;
            }
        }
    }

    result.generations = state.generation;
    result.hillclimb_moves = state.hillclimb_moves;
    if (state.best_feasible) {
        result.feasible = true;
        result.best_genes = state.best_feasible->genes;
        result.best_raw = state.best_feasible->raw;
        result.best_violation = 0.0;
    } else {
        result.best_genes = top.best_ever.genes;
        result.best_raw = top.best_ever.raw;
        result.best_violation = top.best_ever.violation;
    }
    return result;
}

std::string to_json(const RunResult& r) {
    nlohmann::ordered_json j;
    j["format"] = "pyramid-run-result";
    j["version"] = RunResult::kFormatVersion;
    j["seed"] = r.seed;
    j["config_digest"] = r.config_digest;
    j["feasible"] = r.feasible;
    j["best_raw"] = r.best_raw;
    j["best_violation"] = r.best_violation;
    j["best_genes"] = r.best_genes;
    j["generations"] = r.generations;
    j["hillclimb_moves"] = r.hillclimb_moves;
    j["time_limited"] = r.time_limited;
    auto& trace = j["trace"] = nlohmann::ordered_json::array();
    for (const auto& t : r.trace) {
        nlohmann::ordered_json row;
        row["generation"] = t.generation;
        row["best_penalized"] = t.best_penalized;
        row["best_raw"] = t.best_raw;
        row["best_violation"] = t.best_violation;
        row["best_feasible_raw"] = t.best_feasible_raw ? nlohmann::ordered_json(*t.best_feasible_raw) : nullptr;
        row["weight"] = t.weight;
        trace.push_back(std::move(row));
    }
    return j.dump(2);
}

RunResult run_result_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object() || j.value("format", "") != "pyramid-run-result" || j.value("version", 0) != RunResult::kFormatVersion) {
        throw ConfigurationError("not a version-1 pyramid run record");
    }
    RunResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.feasible = j.at("feasible").get<bool>();
    r.best_raw = j.at("best_raw").get<double>();
    r.best_violation = j.at("best_violation").get<double>();
    r.best_genes = j.at("best_genes").get<Genes>();
    r.generations = j.at("generations").get<int>();
    r.hillclimb_moves = j.at("hillclimb_moves").get<int>();
    r.time_limited = j.at("time_limited").get<bool>();
    for (const auto& row : j.at("trace")) {
        GenerationTrace t;
        t.generation = row.at("generation").get<int>();
        t.best_penalized = row.at("best_penalized").get<double>();
        t.best_raw = row.at("best_raw").get<double>();
        t.best_violation = row.at("best_violation").get<double>();
        if (!row.at("best_feasible_raw").is_null()) t.best_feasible_raw = row.at("best_feasible_raw").get<double>();
        t.weight = row.at("weight").get<double>();
        r.trace.push_back(t);
    }
    return r;
}

} // namespace pyramid
