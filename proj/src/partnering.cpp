#include "pyramid/partnering.hpp"

#include <algorithm>

namespace pyramid {

std::vector<RankWheel> build_wheels(const PyramidState& state) {
    std::vector<RankWheel> wheels;
    wheels.reserve(state.populations.size());
    for (const auto& pop : state.populations) wheels.emplace_back(pop.individuals, state.sense());
    return wheels;
}

double acceptance_probability(Sense sense, double combined, double best) {
    if (sense == Sense::minimize) {
        if (combined <= best) return 1.0;
        if (best <= 0.0) return 0.0;
        return std::min(1.0, best / combined);
    }
    if (combined >= best) return 1.0;
    if (combined <= 0.0 || best <= 0.0) return 0.0;
    return std::min(1.0, combined / best);
}

namespace {

std::size_t grid_partner(const PyramidState& state, std::size_t slot, std::size_t pop, Rng& rng) {
    const auto size = state.populations[pop].size();
    const auto here = state.grid.occupants(state.grid.cell_of(slot), size);
    if (!here.empty()) return here.size() == 1 ? here.front() : here[rng.index(here.size())];
    return rng.index(size);
}

} // namespace

MateChoice select_mate(const MatingStrategy& strategy, const MatingContext& ctx, std::size_t first_pop,
                       std::size_t first_index, std::size_t partner_pop, Rng& rng) {
    const auto& state = ctx.state;
    const auto& partners = state.populations[partner_pop].individuals;
    if (partners.empty()) throw ContractViolation("partner population is empty");
    const Sense sense = state.sense();
    const auto& first_genes = state.populations[first_pop].individuals[first_index].genes;

    auto combine = [&](std::size_t candidate) {
        Genes child = cross_child(state, first_pop, first_genes, partner_pop, partners[candidate].genes, rng);
        Fitness f = evaluate_direct(state, first_pop, child);
        return std::pair{std::move(child), f};
    };

    MateChoice choice;
    switch (strategy.kind) {
    case MatingKind::RankSelection:
    case MatingKind::Joined:
        choice.partner = ctx.wheels[partner_pop].select(rng);
        break;
    case MatingKind::Random:
        choice.partner = rng.index(partners.size());
        break;
    case MatingKind::Best:
        choice.partner = ctx.wheels[partner_pop].best();
        break;
    case MatingKind::Distributed:
        choice.partner = grid_partner(state, first_index, partner_pop, rng);
        break;
    case MatingKind::Attractiveness: {
        auto best = state.populations[first_pop].best_ever;
        best.repenalize(sense, state.populations[first_pop].penalty.weight());
        for (int rejections = 0;;) {
            const std::size_t candidate = ctx.wheels[partner_pop].select(rng);
            auto [child, f] = combine(candidate);
            ++choice.candidates_evaluated;
            const double p = acceptance_probability(sense, f.penalized, best.penalized);
            const bool accepted = p >= 1.0 || rng.bernoulli(p);
            if (accepted || ++rejections >= strategy.retry_budget) {
                choice.partner = candidate;
                choice.child = std::move(child);
                choice.child_fitness = f;
                break;
            }
        }
        break;
    }
    case MatingKind::Choice: {
        for (int c = 0; c < strategy.choice_candidates; ++c) {
            const std::size_t candidate = rng.index(partners.size());
            auto [child, f] = combine(candidate);
            ++choice.candidates_evaluated;
            if (!choice.child_fitness || better(sense, f.penalized, choice.child_fitness->penalized)) {
                choice.partner = candidate;
                choice.child = std::move(child);
                choice.child_fitness = f;
            }
        }
        break;
    }
    }
    return choice;
}

std::vector<PartnerPick> partner_picks(EvalKind kind) {
    switch (kind) {
    case EvalKind::Direct: return {};
    case EvalKind::RankBased: return {PartnerPick::Rank};
    case EvalKind::Random: return {PartnerPick::Random};
    case EvalKind::Best: return {PartnerPick::Best};
    case EvalKind::Distributed: return {PartnerPick::Grid};
    case EvalKind::BestRandom: return {PartnerPick::Best, PartnerPick::Random};
    case EvalKind::RankRandom: return {PartnerPick::Rank, PartnerPick::Random};
    case EvalKind::RandomRandom: return {PartnerPick::Random, PartnerPick::Random};
    }
    return {};
}

Genes assemble(const MatingContext& ctx, std::size_t pop, std::span<const int> genes, std::size_t slot,
               PartnerPick pick, Rng& rng) {
    const auto& state = ctx.state;
    const auto& subject = state.populations[pop];
    Genes full(static_cast<std::size_t>(state.problem->length()), 0);
    for (std::size_t g = 0; g < subject.mask.size(); ++g) full[static_cast<std::size_t>(subject.mask[g])] = genes[g];
    for (int c : subject.complement) {
        const auto cp = static_cast<std::size_t>(c);
        const auto& other = state.populations[cp];
        std::size_t idx = 0;
        switch (pick) {
        case PartnerPick::Rank: idx = ctx.wheels[cp].select(rng); break;
        case PartnerPick::Random: idx = rng.index(other.size()); break;
        case PartnerPick::Best: idx = ctx.wheels[cp].best(); break;
        case PartnerPick::Grid: idx = grid_partner(state, slot, cp, rng); break;
        }
        const auto& pg = other.individuals[idx].genes;
        for (std::size_t g = 0; g < other.mask.size(); ++g) full[static_cast<std::size_t>(other.mask[g])] = pg[g];
    }
    return full;
}

PartnerEvaluation evaluate_with_partners(const EvalStrategy& strategy, const MatingContext& ctx, std::size_t pop,
                                         std::span<const int> genes, std::size_t slot, Rng& rng) {
    const auto& state = ctx.state;
    const auto& subject = state.populations[pop];
    const Sense sense = state.sense();
    const double w = subject.penalty.weight();
    if (strategy.kind == EvalKind::Direct) {
        const Fitness f = evaluate_direct(state, pop, genes);
        return {f, {f}};
    }
    if (static_cast<int>(subject.mask.size()) != state.problem->length() && subject.complement.empty()) {
        throw ConfigurationError("population '" + subject.label + "' has no complement populations for partner evaluation");
    }

    PartnerEvaluation out;
    for (PartnerPick pick : partner_picks(strategy.kind)) {
        const Genes full = assemble(ctx, pop, genes, slot, pick, rng);
        out.samples.push_back(penalize(sense, state.problem->evaluate_full(full), w));
    }
    out.recorded = out.samples.front();
    for (const auto& s : out.samples) {
        if (better(sense, s.penalized, out.recorded.penalized)) out.recorded = s;
    }
    return out;
}

std::vector<int> complement_populations(const Topology& topology, std::size_t pop, int length) {
    const auto& subject = topology.populations[pop].mask;
    std::vector<int> chosen;
    std::vector<bool> covered(static_cast<std::size_t>(length), false);
    for (int g : subject.members()) covered[static_cast<std::size_t>(g)] = true;
    for (std::size_t i = 0; i < topology.populations.size(); ++i) {
        const auto& candidate = topology.populations[i];
        if (i == pop || !candidate.lower_partners.empty()) continue;
        bool disjoint = true;
        for (int g : candidate.mask.members()) disjoint = disjoint && !covered[static_cast<std::size_t>(g)];
        if (!disjoint) continue;
        for (int g : candidate.mask.members()) covered[static_cast<std::size_t>(g)] = true;
        chosen.push_back(static_cast<int>(i));
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
        throw ConfigurationError("bottom populations do not tile the complement of '" + topology.populations[pop].label + "'");
    }
    return chosen;
}

Topology joined_topology(const Problem& problem, const PyramidConfig& config) {
    Topology t = problem.pyramid_topology(config.sub_population_size, config.top_population_size);
    const GeneMask full = GeneMask::full(problem.length());
    for (auto& pop : t.populations) {
        pop.mask = full;
        pop.fitness_key = kFullFitness;
    }
    t.migrant_uniform = true;
    return t;
}

Topology single_population_topology(const Problem& problem, int size) {
    Topology t;
    t.populations.push_back({"all", GeneMask::full(problem.length()), {}, kFullFitness, size});
    return t;
}

} // namespace pyramid
