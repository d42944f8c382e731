// SPDX-License-Identifier: Apache-2.0
#include "passevo/evolution.hpp"

#include "passevo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace passevo {
namespace {

std::string num(std::size_t v) { return std::to_string(v); }

double fitness_or_throw(const Individual& ind, const char* who) {
    if (!ind.fitness)
        throw std::logic_error(std::string(who) + ": unevaluated individual");
    return *ind.fitness;
}

// Index of the population's best member; ties go to the lower index.
std::size_t best_index(const Population& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.members.size(); ++i) {
        if (fitness_or_throw(pop.members[i], "best_index") <
            fitness_or_throw(pop.members[best], "best_index"))
            best = i;
    }
    return best;
}

} // namespace

Composition composition_of(const EvolutionConfig& cfg) {
    const double pop = static_cast<double>(cfg.population_size);
    Composition c;
    c.elites = static_cast<std::size_t>(std::lround(pop * cfg.elite_pct / 100.0));
    c.immigrants = static_cast<std::size_t>(std::lround(pop * cfg.immigrant_pct / 100.0));

    if (c.elites + c.immigrants > cfg.population_size)
        throw ConfigError("evolution", "elite_pct (" + std::to_string(cfg.elite_pct) +
                                           ") plus immigrant_pct (" +
                                           std::to_string(cfg.immigrant_pct) +
                                           ") overfill population_size (" +
                                           num(cfg.population_size) + ")");

    c.survivor_slots = cfg.population_size - c.elites - c.immigrants;
    if (c.survivor_slots % 2 != 0) {
        ++c.immigrants;
        --c.survivor_slots;
    }
    if (c.survivor_slots < 2)
        throw ConfigError("evolution", "elite_pct and immigrant_pct leave " +
                                           num(c.survivor_slots) +
                                           " nest-survivor slots; population_size " +
                                           num(cfg.population_size) +
                                           " needs at least 2");
    return c;
}

void validate(const EvolutionConfig& cfg) {
    if (cfg.generations < 1) throw ConfigError("generations", "must be >= 1");
    if (cfg.population_size < 4)
        throw ConfigError("population_size", "must be >= 4");
    auto pct = [](const char* name, int v) {
        if (v < 0 || v > 100)
            throw ConfigError(name, "must be in 0..100, got " + std::to_string(v));
    };
    pct("crossover_pct", cfg.crossover_pct);
    pct("mutation_pct", cfg.mutation_pct);
    pct("elite_pct", cfg.elite_pct);
    pct("immigrant_pct", cfg.immigrant_pct);
    if (cfg.tournament_size < 1) throw ConfigError("tournament_size", "must be >= 1");
    if (cfg.tournament_size > cfg.population_size)
        throw ConfigError("tournament_size",
                          "tournament_size (" + num(cfg.tournament_size) +
                              ") exceeds population_size (" + num(cfg.population_size) + ")");
    if (cfg.nest_size < 2 || cfg.nest_size % 2 != 0)
        throw ConfigError("nest_size", "must be an even integer >= 2, got " + num(cfg.nest_size));
    if (cfg.runs_per_eval < 1) throw ConfigError("runs_per_eval", "must be >= 1");
    if (cfg.genome_bounds.min_len < 1)
        throw ConfigError("min_individual_len", "must be >= 1");
    if (cfg.genome_bounds.min_len > cfg.genome_bounds.max_len)
        throw ConfigError("min_individual_len",
                          "min_individual_len (" + num(cfg.genome_bounds.min_len) +
                              ") exceeds max_individual_len (" +
                              num(cfg.genome_bounds.max_len) + ")");
    if (cfg.fixed_individual_len && *cfg.fixed_individual_len < 1)
        throw ConfigError("individual_len", "must be >= 1");
    if (cfg.stagnation_window && *cfg.stagnation_window < 1)
        throw ConfigError("stagnation_window", "must be >= 1");
    composition_of(cfg);
}

const Individual& tournament_select(const Population& pop, std::size_t k,
                                    RandomSource& rng) {
    if (k < 1 || k > pop.members.size())
        throw std::invalid_argument("tournament_select: k out of range");

    const std::vector<std::size_t> draws = rng.draw_distinct(pop.members.size(), k);
    std::size_t winner = draws[0];
    double best = fitness_or_throw(pop.members[winner], "tournament_select");
    for (std::size_t d = 1; d < draws.size(); ++d) {
        const double f = fitness_or_throw(pop.members[draws[d]], "tournament_select");
        if (f < best) {
            best = f;
            winner = draws[d];
        }
    }
    return pop.members[winner];
}

std::vector<Individual> build_nest(const Individual& p1, const Individual& p2,
                                   const EvolutionConfig& cfg, const PassPool& pool,
                                   RandomSource& rng) {
    std::vector<Individual> nest;
    nest.reserve(cfg.nest_size);

    for (std::size_t pair = 0; pair < cfg.nest_size / 2; ++pair) {
        Individual c1 = p1;
        Individual c2 = p2;
        if (rng.chance_pct(cfg.crossover_pct)) {
            auto kids = one_point_crossover(p1, p2, rng);
            c1 = std::move(kids.first);
            c2 = std::move(kids.second);
        }
        for (Individual* c : {&c1, &c2}) {
            if (rng.chance_pct(cfg.mutation_pct)) *c = point_mutation(*c, pool, rng);
            c->clear_fitness();
            c->origin = Origin::NestSurvivor;
        }
        nest.push_back(std::move(c1));
        nest.push_back(std::move(c2));
    }
    return nest;
}

std::pair<Individual, Individual> nest_survivors(const Individual& p1,
                                                 const Individual& p2,
                                                 std::vector<Individual>& nest,
                                                 FitnessEvaluator& evaluator) {
    if (nest.empty()) throw std::invalid_argument("nest_survivors: empty nest");

    for (Individual& offspring : nest)
        if (!offspring.evaluated()) evaluator.evaluate(offspring);

    // Candidates ranked offspring-first so equal fitness prefers offspring,
    // then the lower index within each group.
    std::vector<const Individual*> cand;
    cand.reserve(nest.size() + 2);
    for (const Individual& offspring : nest) cand.push_back(&offspring);
    cand.push_back(&p1);
    cand.push_back(&p2);

    std::vector<std::size_t> order(cand.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = fitness_or_throw(*cand[a], "nest_survivors");
        const double fb = fitness_or_throw(*cand[b], "nest_survivors");
        if (fa != fb) return fa < fb;
        return a < b;
    });

    return {*cand[order[0]], *cand[order[1]]};
}

Population next_generation(const Population& pop, const EvolutionConfig& cfg,
                           const PassPool& pool, FitnessEvaluator& evaluator,
                           RandomSource& rng) {
    const Composition comp = composition_of(cfg);

    Population next;
    next.generation = pop.generation + 1;
    next.members.reserve(cfg.population_size);

    std::vector<std::size_t> order(pop.members.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = fitness_or_throw(pop.members[a], "next_generation");
        const double fb = fitness_or_throw(pop.members[b], "next_generation");
        if (fa != fb) return fa < fb;
        return a < b;
    });
    for (std::size_t e = 0; e < comp.elites; ++e) {
        Individual elite = pop.members[order[e]];
        elite.origin = Origin::Elite;
        next.members.push_back(std::move(elite));
    }

    for (std::size_t round = 0; round < comp.nests(); ++round) {
        const Individual& p1 = tournament_select(pop, cfg.tournament_size, rng);
        const Individual& p2 = tournament_select(pop, cfg.tournament_size, rng);
        std::vector<Individual> nest = build_nest(p1, p2, cfg, pool, rng);
        for (Individual& offspring : nest) offspring.birth_generation = next.generation;
        auto [s1, s2] = nest_survivors(p1, p2, nest, evaluator);
        next.members.push_back(std::move(s1));
        next.members.push_back(std::move(s2));
    }

    for (std::size_t i = 0; i < comp.immigrants; ++i) {
        Individual imm = random_individual(pool, cfg.genome_bounds,
                                           cfg.fixed_individual_len, Origin::Immigrant, rng);
        imm.birth_generation = next.generation;
        evaluator.evaluate(imm);
        next.members.push_back(std::move(imm));
    }

    // Re-evaluation mode measures carried-over members once per generation
    // they appear in; members born this generation were measured at creation.
    if (!cfg.memoize) {
        for (Individual& m : next.members)
            if (m.birth_generation < next.generation) evaluator.evaluate(m);
    }

    if (next.members.size() != cfg.population_size)
        throw std::logic_error("next_generation: population size drifted");
    return next;
}

EvolutionResult run_evolution(const EvolutionConfig& cfg, const PassPool& pool,
                              FitnessEvaluator& evaluator, StatsSink* sink) {
    validate(cfg);
    RandomSource rng(cfg.seed);

    Population pop;
    pop.generation = 0;
    pop.members.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        Individual ind = random_individual(pool, cfg.genome_bounds,
                                           cfg.fixed_individual_len, Origin::RandomInit, rng);
        ind.birth_generation = 0;
        pop.members.push_back(std::move(ind));
    }
    for (Individual& m : pop.members) evaluator.evaluate(m);

    EvolutionResult result;
    std::size_t bi = best_index(pop);
    result.best = pop.members[bi];

    std::uint64_t evals_mark = 0;
    std::uint64_t hits_mark = 0;
    std::uint32_t stagnant = 0;

    for (std::uint32_t g = 1; g <= cfg.generations; ++g) {
        pop = next_generation(pop, cfg, pool, evaluator, rng);

        bi = best_index(pop);
        const Individual& gen_best = pop.members[bi];

        GenerationStats stats;
        stats.generation = pop.generation;
        stats.best_fitness = *gen_best.fitness;
        stats.best_sequence = gen_best.tokens();
        double sum = 0.0;
        for (const Individual& m : pop.members) sum += *m.fitness;
        stats.mean_fitness = sum / static_cast<double>(pop.members.size());
        const std::uint64_t evals_now = evaluator.evaluations();
        const std::uint64_t hits_now = evaluator.cache_hits();
        stats.evaluations = evals_now - evals_mark;
        stats.cache_hits = hits_now - hits_mark;
        evals_mark = evals_now;
        hits_mark = hits_now;

        if (sink) sink->on_generation(stats);
        result.history.push_back(std::move(stats));

        if (*gen_best.fitness < *result.best.fitness) {
            result.best = gen_best;
            stagnant = 0;
        } else {
            ++stagnant;
        }
        if (cfg.stagnation_window && stagnant >= *cfg.stagnation_window) {
            result.stopped_early = true;
            break;
        }
    }

    result.generations_run = static_cast<std::uint32_t>(result.history.size());
    result.total_evaluations = evaluator.evaluations();
    result.total_measurements = evaluator.measurements();
    result.total_cache_hits = evaluator.cache_hits();
    return result;
}

} // namespace passevo
