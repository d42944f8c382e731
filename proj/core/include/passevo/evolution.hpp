// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/fitness.hpp"
#include "passevo/genome.hpp"
#include "passevo/pass_pool.hpp"
#include "passevo/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace passevo {

struct EvolutionConfig {
    std::uint32_t generations = 50;
    std::size_t population_size = 40;
    int crossover_pct = 50;
    int mutation_pct = 50;
    std::size_t tournament_size = 4;
    int elite_pct = 10;
    std::size_t nest_size = 6;
    int immigrant_pct = 10;
    GenomeBounds genome_bounds;
    std::optional<std::size_t> fixed_individual_len;
    std::uint64_t seed = 1;
    FitnessMode fitness_mode = FitnessMode::MeanRuntime;
    bool memoize = true;
    std::size_t runs_per_eval = 40;
    // Optional early stop: quit once best-ever fitness has not improved for
    // this many consecutive generations.
    std::optional<std::uint32_t> stagnation_window;
};

// Per-generation slot split. survivor_slots is always even and >= 2.
struct Composition {
    std::size_t elites = 0;
    std::size_t immigrants = 0;
    std::size_t survivor_slots = 0;

    std::size_t nests() const { return survivor_slots / 2; }
};

// Elite and immigrant counts round half away from zero; an odd survivor
// count gives the spare slot to immigrants so the elite guarantee is exact.
Composition composition_of(const EvolutionConfig& cfg);

// Throws ConfigError naming the offending field(s).
void validate(const EvolutionConfig& cfg);

struct Population {
    std::vector<Individual> members;
    std::uint32_t generation = 0;

    std::size_t size() const { return members.size(); }
};

struct GenerationStats {
    std::uint32_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::vector<std::string> best_sequence;
    // Fitness evaluations and cache hits since the previous stats row; the
    // first row includes the initial population's evaluations.
    std::uint64_t evaluations = 0;
    std::uint64_t cache_hits = 0;
};

class StatsSink {
public:
    virtual ~StatsSink() = default;
    virtual void on_generation(const GenerationStats& stats) = 0;
};

struct EvolutionResult {
    Individual best;
    std::vector<GenerationStats> history;
    std::uint32_t generations_run = 0;
    bool stopped_early = false;
    std::uint64_t total_evaluations = 0;
    std::uint64_t total_measurements = 0;
    std::uint64_t total_cache_hits = 0;
};

// Draws k distinct members uniformly without replacement and returns the one
// with minimum fitness; ties go to the earliest draw.
const Individual& tournament_select(const Population& pop, std::size_t k,
                                    RandomSource& rng);

// Produces nest_size offspring in pairs. Each pair starts as copies of the
// parents, is replaced by crossover children with probability
// crossover_pct/100, then each offspring mutates with probability
// mutation_pct/100. Offspring carry no fitness.
std::vector<Individual> build_nest(const Individual& p1, const Individual& p2,
                                   const EvolutionConfig& cfg, const PassPool& pool,
                                   RandomSource& rng);

// Evaluates any unevaluated nest member, then picks the 2 lowest-fitness
// individuals from {p1, p2} + nest. Ties prefer offspring over parents, then
// the lower index. Returned pair is ordered best first.
std::pair<Individual, Individual> nest_survivors(const Individual& p1,
                                                 const Individual& p2,
                                                 std::vector<Individual>& nest,
                                                 FitnessEvaluator& evaluator);

// One generational step: elites, nest rounds, immigrants, evaluation. RNG
// consumption order (elites draw nothing, then nest rounds, then immigrants)
// is part of the seeded-reproducibility contract.
Population next_generation(const Population& pop, const EvolutionConfig& cfg,
                           const PassPool& pool, FitnessEvaluator& evaluator,
                           RandomSource& rng);

// Full run: random initial population, cfg.generations steps (fewer when the
// stagnation window trips), one stats row per completed step.
EvolutionResult run_evolution(const EvolutionConfig& cfg, const PassPool& pool,
                              FitnessEvaluator& evaluator, StatsSink* sink);

} // namespace passevo
