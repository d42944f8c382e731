// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "passevo/evolution.hpp"
#include "passevo/fitness.hpp"
#include "passevo/genome.hpp"
#include "passevo/rng.hpp"
#include "passevo/sim_backend.hpp"

#include <cstddef>
#include <utility>
#include <vector>

using namespace passevo;

namespace {

SimLandscape bench_landscape() {
    SimLandscape land;
    land.pool_size = 16;
    land.base_runtime = 10.0;
    land.length_penalty = 0.01;
    land.noise_sigma = 0.05;
    land.target_motifs = {{{"p0", "p1"}, 2.0}, {{"p4", "p2", "p7"}, 1.5}, {{"p9"}, 0.5}};
    return land;
}

void bm_crossover(benchmark::State& state) {
    const SimLandscape land = bench_landscape();
    const PassPool pool = sim_pool(land);
    RandomSource rng(1);
    const GenomeBounds bounds{10, 90};
    const Individual p1 = random_individual(pool, bounds, std::nullopt,
                                            Origin::RandomInit, rng);
    const Individual p2 = random_individual(pool, bounds, std::nullopt,
                                            Origin::RandomInit, rng);
    for (auto _ : state) {
        auto children = one_point_crossover(p1, p2, rng);
        benchmark::DoNotOptimize(children);
    }
}
BENCHMARK(bm_crossover);

void bm_mutation(benchmark::State& state) {
    const SimLandscape land = bench_landscape();
    const PassPool pool = sim_pool(land);
    RandomSource rng(2);
    const Individual ind = random_individual(pool, GenomeBounds{10, 90}, std::nullopt,
                                             Origin::RandomInit, rng);
    for (auto _ : state) {
        Individual mutant = point_mutation(ind, pool, rng);
        benchmark::DoNotOptimize(mutant);
    }
}
BENCHMARK(bm_mutation);

void bm_sim_measure(benchmark::State& state) {
    const SimLandscape land = bench_landscape();
    SimBackend backend(land);
    RandomSource rng(3);
    const PassPool pool = sim_pool(land);
    const Individual ind = random_individual(pool, GenomeBounds{40, 40}, std::nullopt,
                                             Origin::RandomInit, rng);
    const std::vector<std::string> seq = ind.tokens();
    const auto runs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        Measurement m = backend.measure(seq, runs);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(bm_sim_measure)->Arg(1)->Arg(40);

void bm_next_generation(benchmark::State& state) {
    const SimLandscape land = bench_landscape();
    SimBackend backend(land);
    const PassPool pool = sim_pool(land);

    EvolutionConfig cfg;
    cfg.population_size = static_cast<std::size_t>(state.range(0));
    cfg.genome_bounds = {10, 40};
    cfg.runs_per_eval = 1;

    FitnessEvaluator evaluator(
        backend, EvaluatorOptions{cfg.fitness_mode, cfg.memoize, cfg.runs_per_eval});
    RandomSource rng(cfg.seed);
    Population pop;
    for (std::size_t i = 0; i < cfg.population_size; ++i)
        pop.members.push_back(random_individual(pool, cfg.genome_bounds, std::nullopt,
                                                Origin::RandomInit, rng));
    for (Individual& ind : pop.members) evaluator.evaluate(ind);

    for (auto _ : state) {
        pop = next_generation(pop, cfg, pool, evaluator, rng);
        benchmark::DoNotOptimize(pop);
    }
}
BENCHMARK(bm_next_generation)->Arg(40)->Arg(200);

} // namespace

BENCHMARK_MAIN();
