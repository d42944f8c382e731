// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "passevo/errors.hpp"
#include "passevo/evolution.hpp"
#include "passevo/sim_backend.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace passevo;

namespace {

PassPool make_pool(std::size_t n) {
    PassPool pool;
    for (std::size_t i = 0; i < n; ++i)
        pool.passes.push_back("p" + std::to_string(i));
    return pool;
}

// Runtime equals the numeric part of the first token: "v2.5" measures 2.5 s.
class ScriptedBackend final : public Backend {
public:
    std::string name() const override { return "scripted"; }
    bool parallel_safe() const override { return true; }
    Measurement measure(const std::vector<std::string>& sequence,
                        std::size_t runs) override {
        Measurement m;
        m.samples.assign(runs, std::stod(sequence.at(0).substr(1)));
        return m;
    }
};

// Runtime grows with sequence length; shortest sequences win.
class LengthBackend final : public Backend {
public:
    std::string name() const override { return "length"; }
    bool parallel_safe() const override { return true; }
    Measurement measure(const std::vector<std::string>& sequence,
                        std::size_t runs) override {
        Measurement m;
        m.samples.assign(runs, 1.0 + 0.1 * static_cast<double>(sequence.size()));
        return m;
    }
};

Individual scripted_individual(double value) {
    Individual ind;
    std::ostringstream token;
    token << "v" << value;
    ind.genes.push_back({token.str(), 0});
    return ind;
}

EvolutionConfig small_config() {
    EvolutionConfig cfg;
    cfg.generations = 5;
    cfg.population_size = 12;
    cfg.genome_bounds = {2, 8};
    cfg.runs_per_eval = 2;
    cfg.seed = 17;
    return cfg;
}

std::string history_fingerprint(const EvolutionResult& res) {
    std::ostringstream out;
    for (const auto& s : res.history) {
        out << s.generation << "|" << s.best_fitness << "|" << s.mean_fitness << "|"
            << s.evaluations << "|" << s.cache_hits << "|";
        for (const auto& t : s.best_sequence)
            out << t << " ";
        out << "\n";
    }
    return out.str();
}

} // namespace

TEST_CASE("composition splits slots with half-away-from-zero rounding") {
    EvolutionConfig cfg;
    cfg.population_size = 40;
    cfg.elite_pct = 10;
    cfg.immigrant_pct = 10;
    Composition c = composition_of(cfg);
    CHECK(c.elites == 4);
    CHECK(c.immigrants == 4);
    CHECK(c.survivor_slots == 32);
    CHECK(c.nests() == 16);

    cfg.population_size = 10;
    cfg.elite_pct = 25; // 2.5 rounds to 3
    c = composition_of(cfg);
    CHECK(c.elites == 3);
    CHECK(c.immigrants == 1);
    CHECK(c.survivor_slots == 6);

    // An odd survivor count hands the spare slot to the immigrants.
    cfg.population_size = 7;
    cfg.elite_pct = 10;
    cfg.immigrant_pct = 10;
    c = composition_of(cfg);
    CHECK(c.elites == 1);
    CHECK(c.immigrants == 2);
    CHECK(c.survivor_slots == 4);

    cfg.population_size = 5;
    cfg.elite_pct = 0;
    cfg.immigrant_pct = 0;
    c = composition_of(cfg);
    CHECK(c.elites == 0);
    CHECK(c.immigrants == 1);
    CHECK(c.survivor_slots == 4);
}

TEST_CASE("composition invariants hold across random valid configs") {
    RandomSource rng(23);
    int checked = 0;
    while (checked < 200) {
        EvolutionConfig cfg;
        cfg.population_size = 4 + rng.index(200);
        cfg.elite_pct = static_cast<int>(rng.index(41));
        cfg.immigrant_pct = static_cast<int>(rng.index(41));
        cfg.tournament_size = 1 + rng.index(cfg.population_size);
        Composition c;
        try {
            c = composition_of(cfg);
        } catch (const ConfigError&) {
            continue; // overfilled or starved split: rejected, not misfit
        }
        REQUIRE(c.survivor_slots % 2 == 0);
        REQUIRE(c.survivor_slots >= 2);
        REQUIRE(c.elites + c.immigrants + 2 * c.nests() == cfg.population_size);
        ++checked;
    }
}

TEST_CASE("validate rejects out-of-range fields") {
    auto bad = [](auto&& tweak) {
        EvolutionConfig cfg;
        tweak(cfg);
        CHECK_THROWS_AS(validate(cfg), ConfigError);
    };
    bad([](EvolutionConfig& c) { c.generations = 0; });
    bad([](EvolutionConfig& c) { c.population_size = 3; });
    bad([](EvolutionConfig& c) { c.crossover_pct = 101; });
    bad([](EvolutionConfig& c) { c.mutation_pct = -1; });
    bad([](EvolutionConfig& c) { c.tournament_size = 0; });
    bad([](EvolutionConfig& c) { c.tournament_size = 41; });
    bad([](EvolutionConfig& c) { c.nest_size = 3; });
    bad([](EvolutionConfig& c) { c.nest_size = 0; });
    bad([](EvolutionConfig& c) { c.runs_per_eval = 0; });
    bad([](EvolutionConfig& c) { c.genome_bounds = {0, 5}; });
    bad([](EvolutionConfig& c) { c.genome_bounds = {9, 5}; });
    bad([](EvolutionConfig& c) { c.fixed_individual_len = 0; });
    bad([](EvolutionConfig& c) { c.stagnation_window = 0; });
    bad([](EvolutionConfig& c) { c.elite_pct = 80, c.immigrant_pct = 80; });

    EvolutionConfig ok;
    CHECK_NOTHROW(validate(ok));
}

TEST_CASE("tournament picks the fittest of the drawn set") {
    ScriptedBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, true, 1});
    Population pop;
    for (double v : {5.0, 3.0, 9.0, 1.0, 7.0, 4.0}) {
        pop.members.push_back(scripted_individual(v));
        eval.evaluate(pop.members.back());
    }

    SUBCASE("full-population tournament always returns the global best") {
        RandomSource rng(31);
        for (int i = 0; i < 50; ++i) {
            const Individual& w = tournament_select(pop, pop.size(), rng);
            CHECK(*w.fitness == 1.0);
        }
    }

    SUBCASE("winner is always among the k drawn members") {
        RandomSource draws_rng(55);
        RandomSource select_rng(55);
        for (int i = 0; i < 200; ++i) {
            const auto draws = draws_rng.draw_distinct(pop.size(), 3);
            const Individual& w = tournament_select(pop, 3, select_rng);
            double best = pop.members[draws[0]].fitness.value();
            for (std::size_t d : draws)
                best = std::min(best, pop.members[d].fitness.value());
            CHECK(*w.fitness == best);
        }
    }

    SUBCASE("ties go to the earliest draw") {
        Population flat;
        ScriptedBackend b2;
        FitnessEvaluator e2(b2, {FitnessMode::MeanRuntime, false, 1});
        for (int i = 0; i < 6; ++i) {
            flat.members.push_back(scripted_individual(2.0));
            flat.members.back().genes.push_back({"tag" + std::to_string(i), 0});
            e2.evaluate(flat.members.back());
        }
        RandomSource draws_rng(77);
        RandomSource select_rng(77);
        for (int i = 0; i < 100; ++i) {
            const auto draws = draws_rng.draw_distinct(flat.size(), 4);
            const Individual& w = tournament_select(flat, 4, select_rng);
            CHECK(w.key() == flat.members[draws[0]].key());
        }
    }

    SUBCASE("k out of range throws") {
        RandomSource rng(1);
        CHECK_THROWS_AS(tournament_select(pop, 0, rng), std::invalid_argument);
        CHECK_THROWS_AS(tournament_select(pop, pop.size() + 1, rng), std::invalid_argument);
    }
}

TEST_CASE("build_nest produces nest_size unevaluated offspring") {
    const PassPool pool = make_pool(4);
    RandomSource rng(41);
    EvolutionConfig cfg = small_config();
    cfg.nest_size = 6;

    const Individual p1 =
        random_individual(pool, cfg.genome_bounds, std::nullopt, Origin::RandomInit, rng);
    const Individual p2 =
        random_individual(pool, cfg.genome_bounds, std::nullopt, Origin::RandomInit, rng);

    SUBCASE("gates closed: offspring are parent copies") {
        cfg.crossover_pct = 0;
        cfg.mutation_pct = 0;
        const auto nest = build_nest(p1, p2, cfg, pool, rng);
        REQUIRE(nest.size() == 6);
        for (std::size_t i = 0; i < nest.size(); ++i) {
            CHECK(nest[i].key() == (i % 2 == 0 ? p1 : p2).key());
            CHECK_FALSE(nest[i].evaluated());
        }
    }

    SUBCASE("crossover only: each pair conserves the parent multiset") {
        cfg.crossover_pct = 100;
        cfg.mutation_pct = 0;
        const auto nest = build_nest(p1, p2, cfg, pool, rng);
        REQUIRE(nest.size() == 6);
        std::multiset<std::string> parents;
        for (const auto& g : p1.genes)
            parents.insert(g.id);
        for (const auto& g : p2.genes)
            parents.insert(g.id);
        for (std::size_t i = 0; i < nest.size(); i += 2) {
            std::multiset<std::string> pair;
            for (const auto& g : nest[i].genes)
                pair.insert(g.id);
            for (const auto& g : nest[i + 1].genes)
                pair.insert(g.id);
            CHECK(pair == parents);
        }
    }

    SUBCASE("mutation only: lengths match the parents") {
        cfg.crossover_pct = 0;
        cfg.mutation_pct = 100;
        const auto nest = build_nest(p1, p2, cfg, pool, rng);
        for (std::size_t i = 0; i < nest.size(); ++i)
            CHECK(nest[i].length() == (i % 2 == 0 ? p1 : p2).length());
    }
}

TEST_CASE("nest_survivors matches a brute-force oracle") {
    ScriptedBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, false, 1});
    RandomSource rng(53);

    for (int rep = 0; rep < 1000; ++rep) {
        // Small integer fitness values force plenty of ties.
        const std::size_t nest_size = rng.chance_pct(50) ? 4 : 6;
        std::vector<double> values;
        for (std::size_t i = 0; i < nest_size + 2; ++i)
            values.push_back(1.0 + static_cast<double>(rng.index(4)));

        Individual p1 = scripted_individual(values[0]);
        Individual p2 = scripted_individual(values[1]);
        eval.evaluate(p1);
        eval.evaluate(p2);
        std::vector<Individual> nest;
        for (std::size_t i = 0; i < nest_size; ++i)
            nest.push_back(scripted_individual(values[2 + i]));

        const auto [s1, s2] = nest_survivors(p1, p2, nest, eval);

        // Oracle: offspring first, then parents; stable sort on fitness alone
        // implements "offspring beat parents, then lower index".
        std::vector<std::pair<double, std::string>> cand;
        for (std::size_t i = 0; i < nest_size; ++i)
            cand.emplace_back(values[2 + i], "o" + std::to_string(i));
        cand.emplace_back(values[0], "p1");
        cand.emplace_back(values[1], "p2");
        std::stable_sort(cand.begin(), cand.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        REQUIRE(s1.fitness.value() == cand[0].first);
        REQUIRE(s2.fitness.value() == cand[1].first);
        REQUIRE(s1.fitness.value() <= s2.fitness.value());
    }
}

TEST_CASE("nest_survivors prefers offspring on exact ties") {
    ScriptedBackend backend;
    FitnessEvaluator eval(backend, {FitnessMode::MeanRuntime, false, 1});
    Individual p1 = scripted_individual(2.0);
    Individual p2 = scripted_individual(2.0);
    eval.evaluate(p1);
    eval.evaluate(p2);
    std::vector<Individual> nest;
    nest.push_back(scripted_individual(2.0));
    nest.push_back(scripted_individual(2.0));
    nest[0].genes.push_back({"marker0", 0});
    nest[1].genes.push_back({"marker1", 0});

    const auto [s1, s2] = nest_survivors(p1, p2, nest, eval);
    CHECK(s1.key().find("marker0") != std::string::npos);
    CHECK(s2.key().find("marker1") != std::string::npos);
}

TEST_CASE("next_generation preserves size and seats every role") {
    const PassPool pool = make_pool(4);
    LengthBackend backend;
    EvolutionConfig cfg = small_config();
    cfg.population_size = 14;
    cfg.elite_pct = 15;  // lround(2.1) = 2 elites
    cfg.immigrant_pct = 15;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, cfg.memoize, cfg.runs_per_eval});
    RandomSource rng(cfg.seed);

    Population pop;
    pop.generation = 0;
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
        pop.members.push_back(random_individual(pool, cfg.genome_bounds, std::nullopt,
                                                Origin::RandomInit, rng));
        eval.evaluate(pop.members.back());
    }

    const Composition comp = composition_of(cfg);
    const Population next = next_generation(pop, cfg, pool, eval, rng);

    REQUIRE(next.size() == cfg.population_size);
    CHECK(next.generation == 1);
    for (const auto& m : next.members)
        REQUIRE(m.evaluated());

    // Leading elites are the best of the previous generation, unchanged.
    std::vector<double> prev_fitness;
    for (const auto& m : pop.members)
        prev_fitness.push_back(m.fitness.value());
    std::sort(prev_fitness.begin(), prev_fitness.end());
    for (std::size_t i = 0; i < comp.elites; ++i) {
        CHECK(next.members[i].origin == Origin::Elite);
        CHECK(next.members[i].fitness.value() == prev_fitness[i]);
    }
    std::size_t immigrants = 0, survivors = 0;
    for (const auto& m : next.members) {
        if (m.origin == Origin::Immigrant) {
            ++immigrants;
            CHECK(m.birth_generation == 1);
        } else if (m.origin == Origin::NestSurvivor) {
            ++survivors;
        }
    }
    CHECK(immigrants == comp.immigrants);
    CHECK(survivors == comp.survivor_slots);
}

TEST_CASE("distinct elites: the same member is never seated twice") {
    ScriptedBackend backend;
    EvolutionConfig cfg;
    cfg.population_size = 8;
    cfg.elite_pct = 25; // 2 elites
    cfg.immigrant_pct = 25;
    cfg.tournament_size = 2;
    cfg.genome_bounds = {1, 4};
    cfg.runs_per_eval = 1;
    cfg.memoize = false;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, false, 1});
    RandomSource rng(61);

    Population pop;
    for (double v : {4.0, 1.0, 3.0, 2.0, 5.0, 6.0, 7.0, 8.0}) {
        pop.members.push_back(scripted_individual(v));
        eval.evaluate(pop.members.back());
    }
    // Pool tokens must parse as scripted values to survive mutation.
    PassPool pool;
    pool.passes = {"v2.0", "v3.0", "v4.0"};

    const Population next = next_generation(pop, cfg, pool, eval, rng);
    CHECK(next.members[0].fitness.value() == 1.0);
    CHECK(next.members[1].fitness.value() == 2.0);
}

TEST_CASE("run_evolution history and monotone best under memoization") {
    SimLandscape land;
    land.pool_size = 3;
    land.base_runtime = 10.0;
    land.length_penalty = 0.05;
    land.target_motifs = {{{"p0", "p1"}, 2.0}};
    SimBackend backend(land);

    EvolutionConfig cfg = small_config();
    cfg.generations = 12;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, cfg.memoize, cfg.runs_per_eval});
    const EvolutionResult res = run_evolution(cfg, sim_pool(land), eval, nullptr);

    REQUIRE(res.history.size() == 12);
    CHECK(res.generations_run == 12);
    CHECK_FALSE(res.stopped_early);
    for (std::size_t i = 0; i < res.history.size(); ++i)
        CHECK(res.history[i].generation == i + 1);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i].best_fitness <= res.history[i - 1].best_fitness);
    CHECK(res.best.fitness.value() == res.history.back().best_fitness);
    CHECK(res.total_evaluations == eval.evaluations());
    CHECK(res.total_measurements == eval.measurements());
    CHECK(res.total_cache_hits == eval.cache_hits());

    // First row includes the initial population's evaluations.
    CHECK(res.history[0].evaluations >= cfg.population_size);
}

TEST_CASE("memoized runs measure once per distinct sequence") {
    SimLandscape land;
    land.pool_size = 2;
    land.base_runtime = 5.0;
    land.target_motifs = {{{"p1"}, 1.0}};
    SimBackend backend(land);

    EvolutionConfig cfg = small_config();
    cfg.generations = 20;
    cfg.genome_bounds = {1, 4}; // tiny space forces many repeats
    FitnessEvaluator eval(backend, {cfg.fitness_mode, true, 2});
    const EvolutionResult res = run_evolution(cfg, sim_pool(land), eval, nullptr);

    CHECK(res.total_measurements == eval.cache().size());
    CHECK(res.total_evaluations == res.total_measurements + res.total_cache_hits);
}

TEST_CASE("non-memoized runs re-measure carried-over members") {
    SimLandscape land;
    land.pool_size = 2;
    land.base_runtime = 5.0;
    land.target_motifs = {{{"p1"}, 1.0}};
    SimBackend backend(land);

    EvolutionConfig cfg = small_config();
    cfg.generations = 6;
    cfg.memoize = false;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, false, 2});
    const EvolutionResult res = run_evolution(cfg, sim_pool(land), eval, nullptr);

    CHECK(res.total_cache_hits == 0);
    // Elites alone guarantee more measurements than evaluations of fresh
    // members: every generation re-measures each carried member once.
    CHECK(res.total_measurements > eval.cache().size());
    CHECK(res.total_measurements == res.total_evaluations);
}

TEST_CASE("identical seeds give byte-identical histories") {
    SimLandscape land;
    land.pool_size = 3;
    land.base_runtime = 8.0;
    land.length_penalty = 0.01;
    land.target_motifs = {{{"p2", "p0"}, 1.5}};
    land.noise_sigma = 0.1;
    land.noise_seed = 5;

    auto run = [&] {
        SimBackend backend(land);
        EvolutionConfig cfg = small_config();
        cfg.generations = 8;
        FitnessEvaluator eval(backend, {cfg.fitness_mode, cfg.memoize, cfg.runs_per_eval});
        return run_evolution(cfg, sim_pool(land), eval, nullptr);
    };
    const std::string a = history_fingerprint(run());
    const std::string b = history_fingerprint(run());
    CHECK(a == b);
    CHECK_FALSE(a.empty());

    auto run_seed = [&](std::uint64_t seed) {
        SimBackend backend(land);
        EvolutionConfig cfg = small_config();
        cfg.generations = 8;
        cfg.seed = seed;
        FitnessEvaluator eval(backend, {cfg.fitness_mode, cfg.memoize, cfg.runs_per_eval});
        return run_evolution(cfg, sim_pool(land), eval, nullptr);
    };
    CHECK(history_fingerprint(run_seed(100)) != history_fingerprint(run_seed(101)));
}

TEST_CASE("stagnation window stops a converged run early") {
    SimLandscape land;
    land.pool_size = 1;
    land.base_runtime = 4.0;
    land.target_motifs = {{{"p0"}, 1.0}};
    SimBackend backend(land);

    EvolutionConfig cfg;
    cfg.generations = 100;
    cfg.population_size = 8;
    cfg.genome_bounds = {1, 3};
    cfg.runs_per_eval = 1;
    cfg.seed = 9;
    cfg.stagnation_window = 4;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, true, 1});
    const EvolutionResult res = run_evolution(cfg, sim_pool(land), eval, nullptr);

    CHECK(res.stopped_early);
    CHECK(res.generations_run < 100);
    CHECK(res.history.size() == res.generations_run);
    // The window counts generations without strict best-ever improvement.
    CHECK(res.generations_run >= 4);
}

TEST_CASE("sink receives one row per completed generation") {
    struct CollectingSink final : StatsSink {
        std::vector<GenerationStats> rows;
        void on_generation(const GenerationStats& s) override { rows.push_back(s); }
    };

    SimLandscape land;
    land.pool_size = 2;
    land.base_runtime = 5.0;
    land.target_motifs = {{{"p0"}, 1.0}};
    SimBackend backend(land);

    EvolutionConfig cfg = small_config();
    cfg.generations = 7;
    FitnessEvaluator eval(backend, {cfg.fitness_mode, true, 1});
    CollectingSink sink;
    const EvolutionResult res = run_evolution(cfg, sim_pool(land), eval, &sink);

    REQUIRE(sink.rows.size() == 7);
    for (std::size_t i = 0; i < sink.rows.size(); ++i) {
        CHECK(sink.rows[i].generation == res.history[i].generation);
        CHECK(sink.rows[i].best_fitness == res.history[i].best_fitness);
    }
}
