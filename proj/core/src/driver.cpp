// SPDX-License-Identifier: Apache-2.0
#include "passevo/driver.hpp"

#include "passevo/csv.hpp"
#include "passevo/errors.hpp"
#include "passevo/reporting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace passevo {
namespace {

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

RunConfig load_config(const std::string& path, const CliOverrides& ov) {
    RunConfig cfg = parse_config(path);
    bool revalidate = false;
    if (ov.backend) {
        cfg.backend = *ov.backend;
        revalidate = true;
    }
    if (ov.seed) cfg.evolution.seed = *ov.seed;
    if (ov.trials) {
        cfg.tune_trials = *ov.trials;
        revalidate = true;
    }
    if (revalidate) validate_run_config(cfg);
    return cfg;
}

void make_dirs(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    if (cfg.backend == "llvm") fs::create_directories(cfg.workdir);
}

// Longest enumerable probe length: every optimum is achievable within the
// summed motif lengths, and the budget keeps exhaustion cheap.
std::size_t probe_length(const SimLandscape& land) {
    std::size_t want = 0;
    for (const auto& [motif, reward] : land.target_motifs) want += motif.size();
    want = std::max<std::size_t>(want, 1);

    std::size_t feasible = 0;
    double total = 0.0;
    for (std::size_t len = 1; len <= want; ++len) {
        total += std::pow(static_cast<double>(land.pool_size), static_cast<double>(len));
        if (total > 2e6) break;
        feasible = len;
    }
    return feasible;
}

// Baselines the evolved runtime is compared against, as (label, seconds).
// For llvm every Ok level of `rep` contributes; for sim the no-pass runtime
// and the enumerated optimum do.
std::vector<std::pair<std::string, double>> sim_baselines(const SimLandscape& land) {
    std::vector<std::pair<std::string, double>> rows;
    rows.emplace_back("unoptimized", land.base_runtime);
    const std::size_t len = probe_length(land);
    if (len > 0) {
        const auto [optimum, seq] = landscape_optimum(land, len);
        rows.emplace_back("optimum", optimum);
    }
    return rows;
}

std::vector<std::pair<std::string, double>> llvm_baselines(const BaselineReport& rep) {
    std::vector<std::pair<std::string, double>> rows;
    for (const BaselineEntry& e : rep.entries)
        if (e.record.ok()) rows.emplace_back(e.label, e.record.mean_runtime);
    return rows;
}

struct BackendSetup {
    PassPool pool;
    std::unique_ptr<Backend> backend;
    std::vector<std::pair<std::string, double>> baselines;
    std::optional<BaselineReport> baseline_report; // llvm only
};

// Builds the backend and its comparison baselines. Throws ConfigError for
// config problems; a dead llvm toolchain surfaces as baselines whose
// "unoptimized" record is not Ok (mapped to exit_toolchain_error by
// callers).
BackendSetup setup_backend(const RunConfig& cfg, bool with_baselines) {
    BackendSetup s;
    if (cfg.backend == "sim") {
        s.pool = sim_pool(cfg.simulation);
        s.backend = std::make_unique<SimBackend>(cfg.simulation);
        if (with_baselines) s.baselines = sim_baselines(cfg.simulation);
        return s;
    }

    s.pool = load_pass_pool(cfg.pass_pool_path);
    s.backend = std::make_unique<LlvmBackend>(cfg.toolchain, cfg.target_src, cfg.workdir,
                                              cfg.check_output);
    if (with_baselines) {
        s.baseline_report = measure_baselines(cfg.target_src, cfg.toolchain,
                                              cfg.evolution.runs_per_eval, cfg.workdir);
        s.baselines = llvm_baselines(*s.baseline_report);
    }
    return s;
}

bool unoptimized_ok(const BaselineReport& rep) {
    for (const BaselineEntry& e : rep.entries)
        if (e.label == "unoptimized") return e.record.ok();
    return false;
}

void print_improvements(std::ostream& out, const ImprovementReport& report) {
    for (const ImprovementEntry& e : report.entries)
        out << "  vs " << e.label << ": " << fmt(e.percent, 4) << "% ("
            << fmt(e.baseline_s) << " s -> " << fmt(e.evolved_s) << " s)\n";
}

void set_factor(EvolutionConfig& ev, const std::string& name, double value,
                const std::string& where) {
    const double rounded = std::round(value);
    if (rounded != value)
        throw ConfigError(where, "factor '" + name + "' needs integer levels, got " +
                                     fmt(value));
    const long v = static_cast<long>(rounded);
    auto positive = [&](const char* what) {
        if (v < 1)
            throw ConfigError(where, "factor '" + name + "' level must be >= 1 for " +
                                         what + ", got " + std::to_string(v));
        return static_cast<std::size_t>(v);
    };
    auto pct = [&]() {
        if (v < 0 || v > 100)
            throw ConfigError(where, "factor '" + name + "' level must be in 0..100, got " +
                                         std::to_string(v));
        return static_cast<int>(v);
    };

    if (name == "crossover")
        ev.crossover_pct = pct();
    else if (name == "mutation")
        ev.mutation_pct = pct();
    else if (name == "tournament")
        ev.tournament_size = positive("tournament_size");
    else if (name == "elite")
        ev.elite_pct = pct();
    else if (name == "immigrant")
        ev.immigrant_pct = pct();
    else if (name == "nest")
        ev.nest_size = positive("nest_size");
    else if (name == "population")
        ev.population_size = positive("population_size");
    else if (name == "generations")
        ev.generations = static_cast<std::uint32_t>(positive("generations"));
    else
        throw ConfigError(where, "unknown tuning factor '" + name + "'");
}

} // namespace

FactorSpec parse_factor_arg(const std::string& arg) {
    const std::size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("factor", "expected name=v1,v2,v3,v4, got '" + arg + "'");

    FactorSpec spec;
    spec.name = arg.substr(0, eq);

    std::vector<std::string> parts;
    std::string rest = arg.substr(eq + 1);
    std::size_t start = 0;
    for (std::size_t i = 0; i <= rest.size(); ++i) {
        if (i == rest.size() || rest[i] == ',') {
            parts.push_back(rest.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() != 4)
        throw ConfigError("factor", "factor '" + spec.name + "' needs exactly 4 levels, got " +
                                        std::to_string(parts.size()));
    for (std::size_t i = 0; i < 4; ++i)
        spec.levels[i] = csv::parse_double(parts[i], "factor " + spec.name);

    // Reject unknown names and out-of-range levels at the CLI boundary
    // rather than sixteen experiments into a tuning run.
    EvolutionConfig probe;
    for (const double level : spec.levels)
        set_factor(probe, spec.name, level, "factor " + spec.name);
    return spec;
}

int cmd_evolve(const std::string& config_path, const CliOverrides& overrides,
               std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    BackendSetup setup;
    try {
        cfg = load_config(config_path, overrides);
        make_dirs(cfg);
        setup = setup_backend(cfg, true);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    if (cfg.backend == "llvm" && !unoptimized_ok(*setup.baseline_report)) {
        for (const BaselineEntry& e : setup.baseline_report->entries)
            if (e.label == "unoptimized")
                err << "error: unoptimized baseline build failed: " << e.record.detail
                    << "\n";
        return exit_toolchain_error;
    }

    FitnessEvaluator evaluator(*setup.backend,
                               EvaluatorOptions{cfg.evolution.fitness_mode,
                                                cfg.evolution.memoize,
                                                cfg.evolution.runs_per_eval});
    try {
        if (overrides.cache_file && fs::exists(*overrides.cache_file))
            evaluator.cache().load_file(*overrides.cache_file);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    const fs::path out_dir(cfg.output_dir);
    EvolutionResult result;
    try {
        CsvStatsSink sink((out_dir / "generations.csv").string());
        result = run_evolution(cfg.evolution, setup.pool, evaluator, &sink);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        err << "error: evolution aborted: " << e.what() << "\n";
        return exit_evolution_aborted;
    }

    try {
        write_best_sequence((out_dir / "best_sequence.txt").string(), result.best.tokens());
        if (overrides.cache_file) evaluator.cache().save_file(*overrides.cache_file);

        if (!result.best.record || !result.best.record->ok()) {
            err << "error: evolution aborted: no sequence evaluated successfully";
            if (result.best.record && !result.best.record->detail.empty())
                err << " (last failure: " << result.best.record->detail << ")";
            err << "\n";
            return exit_evolution_aborted;
        }

        const double evolved_mean = result.best.record->mean_runtime;
        const ImprovementReport improvement =
            improvement_report(setup.baselines, evolved_mean);
        write_improvement_csv((out_dir / "improvement.csv").string(), improvement);

        std::ostringstream summary;
        summary << "generations run: " << result.generations_run
                << (result.stopped_early ? " (stopped early)" : "") << "\n"
                << "evaluations: " << result.total_evaluations
                << ", backend measurements: " << result.total_measurements
                << ", cache hits: " << result.total_cache_hits << "\n"
                << "best fitness: " << fmt(*result.best.fitness) << " s (mean runtime "
                << fmt(evolved_mean) << " s over " << result.best.record->n << " runs)\n"
                << "best sequence (" << result.best.genes.size() << " passes): "
                << join(result.best.tokens()) << "\n";
        print_improvements(summary, improvement);

        std::ofstream sf(out_dir / "summary.txt");
        sf << summary.str();
        out << summary.str();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }
    return exit_ok;
}

int cmd_baseline(const std::string& config_path, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path, overrides);
        if (cfg.backend != "llvm")
            throw ConfigError("backend", "the baseline command requires the llvm backend");
        make_dirs(cfg);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    const BaselineReport report = measure_baselines(
        cfg.target_src, cfg.toolchain, cfg.evolution.runs_per_eval, cfg.workdir);
    write_baselines_csv((fs::path(cfg.output_dir) / "baselines.csv").string(), report);

    bool any_ok = false;
    for (const BaselineEntry& e : report.entries) {
        any_ok = any_ok || e.record.ok();
        out << e.label << ": ";
        if (e.record.ok())
            out << fmt(e.record.mean_runtime) << " s (variance "
                << fmt(e.record.variance) << ")\n";
        else
            out << to_string(e.record.status) << "\n";
    }
    if (!any_ok) {
        err << "error: every baseline build failed\n";
        return exit_toolchain_error;
    }
    return exit_ok;
}

int cmd_tune(const std::string& config_path, const CliOverrides& overrides,
             const std::vector<FactorSpec>& factors, std::ostream& out,
             std::ostream& err) {
    RunConfig cfg;
    BackendSetup setup;
    TaguchiDesign design;
    try {
        cfg = load_config(config_path, overrides);
        std::array<FactorSpec, 3> chosen = default_tuning_factors();
        if (!factors.empty()) {
            if (factors.size() != 3)
                throw ConfigError("factor", "exactly 3 factors required, got " +
                                                std::to_string(factors.size()));
            std::copy(factors.begin(), factors.end(), chosen.begin());
        }
        design = l16_design(chosen);

        // Every row's config must be valid before any evolution runs.
        for (const TaguchiRow& row : design.rows) {
            EvolutionConfig rc = cfg.evolution;
            for (std::size_t f = 0; f < 3; ++f)
                set_factor(rc, design.factors[f].name, design.level_value(row, f),
                           "experiment " + std::to_string(row.row_id));
            validate(rc);
        }

        make_dirs(cfg);
        setup = setup_backend(cfg, true);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }

    if (cfg.backend == "llvm" && !unoptimized_ok(*setup.baseline_report)) {
        err << "error: unoptimized baseline build failed\n";
        return exit_toolchain_error;
    }
    const double base_s = setup.baselines.front().second;

    const fs::path out_dir(cfg.output_dir);
    write_taguchi_plan_csv((out_dir / "taguchi_plan.csv").string(), design);

    RandomSource seeder(cfg.evolution.seed);
    std::vector<std::vector<double>> improvements(design.rows.size());
    std::vector<std::vector<double>> runtimes(design.rows.size());

    for (std::size_t i = 0; i < design.rows.size(); ++i) {
        const TaguchiRow& row = design.rows[i];
        EvolutionConfig rc = cfg.evolution;
        for (std::size_t f = 0; f < 3; ++f)
            set_factor(rc, design.factors[f].name, design.level_value(row, f),
                       "experiment " + std::to_string(row.row_id));

        for (std::size_t t = 0; t < cfg.tune_trials; ++t) {
            rc.seed = seeder.next_u64();
            FitnessEvaluator evaluator(*setup.backend,
                                       EvaluatorOptions{rc.fitness_mode, rc.memoize,
                                                        rc.runs_per_eval});
            const auto t0 = std::chrono::steady_clock::now();
            EvolutionResult result;
            try {
                result = run_evolution(rc, setup.pool, evaluator, nullptr);
            } catch (const std::exception& e) {
                err << "error: evolution aborted in experiment " << row.row_id << ": "
                    << e.what() << "\n";
                return exit_evolution_aborted;
            }
            const auto t1 = std::chrono::steady_clock::now();

            if (!result.best.record || !result.best.record->ok()) {
                err << "error: experiment " << row.row_id
                    << " produced no successfully evaluated sequence\n";
                return exit_evolution_aborted;
            }
            improvements[i].push_back(
                percent_improvement(base_s, result.best.record->mean_runtime));
            runtimes[i].push_back(std::chrono::duration<double>(t1 - t0).count());
        }

        out << "experiment " << row.row_id;
        for (std::size_t f = 0; f < 3; ++f)
            out << " " << design.factors[f].name << "=" << fmt(design.level_value(row, f));
        double mean_imp = 0.0;
        for (double v : improvements[i]) mean_imp += v;
        mean_imp /= static_cast<double>(improvements[i].size());
        out << ": mean improvement " << fmt(mean_imp, 4) << "%\n";
    }

    const SnAnalysis imp_sn = analyze(design, improvements, SnObjective::LargerIsBetter);
    const SnAnalysis run_sn = analyze(design, runtimes, SnObjective::SmallerIsBetter);
    write_sn_csv((out_dir / "taguchi_improvement_sn.csv").string(), imp_sn);
    write_sn_csv((out_dir / "taguchi_runtime_sn.csv").string(), run_sn);

    std::size_t best_row = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < improvements.size(); ++i) {
        double mean = 0.0;
        for (double v : improvements[i]) mean += v;
        mean /= static_cast<double>(improvements[i].size());
        if (mean > best_mean) {
            best_mean = mean;
            best_row = i;
        }
    }
    out << "best experiment: " << design.rows[best_row].row_id;
    for (std::size_t f = 0; f < 3; ++f)
        out << " " << design.factors[f].name << "="
            << fmt(design.level_value(design.rows[best_row], f));
    out << " (mean improvement " << fmt(best_mean, 4) << "%)\n";

    out << "improvement S/N deltas:";
    for (const FactorAnalysis& fa : imp_sn.factors)
        out << " " << fa.factor << "=" << fmt(fa.delta, 4) << " (rank " << fa.rank << ")";
    out << "\n";
    if (imp_sn.offset_applied != 0.0)
        out << "note: improvement responses shifted by +" << fmt(imp_sn.offset_applied, 4)
            << " before S/N (non-positive values present)\n";
    out << "overhead S/N deltas:";
    for (const FactorAnalysis& fa : run_sn.factors)
        out << " " << fa.factor << "=" << fmt(fa.delta, 4) << " (rank " << fa.rank << ")";
    out << "\n";
    return exit_ok;
}

int cmd_report(const std::string& run_dir, std::ostream& out, std::ostream& err) {
    const fs::path dir(run_dir);
    std::vector<GenerationStats> history;
    try {
        history = read_generations_csv((dir / "generations.csv").string());
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_config_error;
    }
    if (history.empty()) {
        err << "error: " << (dir / "generations.csv").string() << " holds no rows\n";
        return exit_config_error;
    }

    const GenerationStats* best = &history.front();
    std::uint64_t evals = 0;
    std::uint64_t hits = 0;
    for (const GenerationStats& s : history) {
        if (s.best_fitness < best->best_fitness) best = &s;
        evals += s.evaluations;
        hits += s.cache_hits;
    }

    out << "generations: " << history.size() << "\n"
        << "first best fitness: " << fmt(history.front().best_fitness) << " s\n"
        << "final best fitness: " << fmt(history.back().best_fitness) << " s\n"
        << "best fitness overall: " << fmt(best->best_fitness) << " s (generation "
        << best->generation << ")\n"
        << "evaluations: " << evals << ", cache hits: " << hits << "\n"
        << "best sequence: " << join(best->best_sequence) << "\n";

    const fs::path imp_path = dir / "improvement.csv";
    if (fs::exists(imp_path)) {
        try {
            print_improvements(out, read_improvement_csv(imp_path.string()));
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << "\n";
            return exit_config_error;
        }
    }
    return exit_ok;
}

} // namespace passevo
