// SPDX-License-Identifier: Apache-2.0
#include "passevo/driver.hpp"
#include "passevo/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"passevo - evolutionary search for compiler pass sequences"};
    app.require_subcommand(1);
    app.fallthrough();

    passevo::CliOverrides overrides;
    std::uint64_t seed = 0;
    std::string backend;
    app.add_option("--seed", seed, "Override the top-level seed")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--backend", backend, "Override the backend (sim or llvm)");

    std::string config_path;
    std::string cache_file;
    auto* evolve = app.add_subcommand("evolve", "Evolve a pass sequence");
    evolve->add_option("config", config_path, "Run configuration file")->required();
    evolve->add_option("--cache-file", cache_file,
                       "Fitness cache to load before and save after the run");

    auto* baseline = app.add_subcommand("baseline", "Time the -O baselines");
    baseline->add_option("config", config_path, "Run configuration file")->required();

    std::size_t trials = 0;
    std::vector<std::string> factor_args;
    auto* tune = app.add_subcommand("tune", "Run the L16 screening plan");
    tune->add_option("config", config_path, "Run configuration file")->required();
    tune->add_option("--trials", trials, "Evolution runs per experiment")
        ->check(CLI::PositiveNumber);
    tune->add_option("--factor", factor_args,
                     "Factor as name=v1,v2,v3,v4 (default factors unless "
                     "exactly three are given)");

    std::string run_dir;
    auto* report = app.add_subcommand("report", "Summarize a finished run directory");
    report->add_option("run_dir", run_dir, "Output directory of a previous run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? passevo::exit_ok : passevo::exit_config_error;
    }

    if (app.count("--seed") > 0) overrides.seed = seed;
    if (app.count("--backend") > 0) overrides.backend = backend;
    if (evolve->count("--cache-file") > 0) overrides.cache_file = cache_file;
    if (tune->count("--trials") > 0) overrides.trials = trials;

    try {
        if (*evolve) return passevo::cmd_evolve(config_path, overrides, std::cout, std::cerr);
        if (*baseline) return passevo::cmd_baseline(config_path, overrides, std::cout, std::cerr);
        if (*tune) {
            std::vector<passevo::FactorSpec> factors;
            factors.reserve(factor_args.size());
            for (const auto& arg : factor_args)
                factors.push_back(passevo::parse_factor_arg(arg));
            return passevo::cmd_tune(config_path, overrides, factors, std::cout, std::cerr);
        }
        if (*report) return passevo::cmd_report(run_dir, std::cout, std::cerr);
    } catch (const passevo::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return passevo::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return passevo::exit_evolution_aborted;
    }
    return passevo::exit_config_error;
}
