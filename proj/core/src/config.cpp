// SPDX-License-Identifier: Apache-2.0
#include "passevo/config.hpp"

#include "passevo/csv.hpp"
#include "passevo/errors.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace passevo {

using csv::parse_double;
using csv::parse_long;
using csv::parse_u64;

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(where, "expected a boolean (true/false), got '" + v + "'");
}

long parse_long_min(const std::string& v, long min, const std::string& where) {
    const long n = parse_long(v, where);
    if (n < min)
        throw ConfigError(where, "value must be >= " + std::to_string(min) + ", got " + v);
    return n;
}

int parse_pct(const std::string& v, const std::string& where) {
    const long n = parse_long(v, where);
    if (n < 0 || n > 100)
        throw ConfigError(where, "percentage must be in 0..100, got " + v);
    return static_cast<int>(n);
}

// "tok tok : reward"
std::pair<std::vector<std::string>, double> parse_motif(const std::string& v,
                                                        const std::string& where) {
    const std::size_t colon = v.rfind(':');
    if (colon == std::string::npos)
        throw ConfigError(where, "motif must be 'token token ... : reward'");
    const std::vector<std::string> tokens = split_ws(v.substr(0, colon));
    if (tokens.empty()) throw ConfigError(where, "motif has no tokens");
    const double reward = parse_double(trim(v.substr(colon + 1)), where);
    return {tokens, reward};
}

struct Line {
    std::string section;
    std::string key;
    std::string value;
    std::string where;
};

std::vector<Line> tokenize(const std::string& text, const std::string& name) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string where = name + ":" + std::to_string(lineno);
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where, "empty section name");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where, "expected 'key = value'");
        Line l;
        l.section = section;
        l.key = trim(line.substr(0, eq));
        l.value = trim(line.substr(eq + 1));
        l.where = where;
        if (l.key.empty()) throw ConfigError(where, "empty key");
        lines.push_back(std::move(l));
    }
    return lines;
}

void apply_top(RunConfig& cfg, const Line& l) {
    if (l.key == "backend") {
        if (l.value != "sim" && l.value != "llvm")
            throw ConfigError(l.where, "backend must be 'sim' or 'llvm', got '" + l.value + "'");
        cfg.backend = l.value;
    } else if (l.key == "target_src") {
        cfg.target_src = l.value;
    } else if (l.key == "workdir") {
        cfg.workdir = l.value;
    } else if (l.key == "output_dir") {
        cfg.output_dir = l.value;
    } else if (l.key == "pass_pool") {
        cfg.pass_pool_path = l.value;
    } else if (l.key == "check_output") {
        cfg.check_output = parse_bool(l.value, l.where);
    } else if (l.key == "seed") {
        cfg.evolution.seed = parse_u64(l.value, l.where);
    } else if (l.key == "trials") {
        cfg.tune_trials = static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else {
        throw ConfigError(l.where, "unknown key '" + l.key + "'");
    }
}

void apply_evolution(EvolutionConfig& ev, const Line& l) {
    if (l.key == "generations") {
        ev.generations = static_cast<std::uint32_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "population_size") {
        ev.population_size = static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "crossover_pct") {
        ev.crossover_pct = parse_pct(l.value, l.where);
    } else if (l.key == "mutation_pct") {
        ev.mutation_pct = parse_pct(l.value, l.where);
    } else if (l.key == "tournament_size") {
        ev.tournament_size = static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "elite_pct") {
        ev.elite_pct = parse_pct(l.value, l.where);
    } else if (l.key == "nest_size") {
        ev.nest_size = static_cast<std::size_t>(parse_long_min(l.value, 2, l.where));
    } else if (l.key == "immigrant_pct") {
        ev.immigrant_pct = parse_pct(l.value, l.where);
    } else if (l.key == "min_individual_len") {
        ev.genome_bounds.min_len =
            static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "max_individual_len") {
        ev.genome_bounds.max_len =
            static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "individual_len") {
        // 0 keeps the random-length initialization.
        const long n = parse_long_min(l.value, 0, l.where);
        if (n == 0)
            ev.fixed_individual_len.reset();
        else
            ev.fixed_individual_len = static_cast<std::size_t>(n);
    } else if (l.key == "seed") {
        ev.seed = parse_u64(l.value, l.where);
    } else if (l.key == "fitness_mode") {
        if (l.value == "mean_runtime")
            ev.fitness_mode = FitnessMode::MeanRuntime;
        else if (l.value == "mean_plus_variance")
            ev.fitness_mode = FitnessMode::MeanPlusVariance;
        else
            throw ConfigError(l.where,
                              "fitness_mode must be 'mean_runtime' or 'mean_plus_variance'");
    } else if (l.key == "memoize") {
        ev.memoize = parse_bool(l.value, l.where);
    } else if (l.key == "runs_per_eval") {
        ev.runs_per_eval = static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "stagnation_window") {
        const long n = parse_long_min(l.value, 0, l.where);
        if (n == 0)
            ev.stagnation_window.reset();
        else
            ev.stagnation_window = static_cast<std::uint32_t>(n);
    } else {
        throw ConfigError(l.where, "unknown key '" + l.key + "'");
    }
}

void apply_toolchain(ToolchainConfig& tc, const Line& l) {
    if (l.key == "preset") {
        try {
            apply_toolchain_preset(tc, l.value);
        } catch (const ConfigError& e) {
            throw ConfigError(l.where, e.what());
        }
    } else if (l.key == "frontend_cmd") {
        tc.frontend_cmd = l.value;
    } else if (l.key == "opt_cmd") {
        tc.opt_cmd = l.value;
    } else if (l.key == "backend_cmd") {
        tc.backend_cmd = l.value;
    } else if (l.key == "baseline_cmd") {
        tc.baseline_cmd = l.value;
    } else if (l.key == "run_cmd") {
        tc.run_cmd = l.value;
    } else if (l.key == "run_args") {
        tc.run_args = l.value;
    } else if (l.key == "timeout_s") {
        tc.timeout_s = parse_double(l.value, l.where);
        if (!(tc.timeout_s > 0.0)) throw ConfigError(l.where, "timeout_s must be > 0");
    } else if (l.key == "levels") {
        tc.levels = split_ws(l.value);
    } else if (l.key == "passes_joiner") {
        tc.passes_joiner = l.value;
    } else if (l.key == "pass_prefix") {
        tc.pass_prefix = l.value;
    } else {
        throw ConfigError(l.where, "unknown key '" + l.key + "'");
    }
}

void apply_simulation(SimLandscape& land, const Line& l) {
    if (l.key == "pool_size") {
        land.pool_size = static_cast<std::size_t>(parse_long_min(l.value, 1, l.where));
    } else if (l.key == "motif") {
        land.target_motifs.push_back(parse_motif(l.value, l.where));
    } else if (l.key == "base_runtime") {
        land.base_runtime = parse_double(l.value, l.where);
    } else if (l.key == "length_penalty") {
        land.length_penalty = parse_double(l.value, l.where);
    } else if (l.key == "noise_sigma") {
        land.noise_sigma = parse_double(l.value, l.where);
    } else if (l.key == "noise_seed") {
        land.noise_seed = parse_u64(l.value, l.where);
    } else {
        throw ConfigError(l.where, "unknown key '" + l.key + "'");
    }
}

} // namespace

namespace {

RunConfig parse_config_lines(const std::string& text, const std::string& name) {
    RunConfig cfg;
    std::set<std::string> seen;

    for (const Line& l : tokenize(text, name)) {
        // motif is the one repeatable key
        if (!(l.section == "simulation" && l.key == "motif")) {
            if (!seen.insert(l.section + "\x1f" + l.key).second)
                throw ConfigError(l.where, "duplicate key '" + l.key + "'");
        }

        if (l.section.empty()) {
            apply_top(cfg, l);
        } else if (l.section == "evolution") {
            apply_evolution(cfg.evolution, l);
        } else if (l.section == "toolchain") {
            cfg.has_toolchain = true;
            apply_toolchain(cfg.toolchain, l);
        } else if (l.section == "simulation") {
            cfg.has_simulation = true;
            apply_simulation(cfg.simulation, l);
        } else {
            throw ConfigError(l.where, "unknown section [" + l.section + "]");
        }
    }

    return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    RunConfig cfg = parse_config_lines(text, name);
    validate_run_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config_lines(buf.str(), path);

    // Input paths are relative to the config file, not the working directory.
    const fs::path base = fs::path(path).parent_path();
    auto rebase = [&](std::string& p) {
        if (!p.empty() && fs::path(p).is_relative())
            p = (base / p).lexically_normal().string();
    };
    rebase(cfg.target_src);
    rebase(cfg.pass_pool_path);

    validate_run_config(cfg);
    return cfg;
}

void validate_run_config(const RunConfig& cfg) {
    if (cfg.backend != "sim" && cfg.backend != "llvm")
        throw ConfigError("backend", "must be 'sim' or 'llvm', got '" + cfg.backend + "'");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must be non-empty");
    if (cfg.tune_trials < 1) throw ConfigError("trials", "must be >= 1");

    validate(cfg.evolution);

    if (cfg.backend == "llvm") {
        if (!cfg.has_toolchain)
            throw ConfigError("config", "llvm backend requires a [toolchain] section");
        validate_toolchain(cfg.toolchain);
        if (cfg.workdir.empty()) throw ConfigError("workdir", "must be non-empty");
        if (cfg.target_src.empty())
            throw ConfigError("target_src", "required for the llvm backend");
        if (!fs::exists(cfg.target_src))
            throw ConfigError("target_src", "no such file: " + cfg.target_src);
        if (cfg.pass_pool_path.empty())
            throw ConfigError("pass_pool", "required for the llvm backend");
        if (!fs::exists(cfg.pass_pool_path))
            throw ConfigError("pass_pool", "no such file: " + cfg.pass_pool_path);
    } else {
        if (!cfg.has_simulation)
            throw ConfigError("config", "sim backend requires a [simulation] section");
        validate_landscape(cfg.simulation);
    }
}

} // namespace passevo
