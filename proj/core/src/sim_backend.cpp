// SPDX-License-Identifier: Apache-2.0
#include "passevo/sim_backend.hpp"

#include "passevo/errors.hpp"
#include "passevo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace passevo {
namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string join_tokens(const std::vector<std::string>& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += seq[i];
    }
    return out;
}

} // namespace

void validate_landscape(const SimLandscape& land) {
    if (land.pool_size < 1) throw ConfigError("simulation", "pool_size must be >= 1");
    if (!(land.base_runtime > 0.0))
        throw ConfigError("simulation", "base_runtime must be > 0");
    if (land.length_penalty < 0.0)
        throw ConfigError("simulation", "length_penalty must be >= 0");
    if (land.noise_sigma < 0.0)
        throw ConfigError("simulation", "noise_sigma must be >= 0");

    if (land.target_motifs.empty())
        throw ConfigError("simulation", "at least one motif is required");

    const std::vector<std::string> tokens = sim_pool_tokens(land.pool_size);
    double reward_total = 0.0;
    for (const auto& [motif, reward] : land.target_motifs) {
        if (motif.empty()) throw ConfigError("simulation", "empty motif");
        if (!(reward > 0.0))
            throw ConfigError("simulation", "motif reward must be > 0");
        for (const std::string& tok : motif) {
            if (std::find(tokens.begin(), tokens.end(), tok) == tokens.end())
                throw ConfigError("simulation",
                                  "motif token '" + tok + "' is outside the sim pool");
        }
        reward_total += reward;
    }
    if (!(land.base_runtime - reward_total > 0.0))
        throw ConfigError("simulation",
                          "motif rewards sum to >= base_runtime; fitness must stay positive");
}

std::vector<std::string> sim_pool_tokens(std::size_t pool_size) {
    std::vector<std::string> tokens;
    tokens.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i)
        tokens.push_back("p" + std::to_string(i));
    return tokens;
}

PassPool sim_pool(const SimLandscape& land) {
    PassPool pool;
    pool.passes = sim_pool_tokens(land.pool_size);
    return pool;
}

double deterministic_mean(const std::vector<std::string>& seq, const SimLandscape& land) {
    double mean = land.base_runtime +
                  land.length_penalty * static_cast<double>(seq.size());
    for (const auto& [motif, reward] : land.target_motifs) {
        if (motif.size() > seq.size()) continue;
        if (std::search(seq.begin(), seq.end(), motif.begin(), motif.end()) != seq.end())
            mean -= reward;
    }
    return mean;
}

FitnessRecord sim_measure(const std::vector<std::string>& seq, const SimLandscape& land,
                          std::size_t n) {
    SimBackend backend(land);
    return record_from_measurement(backend.measure(seq, n));
}

std::pair<double, std::vector<std::string>> landscape_optimum(const SimLandscape& land,
                                                              std::size_t max_len) {
    validate_landscape(land);
    if (max_len < 1) throw std::invalid_argument("landscape_optimum: max_len must be >= 1");

    double total = 0.0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        total += std::pow(static_cast<double>(land.pool_size), static_cast<double>(len));
        if (total > 2e7)
            throw std::invalid_argument(
                "landscape_optimum: search space too large for exhaustive enumeration");
    }

    const std::vector<std::string> tokens = sim_pool_tokens(land.pool_size);
    std::vector<std::string> seq;
    std::vector<std::string> best_seq;
    double best = 0.0;
    bool have_best = false;

    // Depth-first enumeration of every sequence up to max_len; each prefix
    // is itself a candidate.
    std::vector<std::size_t> stack;
    stack.push_back(0);
    while (!stack.empty()) {
        if (stack.back() == tokens.size()) {
            stack.pop_back();
            if (!seq.empty()) seq.pop_back();
            if (!stack.empty()) ++stack.back();
            continue;
        }
        seq.push_back(tokens[stack.back()]);
        const double mean = deterministic_mean(seq, land);
        if (!have_best || mean < best) {
            best = mean;
            best_seq = seq;
            have_best = true;
        }
        if (seq.size() < max_len) {
            stack.push_back(0);
        } else {
            seq.pop_back();
            ++stack.back();
        }
    }
    return {best, best_seq};
}

SimBackend::SimBackend(SimLandscape land) : land_(std::move(land)) {
    validate_landscape(land_);
}

Measurement SimBackend::measure(const std::vector<std::string>& sequence,
                                std::size_t runs) {
    Measurement m;
    m.status = MeasureStatus::Ok;
    m.samples.reserve(runs);

    const double mean = deterministic_mean(sequence, land_);
    if (land_.noise_sigma == 0.0) {
        m.samples.assign(runs, mean);
        return m;
    }

    const std::uint64_t seq_hash = fnv1a(join_tokens(sequence));
    for (std::size_t i = 0; i < runs; ++i) {
        RandomSource rs(seq_hash ^ (land_.noise_seed +
                                    0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1)));
        // Sampled runtimes stay positive; the floor is far below any valid
        // landscape's noise-free fitness.
        m.samples.push_back(std::max(rs.gaussian(mean, land_.noise_sigma), 1e-9));
    }
    return m;
}

} // namespace passevo
