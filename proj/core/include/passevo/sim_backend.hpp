// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/fitness.hpp"
#include "passevo/pass_pool.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace passevo {

// Synthetic fitness landscape over an abstract pass pool. A sequence scores
// base_runtime plus a per-gene penalty minus the reward of every motif it
// contains as a contiguous subsequence (each motif counted once).
struct SimLandscape {
    std::size_t pool_size = 3;
    std::vector<std::pair<std::vector<std::string>, double>> target_motifs;
    double base_runtime = 10.0;
    double length_penalty = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
};

// Throws ConfigError on invalid fields; requires base_runtime to exceed the
// reward total so fitness stays positive.
void validate_landscape(const SimLandscape& land);

// Token "p<i>" per pool slot.
std::vector<std::string> sim_pool_tokens(std::size_t pool_size);
PassPool sim_pool(const SimLandscape& land);

// Noise-free fitness of a sequence under the landscape.
double deterministic_mean(const std::vector<std::string>& seq, const SimLandscape& land);

// n samples of deterministic_mean plus Gaussian noise keyed by (sequence,
// noise_seed, sample index): re-measuring a sequence reproduces the exact
// same samples. Status is always Ok.
FitnessRecord sim_measure(const std::vector<std::string>& seq, const SimLandscape& land,
                          std::size_t n);

// Best noise-free fitness over every sequence of length 1..max_len, by
// exhaustive enumeration. Throws when pool_size^max_len is unreasonably
// large. Returns (fitness, sequence).
std::pair<double, std::vector<std::string>> landscape_optimum(const SimLandscape& land,
                                                              std::size_t max_len);

class SimBackend final : public Backend {
public:
    explicit SimBackend(SimLandscape land);

    std::string name() const override { return "sim"; }
    bool parallel_safe() const override { return true; }
    Measurement measure(const std::vector<std::string>& sequence,
                        std::size_t runs) override;

    const SimLandscape& landscape() const { return land_; }

private:
    SimLandscape land_;
};

} // namespace passevo
