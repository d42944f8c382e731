// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "passevo/pass_pool.hpp"
#include "passevo/rng.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace passevo {

struct FitnessRecord;

// One pass drawn from the active pool. `pool_index` points at the pool
// entry whose token equals `id`.
struct PassGene {
    std::string id;
    std::size_t pool_index = 0;

    bool operator==(const PassGene& other) const { return id == other.id; }
};

enum class Origin : std::uint8_t { RandomInit, Elite, NestSurvivor, Immigrant };

struct GenomeBounds {
    std::size_t min_len = 10;
    std::size_t max_len = 90;
};

// A candidate pass sequence. `fitness` is the scalar used for selection and
// `record` the backing measurement; both are cleared by any gene change.
struct Individual {
    std::vector<PassGene> genes;
    std::optional<double> fitness;
    std::shared_ptr<const FitnessRecord> record;
    std::uint32_t birth_generation = 0;
    Origin origin = Origin::RandomInit;

    bool evaluated() const { return fitness.has_value(); }

    void clear_fitness() {
        fitness.reset();
        record.reset();
    }

    std::size_t length() const { return genes.size(); }

    std::vector<std::string> tokens() const;

    // Canonical cache key: tokens joined by a single space. Order-sensitive.
    std::string key() const;
};

// Fresh individual with genes drawn uniformly (with replacement) from the
// pool. Length is `fixed_len` when given, otherwise uniform in
// [bounds.min_len, bounds.max_len].
Individual random_individual(const PassPool& pool, const GenomeBounds& bounds,
                             std::optional<std::size_t> fixed_len, Origin origin,
                             RandomSource& rng);

// One-point crossover with independent cut points i in [1, len(p1)] and
// j in [1, len(p2)]; children are prefix(p1,i)+suffix(p2,j) and
// prefix(p2,j)+suffix(p1,i). Zero-length children are re-rolled. The gene
// multiset of the children equals that of the parents.
std::pair<Individual, Individual>
one_point_crossover(const Individual& p1, const Individual& p2, RandomSource& rng);

// Replaces one uniformly chosen position with a uniformly drawn pool gene
// (which may equal the original). Length is preserved.
Individual point_mutation(const Individual& ind, const PassPool& pool,
                          RandomSource& rng);

} // namespace passevo
