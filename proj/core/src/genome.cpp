// SPDX-License-Identifier: Apache-2.0
#include "passevo/genome.hpp"

#include <stdexcept>

namespace passevo {

std::vector<std::string> Individual::tokens() const {
    std::vector<std::string> out;
    out.reserve(genes.size());
    for (const auto& g : genes) out.push_back(g.id);
    return out;
}

std::string Individual::key() const {
    std::string out;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += genes[i].id;
    }
    return out;
}

Individual random_individual(const PassPool& pool, const GenomeBounds& bounds,
                             std::optional<std::size_t> fixed_len, Origin origin,
                             RandomSource& rng) {
    if (pool.empty()) throw std::invalid_argument("random_individual: empty pass pool");
    std::size_t len;
    if (fixed_len) {
        len = *fixed_len;
    } else {
        if (bounds.min_len == 0 || bounds.min_len > bounds.max_len)
            throw std::invalid_argument("random_individual: invalid genome bounds");
        len = static_cast<std::size_t>(
            rng.range(static_cast<std::int64_t>(bounds.min_len),
                      static_cast<std::int64_t>(bounds.max_len)));
    }
    if (len == 0) throw std::invalid_argument("random_individual: zero length");

    Individual ind;
    ind.origin = origin;
    ind.genes.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        std::size_t idx = rng.index(pool.size());
        ind.genes.push_back(PassGene{pool.at(idx), idx});
    }
    return ind;
}

std::pair<Individual, Individual>
one_point_crossover(const Individual& p1, const Individual& p2, RandomSource& rng) {
    if (p1.genes.empty() || p2.genes.empty())
        throw std::invalid_argument("one_point_crossover: empty parent");

    const std::size_t len1 = p1.genes.size();
    const std::size_t len2 = p2.genes.size();

    // Cuts land in [1, len], so both children keep at least one gene from
    // their prefix parent; the re-roll loop guards the invariant anyway.
    std::size_t i = 0;
    std::size_t j = 0;
    do {
        i = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(len1)));
        j = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(len2)));
    } while (i + (len2 - j) == 0 || j + (len1 - i) == 0);

    Individual c1;
    Individual c2;
    c1.genes.reserve(i + (len2 - j));
    c2.genes.reserve(j + (len1 - i));

    c1.genes.assign(p1.genes.begin(), p1.genes.begin() + static_cast<std::ptrdiff_t>(i));
    c1.genes.insert(c1.genes.end(), p2.genes.begin() + static_cast<std::ptrdiff_t>(j),
                    p2.genes.end());

    c2.genes.assign(p2.genes.begin(), p2.genes.begin() + static_cast<std::ptrdiff_t>(j));
    c2.genes.insert(c2.genes.end(), p1.genes.begin() + static_cast<std::ptrdiff_t>(i),
                    p1.genes.end());

    return {std::move(c1), std::move(c2)};
}

Individual point_mutation(const Individual& ind, const PassPool& pool,
                          RandomSource& rng) {
    if (ind.genes.empty()) throw std::invalid_argument("point_mutation: empty individual");
    if (pool.empty()) throw std::invalid_argument("point_mutation: empty pass pool");

    Individual out;
    out.genes = ind.genes;
    out.birth_generation = ind.birth_generation;
    out.origin = ind.origin;

    const std::size_t pos = rng.index(out.genes.size());
    const std::size_t idx = rng.index(pool.size());
    out.genes[pos] = PassGene{pool.at(idx), idx};
    return out;
}

} // namespace passevo
