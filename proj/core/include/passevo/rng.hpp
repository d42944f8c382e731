// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace passevo {

// Seedable, splittable random source (splitmix64 core).
//
// split() derives an independent child stream from (construction seed,
// split counter) only, never from draw state. Callers that hand one child
// stream to each operator invocation, in a fixed order, get identical
// results no matter how the invocations themselves are scheduled.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) noexcept
        : state_(seed), seed_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n); n >= 1. Unbiased (Lemire rejection).
    std::size_t index(std::size_t n) noexcept {
        using u128 = unsigned __int128;
        std::uint64_t range = static_cast<std::uint64_t>(n);
        u128 m = static_cast<u128>(next_u64()) * range;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < range) {
            std::uint64_t t = (0 - range) % range;
            while (lo < t) {
                m = static_cast<u128>(next_u64()) * range;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) noexcept {
        return lo + static_cast<std::int64_t>(
                        index(static_cast<std::size_t>(hi - lo + 1)));
    }

    // True with probability percent/100; percent in [0, 100]. Exact.
    bool chance_pct(int percent) noexcept {
        return index(100) < static_cast<std::size_t>(percent);
    }

    double gaussian(double mean, double sigma) noexcept {
        if (sigma == 0.0)
            return mean;
        double u1 = next_unit();
        double u2 = next_unit();
        while (u1 <= 0.0)
            u1 = next_unit();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(two_pi * u2);
    }

    // k distinct indices from [0, n), in draw order; k <= n.
    std::vector<std::size_t> draw_distinct(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i)
            pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + index(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

    // Independent child stream. Deterministic in (seed, number of prior
    // splits); unaffected by next_* draws on this source.
    RandomSource split() noexcept {
        return RandomSource(mix(seed_ ^ mix(++split_count_)));
    }

private:
    static std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t split_count_ = 0;
};

} // namespace passevo
