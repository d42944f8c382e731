// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "passevo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

using passevo::RandomSource;

TEST_CASE("next_u64 matches the splitmix64 reference stream") {
    // Frozen from an independent splitmix64 implementation.
    RandomSource a(0);
    CHECK(a.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(a.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(a.next_u64() == 0x06c45d188009454fULL);
    CHECK(a.next_u64() == 0xf88bb8a8724c81ecULL);

    RandomSource b(42);
    CHECK(b.next_u64() == 0xbdd732262feb6e95ULL);
    CHECK(b.next_u64() == 0x28efe333b266f103ULL);

    RandomSource c(0xDEADBEEFULL);
    CHECK(c.next_u64() == 0x4adfb90f68c9eb9bULL);
    CHECK(c.next_u64() == 0xde586a3141a10922ULL);
}

TEST_CASE("identical seeds give identical streams") {
    RandomSource a(77), b(77);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("next_unit stays in [0, 1)") {
    RandomSource rng(1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("index covers [0, n) and hits every value") {
    RandomSource rng(2);
    SUBCASE("n = 1 is always 0") {
        for (int i = 0; i < 100; ++i)
            REQUIRE(rng.index(1) == 0);
    }
    SUBCASE("n = 7 stays in range and is roughly uniform") {
        std::vector<int> counts(7, 0);
        const int draws = 70000;
        for (int i = 0; i < draws; ++i) {
            const std::size_t v = rng.index(7);
            REQUIRE(v < 7);
            ++counts[v];
        }
        for (int c : counts) {
            CHECK(c > draws / 7 - 1000);
            CHECK(c < draws / 7 + 1000);
        }
    }
}

TEST_CASE("range is inclusive on both ends") {
    RandomSource rng(3);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::int64_t v = rng.range(-2, 3);
        REQUIRE(v >= -2);
        REQUIRE(v <= 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
    for (int i = 0; i < 100; ++i)
        REQUIRE(rng.range(5, 5) == 5);
}

TEST_CASE("chance_pct honors the endpoints and the rate") {
    RandomSource rng(4);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE_FALSE(rng.chance_pct(0));
        REQUIRE(rng.chance_pct(100));
    }
    int hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i)
        hits += rng.chance_pct(30) ? 1 : 0;
    CHECK(hits > draws * 0.28);
    CHECK(hits < draws * 0.32);
}

TEST_CASE("gaussian moments and the sigma=0 shortcut") {
    RandomSource rng(5);
    for (int i = 0; i < 100; ++i)
        REQUIRE(rng.gaussian(3.25, 0.0) == 3.25);

    const int draws = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = rng.gaussian(2.0, 0.5);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / draws;
    const double var = sum_sq / draws - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::sqrt(var) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("draw_distinct yields k distinct in-range indices") {
    RandomSource rng(6);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 1 + rng.index(20);
        const std::size_t k = 1 + rng.index(n);
        const auto draws = rng.draw_distinct(n, k);
        REQUIRE(draws.size() == k);
        std::set<std::size_t> uniq(draws.begin(), draws.end());
        REQUIRE(uniq.size() == k);
        for (std::size_t v : draws)
            REQUIRE(v < n);
    }
}

TEST_CASE("draw_distinct with k = n is a permutation") {
    RandomSource rng(7);
    const auto draws = rng.draw_distinct(10, 10);
    std::set<std::size_t> uniq(draws.begin(), draws.end());
    CHECK(uniq.size() == 10);
}

TEST_CASE("draw_distinct first element is uniform") {
    RandomSource rng(8);
    std::vector<int> counts(5, 0);
    const int draws = 50000;
    for (int i = 0; i < draws; ++i)
        ++counts[rng.draw_distinct(5, 2)[0]];
    for (int c : counts) {
        CHECK(c > draws / 5 - 800);
        CHECK(c < draws / 5 + 800);
    }
}

TEST_CASE("split depends on seed and split count only") {
    RandomSource a(99), b(99);
    // Perturb a's draw state; the split streams must still agree.
    for (int i = 0; i < 17; ++i)
        a.next_u64();
    RandomSource a1 = a.split();
    RandomSource b1 = b.split();
    for (int i = 0; i < 100; ++i)
        REQUIRE(a1.next_u64() == b1.next_u64());

    // Successive splits differ from each other and from the parent.
    RandomSource a2 = a.split();
    CHECK(a1.next_u64() != a2.next_u64());
    RandomSource parent(99);
    RandomSource child = parent.split();
    CHECK(parent.next_u64() != child.next_u64());
}

TEST_CASE("split streams from different seeds differ") {
    RandomSource a(1), b(2);
    RandomSource sa = a.split(), sb = b.split();
    int same = 0;
    for (int i = 0; i < 64; ++i)
        same += sa.next_u64() == sb.next_u64() ? 1 : 0;
    CHECK(same == 0);
}
