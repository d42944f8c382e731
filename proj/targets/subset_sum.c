/* SPDX-License-Identifier: Apache-2.0 */
/* Counts subsets of a fixed pseudo-random array that sum to a target.
 * Deterministic: same output on every run, no arguments, no I/O besides
 * the final count. Runtime is dominated by the recursive search. */
#include <stdio.h>

#define N 26

static unsigned long long splitmix(unsigned long long *s) {
    unsigned long long z = (*s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

static long values[N];

static long count_subsets(int idx, long remaining) {
    if (remaining == 0) return 1;
    if (idx == N || remaining < 0) return 0;
    return count_subsets(idx + 1, remaining - values[idx]) +
           count_subsets(idx + 1, remaining);
}

int main(void) {
    unsigned long long state = 42;
    long total = 0;
    for (int i = 0; i < N; i++) {
        values[i] = (long)(splitmix(&state) % 1000) + 1;
        total += values[i];
    }
    long hits = count_subsets(0, total / 2);
    printf("%ld\n", hits);
    return 0;
}
