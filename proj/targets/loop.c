/* SPDX-License-Identifier: Apache-2.0 */
/* Arithmetic-heavy nested loop with a data-dependent accumulator.
 * Deterministic output; sensitive to vectorization and unrolling. */
#include <stdio.h>

#define OUTER 2000
#define INNER 4000

int main(void) {
    unsigned long long acc = 1;
    for (int i = 0; i < OUTER; i++) {
        for (int j = 0; j < INNER; j++) {
            acc = acc * 6364136223846793005ULL + 1442695040888963407ULL;
            acc ^= acc >> (1 + (j & 31));
        }
    }
    printf("%llu\n", acc);
    return 0;
}
