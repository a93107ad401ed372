#ifndef FASTBALL_FBRAND_H
#define FASTBALL_FBRAND_H

#include <stdint.h>
#include "numpy/random/bitgen.h"

/* Uniform integer in [0, n), n >= 1. Must stay in step with rng.bounded(). */
static inline uint64_t fb_bounded(bitgen_t *rng, uint64_t n)
{
    unsigned __int128 prod = (unsigned __int128)rng->next_uint64(rng->state) * n;
    uint64_t low = (uint64_t)prod;
    if (low < n) {
        uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            prod = (unsigned __int128)rng->next_uint64(rng->state) * n;
            low = (uint64_t)prod;
        }
    }
    return (uint64_t)(prod >> 64);
}

#endif
