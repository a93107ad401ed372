"""Seeding and bounded integer draws shared by both kernel backends.

Every random decision in the package is taken from the raw 64-bit output of a
numpy ``PCG64`` bit generator, reduced to a range with Lemire's
multiply-shift method. The compiled kernels read the same generator through
its C capsule and apply the identical reduction, so a given seed produces the
same trades on either backend.
"""

from __future__ import annotations

import secrets

import numpy as np

_MASK64 = (1 << 64) - 1


def new_seed() -> int:
    """Fresh 64-bit seed from the OS entropy pool."""
    return secrets.randbits(64)


def stream(seed: int, index: int | None = None) -> np.random.PCG64:
    """Bit generator for ``seed``, or for sub-stream ``index`` of it.

    Sub-streams come from ``SeedSequence`` spawn keys, so sample ``k`` of a
    run gets the same stream no matter which worker draws it.
    """
    if index is None:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.PCG64(ss)


def as_bitgen(rng) -> np.random.BitGenerator:
    """Coerce a seed, ``Generator`` or ``BitGenerator`` to a bit generator."""
    if isinstance(rng, np.random.BitGenerator):
        return rng
    if isinstance(rng, np.random.Generator):
        return rng.bit_generator
    if rng is None or isinstance(rng, (int, np.integer)):
        return stream(new_seed() if rng is None else int(rng))
    raise TypeError(f"cannot build a bit generator from {type(rng).__name__}")


def bounded(bitgen: np.random.BitGenerator, n: int) -> int:
    """Uniform integer in ``[0, n)`` (Lemire's nearly divisionless method)."""
    prod = int(bitgen.random_raw()) * n
    low = prod & _MASK64
    if low < n:
        threshold = ((1 << 64) - n) % n
        while low < threshold:
            prod = int(bitgen.random_raw()) * n
            low = prod & _MASK64
    return prod >> 64


def shuffle(bitgen: np.random.BitGenerator, seq: list) -> None:
    """In-place Fisher-Yates shuffle, last position first."""
    for k in range(len(seq) - 1, 0, -1):
        r = bounded(bitgen, k + 1)
        seq[k], seq[r] = seq[r], seq[k]


def pick_pair(bitgen: np.random.BitGenerator, n: int) -> tuple[int, int]:
    """Uniform ordered draw of two distinct indices below ``n``."""
    i = bounded(bitgen, n)
    j = bounded(bitgen, n - 1)
    if j >= i:
        j += 1
    return i, j
