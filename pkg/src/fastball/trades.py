"""Curveball and fastball trades between two top nodes.

Each trade comes in two forms. The ``*_core`` functions are deterministic and
take the shuffled object explicitly (the victory vector for fastball, the
shuffled symmetric difference for curveball). The RNG-driven forms build and
shuffle that object themselves. Heavy lifting is delegated to the active
kernel backend (see :mod:`fastball.kernels`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from ._pykernels import _fastball_merge
from .errors import UnsortedInput, VictoryVectorMismatch
from .rng import as_bitgen, shuffle

I_SIDE = 0
J_SIDE = 1


def _sorted_array(x, name):
    a = np.ascontiguousarray(x, dtype=np.int64)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if __debug__ and a.size > 1 and np.any(a[1:] <= a[:-1]):
        raise UnsortedInput(f"{name} is not strictly increasing")
    return a


class VictoryVector:
    """Sequence of I_SIDE / J_SIDE markers, one per contested element."""

    __slots__ = ("sides",)

    def __init__(self, sides: Sequence[int]):
        arr = np.ascontiguousarray(sides, dtype=np.uint8)
        if arr.ndim != 1 or np.any(arr > 1):
            raise VictoryVectorMismatch("victory vector entries must be I_SIDE (0) or J_SIDE (1)")
        self.sides = arr

    @classmethod
    def parse(cls, text: str) -> "VictoryVector":
        """``"IJJII"`` -> victory vector."""
        lookup = {"I": I_SIDE, "J": J_SIDE}
        try:
            return cls([lookup[ch] for ch in text.upper() if not ch.isspace()])
        except KeyError as exc:
            raise VictoryVectorMismatch(f"unknown side marker {exc.args[0]!r}") from None

    @classmethod
    def for_pair(cls, Ni, Nj) -> "VictoryVector":
        """Unshuffled vector for a pair: all I_SIDE markers, then all J_SIDE."""
        k = intersection_size(Ni, Nj)
        return cls([I_SIDE] * (len(Ni) - k) + [J_SIDE] * (len(Nj) - k))

    def shuffled(self, rng=None) -> "VictoryVector":
        order = self.sides.tolist()
        shuffle(as_bitgen(rng), order)
        return VictoryVector(order)

    @property
    def i_count(self) -> int:
        return int(np.count_nonzero(self.sides == I_SIDE))

    @property
    def j_count(self) -> int:
        return int(np.count_nonzero(self.sides == J_SIDE))

    def __len__(self):
        return int(self.sides.size)

    def __str__(self):
        return "".join("IJ"[s] for s in self.sides.tolist())

    def __repr__(self):
        return f"VictoryVector({str(self)!r})"


@dataclass(frozen=True)
class TradeOutcome:
    new_i: np.ndarray
    new_j: np.ndarray

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(self.new_i.tolist()), tuple(self.new_j.tolist())


def intersection_size(Ni, Nj) -> int:
    """Number of shared neighbours, one merge pass."""
    return int(kernels.active.intersection_size(_sorted_array(Ni, "Ni"), _sorted_array(Nj, "Nj")))


def fastball_trade_core(Ni, Nj, V: VictoryVector | Sequence[int]) -> TradeOutcome:
    """Merge ``Ni`` and ``Nj`` in one pass, awarding contested elements per ``V``.

    The k-th smallest element of the symmetric difference goes to the side
    named by ``V[k]``; shared elements stay with both. Outputs come out
    sorted without any sort call.
    """
    a = _sorted_array(Ni, "Ni")
    b = _sorted_array(Nj, "Nj")
    v = V if isinstance(V, VictoryVector) else VictoryVector(V)
    k = int(kernels.active.intersection_size(a, b))
    si, sj = a.size - k, b.size - k
    if len(v) != si + sj:
        raise VictoryVectorMismatch(
            f"victory vector has length {len(v)}, the pair has {si + sj} contested elements"
        )
    if v.i_count != si:
        raise VictoryVectorMismatch(
            f"victory vector awards {v.i_count} elements to i, expected {si}"
        )
    new_i, new_j = kernels.active.fastball_core(a, b, v.sides)
    return TradeOutcome(new_i, new_j)


def fastball_trade(Ni, Nj, rng=None) -> TradeOutcome:
    """Fastball trade with a freshly shuffled victory vector."""
    a = _sorted_array(Ni, "Ni")
    b = _sorted_array(Nj, "Nj")
    new_i, new_j = kernels.active.fastball_trade(a, b, as_bitgen(rng))
    return TradeOutcome(new_i, new_j)


def symmetric_difference(Ni, Nj) -> np.ndarray:
    """Elements in exactly one of the two lists, ascending."""
    return np.setxor1d(_sorted_array(Ni, "Ni"), _sorted_array(Nj, "Nj"), assume_unique=True)


def curveball_trade_core(Ni, Nj, S_order) -> TradeOutcome:
    """Give the first ``|Ni| - |I|`` entries of ``S_order`` (plus ``I``) to i,
    the rest (plus ``I``) to j, then sort both lists.

    ``S_order`` must be an ordering of the symmetric difference.
    """
    a = _sorted_array(Ni, "Ni")
    b = _sorted_array(Nj, "Nj")
    s = np.ascontiguousarray(S_order, dtype=np.int64)
    if not np.array_equal(np.sort(s), symmetric_difference(a, b)):
        raise ValueError("S_order is not an ordering of the symmetric difference")
    new_i, new_j = kernels.active.curveball_core(a, b, s)
    return TradeOutcome(new_i, new_j)


def curveball_trade(Ni, Nj, rng=None) -> TradeOutcome:
    """Curveball trade: shuffle the symmetric difference, split it, sort."""
    a = _sorted_array(Ni, "Ni")
    b = _sorted_array(Nj, "Nj")
    new_i, new_j = kernels.active.curveball_trade(a, b, as_bitgen(rng))
    return TradeOutcome(new_i, new_j)


def fastball_merge_steps(Ni, Nj, V) -> int:
    """Loop iterations taken by the fastball merge pass (for cost checks)."""
    stats: dict[str, int] = {}
    v = V if isinstance(V, VictoryVector) else VictoryVector(V)
    _fastball_merge(list(Ni), list(Nj), v.sides.tolist(), stats)
    return stats["steps"]
