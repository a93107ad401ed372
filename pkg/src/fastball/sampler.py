"""Markov chain over graphs with fixed degrees, driven by random-pair trades."""

from __future__ import annotations

import enum
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import kernels
from .errors import InvalidParameter, TooFewTopNodes
from .graph import BipartiteGraph
from .rng import as_bitgen, new_seed, stream


class Algorithm(str, enum.Enum):
    FASTBALL = "fastball"
    CURVEBALL = "curveball"

    @property
    def code(self) -> int:
        return kernels.FASTBALL if self is Algorithm.FASTBALL else kernels.CURVEBALL


def default_trades(n: int) -> int:
    """Trades per sample: five per top node."""
    if n < 1:
        raise InvalidParameter("need at least one top node")
    return 5 * n


@dataclass
class SamplerConfig:
    """How samples are drawn.

    ``trades_per_sample=None`` means :func:`default_trades` of the graph.
    ``seed=None`` draws a fresh seed at construction; read it back from
    ``config.seed`` to reproduce the run. ``chain=True`` thins one long chain
    instead of restarting from the observed graph for every sample.
    """

    trades_per_sample: int | None = None
    algorithm: Algorithm | str = Algorithm.FASTBALL
    seed: int | None = None
    chain: bool = False
    threads: int = 1
    backend: str | None = None

    def __post_init__(self):
        self.algorithm = Algorithm(self.algorithm)
        if self.seed is None:
            self.seed = new_seed()
        if self.trades_per_sample is not None and self.trades_per_sample < 0:
            raise InvalidParameter("trades_per_sample must be nonnegative")
        if self.threads < 1:
            raise InvalidParameter("threads must be at least 1")

    def trades_for(self, g: BipartiteGraph) -> int:
        if self.trades_per_sample is None:
            return default_trades(g.n)
        return self.trades_per_sample


@dataclass
class SampleSummary:
    samples: int
    trades_per_sample: int
    algorithm: Algorithm
    seed: int
    chain: bool


def _check_pair_available(g: BipartiteGraph):
    if g.n < 2:
        raise TooFewTopNodes(f"a trade needs two top nodes, graph has {g.n}")


def randomize_inplace(g: BipartiteGraph, trades: int, algorithm, bitgen, backend=None) -> None:
    _check_pair_available(g)
    kernels.get(backend).randomize(g.indptr, g.indices, int(trades), Algorithm(algorithm).code, bitgen)


def randomize(
    g: BipartiteGraph,
    trades: int,
    config: SamplerConfig | None = None,
    rng=None,
) -> BipartiteGraph:
    """Copy of ``g`` after ``trades`` trades between uniformly chosen pairs.

    Randomness comes from ``rng`` when given, else from ``config.seed``.
    """
    config = config or SamplerConfig()
    _check_pair_available(g)
    if trades < 0:
        raise InvalidParameter("trades must be nonnegative")
    bitgen = as_bitgen(rng) if rng is not None else stream(config.seed)
    out = g.copy()
    randomize_inplace(out, trades, config.algorithm, bitgen, config.backend)
    return out


def sample_at(g: BipartiteGraph, index: int, config: SamplerConfig, trades: int | None = None) -> BipartiteGraph:
    """Sample ``index`` of a restart-mode run; independent of every other index."""
    out = g.copy()
    if trades is None:
        trades = config.trades_for(g)
    randomize_inplace(out, trades, config.algorithm, stream(config.seed, index), config.backend)
    return out


def sample_stream(
    g: BipartiteGraph,
    count: int,
    config: SamplerConfig,
    consumer: Callable[[BipartiteGraph], object],
    start: int = 0,
) -> SampleSummary:
    """Draw ``count`` samples and hand each to ``consumer`` in index order.

    With ``config.threads > 1`` samples are generated on a thread pool but
    delivered serially from the calling thread, at most a few per worker in
    flight. Output is identical for any thread count. An exception raised by
    ``consumer`` stops the run.
    """
    if count < 1:
        raise InvalidParameter("count must be at least 1")
    _check_pair_available(g)
    trades = config.trades_for(g)
    summary = SampleSummary(count, trades, config.algorithm, config.seed, config.chain)

    if config.chain:
        current = g.copy()
        bitgen = stream(config.seed)
        for _ in range(count):
            randomize_inplace(current, trades, config.algorithm, bitgen, config.backend)
            consumer(current.copy())
        return summary

    indices = range(start, start + count)
    if config.threads == 1:
        for k in indices:
            consumer(sample_at(g, k, config, trades))
        return summary

    window = 4 * config.threads
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        pending: deque = deque()
        it = iter(indices)
        try:
            for k in it:
                pending.append(pool.submit(sample_at, g, k, config, trades))
                if len(pending) >= window:
                    consumer(pending.popleft().result())
            while pending:
                consumer(pending.popleft().result())
        finally:
            for fut in pending:
                fut.cancel()
    return summary
