"""Fixed degree sequence model (FDSM) backbones of bipartite projections.

The observed projection is compared, pair by pair, against projections of
degree-matched random graphs. Tallies of null weights at or above (and at or
below) each observed weight give one-sided Monte Carlo p-values; a pair is
kept as +1 or -1 when either tail falls under ``alpha / 2``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from . import kernels
from .errors import DegreeMismatch, InvalidParameter, ParseError, TooFewTopNodes
from .graph import BipartiteGraph, DegreeSequences, degrees
from .sampler import SamplerConfig, sample_stream

CHECKPOINT_MAGIC = "FASTBALL-NULLCOUNTS"
CHECKPOINT_VERSION = 1

# The p-value under test is compared with alpha/2; the sample size is the one
# that detects a true p-value of alpha/2 + EFFECT_SHIFT * alpha with the
# requested power (pooled two-proportion test, two-sided z at alpha).
EFFECT_SHIFT = 0.04


@dataclass
class Projection:
    weights: np.ndarray
    degrees: DegreeSequences | None = None

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass
class NullCounts:
    n: int
    samples_seen: int = 0
    ge: np.ndarray = field(default=None)
    le: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.ge is None:
            self.ge = np.zeros((self.n, self.n), dtype=np.int64)
        if self.le is None:
            self.le = np.zeros((self.n, self.n), dtype=np.int64)

    def merge(self, other: "NullCounts") -> "NullCounts":
        if other.n != self.n:
            raise InvalidParameter("cannot merge counts of different sizes")
        self.samples_seen += other.samples_seen
        self.ge += other.ge
        self.le += other.le
        return self

    def p_values(self, smooth: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Upper- and lower-tail proportions (ties count in both tails)."""
        if self.samples_seen == 0:
            raise InvalidParameter("no samples accumulated")
        if smooth:
            denom = self.samples_seen + 1
            return (self.ge + 1) / denom, (self.le + 1) / denom
        return self.ge / self.samples_seen, self.le / self.samples_seen


@dataclass
class Backbone:
    signs: np.ndarray
    alpha: float
    samples: int
    p_upper: np.ndarray
    p_lower: np.ndarray
    counts: NullCounts
    seed: int | None = None
    trades: int | None = None
    algorithm: str | None = None

    def edges(self) -> list[tuple[int, int, int]]:
        """Significant pairs ``(i, j, sign)`` with ``i < j``."""
        ii, jj = np.nonzero(np.triu(self.signs, k=1))
        return [(int(i), int(j), int(self.signs[i, j])) for i, j in zip(ii, jj)]


def project(g: BipartiteGraph, backend: str | None = None) -> Projection:
    """Shared-neighbour counts for every pair of top nodes."""
    w = kernels.get(backend).project(g.indptr, g.indices)
    return Projection(w, degrees(g))


def required_samples(alpha: float, power: float = 0.95) -> int:
    """Monte Carlo samples needed to test an edge p-value against ``alpha``.

    Sample size of a pooled two-proportion comparison between the decision
    threshold ``p0 = alpha / 2`` and ``p1 = p0 + 0.04 * alpha``, two-sided at
    level ``alpha`` with the given power. Gives 164,536 at the usual
    ``alpha=0.05, power=0.95``.
    """
    if not (0 < alpha < 1):
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha}")
    if not (0 < power < 1):
        raise InvalidParameter(f"power must lie in (0, 1), got {power}")
    p0 = alpha / 2
    p1 = p0 + EFFECT_SHIFT * alpha
    pbar = (p0 + p1) / 2
    z = NormalDist()
    za = z.inv_cdf(1 - alpha / 2)
    zb = z.inv_cdf(power)
    root = za * math.sqrt(2 * pbar * (1 - pbar)) + zb * math.sqrt(p0 * (1 - p0) + p1 * (1 - p1))
    return math.ceil((root / (p1 - p0)) ** 2)


def accumulate_null(
    obs: Projection,
    sample: BipartiteGraph,
    counts: NullCounts,
    backend: str | None = None,
) -> NullCounts:
    """Tally one null sample into ``counts`` (in place) and return it."""
    if sample.n != obs.n:
        raise DegreeMismatch(f"sample has {sample.n} top nodes, observed graph has {obs.n}")
    if obs.degrees is not None and degrees(sample) != obs.degrees:
        raise DegreeMismatch("sample degree sequences differ from the observed graph")
    w = kernels.get(backend).project(sample.indptr, sample.indices)
    counts.ge += w >= obs.weights
    counts.le += w <= obs.weights
    counts.samples_seen += 1
    return counts


def classify(counts: NullCounts, alpha: float, smooth: bool = False):
    """Signs from tail proportions: +1 if upper < alpha/2, -1 if lower < alpha/2."""
    p_upper, p_lower = counts.p_values(smooth)
    signs = np.zeros((counts.n, counts.n), dtype=np.int8)
    signs[p_upper < alpha / 2] = 1
    signs[p_lower < alpha / 2] = -1
    np.fill_diagonal(signs, 0)
    return signs, p_upper, p_lower


def _accumulate_range(g, obs, config, start, stop):
    counts = NullCounts(obs.n)
    if stop <= start:
        return counts
    worker_cfg = SamplerConfig(
        trades_per_sample=config.trades_for(g),
        algorithm=config.algorithm,
        seed=config.seed,
        threads=1,
        backend=config.backend,
    )
    sample_stream(
        g,
        stop - start,
        worker_cfg,
        lambda s: accumulate_null(obs, s, counts, config.backend),
        start=start,
    )
    return counts


def accumulate_block(g, obs, config: SamplerConfig, start: int, stop: int) -> NullCounts:
    """Null counts for restart-mode samples ``start..stop-1``.

    The range is split across ``config.threads`` workers, each with private
    counts; the sum does not depend on the split.
    """
    k = config.threads
    if k == 1 or stop - start < 2:
        return _accumulate_range(g, obs, config, start, stop)
    bounds = np.linspace(start, stop, k + 1).astype(int).tolist()
    total = NullCounts(obs.n)
    with ThreadPoolExecutor(max_workers=k) as pool:
        parts = pool.map(
            lambda ab: _accumulate_range(g, obs, config, ab[0], ab[1]),
            zip(bounds[:-1], bounds[1:]),
        )
        for part in parts:
            total.merge(part)
    return total


def extract_backbone(
    g: BipartiteGraph,
    alpha: float = 0.05,
    samples: int | None = None,
    config: SamplerConfig | None = None,
    *,
    smooth: bool = False,
    checkpoint: str | os.PathLike | None = None,
    checkpoint_every: int = 10_000,
    progress=None,
) -> Backbone:
    """Signed FDSM backbone of ``g``'s projection.

    ``samples=None`` uses :func:`required_samples` at power 0.95. When
    ``checkpoint`` names a file, counts are written there every
    ``checkpoint_every`` samples and an existing compatible file is resumed
    from; the result is the same as an uninterrupted run.
    """
    if not (0 < alpha < 1):
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha}")
    if samples is None:
        samples = required_samples(alpha)
    if samples < 1:
        raise InvalidParameter("samples must be at least 1")
    config = config or SamplerConfig()
    if g.n < 2:
        raise TooFewTopNodes(f"a trade needs two top nodes, graph has {g.n}")
    obs = project(g, config.backend)
    trades = config.trades_for(g)

    if config.chain:
        if checkpoint is not None:
            raise InvalidParameter("checkpointing is only supported for restart-mode sampling")
        counts = NullCounts(obs.n)
        sample_stream(g, samples, config, lambda s: accumulate_null(obs, s, counts, config.backend))
    else:
        counts = NullCounts(obs.n)
        if checkpoint is not None and os.path.exists(checkpoint):
            counts = _resume(checkpoint, obs.n, config, trades, samples)
        step = checkpoint_every if checkpoint is not None else samples
        if step < 1:
            raise InvalidParameter("checkpoint_every must be at least 1")
        done = counts.samples_seen
        while done < samples:
            stop = min(samples, done + step)
            counts.merge(accumulate_block(g, obs, config, done, stop))
            done = stop
            if checkpoint is not None:
                save_checkpoint(checkpoint, counts, config.seed, trades, config.algorithm.value)
            if progress is not None:
                progress(done, samples)

    signs, p_upper, p_lower = classify(counts, alpha, smooth)
    return Backbone(
        signs, alpha, samples, p_upper, p_lower, counts,
        seed=config.seed, trades=trades, algorithm=config.algorithm.value,
    )


# --- checkpoint files ---------------------------------------------------------
#
#   FASTBALL-NULLCOUNTS 1
#   n <top nodes>
#   samples_seen <k>
#   seed <seed>
#   trades <trades per sample>
#   algorithm <fastball|curveball>
#   ge
#   <n rows of n integers>
#   le
#   <n rows of n integers>


def save_checkpoint(path, counts: NullCounts, seed: int, trades: int, algorithm: str) -> None:
    lines = [
        f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}",
        f"n {counts.n}",
        f"samples_seen {counts.samples_seen}",
        f"seed {seed}",
        f"trades {trades}",
        f"algorithm {algorithm}",
        "ge",
        *(" ".join(map(str, row)) for row in counts.ge.tolist()),
        "le",
        *(" ".join(map(str, row)) for row in counts.le.tolist()),
    ]
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_checkpoint(path) -> tuple[NullCounts, dict]:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split()[0] != CHECKPOINT_MAGIC:
        raise ParseError("not a null-count checkpoint", line=1, path=os.fspath(path))
    version = int(lines[0].split()[1])
    if version != CHECKPOINT_VERSION:
        raise ParseError(f"unsupported checkpoint version {version}", line=1, path=os.fspath(path))
    meta = {}
    for line in lines[1:6]:
        key, _, value = line.partition(" ")
        meta[key] = value
    try:
        n = int(meta["n"])
        ge = np.array([[int(x) for x in ln.split()] for ln in lines[7:7 + n]], dtype=np.int64)
        le = np.array([[int(x) for x in ln.split()] for ln in lines[8 + n:8 + 2 * n]], dtype=np.int64)
        counts = NullCounts(n, int(meta["samples_seen"]), ge.reshape(n, n), le.reshape(n, n))
        meta = {
            "seed": int(meta["seed"]),
            "trades": int(meta["trades"]),
            "algorithm": meta["algorithm"],
        }
    except (KeyError, ValueError) as exc:
        raise ParseError(f"corrupt checkpoint ({exc})", path=os.fspath(path)) from None
    return counts, meta


def _resume(path, n, config, trades, samples) -> NullCounts:
    counts, meta = load_checkpoint(path)
    expected = {"seed": config.seed, "trades": trades, "algorithm": config.algorithm.value}
    if counts.n != n or meta != expected:
        raise InvalidParameter(
            f"checkpoint {os.fspath(path)} was written by a different run ({meta}, n={counts.n})"
        )
    if counts.samples_seen > samples:
        raise InvalidParameter("checkpoint holds more samples than requested")
    return counts


# --- synthetic inputs -----------------------------------------------------------


def polarized_graph(
    blocks: int = 2,
    block_size: int = 10,
    pool: int = 50,
    density: float = 1.0,
    seed: int = 0,
) -> BipartiteGraph:
    """Top nodes in ``blocks`` groups, each group with a private pool of
    bottom nodes.

    With ``density=1`` every group member is adjacent to its whole pool, so
    each bottom node has degree ``block_size``. Lower densities keep each
    top node's neighbours to a random ``round(density * pool)`` subset of its
    pool.
    """
    if not (0 < density <= 1):
        raise InvalidParameter("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    k = max(1, round(density * pool))
    adj = []
    for b in range(blocks):
        base = b * pool
        for _ in range(block_size):
            if k == pool:
                adj.append(list(range(base, base + pool)))
            else:
                adj.append(sorted((base + rng.choice(pool, size=k, replace=False)).tolist()))
    return BipartiteGraph(blocks * block_size, blocks * pool, adj)


def block_membership(blocks: int, block_size: int) -> np.ndarray:
    return np.repeat(np.arange(blocks), block_size)
