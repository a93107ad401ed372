"""Worst-case trade timing: two top nodes, each owning half the bottom nodes."""

from __future__ import annotations

import csv
import os
import statistics
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from . import kernels
from .errors import InvalidParameter
from .graph import BipartiteGraph
from .rng import stream
from .sampler import Algorithm

CSV_HEADER = ("algorithm", "m", "rep", "nanos")


@dataclass
class BenchResult:
    algorithm: Algorithm
    m: int
    trades: int
    replications: int
    times: list[int] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.times) if self.times else 0.0

    @property
    def stddev(self) -> float:
        return statistics.stdev(self.times) if len(self.times) > 1 else 0.0


def make_worst_case_graph(m: int) -> BipartiteGraph:
    """``adj[0] = [0, m/2)``, ``adj[1] = [m/2, m)``: nothing shared, all contested."""
    if m < 2 or m % 2:
        raise InvalidParameter(f"m must be even and at least 2, got {m}")
    half = m // 2
    return BipartiteGraph.from_csr(
        2, m, np.array([0, half, m], dtype=np.int64), np.arange(m, dtype=np.int64)
    )


@contextmanager
def _pinned_to_one_core():
    if not hasattr(os, "sched_getaffinity"):
        yield
        return
    before = os.sched_getaffinity(0)
    try:
        os.sched_setaffinity(0, {min(before)})
    except OSError:
        yield
        return
    try:
        yield
    finally:
        os.sched_setaffinity(0, before)


def run_bench(
    algorithm,
    m: int,
    trades: int = 100,
    replications: int = 10,
    seed: int = 0,
    backend: str | None = None,
    warmup: bool = True,
) -> BenchResult:
    """Time ``trades`` trades on a fresh worst-case graph per replication.

    Only the trade loop is timed. Replication ``r`` uses RNG sub-stream ``r``
    of ``seed`` for both algorithms; one untimed warm-up replication runs
    first.
    """
    algorithm = Algorithm(algorithm)
    kern = kernels.get(backend)
    result = BenchResult(algorithm, m, trades, replications)
    with _pinned_to_one_core():
        for rep in range(-1 if warmup else 0, replications):
            g = make_worst_case_graph(m)
            bitgen = stream(seed, rep if rep >= 0 else replications)
            t0 = time.perf_counter_ns()
            kern.randomize(g.indptr, g.indices, trades, algorithm.code, bitgen)
            elapsed = time.perf_counter_ns() - t0
            _spot_check(g, m)
            if rep >= 0:
                result.times.append(elapsed)
    return result


def _spot_check(g: BipartiteGraph, m: int) -> None:
    half = m // 2
    a, b = g.neighbors(0), g.neighbors(1)
    if a.size != half or b.size != half:
        raise AssertionError("trade changed a top degree")
    if np.any(np.diff(a) <= 0) or np.any(np.diff(b) <= 0):
        raise AssertionError("trade produced an unsorted neighbour list")
    if not np.array_equal(np.sort(np.concatenate([a, b])), np.arange(m)):
        raise AssertionError("trade changed the bottom degrees")


def bench_sweep(
    m_values: Iterable[int],
    out: TextIO,
    trades: int = 100,
    replications: int = 10,
    seed: int = 0,
    backend: str | None = None,
    algorithms=(Algorithm.CURVEBALL, Algorithm.FASTBALL),
) -> list[BenchResult]:
    """Benchmark each algorithm at each ``m``; write ``algorithm,m,rep,nanos`` rows."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    results = []
    for m in m_values:
        for alg in algorithms:
            res = run_bench(alg, m, trades, replications, seed, backend)
            for rep, nanos in enumerate(res.times):
                writer.writerow((res.algorithm.value, m, rep, nanos))
            results.append(res)
    return results


def summary_table(results: list[BenchResult]) -> str:
    """Mean/stddev per (algorithm, m) plus the curveball/fastball ratio."""
    by_m: dict[int, dict[Algorithm, BenchResult]] = {}
    for r in results:
        by_m.setdefault(r.m, {})[r.algorithm] = r
    lines = [f"{'m':>10} {'algorithm':>10} {'mean_ms':>12} {'sd_ms':>10} {'ratio':>7}"]
    for m in sorted(by_m):
        row = by_m[m]
        ratio = ""
        if Algorithm.FASTBALL in row and Algorithm.CURVEBALL in row and row[Algorithm.FASTBALL].mean:
            ratio = f"{row[Algorithm.CURVEBALL].mean / row[Algorithm.FASTBALL].mean:.2f}"
        for alg in (Algorithm.CURVEBALL, Algorithm.FASTBALL):
            if alg in row:
                r = row[alg]
                lines.append(
                    f"{m:>10} {alg.value:>10} {r.mean / 1e6:>12.3f} {r.stddev / 1e6:>10.3f} "
                    f"{ratio if alg is Algorithm.FASTBALL else '':>7}"
                )
    return "\n".join(lines)
