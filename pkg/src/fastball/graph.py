"""Bipartite graphs with fixed degrees: representation, conversion and I/O.

A :class:`BipartiteGraph` stores the neighbour list of every top node as one
slice of a flat sorted ``int64`` array (CSR layout). Trades never change a
degree, so slice boundaries stay fixed for the lifetime of the graph and the
kernels rewrite neighbour lists in place.
"""

from __future__ import annotations

import io
import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    DuplicateEdge,
    InvalidEntry,
    InvalidIndex,
    InvalidParameter,
    ParseError,
    TooLarge,
    UnsortedInput,
)

#: Largest ``n * m`` that :func:`enumerate_space` will attempt.
ENUMERATION_LIMIT = 30


class BipartiteGraph:
    """``n`` top nodes, ``m`` bottom nodes, sorted neighbour list per top node.

    Instances compare and hash by structure. Treat them as values: the only
    sanctioned mutation is a trade applied through :mod:`fastball.sampler`,
    which works on a private copy unless told otherwise.
    """

    __slots__ = ("n", "m", "indptr", "indices")

    def __init__(self, n: int, m: int, adj: Sequence[Iterable[int]]):
        if n < 0 or m < 0:
            raise InvalidParameter("node counts must be nonnegative")
        if len(adj) != n:
            raise InvalidParameter(f"expected {n} neighbour lists, got {len(adj)}")
        lists = [np.asarray(list(a), dtype=np.int64) for a in adj]
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i, a in enumerate(lists):
            if a.size and (a.min() < 0 or a.max() >= m):
                raise InvalidIndex(f"top node {i} has a neighbour outside [0, {m})")
            if a.size > 1 and np.any(np.diff(a) <= 0):
                raise UnsortedInput(f"neighbour list of top node {i} is not strictly increasing")
            indptr[i + 1] = indptr[i] + a.size
        indices = np.concatenate(lists) if lists else np.zeros(0, dtype=np.int64)
        self.n = n
        self.m = m
        self.indptr = indptr
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)

    @classmethod
    def from_csr(cls, n: int, m: int, indptr: np.ndarray, indices: np.ndarray) -> "BipartiteGraph":
        """Wrap CSR arrays without validation (they are copied)."""
        g = cls.__new__(cls)
        g.n = n
        g.m = m
        g.indptr = np.array(indptr, dtype=np.int64)
        g.indices = np.array(indices, dtype=np.int64)
        return g

    def copy(self) -> "BipartiteGraph":
        return BipartiteGraph.from_csr(self.n, self.m, self.indptr, self.indices)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def adj(self) -> list[list[int]]:
        ptr = self.indptr.tolist()
        flat = self.indices.tolist()
        return [flat[ptr[i]:ptr[i + 1]] for i in range(self.n)]

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1])

    def edges(self) -> list[tuple[int, int]]:
        return [(i, v) for i, row in enumerate(self.adj) for v in row]

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash(canonical_key(self))

    def __repr__(self):
        return f"BipartiteGraph(n={self.n}, m={self.m}, adj={self.adj})"


@dataclass(frozen=True)
class DegreeSequences:
    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(int(d) for d in self.top))
        object.__setattr__(self, "bottom", tuple(int(d) for d in self.bottom))
        n, m = len(self.top), len(self.bottom)
        if any(d < 0 for d in self.top + self.bottom):
            raise InvalidParameter("degrees must be nonnegative")
        if any(d > m for d in self.top) or any(d > n for d in self.bottom):
            raise InvalidParameter("a degree exceeds the size of the opposite class")
        if sum(self.top) != sum(self.bottom):
            raise InvalidParameter(
                f"top degrees sum to {sum(self.top)} but bottom degrees sum to {sum(self.bottom)}"
            )

    @classmethod
    def parse(cls, text: str) -> "DegreeSequences":
        """Parse ``"2,2,2/2,2,2"`` (top degrees, slash, bottom degrees)."""
        try:
            top, bottom = text.split("/")
            return cls(
                tuple(int(t) for t in top.split(",") if t.strip()),
                tuple(int(t) for t in bottom.split(",") if t.strip()),
            )
        except ValueError as exc:
            if isinstance(exc, InvalidParameter):
                raise
            raise InvalidParameter(f"cannot parse degree sequences from {text!r}") from None

    def __str__(self):
        return ",".join(map(str, self.top)) + "/" + ",".join(map(str, self.bottom))


def from_edge_list(edges: Iterable[tuple[int, int]], n: int, m: int) -> BipartiteGraph:
    rows: list[set[int]] = [set() for _ in range(n)]
    for i, v in edges:
        if not (0 <= i < n):
            raise InvalidIndex(f"top index {i} outside [0, {n})")
        if not (0 <= v < m):
            raise InvalidIndex(f"bottom index {v} outside [0, {m})")
        if v in rows[i]:
            raise DuplicateEdge(f"edge ({i}, {v}) appears more than once")
        rows[i].add(v)
    return BipartiteGraph(n, m, [sorted(r) for r in rows])


def degrees(g: BipartiteGraph) -> DegreeSequences:
    top = np.diff(g.indptr)
    bottom = np.bincount(g.indices, minlength=g.m)
    return DegreeSequences(tuple(top.tolist()), tuple(bottom.tolist()))


def to_incidence_matrix(g: BipartiteGraph) -> np.ndarray:
    mat = np.zeros((g.n, g.m), dtype=np.uint8)
    rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
    mat[rows, g.indices] = 1
    return mat


def from_incidence_matrix(matrix) -> BipartiteGraph:
    mat = np.asarray(matrix)
    if mat.ndim != 2:
        raise InvalidEntry("incidence matrix must be two-dimensional")
    if not np.all((mat == 0) | (mat == 1)):
        raise InvalidEntry("incidence matrix entries must be 0 or 1")
    n, m = mat.shape
    return BipartiteGraph(n, m, [np.flatnonzero(row) for row in mat])


def canonical_key(g: BipartiteGraph) -> str:
    """``"n,m|a,b,c|d,e|..."``; equal iff the adjacency structures are equal."""
    return f"{g.n},{g.m}|" + "|".join(",".join(map(str, row)) for row in g.adj)


def is_realizable(top: Sequence[int], bottom: Sequence[int]) -> bool:
    """Gale-Ryser test: does some 0/1 matrix have these margins?"""
    if sum(top) != sum(bottom) or any(d < 0 for d in top) or any(d < 0 for d in bottom):
        return False
    lhs = 0
    for k, d in enumerate(sorted(top, reverse=True), start=1):
        lhs += d
        if lhs > sum(min(b, k) for b in bottom):
            return False
    return True


def enumerate_space(seq: DegreeSequences) -> set[BipartiteGraph]:
    """Every bipartite graph realising ``seq``, by backtracking over rows.

    Test oracle only: refuses instances with ``n * m`` above
    :data:`ENUMERATION_LIMIT`.
    """
    top, bottom = list(seq.top), list(seq.bottom)
    n, m = len(top), len(bottom)
    if n * m > ENUMERATION_LIMIT:
        raise TooLarge(f"n*m = {n * m} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    found: set[BipartiteGraph] = set()
    if not is_realizable(top, bottom):
        return found
    rows: list[tuple[int, ...]] = []
    caps = bottom[:]

    def extend(i):
        if i == n:
            found.add(BipartiteGraph(n, m, rows))
            return
        open_cols = [c for c in range(m) if caps[c] > 0]
        for cols in itertools.combinations(open_cols, top[i]):
            for c in cols:
                caps[c] -= 1
            if is_realizable(top[i + 1:], caps):
                rows.append(cols)
                extend(i + 1)
                rows.pop()
            for c in cols:
                caps[c] += 1

    extend(0)
    return found


def realize(seq: DegreeSequences) -> BipartiteGraph:
    """One graph with the given degrees (greedy: each row takes the columns
    with the most remaining capacity, lowest index first on ties)."""
    caps = list(seq.bottom)
    rows = []
    for d in seq.top:
        order = sorted(range(len(caps)), key=lambda c: (-caps[c], c))[:d]
        if any(caps[c] == 0 for c in order):
            raise InvalidParameter(f"degree sequences {seq} are not realizable")
        for c in order:
            caps[c] -= 1
        rows.append(sorted(order))
    return BipartiteGraph(len(seq.top), len(seq.bottom), rows)


# --- labelled files ---------------------------------------------------------


@dataclass
class LabeledGraph:
    """A graph plus the external labels of its top and bottom nodes."""

    graph: BipartiteGraph
    top_labels: list[str]
    bottom_labels: list[str]

    def with_graph(self, graph: BipartiteGraph) -> "LabeledGraph":
        return LabeledGraph(graph, self.top_labels, self.bottom_labels)


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8"), os.fspath(source)
    return source, getattr(source, "name", None)


def read_edge_list(source: str | os.PathLike | TextIO) -> LabeledGraph:
    """Parse ``top_label bottom_label`` lines; ``#`` lines are comments.

    Labels get dense indices in order of first appearance.
    """
    fh, path = _open_text(source)
    top_ids: dict[str, int] = {}
    bottom_ids: dict[str, int] = {}
    rows: list[list[int]] = []
    seen: set[tuple[int, int]] = set()
    try:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(
                    f"expected 'top_label bottom_label', got {text!r}", line=lineno, path=path
                )
            t, b = parts
            i = top_ids.setdefault(t, len(top_ids))
            j = bottom_ids.setdefault(b, len(bottom_ids))
            if i == len(rows):
                rows.append([])
            if (i, j) in seen:
                raise ParseError(f"duplicate edge {t} {b}", line=lineno, path=path)
            seen.add((i, j))
            rows[i].append(j)
    finally:
        if fh is not source:
            fh.close()
    graph = BipartiteGraph(len(top_ids), len(bottom_ids), [sorted(r) for r in rows])
    return LabeledGraph(graph, list(top_ids), list(bottom_ids))


def read_incidence_matrix(source: str | os.PathLike | TextIO) -> LabeledGraph:
    """Parse a header ``n m`` followed by ``n`` rows of ``m`` 0/1 digits."""
    fh, path = _open_text(source)
    try:
        lines = [
            (k, ln.split())
            for k, ln in enumerate(fh, start=1)
            if ln.strip() and not ln.lstrip().startswith("#")
        ]
    finally:
        if fh is not source:
            fh.close()
    if not lines:
        raise ParseError("empty incidence matrix file", path=path)
    lineno, header = lines[0]
    try:
        n, m = (int(x) for x in header)
    except ValueError:
        raise ParseError(f"expected header 'n m', got {' '.join(header)!r}", line=lineno, path=path) from None
    if len(lines) - 1 != n:
        raise ParseError(f"header declares {n} rows, found {len(lines) - 1}", path=path)
    mat = np.zeros((n, m), dtype=np.uint8)
    for r, (lineno, tokens) in enumerate(lines[1:]):
        if len(tokens) != m or any(tok not in ("0", "1") for tok in tokens):
            raise ParseError(f"expected {m} entries of 0/1", line=lineno, path=path)
        mat[r] = [int(tok) for tok in tokens]
    graph = from_incidence_matrix(mat)
    return LabeledGraph(graph, [str(i) for i in range(n)], [str(j) for j in range(m)])


def format_edge_list(lg: LabeledGraph) -> str:
    out = io.StringIO()
    for i, row in enumerate(lg.graph.adj):
        for j in row:
            out.write(f"{lg.top_labels[i]} {lg.bottom_labels[j]}\n")
    return out.getvalue()


def format_incidence_matrix(g: BipartiteGraph) -> str:
    mat = to_incidence_matrix(g)
    lines = [f"{g.n} {g.m}"] + [" ".join(map(str, row)) for row in mat.tolist()]
    return "\n".join(lines) + "\n"
