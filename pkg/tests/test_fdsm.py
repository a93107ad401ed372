import math
import tracemalloc

import numpy as np
import pytest
from scipy.stats import norm

from fastball.errors import DegreeMismatch, InvalidParameter, ParseError
from fastball.fdsm import (
    NullCounts,
    accumulate_null,
    block_membership,
    classify,
    extract_backbone,
    load_checkpoint,
    polarized_graph,
    project,
    required_samples,
    save_checkpoint,
)
from fastball.graph import BipartiteGraph, degrees, enumerate_space, to_incidence_matrix
from fastball.sampler import SamplerConfig


def matmul_projection(g):
    """Oracle: M @ M.T on the incidence matrix."""
    m = to_incidence_matrix(g).astype(np.int64)
    return m @ m.T


def exact_tails(g):
    """Exact P(W >= w_obs), P(W <= w_obs) under the uniform law on the space."""
    w0 = matmul_projection(g)
    space = enumerate_space(degrees(g))
    ge = np.zeros_like(w0)
    le = np.zeros_like(w0)
    for h in space:
        w = matmul_projection(h)
        ge += w >= w0
        le += w <= w0
    return ge, le, len(space)


def required_samples_oracle(alpha, power):
    # Independent re-derivation with scipy quantiles.
    p0, p1 = alpha / 2, alpha / 2 + 0.04 * alpha
    pbar = (p0 + p1) / 2
    num = norm.ppf(1 - alpha / 2) * np.sqrt(2 * pbar * (1 - pbar)) + norm.ppf(power) * np.sqrt(
        p0 * (1 - p0) + p1 * (1 - p1)
    )
    return math.ceil((num / (p1 - p0)) ** 2)


def test_project_small(backend, small_graph):
    w = project(small_graph).weights
    assert w[0, 1] == w[1, 0] == 1
    assert w[0, 0] == 4 and w[1, 1] == 3


def test_project_identical_and_disjoint(backend):
    assert project(BipartiteGraph(2, 5, [[0, 2, 4], [0, 2, 4]])).weights[0, 1] == 3
    assert project(BipartiteGraph(2, 4, [[0, 1], [2, 3]])).weights[0, 1] == 0


def test_project_matches_matmul_and_is_equivariant(backend):
    rng = np.random.default_rng(0)
    g = BipartiteGraph(12, 25, [np.flatnonzero(rng.random(25) < 0.4) for _ in range(12)])
    w = project(g).weights
    np.testing.assert_array_equal(w, matmul_projection(g))
    perm = rng.permutation(12)
    h = BipartiteGraph(12, 25, [g.neighbors(p) for p in perm])
    np.testing.assert_array_equal(project(h).weights, w[np.ix_(perm, perm)])


def test_required_samples_reference_value():
    n = required_samples(0.05, 0.95)
    assert n == required_samples_oracle(0.05, 0.95) == 164_537
    assert abs(n - 164_710) / 164_710 <= 0.03


def test_required_samples_monotone():
    alphas = [0.01, 0.02, 0.05, 0.1, 0.2]
    powers = [0.5, 0.7, 0.8, 0.9, 0.95]
    grid = np.array([[required_samples(a, p) for p in powers] for a in alphas])
    assert np.all(np.diff(grid, axis=0) < 0)
    assert np.all(np.diff(grid, axis=1) > 0)
    for a in alphas:
        for p in powers:
            assert required_samples(a, p) == required_samples_oracle(a, p)


@pytest.mark.parametrize("alpha, power", [(0, 0.9), (1, 0.9), (0.05, 0), (0.05, 1.2), (-0.1, 0.5)])
def test_required_samples_rejects(alpha, power):
    with pytest.raises(InvalidParameter):
        required_samples(alpha, power)


def test_accumulate_tie_counts_both(small_graph):
    obs = project(small_graph)
    counts = accumulate_null(obs, small_graph, NullCounts(2))
    assert counts.samples_seen == 1
    assert counts.ge.tolist() == [[1, 1], [1, 1]]
    assert counts.le.tolist() == [[1, 1], [1, 1]]


def test_accumulate_strictly_above_counts_ge_only():
    obs = project(BipartiteGraph(3, 4, [[0, 1], [2, 3], [0, 2]]))
    sample = BipartiteGraph(3, 4, [[0, 2], [0, 3], [1, 2]])
    counts = accumulate_null(obs, sample, NullCounts(3))
    assert counts.ge[0, 1] == 1 and counts.le[0, 1] == 0


def test_accumulate_rejects_mismatch(small_graph):
    obs = project(small_graph)
    with pytest.raises(DegreeMismatch):
        accumulate_null(obs, BipartiteGraph(2, 6, [[0, 1, 2, 3], [0, 1, 2]]), NullCounts(2))
    with pytest.raises(DegreeMismatch):
        accumulate_null(obs, BipartiteGraph(3, 6, [[0], [1], [2]]), NullCounts(3))


def test_exhaustive_accumulation_equals_exact_tails():
    g = polarized_graph(blocks=2, block_size=3, pool=2)
    ge, le, size = exact_tails(g)
    obs = project(g)
    counts = NullCounts(g.n)
    for h in enumerate_space(degrees(g)):
        accumulate_null(obs, h, counts)
    assert counts.samples_seen == size
    np.testing.assert_array_equal(counts.ge, ge)
    np.testing.assert_array_equal(counts.le, le)


def test_counts_invariants_and_merge():
    g = polarized_graph(blocks=2, block_size=4, pool=3, density=0.67, seed=1)
    cfg = SamplerConfig(seed=3)
    bb = extract_backbone(g, 0.05, 300, cfg)
    c = bb.counts
    assert np.all(c.ge + c.le >= c.samples_seen)
    assert np.all(c.ge <= c.samples_seen) and np.all(c.le <= c.samples_seen)
    np.testing.assert_array_equal(c.ge, c.ge.T)
    merged = NullCounts(g.n).merge(c).merge(c)
    assert merged.samples_seen == 600
    np.testing.assert_array_equal(merged.ge, 2 * c.ge)


def test_sign_soundness():
    g = polarized_graph(density=0.5, seed=2)
    bb = extract_backbone(g, 0.05, 2_000, SamplerConfig(seed=4))
    s = bb.counts.samples_seen
    pos = bb.signs == 1
    neg = bb.signs == -1
    assert np.all(bb.counts.ge[pos] / s < 0.025)
    assert np.all(bb.counts.le[neg] / s < 0.025)
    rest = ~(pos | neg)
    np.fill_diagonal(rest, False)
    assert np.all((bb.counts.ge[rest] / s >= 0.025) & (bb.counts.le[rest] / s >= 0.025))
    assert np.all(np.diag(bb.signs) == 0)


def test_smoothed_p_values():
    c = NullCounts(2, 9, np.array([[9, 0], [0, 9]]), np.array([[9, 9], [9, 9]]))
    up, low = c.p_values(smooth=True)
    assert up[0, 1] == pytest.approx(0.1)
    signs, _, _ = classify(c, 0.5, smooth=True)
    assert signs[0, 1] == 1
    signs, _, _ = classify(c, 0.19, smooth=True)
    assert signs[0, 1] == 0


def test_backbone_rejects_alpha_zero(small_graph):
    with pytest.raises(InvalidParameter):
        extract_backbone(small_graph, 0, 10, SamplerConfig(seed=1))


def test_complete_graph_has_empty_backbone():
    g = BipartiteGraph(4, 5, [list(range(5))] * 4)
    bb = extract_backbone(g, 0.05, 200, SamplerConfig(seed=1))
    assert not bb.signs.any()
    assert bb.edges() == []


def test_reduced_two_block_instance_matches_exact_signs():
    g = polarized_graph(blocks=2, block_size=3, pool=2)
    ge, le, size = exact_tails(g)
    alpha = 0.7
    exact = np.zeros_like(ge)
    exact[ge / size < alpha / 2] = 1
    exact[le / size < alpha / 2] = -1
    np.fill_diagonal(exact, 0)
    blk = block_membership(2, 3)
    same = blk[:, None] == blk[None, :]
    off = ~np.eye(6, dtype=bool)
    assert np.all(exact[same & off] == 1) and np.all(exact[~same] == -1)
    bb = extract_backbone(g, alpha, 20_000, SamplerConfig(seed=12))
    np.testing.assert_array_equal(bb.signs, exact)


def test_two_block_fixture_signs():
    g = polarized_graph()
    bb = extract_backbone(g, 0.05, 2_000, SamplerConfig(seed=6))
    blk = block_membership(2, 10)
    same = blk[:, None] == blk[None, :]
    off = ~np.eye(20, dtype=bool)
    assert np.all(bb.signs[same & off] == 1)
    assert np.all(bb.signs[~same] == -1)


def test_threads_do_not_change_counts():
    g = polarized_graph(density=0.5, seed=1)
    a = extract_backbone(g, 0.05, 500, SamplerConfig(seed=9, threads=1))
    b = extract_backbone(g, 0.05, 500, SamplerConfig(seed=9, threads=4))
    np.testing.assert_array_equal(a.counts.ge, b.counts.ge)
    np.testing.assert_array_equal(a.counts.le, b.counts.le)


def test_checkpoint_resume_matches_uninterrupted(tmp_path):
    g = polarized_graph(density=0.5, seed=1)
    full = extract_backbone(g, 0.05, 600, SamplerConfig(seed=2))
    ck = tmp_path / "counts.txt"
    extract_backbone(g, 0.05, 250, SamplerConfig(seed=2), checkpoint=ck, checkpoint_every=100)
    counts, meta = load_checkpoint(ck)
    assert counts.samples_seen == 250
    assert meta == {"seed": 2, "trades": 100, "algorithm": "fastball"}
    resumed = extract_backbone(g, 0.05, 600, SamplerConfig(seed=2, threads=3), checkpoint=ck, checkpoint_every=100)
    np.testing.assert_array_equal(resumed.counts.ge, full.counts.ge)
    np.testing.assert_array_equal(resumed.counts.le, full.counts.le)
    assert load_checkpoint(ck)[0].samples_seen == 600


def test_checkpoint_from_other_run_rejected(tmp_path):
    g = polarized_graph(density=0.5, seed=1)
    ck = tmp_path / "counts.txt"
    extract_backbone(g, 0.05, 50, SamplerConfig(seed=2), checkpoint=ck)
    with pytest.raises(InvalidParameter):
        extract_backbone(g, 0.05, 100, SamplerConfig(seed=3), checkpoint=ck)


def test_checkpoint_format(tmp_path):
    c = NullCounts(2, 5, np.array([[5, 1], [1, 5]]), np.array([[5, 4], [4, 5]]))
    path = tmp_path / "c.txt"
    save_checkpoint(path, c, seed=11, trades=10, algorithm="curveball")
    lines = path.read_text().splitlines()
    assert lines[0] == "FASTBALL-NULLCOUNTS 1"
    assert lines[1:6] == ["n 2", "samples_seen 5", "seed 11", "trades 10", "algorithm curveball"]
    back, meta = load_checkpoint(path)
    np.testing.assert_array_equal(back.ge, c.ge)
    np.testing.assert_array_equal(back.le, c.le)
    path.write_text("garbage\n")
    with pytest.raises(ParseError):
        load_checkpoint(path)


def test_memory_independent_of_sample_count():
    g = polarized_graph(density=0.5, seed=1)
    peaks = []
    for samples in (200, 2_000):
        tracemalloc.start()
        extract_backbone(g, 0.05, samples, SamplerConfig(seed=1))
        peaks.append(tracemalloc.get_traced_memory()[1])
        tracemalloc.stop()
    assert peaks[1] < 1.5 * peaks[0] + 64_000
