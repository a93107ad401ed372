"""Empirical uniformity checks against exhaustively enumerated spaces."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from scipy.stats import chisquare

from .graph import DegreeSequences, canonical_key, enumerate_space, realize
from .sampler import SamplerConfig, sample_stream

#: Spaces of 2, 6, 34 and 48 graphs.
DEFAULT_BATTERY = ("1,1/1,1", "2,2,2/2,2,2", "2,2,1,1/2,2,1,1", "3,2,2,1/2,2,2,2")
SIGNIFICANCE = 1e-3


@dataclass
class UniformityReport:
    sequences: DegreeSequences
    space_size: int
    samples: int
    statistic: float
    p_value: float
    outside: int
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" outside={self.outside}" if self.outside else ""
        return (
            f"{status} {self.sequences} |G|={self.space_size} samples={self.samples} "
            f"chi2={self.statistic:.3f} p={self.p_value:.4g}{extra}"
        )


def check_uniformity(
    seq: DegreeSequences | str,
    samples: int = 100_000,
    config: SamplerConfig | None = None,
    significance: float = SIGNIFICANCE,
) -> UniformityReport:
    """Sample from a fixed start graph and chi-square the visit counts.

    Fails if the goodness-of-fit p-value is below ``significance`` or any
    sample falls outside the enumerated space.
    """
    if isinstance(seq, str):
        seq = DegreeSequences.parse(seq)
    config = config or SamplerConfig(seed=0)
    space = {canonical_key(g) for g in enumerate_space(seq)}
    start = realize(seq)
    seen: Counter[str] = Counter()
    sample_stream(start, samples, config, lambda g: seen.update((canonical_key(g),)))
    outside = sum(c for key, c in seen.items() if key not in space)
    observed = [seen.get(key, 0) for key in sorted(space)]
    if len(space) > 1:
        stat, p = chisquare(observed)
        stat, p = float(stat), float(p)
    else:
        stat, p = 0.0, 1.0
    passed = outside == 0 and p >= significance
    return UniformityReport(seq, len(space), samples, stat, p, outside, passed)
