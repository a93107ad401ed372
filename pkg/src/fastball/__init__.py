"""Uniform sampling of bipartite graphs with fixed degree sequences.

Curveball and fastball trades, a degree-preserving sampler built on them,
and signed FDSM backbone extraction for bipartite projections. Hot loops run
in a compiled extension when it is built; see :mod:`fastball.kernels`.
"""

__version__ = "0.1.0"

from .errors import (
    DegreeMismatch,
    DuplicateEdge,
    FastballError,
    InvalidEntry,
    InvalidIndex,
    InvalidParameter,
    ParseError,
    TooFewTopNodes,
    TooLarge,
    UnsortedInput,
    VictoryVectorMismatch,
)
from .fdsm import (
    Backbone,
    NullCounts,
    Projection,
    accumulate_null,
    extract_backbone,
    project,
    required_samples,
)
from .graph import (
    BipartiteGraph,
    DegreeSequences,
    canonical_key,
    degrees,
    enumerate_space,
    from_edge_list,
    from_incidence_matrix,
    to_incidence_matrix,
)
from .kernels import BACKEND
from .sampler import Algorithm, SamplerConfig, default_trades, randomize, sample_stream
from .trades import (
    TradeOutcome,
    VictoryVector,
    curveball_trade,
    curveball_trade_core,
    fastball_trade,
    fastball_trade_core,
    intersection_size,
)
