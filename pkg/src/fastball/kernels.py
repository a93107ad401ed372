"""Backend selection for the trade kernels.

The compiled Cython module is used when it imports; otherwise, or when the
environment variable ``FASTBALL_PURE_PYTHON`` is set to a non-empty value,
the pure-Python module takes its place. Both expose the same functions:

``intersection_size(a, b)``, ``fastball_core(a, b, v)``,
``fastball_trade(a, b, bitgen)``, ``curveball_core(a, b, s_order)``,
``curveball_trade(a, b, bitgen)``, ``randomize(indptr, indices, trades,
algorithm, bitgen)`` and ``project(indptr, indices)``.
"""

import os

from . import _pykernels

FASTBALL = 0
CURVEBALL = 1

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("FASTBALL_PURE_PYTHON"):
    active = _compiled
else:
    active = _pykernels

BACKEND = active.BACKEND


def available():
    """Names of the backends importable in this environment."""
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get(name=None):
    """Kernel module by name; ``None`` returns the active one."""
    if name is None:
        return active
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
