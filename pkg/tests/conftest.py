import pytest

from fastball import kernels
from fastball.graph import BipartiteGraph

# Two top nodes sharing bottom node 5; the other five bottom nodes are contested.
SMALL_NI = [0, 2, 4, 5]
SMALL_NJ = [1, 3, 5]


@pytest.fixture
def small_graph():
    return BipartiteGraph(2, 6, [SMALL_NI, SMALL_NJ])


@pytest.fixture(params=kernels.available())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(kernels, "active", kernels.get(request.param))
    return request.param


def pytest_addoption(parser):
    parser.addoption("--big", action="store_true", default=False,
                     help="include the m = 10^6 benchmark case in the acceptance suite")
