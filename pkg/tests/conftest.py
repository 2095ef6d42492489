import pytest

from darp.kernels import BACKENDS
from darp.model import Instance, Vertex


def make_instance(requests, m=2, Q=6, T_k=480.0, L=90.0, horizon=1440.0, depot=(0.0, 0.0), name="hand"):
    """Build an instance from ``[(pickup_xy, drop_xy, pickup_window, drop_window, service), ...]``."""
    n = len(requests)
    verts = [Vertex(0, depot[0], depot[1], 0.0, 0, 0.0, horizon)]
    drops = []
    for i, (pxy, dxy, pw, dw, s) in enumerate(requests, start=1):
        verts.append(Vertex(i, pxy[0], pxy[1], s, 1, *pw))
        drops.append(Vertex(i + n, dxy[0], dxy[1], s, -1, *dw))
    return Instance(n, m, Q, T_k, L, verts + drops, horizon=horizon, name=name)


@pytest.fixture
def line_instance():
    """One request on a line: depot (0,0), pickup (10,0), drop-off (20,0), open windows, no service."""
    return make_instance([((10.0, 0.0), (20.0, 0.0), (0.0, 1440.0), (0.0, 1440.0), 0.0)], m=1)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
