import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from arsim.model import Configuration, Mode, ProcState, Status, Topology

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def proc(pid, parent=None, leader=0, dist=0, status="STABLE", sn=0, otsn=0, ctsn=0, res=1, **kw):
    return ProcState(pid, pid if parent is None else parent, leader, dist, Status.parse(status),
                     sn, otsn, ctsn, res, **kw)


def line_fixpoint(n, mode_kind="unbounded", fields=None):
    """Legitimate-looking line 0-1-..-(n-1) with per-process overrides {pid: {...}}."""
    fields = fields or {}
    topo = Topology.line(n)
    procs = []
    for j in range(n):
        over = fields.get(j, {})
        base = dict(parent=max(j - 1, 0), leader=0, dist=j)
        base.update(over)
        procs.append(proc(j, **base))
    return Configuration(topo, Mode(mode_kind, n), tuple(procs))


@st.composite
def topologies(draw, min_n=1, max_n=5):
    n = draw(st.integers(min_n, max_n))
    edges = {(draw(st.integers(0, i - 1)), i) for i in range(1, n)}
    if n > 2:
        extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3))
        edges |= {(min(a, b), max(a, b)) for a, b in extra if a != b}
    return Topology(n, frozenset(edges))


@st.composite
def proc_states(draw, pid, mode, statuses=tuple(Status)):
    n = mode.n_procs
    top = mode.counter_max if mode.bounded else 6
    parent = draw(st.integers(0, n - 1))
    return ProcState(
        pid, parent, draw(st.integers(0, n - 1)), draw(st.integers(0, n)),
        draw(st.sampled_from(statuses)),
        draw(st.integers(0, 1 if mode.bounded else 4)),
        draw(st.integers(0, top)), draw(st.integers(0, top)), draw(st.integers(0, 1)),
        alive=draw(st.booleans()) if n > 1 else True,
        pending_ae=draw(st.booleans()),
        authorized=parent == pid and draw(st.booleans()))


@st.composite
def configurations(draw, kind=None, min_n=1, max_n=5, strict=True):
    topo = draw(topologies(min_n, max_n))
    kind = kind or draw(st.sampled_from(["unbounded", "bounded"]))
    mode = Mode(kind, topo.n, strict_gd=strict)
    procs = tuple(draw(proc_states(j, mode)) for j in range(topo.n))
    return Configuration(topo, mode, procs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
