import pytest

from arsim.model import (Configuration, Mode, ModelError, ProcState, Status, Topology,
                         validate_config)
from tests.conftest import proc


class TestTopology:
    def test_edges_normalised(self):
        t = Topology(3, frozenset({(1, 0), (1, 2)}))
        assert t.edges == frozenset({(0, 1), (1, 2)})
        assert t.nbrs == ((1,), (0, 2), (1,))

    @pytest.mark.parametrize("n,edges,msg", [
        (2, {(0, 2)}, "outside 0..1"),
        (2, {(1, 1)}, "self-loop"),
        (3, {(0, 1)}, "not connected"),
        (0, set(), "at least one"),
    ])
    def test_rejects(self, n, edges, msg):
        with pytest.raises(ModelError, match=msg):
            Topology(n, frozenset(edges))

    def test_shapes(self, rng):
        assert len(Topology.line(5).edges) == 4
        assert len(Topology.ring(5).edges) == 5
        assert Topology.star(4).nbrs[0] == (1, 2, 3)
        t = Topology.random_tree(7, rng)
        assert len(t.edges) == 6

    def test_components(self):
        t = Topology.line(5)
        assert t.components([0, 1, 3, 4]) == [[0, 1], [3, 4]]


class TestMode:
    def test_bounded_domain(self):
        m = Mode("bounded", 3)
        assert m.modulus == 10 and m.counter_max == 9 and m.bounded

    def test_rejects_kind(self):
        with pytest.raises(ModelError):
            Mode("sideways", 2)


class TestValidation:
    def test_bounded_counter_out_of_domain(self):
        c = Configuration(Topology.line(2), Mode("bounded", 2), (proc(0, otsn=5), proc(1, parent=0, dist=1)))
        with pytest.raises(ModelError, match="otsn=5"):
            validate_config(c)

    def test_bounded_sn_is_a_bit(self):
        c = Configuration(Topology.line(2), Mode("bounded", 2), (proc(0, sn=2), proc(1, parent=0, dist=1)))
        with pytest.raises(ModelError, match="sn=2"):
            validate_config(c)

    def test_authorized_only_at_root(self):
        c = Configuration(Topology.line(2), Mode("unbounded", 2),
                          (proc(0), proc(1, parent=0, dist=1, authorized=True)))
        with pytest.raises(ModelError, match="authorized"):
            validate_config(c)

    def test_size_mismatch(self):
        with pytest.raises(ModelError):
            Configuration(Topology.line(2), Mode("unbounded", 2), (proc(0),))

    def test_status_parse(self):
        assert Status.parse("top") is Status.TOP
        assert Status.parse(2) is Status.BOTTOM
        with pytest.raises(ValueError):
            Status.parse("sideways")

    def test_replace_is_local(self):
        c = Configuration(Topology.line(2), Mode("unbounded", 2), (proc(0), proc(1, parent=0, dist=1)))
        d = c.replace(1, res=0)
        assert d.procs[0] is c.procs[0] and d[1].res == 0 and c[1].res == 1
        assert isinstance(d[1], ProcState)
