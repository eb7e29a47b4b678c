import pytest
from hypothesis import given

from arsim.checker.predicates import (Pred, eval_predicate, in_as, in_as_double_prime,
                                      in_as_prime, in_s1, in_s2, in_t)
from arsim.model import Mode
from arsim.simulator import legitimate_config
from arsim.model import Topology
from tests.conftest import configurations, line_fixpoint


def test_legitimate_config():
    c = legitimate_config(Topology.line(4), Mode("unbounded", 4))
    assert in_s1(c) and in_t(c) and in_as(c) and not in_s2(c)


def test_as_without_t():
    c = line_fixpoint(3, fields={0: dict(status="BOTTOM", otsn=1)})
    assert in_as(c) and not in_t(c) and not in_s1(c)


def test_s2_all_top_caught_up():
    c = line_fixpoint(3, fields={j: dict(status="TOP", otsn=2 + j, ctsn=2) for j in range(3)})
    assert in_s2(c)
    assert not in_s2(c.replace(1, otsn=1))
    assert not in_s2(c.replace(2, status="STABLE"))


def test_s2_bottom_leader_has_no_clause():
    c = line_fixpoint(2, fields={0: dict(status="BOTTOM", otsn=5), 1: dict(status="TOP", otsn=1)})
    assert in_s2(c)


def test_bounded_s2_window():
    # N=3, modulus 10: leader at 8, others at 9 and 1 are within [8 .. 8+3]
    c = line_fixpoint(3, "bounded", {0: dict(status="TOP", otsn=8), 1: dict(status="TOP", otsn=9),
                                     2: dict(status="BOTTOM", otsn=1)})
    assert in_s2(c)
    assert not in_s2(c.replace(2, otsn=3))


def test_dead_processes_do_not_count():
    c = line_fixpoint(3, fields={2: dict(status="BOTTOM", otsn=7, alive=False)})
    assert in_t(c) and in_as(c)


def test_s1_needs_formed_tree():
    c = line_fixpoint(3, fields={2: dict(parent=2, leader=2, dist=0)})
    assert in_t(c) and not in_s1(c)
    c = line_fixpoint(3, fields={2: dict(leader=1)})
    assert not in_s1(c)


def test_as_windows():
    c = line_fixpoint(3, "bounded", {0: dict(otsn=1, ctsn=0), 1: dict(otsn=0, ctsn=0), 2: dict(otsn=3, ctsn=0)})
    assert not in_as_prime(c) and in_as_double_prime(c)
    with pytest.raises(ValueError):
        in_as_prime(line_fixpoint(2))


def test_parse_aliases():
    assert Pred.parse("AS'") is Pred.AS_PRIME
    assert Pred.parse("asdoubleprime") is Pred.AS_DOUBLE_PRIME
    assert eval_predicate(line_fixpoint(2), "TreeSilent")
    with pytest.raises(ValueError):
        Pred.parse("S3")


@given(configurations())
def test_s1_within_t_within_as(c):
    if in_s1(c):
        assert in_t(c)
    if in_t(c):
        assert in_as(c)
    assert not (in_s1(c) and in_s2(c) and c.alive_ids())
