import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arsim.checker.predicates import in_s1, in_t
from arsim.core import STUTTER
from arsim.model import Mode, ModelError, Topology
from arsim.simulator import (Injection, InjectionError, Scenario, Scheduler, enabled_moves,
                             init_config, inject, legitimate_config, run)
from tests.conftest import line_fixpoint, proc


def scenario(n=4, kind="bounded", **kw):
    topo = kw.pop("topology", Topology.line(n))
    return Scenario(topo, Mode(kind, topo.n), **kw)


class TestInit:
    def test_legitimate_is_s1(self):
        assert in_s1(init_config(scenario(5), np.random.default_rng(0)))

    def test_random_reproducible(self):
        a = init_config(scenario(init="random", seed=3), np.random.default_rng(3))
        b = init_config(scenario(init="random", seed=3), np.random.default_rng(3))
        assert a == b

    def test_t_random_is_in_t(self):
        for seed in range(20):
            assert in_t(init_config(scenario(init="t_random"), np.random.default_rng(seed)))

    def test_explicit_init_out_of_domain(self):
        procs = (proc(0, otsn=99), proc(1, parent=0, dist=1))
        with pytest.raises(ModelError):
            scenario(2, init=procs)

    def test_bad_policies(self):
        with pytest.raises(ValueError):
            scenario(scheduler="lottery")
        with pytest.raises(ValueError):
            scenario(init="chaos")


class TestScheduling:
    def test_priority_narrows_choice(self):
        c = line_fixpoint(3, fields={0: dict(status="TOP", authorized=True),
                                     2: dict(otsn=1, ctsn=1)})
        assert set(enabled_moves(c, priority=False)) >= {(1, "AR2"), (0, "AR7")}
        hot = enabled_moves(c)
        assert (1, "AR2") in hot and {lab for _, lab in hot} <= {"AR2", "AR6"}

    def test_stutter_when_quiet(self):
        tr = run(scenario(3, max_steps=5))
        assert [r.label for r in tr.records[1:]] == [STUTTER] * 5
        assert all(r.config == tr.records[0].config for r in tr.records)

    def test_roundrobin_cycles(self):
        sched = Scheduler("roundrobin", None, Mode("unbounded", 3))
        moves = [(0, "AR1"), (1, "AR3"), (2, "TREE")]
        assert [sched.pick(moves) for _ in range(4)] == moves + [moves[0]]

    def test_roundrobin_is_deterministic_without_rng(self):
        sc = scenario(4, init="random", scheduler="roundrobin", seed=9, max_steps=200)
        assert run(sc).records == run(sc).records


class TestInjection:
    def test_unbounded_counter_corruption_rejected(self):
        with pytest.raises(InjectionError, match="fault model"):
            scenario(kind="unbounded", injections=(Injection(3, "corrupt", 1, "otsn", 4),))

    def test_bounded_counter_corruption_allowed(self):
        sc = scenario(injections=(Injection(0, "corrupt", 1, "otsn", 4),), max_steps=1)
        assert run(sc).records[1].config[1].otsn == 4

    def test_value_domain(self):
        with pytest.raises(InjectionError):
            scenario(injections=(Injection(0, "corrupt", 1, "sn", 2),))
        with pytest.raises(InjectionError):
            scenario(injections=(Injection(0, "ae", 7),))

    def test_authorize_without_leader_dropped(self):
        c = legitimate_config(Topology.line(2), Mode("unbounded", 2))
        c = c.replace(0, alive=False).replace(1, alive=False)
        after, detail = inject(c, Injection(0, "authorize"))
        assert after == c and detail["dropped"] == "no alive leader"

    def test_authorize_goes_to_leader(self):
        c = legitimate_config(Topology.line(3), Mode("unbounded", 3))
        after, detail = inject(c, Injection(0, "authorize"))
        assert detail["pid"] == 0 and after[0].authorized

    def test_failstop_then_revive(self):
        c = legitimate_config(Topology.line(3), Mode("unbounded", 3)).replace(1, otsn=4, ctsn=4)
        c, _ = inject(c, Injection(0, "failstop", 1))
        assert not c[1].alive
        c, _ = inject(c, Injection(0, "ae", 1))  # dropped on a dead process
        assert not c[1].pending_ae
        c, _ = inject(c, Injection(0, "revive", 1), np.random.default_rng(1))
        assert c[1].alive and (c[1].otsn, c[1].ctsn) == (4, 4)

    def test_dead_processes_never_move(self):
        sc = scenario(5, init="random", seed=4, max_steps=400,
                      injections=(Injection(0, "failstop", 2), Injection(50, "revive", 2)))
        for r in run(sc).records:
            if r.actor is not None and r.label != STUTTER:
                assert r.config[r.actor].alive


def test_same_seed_same_trace():
    sc = scenario(5, init="random", seed=77, max_steps=300, injections=(Injection(10, "ae", 3),))
    assert run(sc).records == run(sc).records


def test_stop_policy_waits_for_injections():
    sc = scenario(3, kind="unbounded", stop="s1_quiescent", authorize="on_s2",
                  injections=(Injection(4, "ae", 2),), max_steps=500)
    tr = run(sc)
    assert [r.label for r in tr.records[1:5]] == [STUTTER] * 4
    assert tr.records[5].label == "ae"
    assert in_s1(tr.final) and tr.final[0].otsn == 1 and tr.final[0].ctsn == 1
    assert not tr.budget_exhausted


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32), st.sampled_from(["t_random", "legitimate"]), st.integers(2, 5))
def test_counters_never_decrease_from_t(seed, init, n):
    """otsn/ctsn are monotone once the counters agree; sn too from a legitimate start."""
    rng = np.random.default_rng(seed)
    ae = tuple(Injection(int(rng.integers(0, 40)), "ae", int(rng.integers(0, n))) for _ in range(2))
    sc = Scenario(Topology.random_tree(n, rng), Mode("unbounded", n), init=init, seed=seed,
                  max_steps=300, injections=ae, authorize="on_s2")
    prev = None
    for r in run(sc).records:
        if prev is not None:
            for a, b in zip(prev.procs, r.config.procs):
                assert b.otsn >= a.otsn and b.ctsn >= a.ctsn
                if init == "legitimate":
                    assert b.sn >= a.sn
        prev = r.config
