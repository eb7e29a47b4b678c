"""Deterministic executions: initial configurations, scheduling, injections, traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .checker.predicates import in_s1, in_s2
from .core import (PRIORITY_ACTIONS, STUTTER, TREE, actions_for, apply_action,
                   completes_restore, enabled)
from .model import (Configuration, Mode, ModelError, ProcState, Status, Topology,
                    validate_config)
from .tree import bfs_tree, current_leader, tree_enabled, tree_step

INJECTION_KINDS = ("ae", "failstop", "revive", "corrupt", "authorize")
CORRUPTIBLE = ("parent", "leader", "dist", "status", "sn", "otsn", "ctsn", "res")
FAULT_KINDS = frozenset({"ae", "failstop", "revive", "corrupt"})


class InjectionError(ValueError):
    """An injection that the fault model or the mode does not allow."""


@dataclass(frozen=True)
class Injection:
    at_step: int
    kind: str
    pid: Optional[int] = None
    field: Optional[str] = None
    value: Optional[int] = None

    def __post_init__(self):
        if self.kind not in INJECTION_KINDS:
            raise InjectionError(f"unknown injection kind {self.kind!r}")
        if self.at_step < 0:
            raise InjectionError("injection step must be non-negative")
        if self.kind != "authorize" and self.pid is None:
            raise InjectionError(f"{self.kind} injection needs a pid")
        if self.kind == "corrupt":
            if self.field not in CORRUPTIBLE:
                raise InjectionError(f"cannot corrupt field {self.field!r}")
            if self.value is None:
                raise InjectionError("corrupt injection needs a value")


def check_injection(inj: Injection, mode: Mode, n: int) -> None:
    """Static validation of an injection against mode and topology size."""
    if inj.pid is not None and not 0 <= inj.pid < n:
        raise InjectionError(f"injection targets process {inj.pid}, outside 0..{n - 1}")
    if inj.kind != "corrupt":
        return
    if not mode.bounded and inj.field in ("otsn", "ctsn"):
        raise InjectionError(
            f"transient faults may not corrupt {inj.field} in unbounded mode "
            "(the fault model protects otsn and ctsn)")
    v = inj.value
    ok = {
        "parent": 0 <= v < n,
        "leader": 0 <= v < n,
        "dist": 0 <= v <= n,
        "status": v in (0, 1, 2, 3),
        "sn": v in (0, 1) if mode.bounded else v >= 0,
        "otsn": 0 <= v <= mode.counter_max,
        "ctsn": 0 <= v <= mode.counter_max,
        "res": v in (0, 1),
    }[inj.field]
    if not ok:
        raise InjectionError(f"value {v} is outside the domain of {inj.field}")


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    mode: Mode
    init: object = "legitimate"  # "legitimate" | "random" | "t_random" | tuple of ProcState
    injections: tuple = ()
    scheduler: str = "uniform"
    seed: int = 0
    max_steps: int = 1000
    stop: str = "none"
    authorize: str = "scheduled"  # or "on_s2"

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.scheduler not in ("uniform", "roundrobin"):
            raise ValueError(f"unknown scheduler {self.scheduler!r}")
        if self.stop not in ("none", "s1_quiescent"):
            raise ValueError(f"unknown stop policy {self.stop!r}")
        if self.authorize not in ("scheduled", "on_s2"):
            raise ValueError(f"unknown authorize policy {self.authorize!r}")
        if self.mode.n_procs != self.topology.n:
            raise ValueError("mode.n_procs differs from topology size")
        if isinstance(self.init, str):
            if self.init not in ("legitimate", "random", "t_random"):
                raise ValueError(f"unknown init policy {self.init!r}")
        else:
            procs = tuple(self.init)
            object.__setattr__(self, "init", procs)
            validate_config(Configuration(self.topology, self.mode, procs))
        injections = tuple(sorted(self.injections, key=lambda i: i.at_step))
        object.__setattr__(self, "injections", injections)
        for inj in injections:
            check_injection(inj, self.mode, self.topology.n)


@dataclass(frozen=True)
class StepRecord:
    step: int
    tick: int
    actor: Optional[int]  # None for the environment
    label: str
    config: Configuration
    detail: dict = field(default_factory=dict, compare=False)
    restore_complete: bool = False
    entered_s1: bool = False
    entered_s2: bool = False

    @property
    def is_injection(self) -> bool:
        return self.actor is None and self.label in INJECTION_KINDS


@dataclass
class Trace:
    scenario: Scenario
    records: list

    def __len__(self):
        return len(self.records)

    @property
    def final(self) -> Configuration:
        return self.records[-1].config

    def configs(self):
        return [r.config for r in self.records]

    def injection_indices(self, kinds=None) -> list:
        kinds = INJECTION_KINDS if kinds is None else kinds
        return [i for i, r in enumerate(self.records) if r.is_injection and r.label in kinds
                and not r.detail.get("dropped")]

    @property
    def budget_exhausted(self) -> bool:
        return self.records[-1].tick >= self.scenario.max_steps


# -- initial configurations -----------------------------------------------------

def _uniform(rng, lo, hi) -> int:
    return int(rng.integers(lo, hi + 1))


def random_proc(pid: int, mode: Mode, rng, *, statuses=(0, 1, 2, 3), counters=None) -> ProcState:
    """Every field independently uniform over its domain (flags cleared, alive)."""
    n = mode.n_procs
    top = mode.counter_max
    sn_hi = 1 if mode.bounded else top
    status = Status(statuses[_uniform(rng, 0, len(statuses) - 1)])
    parent = _uniform(rng, 0, n - 1)
    leader = _uniform(rng, 0, n - 1)
    dist = _uniform(rng, 0, n)
    sn = _uniform(rng, 0, sn_hi)
    if counters is None:
        otsn, ctsn = _uniform(rng, 0, top), _uniform(rng, 0, top)
    else:
        otsn = ctsn = counters
    res = _uniform(rng, 0, 1)
    return ProcState(pid, parent, leader, dist, status, sn, otsn, ctsn, res)


def legitimate_config(topology: Topology, mode: Mode) -> Configuration:
    tree = bfs_tree(topology, range(topology.n))
    procs = tuple(ProcState(j, tree[j][1], tree[j][0], tree[j][2], Status.STABLE, 0, 0, 0, 1)
                  for j in range(topology.n))
    return Configuration(topology, mode, procs)


def init_config(scenario: Scenario, rng) -> Configuration:
    topo, mode = scenario.topology, scenario.mode
    if scenario.init == "legitimate":
        return legitimate_config(topo, mode)
    if scenario.init == "random":
        return Configuration(topo, mode, tuple(random_proc(j, mode, rng) for j in range(topo.n)))
    if scenario.init == "t_random":
        c = _uniform(rng, 0, mode.counter_max)
        return Configuration(topo, mode, tuple(
            random_proc(j, mode, rng, statuses=(0, 1), counters=c) for j in range(topo.n)))
    return Configuration(topo, mode, tuple(scenario.init))


# -- scheduling ---------------------------------------------------------------

def enabled_moves(config: Configuration, priority: bool = True) -> list:
    """All ``(pid, label)`` pairs that may fire, in (pid, label) order.

    With ``priority`` the set is narrowed to AR2/AR6 (B2/B6) instances
    whenever any of them is enabled.
    """
    moves = []
    for p in config.procs:
        if not p.alive:
            continue
        for a in enabled(config, p.pid):
            moves.append((p.pid, a))
        if tree_enabled(config, p.pid):
            moves.append((p.pid, TREE))
    if priority:
        hot = [m for m in moves if m[1] in PRIORITY_ACTIONS]
        if hot:
            return hot
    return moves


def fire(config: Configuration, pid: int, label: str) -> tuple:
    """Execute one move; returns ``(config, restore_complete)``."""
    if label == TREE:
        new, _ = tree_step(config, pid)
        return new, False
    done = completes_restore(config, pid, label)
    return apply_action(config, pid, label), done


class Scheduler:
    """Picks one enabled move per step.

    ``uniform`` draws from the seeded generator; ``roundrobin`` takes the
    first move strictly after the previously fired one in (pid, label) order,
    wrapping around, which bounds how long an enabled move can wait.
    """

    def __init__(self, policy: str, rng, mode: Mode):
        self.policy = policy
        self.rng = rng
        self._order = {a: i for i, a in enumerate(actions_for(mode) + (TREE,))}
        self._cursor = None

    def _key(self, move):
        return move[0], self._order[move[1]]

    def pick(self, moves):
        if self.policy == "uniform":
            return moves[int(self.rng.integers(len(moves)))]
        if self._cursor is not None:
            for m in moves:
                if self._key(m) > self._cursor:
                    self._cursor = self._key(m)
                    return m
        m = moves[0]
        self._cursor = self._key(m)
        return m


def schedule_step(config: Configuration, scheduler: Scheduler, *, step: int = 0, tick: int = 0) -> tuple:
    moves = enabled_moves(config)
    if not moves:
        return config, StepRecord(step, tick, None, STUTTER, config)
    pid, label = scheduler.pick(moves)
    new, done = fire(config, pid, label)
    detail = {"notified": True} if label == TREE else {}
    return new, StepRecord(step, tick, pid, label, new, detail, restore_complete=done)


# -- injections ---------------------------------------------------------------

def inject(config: Configuration, ev: Injection, rng=None) -> tuple:
    """Apply an environment event; returns ``(config, detail)``."""
    mode, n = config.mode, config.n
    check_injection(ev, mode, n)
    detail = {"kind": ev.kind}
    if ev.kind == "authorize":
        leader = current_leader(config)
        if leader is None:
            detail["dropped"] = "no alive leader"
            return config, detail
        detail["pid"] = leader
        return config.replace(leader, authorized=True), detail
    detail["pid"] = ev.pid
    target = config.procs[ev.pid]
    if ev.kind == "revive":
        if target.alive:
            detail["dropped"] = "process is alive"
            return config, detail
        if rng is None:
            raise InjectionError("revive needs a random generator")
        fresh = random_proc(ev.pid, mode, rng)
        if not mode.bounded:
            # otsn/ctsn are outside the unbounded fault model
            fresh = fresh._replace(otsn=target.otsn, ctsn=target.ctsn)
        procs = list(config.procs)
        procs[ev.pid] = fresh
        return config.with_procs(procs), detail
    if not target.alive:
        detail["dropped"] = "process is dead"
        return config, detail
    if ev.kind == "ae":
        return config.replace(ev.pid, pending_ae=True), detail
    if ev.kind == "failstop":
        return config.replace(ev.pid, alive=False, pending_ae=False, authorized=False), detail
    detail["field"], detail["value"] = ev.field, ev.value
    value = Status(ev.value) if ev.field == "status" else ev.value
    return config.replace(ev.pid, **{ev.field: value}), detail


# -- runs ---------------------------------------------------------------------

def s1_quiescent(config: Configuration) -> bool:
    if any(p.pending_ae for p in config.procs if p.alive):
        return False
    return in_s1(config) and not enabled_moves(config)


def run(scenario: Scenario, stop: Optional[Callable] = None) -> Trace:
    """Execute ``scenario``; ``stop`` (or the scenario's stop policy) ends the run early.

    The stop test is only consulted once every scheduled injection has been
    applied.
    """
    rng = np.random.default_rng(scenario.seed)
    config = init_config(scenario, rng)
    if stop is None and scenario.stop == "s1_quiescent":
        stop = s1_quiescent
    scheduler = Scheduler(scenario.scheduler, rng, scenario.mode)
    s1, s2 = in_s1(config), in_s2(config)
    records = [StepRecord(0, 0, None, "INIT", config, entered_s1=s1, entered_s2=s2)]

    def push(rec):
        nonlocal s1, s2
        n1, n2 = in_s1(rec.config), in_s2(rec.config)
        rec = StepRecord(len(records), rec.tick, rec.actor, rec.label, rec.config, rec.detail,
                         rec.restore_complete, n1 and not s1, n2 and not s2)
        s1, s2 = n1, n2
        records.append(rec)

    queue = list(scenario.injections)
    qi = 0
    tick = 0
    while tick < scenario.max_steps:
        while qi < len(queue) and queue[qi].at_step <= tick:
            config, detail = inject(config, queue[qi], rng)
            push(StepRecord(0, tick, None, queue[qi].kind, config, detail))
            qi += 1
        done_injecting = qi == len(queue)
        if done_injecting and scenario.authorize == "on_s2" and s2:
            leader = current_leader(config)
            if (leader is not None and not config.procs[leader].authorized
                    and not any(p.pending_ae for p in config.procs if p.alive)):
                config, detail = inject(config, Injection(tick, "authorize"), rng)
                detail["policy"] = "on_s2"
                push(StepRecord(0, tick, None, "authorize", config, detail))
        if done_injecting and stop is not None and stop(config):
            break
        config, rec = schedule_step(config, scheduler, tick=tick + 1)
        tick += 1
        push(rec)
    return Trace(scenario, records)
