"""Value types shared by every layer: process state, mode, topology, configuration."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple


class Status(IntEnum):
    RESTORE = 0
    STABLE = 1
    BOTTOM = 2
    TOP = 3

    @classmethod
    def parse(cls, value) -> "Status":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(f"unknown status {value!r}") from None
        return cls(int(value))


class ProcState(NamedTuple):
    """Variables of one process.

    ``parent``, ``leader`` and ``dist`` belong to the tree layer; the protocol
    only reads them.  ``pending_ae`` and ``authorized`` are latched inputs set
    by the environment and consumed by the detection and restore actions.
    """

    pid: int
    parent: int
    leader: int
    dist: int
    status: Status
    sn: int
    otsn: int
    ctsn: int
    res: int
    alive: bool = True
    pending_ae: bool = False
    authorized: bool = False


PROC_FIELDS = ProcState._fields
INT_FIELDS = ("parent", "leader", "dist", "sn", "otsn", "ctsn", "res")
BOOL_FIELDS = ("alive", "pending_ae", "authorized")


class ModelError(ValueError):
    """A value lies outside the domain its mode or topology allows."""


@dataclass(frozen=True)
class Mode:
    kind: str
    n_procs: int
    # Extra Gd conjuncts that close the sn-alias deadlocks; False gives the guard as printed.
    strict_gd: bool = True

    def __post_init__(self):
        if self.kind not in ("unbounded", "bounded"):
            raise ModelError(f"mode kind must be 'unbounded' or 'bounded', got {self.kind!r}")
        if self.n_procs < 1:
            raise ModelError("n_procs must be >= 1")

    @property
    def bounded(self) -> bool:
        return self.kind == "bounded"

    @property
    def modulus(self) -> int:
        return self.n_procs * self.n_procs + 1

    @property
    def counter_max(self) -> int:
        """Largest legal otsn/ctsn value (bounded mode)."""
        return self.n_procs * self.n_procs


@dataclass(frozen=True)
class Topology:
    n: int
    edges: frozenset
    nbrs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("topology needs at least one process")
        norm = set()
        for e in self.edges:
            a, b = (int(x) for x in e)
            for x in (a, b):
                if not 0 <= x < self.n:
                    raise ModelError(f"edge ({a}, {b}) names process {x}, outside 0..{self.n - 1}")
            if a == b:
                raise ModelError(f"self-loop on process {a}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [[] for _ in range(self.n)]
        for a, b in norm:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "nbrs", tuple(tuple(sorted(x)) for x in adj))
        if len(self.components(range(self.n))) != 1:
            raise ModelError("topology is not connected")

    @classmethod
    def line(cls, n: int) -> "Topology":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def ring(cls, n: int) -> "Topology":
        return cls(n, frozenset((i, (i + 1) % n) for i in range(n)) if n > 2 else frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def star(cls, n: int) -> "Topology":
        return cls(n, frozenset((0, i) for i in range(1, n)))

    @classmethod
    def random_tree(cls, n: int, rng) -> "Topology":
        """Uniform attachment tree: node i links to a random earlier node."""
        return cls(n, frozenset((int(rng.integers(i)), i) for i in range(1, n)))

    def components(self, members) -> list[list[int]]:
        """Connected components of the subgraph induced by ``members``."""
        members = set(members)
        seen, out = set(), []
        for s in sorted(members):
            if s in seen:
                continue
            comp, queue = [], deque([s])
            seen.add(s)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for v in self.nbrs[u]:
                    if v in members and v not in seen:
                        seen.add(v)
                        queue.append(v)
            out.append(sorted(comp))
        return out


@dataclass(frozen=True)
class Configuration:
    topology: Topology
    mode: Mode
    procs: tuple

    def __post_init__(self):
        if len(self.procs) != self.topology.n:
            raise ModelError(f"configuration has {len(self.procs)} processes, topology has {self.topology.n}")
        if self.mode.n_procs != self.topology.n:
            raise ModelError("mode.n_procs differs from topology size")

    def __getitem__(self, pid: int) -> ProcState:
        return self.procs[pid]

    @property
    def n(self) -> int:
        return self.topology.n

    def alive_ids(self) -> list[int]:
        return [p.pid for p in self.procs if p.alive]

    def replace(self, pid: int, **changes) -> "Configuration":
        procs = list(self.procs)
        procs[pid] = procs[pid]._replace(**changes)
        return Configuration(self.topology, self.mode, tuple(procs))

    def with_procs(self, procs) -> "Configuration":
        return Configuration(self.topology, self.mode, tuple(procs))


def validate_proc(ps: ProcState, mode: Mode, n: int) -> None:
    """Raise ModelError if ``ps`` lies outside the domains of ``mode``."""
    if not 0 <= ps.pid < n:
        raise ModelError(f"pid {ps.pid} outside 0..{n - 1}")
    for name in ("parent", "leader"):
        v = getattr(ps, name)
        if not 0 <= v < n:
            raise ModelError(f"process {ps.pid}: {name}={v} outside 0..{n - 1}")
    if not 0 <= ps.dist <= n:
        raise ModelError(f"process {ps.pid}: dist={ps.dist} outside 0..{n}")
    if not isinstance(ps.status, Status):
        raise ModelError(f"process {ps.pid}: bad status {ps.status!r}")
    if ps.res not in (0, 1):
        raise ModelError(f"process {ps.pid}: res={ps.res} outside {{0,1}}")
    if mode.bounded:
        if ps.sn not in (0, 1):
            raise ModelError(f"process {ps.pid}: sn={ps.sn} outside {{0,1}} in bounded mode")
        for name in ("otsn", "ctsn"):
            v = getattr(ps, name)
            if not 0 <= v <= mode.counter_max:
                raise ModelError(f"process {ps.pid}: {name}={v} outside 0..{mode.counter_max}")
    else:
        for name in ("sn", "otsn", "ctsn"):
            if getattr(ps, name) < 0:
                raise ModelError(f"process {ps.pid}: {name} must be non-negative")
    if ps.authorized and ps.parent != ps.pid:
        raise ModelError(f"process {ps.pid}: authorized but not a root")


def validate_config(config: Configuration) -> None:
    for i, ps in enumerate(config.procs):
        if ps.pid != i:
            raise ModelError(f"process at index {i} carries pid {ps.pid}")
        validate_proc(ps, config.mode, config.n)
