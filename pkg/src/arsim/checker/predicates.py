"""State predicates S1, T, AS, S2 and the bounded-mode variants AS', AS''."""

from __future__ import annotations

from enum import Enum

from ..core import gd
from ..model import Configuration, Status
from ..tree import is_tree_silent, tree_root_of

R, S, BOT, TOP = Status.RESTORE, Status.STABLE, Status.BOTTOM, Status.TOP


class Pred(str, Enum):
    S1 = "S1"
    S2 = "S2"
    T = "T"
    AS = "AS"
    AS_PRIME = "ASprime"
    AS_DOUBLE_PRIME = "ASdoubleprime"
    TREE_SILENT = "TreeSilent"

    @classmethod
    def parse(cls, name) -> "Pred":
        if isinstance(name, cls):
            return name
        aliases = {"AS'": cls.AS_PRIME, "AS''": cls.AS_DOUBLE_PRIME}
        if name in aliases:
            return aliases[name]
        for p in cls:
            if p.value.lower() == str(name).lower():
                return p
        raise ValueError(f"unknown predicate {name!r}")


def _alive(config):
    return [p for p in config.procs if p.alive]


def counters_equal(config: Configuration) -> bool:
    """Every alive otsn equals every alive ctsn."""
    vals = {p.otsn for p in config.procs if p.alive} | {p.ctsn for p in config.procs if p.alive}
    return len(vals) <= 1


def in_t(config: Configuration) -> bool:
    alive = _alive(config)
    return counters_equal(config) and all(p.status in (R, S) for p in alive)


def tree_formed(config: Configuration) -> bool:
    """Tree layer silent and every alive l.j names the root its parent chain reaches."""
    if not is_tree_silent(config):
        return False
    for p in _alive(config):
        root = tree_root_of(config, p.pid)
        if root is None or p.leader != root:
            return False
    return True


def in_s1(config: Configuration) -> bool:
    if not in_t(config):
        return False
    if not all(gd(config, p.pid) for p in _alive(config)):
        return False
    return tree_formed(config)


def leader_clause(config: Configuration, pid: int) -> bool:
    """``P.j = j and st.j = TOP  =>  every alive otsn.k is caught up with otsn.j``."""
    me = config.procs[pid]
    if not (me.alive and me.parent == pid and me.status == TOP):
        return True
    mode = config.mode
    if mode.bounded:
        m, n = mode.modulus, mode.n_procs
        return all((p.otsn - me.otsn) % m <= n for p in _alive(config))
    return all(p.otsn >= me.otsn for p in _alive(config))


def in_s2(config: Configuration) -> bool:
    alive = _alive(config)
    if not all(p.status in (BOT, TOP) for p in alive):
        return False
    return all(leader_clause(config, p.pid) for p in alive)


def in_as(config: Configuration) -> bool:
    alive = _alive(config)
    if not alive:
        return True
    return max(p.otsn for p in alive) >= max(p.ctsn for p in alive)


def _as_window(config: Configuration, width: int) -> bool:
    if not config.mode.bounded:
        raise ValueError("AS' and AS'' are defined for bounded mode only")
    alive = _alive(config)
    if not alive:
        return True
    m = config.mode.modulus
    top = max(p.ctsn for p in alive)
    return all((p.otsn - top) % m <= width for p in alive)


def in_as_prime(config: Configuration) -> bool:
    return _as_window(config, 1)


def in_as_double_prime(config: Configuration) -> bool:
    return _as_window(config, config.mode.n_procs)


_EVAL = {
    Pred.S1: in_s1,
    Pred.S2: in_s2,
    Pred.T: in_t,
    Pred.AS: in_as,
    Pred.AS_PRIME: in_as_prime,
    Pred.AS_DOUBLE_PRIME: in_as_double_prime,
    Pred.TREE_SILENT: is_tree_silent,
}


def eval_predicate(config: Configuration, p) -> bool:
    return _EVAL[Pred.parse(p)](config)


def predicate_fn(p):
    return _EVAL[Pred.parse(p)]
