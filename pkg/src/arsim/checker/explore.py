"""Exhaustive small-scope analysis: closure of a predicate and fair reachability.

Both analyses work on tuples of :class:`ProcState` and lean on two
reductions for unbounded mode:

* Guards only compare ``sn`` values for equality and ``otsn``/``ctsn`` for
  order, and statements only copy, take maxima or add one.  Shifting every
  alive ``sn`` by a common constant (and likewise every alive counter)
  therefore maps executions onto executions, so states are stored with the
  smallest alive ``sn`` and the smallest alive counter at 0.
* Dead processes are never read, so their state is replaced by a fixed
  placeholder.

With ``n`` processes, ``sn`` drawn from ``{0, .., n-1}`` already realises
every equality pattern, so the default sub-domain ``{0, 1, 2}`` is complete
for up to three processes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..core import STUTTER, TREE, enabled
from ..model import Configuration, Mode, ProcState, Status, Topology
from ..simulator import enabled_moves, fire
from ..tree import bfs_tree, current_leader, tree_enabled
from .predicates import Pred, predicate_fn
from .report import CheckReport, StateBoundExceeded

R, S, BOT, TOP = Status.RESTORE, Status.STABLE, Status.BOTTOM, Status.TOP
DEFAULT_MAX_STATES = 2_000_000


# -- state normal form --------------------------------------------------------

def dead_placeholder(pid: int) -> ProcState:
    return ProcState(pid, pid, pid, 0, R, 0, 0, 0, 0, alive=False)


def canonical(procs: tuple, mode: Mode) -> tuple:
    """Normal form of a state: dead processes blanked, unbounded values shifted."""
    alive = [p for p in procs if p.alive]
    if len(alive) < len(procs):
        procs = tuple(p if p.alive else dead_placeholder(p.pid) for p in procs)
    if mode.bounded or not alive:
        return procs
    ds = min(p.sn for p in alive)
    dc = min(min(p.otsn, p.ctsn) for p in alive)
    if ds == 0 and dc == 0:
        return procs
    return tuple(p._replace(sn=p.sn - ds, otsn=p.otsn - dc, ctsn=p.ctsn - dc) if p.alive else p
                 for p in procs)


# -- enumeration of predicate states ------------------------------------------

def _local_states(topology, j, counters, *, tree, sn_values, dist_values, statuses,
                  pending, authorized) -> list:
    """Alive states of process ``j`` over the given sub-domains."""
    if tree == "fixpoint":
        choices = [bfs_tree(topology, range(topology.n))[j]]
    elif tree == "free":
        parents = (j,) + topology.nbrs[j]
        choices = [(l, par, d) for l in range(topology.n) for par in parents for d in dist_values]
    else:
        raise ValueError(f"tree must be 'free' or 'fixpoint', not {tree!r}")
    out = []
    for (l, par, d), st, sn, (o, ct), res, pend, auth in itertools.product(
            choices, statuses, sn_values, counters, (0, 1), pending, authorized):
        if auth and par != j:
            continue
        out.append(ProcState(j, par, l, d, st, sn, o, ct, res, True, pend, auth))
    return out


def _statuses_for(p: Pred) -> tuple:
    if p in (Pred.T, Pred.S1):
        return (R, S)
    if p == Pred.S2:
        return (BOT, TOP)
    return (R, S, BOT, TOP)


def _default_counters(mode: Mode) -> tuple:
    return tuple(range(mode.modulus)) if mode.bounded else (0, 1, 2)


def _default_sn(mode: Mode) -> tuple:
    return (0, 1) if mode.bounded else (0, 1, 2)


def enumerate_states(topology: Topology, mode: Mode, p=None, *, tree: str = "free",
                     sn_values=None, counter_values=None, dist_values=None,
                     pending=(False,), authorized=(False,), statuses=None,
                     allow_dead: bool = False, max_states: int = DEFAULT_MAX_STATES) -> list:
    """All canonical states over the given sub-domains that satisfy ``p``.

    ``tree="free"`` lets parent range over the process and its neighbours,
    leader over all ids and dist over ``dist_values`` (default ``0..N``);
    ``tree="fixpoint"`` pins the tree variables to the breadth-first tree.
    Counters obey ``otsn = ctsn`` everywhere when ``p`` is T or S1.
    """
    p = Pred.parse(p) if p is not None else None
    n = topology.n
    sn_values = tuple(sn_values) if sn_values is not None else _default_sn(mode)
    counter_values = tuple(counter_values) if counter_values is not None else _default_counters(mode)
    dist_values = tuple(dist_values) if dist_values is not None else tuple(range(n + 1))
    if statuses is None:
        statuses = _statuses_for(p) if p is not None else (R, S, BOT, TOP)
    equal_counters = p in (Pred.T, Pred.S1)
    if equal_counters and not mode.bounded:
        # translation invariance: one common counter value represents all
        counter_values = counter_values[:1]
    counters = ([(c, c)] for c in counter_values) if equal_counters else \
        [list(itertools.product(counter_values, repeat=2))]
    common = dict(tree=tree, sn_values=sn_values, dist_values=dist_values, statuses=statuses,
                  pending=pending, authorized=authorized)
    per_c = [[_local_states(topology, j, cs, **common) + ([dead_placeholder(j)] if allow_dead else [])
              for j in range(n)] for cs in counters]
    estimate = sum(int(np.prod([len(x) for x in lists], dtype=float)) for lists in per_c)
    if estimate > max_states:
        raise StateBoundExceeded("state enumeration", estimate, max_states)
    pred = predicate_fn(p) if p is not None else None
    seen = set()
    out = []
    for lists in per_c:
        for procs in itertools.product(*lists):
            if not any(q.alive for q in procs):
                continue
            key = canonical(procs, mode)
            if key in seen:
                continue
            seen.add(key)
            if pred is None or pred(Configuration(topology, mode, key)):
                out.append(key)
    return out


# -- closure ------------------------------------------------------------------

def fault_successors(config: Configuration, *, sn_values, status_faults) -> list:
    """``(label, procs)`` for every single fail-stop or transient corruption."""
    mode, n = config.mode, config.n
    out = []
    domains = {
        "parent": range(n), "leader": range(n), "dist": range(n + 1),
        "sn": sn_values, "res": (0, 1), "status": status_faults,
    }
    if mode.bounded:
        domains["otsn"] = domains["ctsn"] = range(mode.modulus)
    for q in config.procs:
        if not q.alive:
            continue
        procs = list(config.procs)
        procs[q.pid] = q._replace(alive=False, pending_ae=False, authorized=False)
        out.append((f"failstop({q.pid})", tuple(procs)))
        for name, dom in domains.items():
            cur = getattr(q, name)
            for v in dom:
                if v == cur:
                    continue
                new = q._replace(**{name: v})
                if new.authorized and new.parent != new.pid:
                    new = new._replace(authorized=False)
                procs = list(config.procs)
                procs[q.pid] = new
                out.append((f"corrupt({q.pid},{name},{int(v)})", tuple(procs)))
    return out


def _describe(procs) -> list:
    return [dict(p._asdict(), status=p.status.name) for p in procs]


def check_closure(topology: Topology, p, mode: Mode, with_faults: bool = False, *,
                  include_ae: bool = False, tree: str = "free", status_faults=None,
                  sn_values=None, counter_values=None, dist_values=None,
                  authorized=(False,), max_states: int = DEFAULT_MAX_STATES) -> CheckReport:
    """Does every step from a ``p``-state land in ``p``?

    Steps are all enabled protocol actions (no priority filter), tree
    corrections and, with ``include_ae``, auditable events; AR1/B1 can only
    fire when ``include_ae`` puts ``pending_ae`` in the enumerated domain.
    ``with_faults`` adds every single fail-stop and transient corruption;
    ``status_faults`` limits corrupted status values (default Restore and
    Stable, the corruptions that leave a state's status inside T's range).

    T is checked one closed neighbourhood at a time.  It is a conjunction of
    per-process conditions sharing one counter value, every step changes a
    single process, and that process's moves read nothing outside its closed
    neighbourhood.  For T, ``dist`` is also pinned to 0 unless given: neither
    T nor any protocol guard reads it, and tree corrections never touch
    status or counters.
    """
    p = Pred.parse(p)
    status_faults = tuple(Status.parse(s) for s in (status_faults or (R, S)))
    sn_values = tuple(sn_values) if sn_values is not None else _default_sn(mode)
    pending = (False, True) if include_ae else (False,)
    if p == Pred.T:
        return _closure_t(topology, mode, with_faults, include_ae=include_ae, tree=tree,
                          status_faults=status_faults, sn_values=sn_values,
                          counter_values=counter_values,
                          dist_values=(0,) if dist_values is None else dist_values,
                          pending=pending, authorized=authorized, max_states=max_states)
    states = enumerate_states(topology, mode, p, tree=tree, sn_values=sn_values,
                              counter_values=counter_values, dist_values=dist_values,
                              pending=pending, authorized=authorized, allow_dead=with_faults,
                              max_states=max_states)
    pred = predicate_fn(p)
    cache = {}

    def holds(procs):
        key = canonical(procs, mode)
        v = cache.get(key)
        if v is None:
            v = cache[key] = pred(Configuration(topology, mode, key))
        return v

    for key in states:
        cache[key] = True
    n_succ = 0
    for key in states:
        config = Configuration(topology, mode, key)
        succ = [(f"{label}@{pid}", fire(config, pid, label)[0].procs)
                for pid, label in enabled_moves(config, priority=False)]
        if include_ae:
            succ.extend((f"ae@{q.pid}", config.replace(q.pid, pending_ae=True).procs)
                        for q in key if q.alive and not q.pending_ae)
        if with_faults:
            succ.extend(fault_successors(config, sn_values=sn_values, status_faults=status_faults))
        n_succ += len(succ)
        for label, procs in succ:
            if not holds(procs):
                return _closure_fail(p, key, label, procs, {"states": len(states), "successors": n_succ})
    return CheckReport("pass", None, {"states": len(states), "successors": n_succ},
                       detail=f"{p.value} closed over {len(states)} states")


def _closure_fail(p, key, label, procs, stats) -> CheckReport:
    return CheckReport("fail", {"state": _describe(key), "step": label, "successor": _describe(procs)},
                       stats, detail=f"{p.value} is not closed: {label} leaves it")


def _closure_t(topology, mode, with_faults, *, include_ae, tree, status_faults, sn_values,
               counter_values, dist_values, pending, authorized, max_states) -> CheckReport:
    n = topology.n
    counter_values = tuple(counter_values) if counter_values is not None else _default_counters(mode)
    if not mode.bounded:
        counter_values = counter_values[:1]
    common = dict(tree=tree, sn_values=sn_values, dist_values=dist_values, statuses=(R, S),
                  pending=pending, authorized=authorized)

    def local_ok(q, c):
        return not q.alive or (q.status in (R, S) and q.otsn == c and q.ctsn == c)

    n_states = n_succ = 0
    for c in counter_values:
        locals_ = [_local_states(topology, j, [(c, c)], **common) for j in range(n)]
        # faults and auditable events touch one process and read nobody else
        for j in range(n):
            for q in locals_[j]:
                procs = tuple(q if k == j else dead_placeholder(k) for k in range(n))
                config = Configuration(topology, mode, procs)
                succ = []
                if include_ae and not q.pending_ae:
                    succ.append((f"ae@{j}", config.replace(j, pending_ae=True).procs))
                if with_faults:
                    succ.extend(fault_successors(config, sn_values=sn_values,
                                                 status_faults=status_faults))
                n_succ += len(succ)
                for label, after in succ:
                    if not local_ok(after[j], c):
                        return _closure_fail(Pred.T, procs, label, after,
                                             {"states": n_states, "successors": n_succ})
        # protocol and tree moves at j read only j's closed neighbourhood
        for j in range(n):
            hood = (j,) + topology.nbrs[j]
            doms = [locals_[k] + ([dead_placeholder(k)] if with_faults and k != j else [])
                    for k in hood]
            estimate = int(np.prod([len(d) for d in doms], dtype=float))
            if n_states + estimate > max_states:
                raise StateBoundExceeded("closure enumeration", n_states + estimate, max_states)
            base = [dead_placeholder(k) for k in range(n)]
            for combo in itertools.product(*doms):
                for k, q in zip(hood, combo):
                    base[k] = q
                procs = tuple(base)
                config = Configuration(topology, mode, procs)
                n_states += 1
                moves = enabled(config, j)
                if tree_enabled(config, j):
                    moves.append(TREE)
                for label in moves:
                    n_succ += 1
                    after = fire(config, j, label)[0].procs
                    if not local_ok(after[j], c):
                        return _closure_fail(Pred.T, procs, f"{label}@{j}", after,
                                             {"states": n_states, "successors": n_succ})
    return CheckReport("pass", None, {"states": n_states, "successors": n_succ},
                       detail=f"T closed over {n_states} neighbourhood states")


# -- fair reachability --------------------------------------------------------

ENV_EVENTS = ("authorize_on_s2", "authorize", "ae")


def _as_pred(x) -> Optional[Callable]:
    if x is None or callable(x):
        return x
    return predicate_fn(x)


def env_successors(config: Configuration, env) -> list:
    """Environment moves enabled in ``config`` under the alphabet ``env``."""
    out = []
    pending = any(q.alive and q.pending_ae for q in config.procs)
    if "authorize" in env or "authorize_on_s2" in env:
        leader = current_leader(config)
        if leader is not None and not config.procs[leader].authorized:
            ok = "authorize" in env
            if not ok and not pending:
                ok = predicate_fn(Pred.S2)(config)
            if ok:
                out.append(("authorize", leader, config.replace(leader, authorized=True).procs))
    if "ae" in env:
        for q in config.procs:
            if q.alive and not q.pending_ae:
                out.append(("ae", q.pid, config.replace(q.pid, pending_ae=True).procs))
    return out


@dataclass
class ExploreResult:
    report: CheckReport
    nodes: Optional[list] = None
    edges: Optional[set] = None

    @property
    def verdict(self) -> str:
        return self.report.verdict


def explore(topology: Topology, mode: Mode, init_states, target=None, *, forbidden=None,
            env=("authorize_on_s2",), max_states: int = DEFAULT_MAX_STATES,
            keep_graph: bool = False) -> ExploreResult:
    """Breadth-first search of the transition graph from ``init_states``.

    The relation is the scheduler's: protocol and tree moves with AR2/AR6
    (B2/B6) priority, a stutter self-loop where nothing is enabled, plus the
    environment moves named in ``env``.  Target states are not expanded.
    The verdict is ``fail`` when a ``forbidden`` state is reachable without
    passing through the target, or when the non-target part of the graph has
    a strongly connected component with no edge leaving it: a run can stay
    there forever while every enabled move keeps firing.
    """
    env = tuple(env)
    for e in env:
        if e not in ENV_EVENTS:
            raise ValueError(f"unknown environment event {e!r}")
    is_target = _as_pred(target)
    is_forbidden = _as_pred(forbidden)
    index = {}
    nodes, parent, depth, tgt = [], [], [], []
    src, dst = [], []
    labels = set() if keep_graph else None

    def add(procs, par, d):
        key = canonical(procs, mode)
        i = index.get(key)
        if i is None:
            if len(nodes) >= max_states:
                raise StateBoundExceeded("exploration", len(nodes) + 1, max_states)
            i = index[key] = len(nodes)
            nodes.append(key)
            parent.append(par)
            depth.append(d)
            tgt.append(None)
        return i

    for s in init_states:
        add(s.procs if isinstance(s, Configuration) else tuple(s), -1, 0)
    n_init = len(nodes)
    bad = None
    head = 0
    while head < len(nodes):
        i = head
        head += 1
        config = Configuration(topology, mode, nodes[i])
        hit = bool(is_target(config)) if is_target else False
        tgt[i] = hit
        if is_forbidden and not hit and is_forbidden(config):
            bad = i
            break
        if hit:
            continue
        succ = [(label, pid, fire(config, pid, label)[0].procs)
                for pid, label in enabled_moves(config)]
        succ.extend(env_successors(config, env))
        if not succ:
            succ = [(STUTTER, None, nodes[i])]
        for label, pid, procs in succ:
            k = add(procs, i, depth[i] + 1)
            src.append(i)
            dst.append(k)
            if keep_graph:
                labels.add((i, k, label, pid))

    def path_to(i):
        out = []
        while i != -1:
            out.append(i)
            i = parent[i]
        return [_describe(nodes[k]) for k in reversed(out)]

    stats = {"states": len(nodes), "initial": n_init, "edges": len(src),
             "target_states": int(sum(1 for t in tgt if t)), "diameter": max(depth, default=0)}
    if bad is not None:
        rep = CheckReport("fail", {"kind": "forbidden", "path": path_to(bad)}, stats,
                          detail="a forbidden state is reachable before the target")
        return ExploreResult(rep, nodes if keep_graph else None, labels)

    verdict, witness, detail = "pass", None, "graph explored"
    if is_target is not None:
        n = len(nodes)
        keep = np.array([not t for t in tgt], dtype=bool)
        s, d = np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)
        inner = keep[s] & keep[d]
        g = csr_matrix((np.ones(int(inner.sum()), dtype=np.int8), (s[inner], d[inner])), shape=(n, n))
        _, comp = connected_components(g, directed=True, connection="strong")
        comp = np.where(keep, comp, -1)
        # a component is left by any edge into another component or into the target
        leaves = np.zeros(comp.max() + 2 if n else 1, dtype=bool)
        exiting = comp[s] != comp[d]
        leaves[comp[s][exiting & keep[s]]] = True
        trapped = [c for c in np.unique(comp[keep]) if not leaves[c]]
        stats["trap_components"] = len(trapped)
        if trapped:
            members = np.flatnonzero(comp == trapped[0])
            first = int(members[np.argmin(np.asarray(depth)[members])])
            verdict = "fail"
            witness = {"kind": "trap", "component_size": int(members.size),
                       "path": path_to(first)}
            detail = f"{len(trapped)} closed component(s) avoid the target"
        else:
            detail = "every fair path reaches the target"
    rep = CheckReport(verdict, witness, stats, detail=detail)
    return ExploreResult(rep, nodes if keep_graph else None, labels)
